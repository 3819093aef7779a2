"""Maximum-discrimination feature selection for multinomial naive Bayes."""

from ._core import *  # noqa: F401,F403
from ._core import MdfsError

__all__ = [name for name in dir() if not name.startswith("_")]
