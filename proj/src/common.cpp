#include "mdfs/common.hpp"

namespace mdfs {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidSmoothing: return "InvalidSmoothing";
    case ErrorKind::UndefinedDivergence: return "UndefinedDivergence";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::UnknownMethod: return "UnknownMethod";
    case ErrorKind::BudgetOutOfRange: return "BudgetOutOfRange";
    case ErrorKind::EmptySubset: return "EmptySubset";
    case ErrorKind::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorKind::TooFewDocuments: return "TooFewDocuments";
    case ErrorKind::Precondition: return "Precondition";
  }
  return "Unknown";
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw Error(ErrorKind::InvalidModel, "ragged matrix rows");
    }
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
  return out;
}

}  // namespace mdfs
