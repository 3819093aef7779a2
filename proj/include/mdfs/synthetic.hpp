#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mdfs/common.hpp"
#include "mdfs/corpus.hpp"

namespace mdfs {

struct DocLength {
  std::uint64_t min = 100;
  std::uint64_t max = 100;  // inclusive; equal bounds mean a fixed length
};

struct GeneratorSpec {
  Matrix theta_star;                       // N x M true term probabilities
  std::vector<double> priors;              // informational; counts are fixed
  DocLength doc_length;
  std::vector<std::size_t> docs_per_class;
  std::uint64_t seed = 1;

  std::size_t num_classes() const noexcept { return theta_star.rows(); }
  std::size_t vocab_size() const noexcept { return theta_star.cols(); }
};

/// N rows drawn from a symmetric Dirichlet(concentration). Small
/// concentrations give sparse rows; large ones approach the uniform 1/M.
Matrix random_theta(std::size_t num_classes, std::size_t vocab_size, double concentration,
                    std::uint64_t seed);

/// Fixed per-class document counts; each document draws its length and then
/// that many i.i.d. terms from its class row. Each document uses its own
/// generator seeded from (seed, document index). Vocabulary terms are
/// w0..w{M-1}, classes c0..c{N-1}.
LabeledCorpus sample_corpus(const GeneratorSpec& spec);

struct MonotonicitySummary {
  std::size_t trials = 0;
  std::size_t violations = 0;   // trials with any step decrease beyond 1e-9
  double max_violation = 0.0;   // largest J(step k) - J(step k+1) observed
  bool passed() const noexcept { return violations == 0; }
};

/// Draws smoothed 2 x M estimates (Laplace-smoothed counts from a sampled
/// corpus) and checks that greedy step divergences never decrease.
MonotonicitySummary theorem1_harness(std::size_t trials, std::size_t vocab_size, std::uint64_t seed);

}  // namespace mdfs
