#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdfs/common.hpp"

namespace mdfs {

/// Probability vector with K >= 2 bins summing to 1 (within 1e-9).
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

/// Strictly positive class priors summing to 1 (within 1e-12).
class ClassPriors {
 public:
  explicit ClassPriors(std::vector<double> priors);
  static ClassPriors uniform(std::size_t n);
  /// Normalizes non-negative weights (e.g. document counts).
  static ClassPriors from_counts(std::span<const std::size_t> counts);

  std::size_t size() const noexcept { return priors_.size(); }
  std::span<const double> values() const noexcept { return priors_; }
  double operator[](std::size_t i) const { return priors_[i]; }

 private:
  std::vector<double> priors_;
};

struct NoncentralityInputs {
  DiscreteDistribution p_hat;
  DiscreteDistribution p_ref;
  double length = 1.0;
};

// Natural-log measures. Terms with p_i = 0 contribute 0; p_i > 0 with q_i = 0
// raises UndefinedDivergence.
double kl(std::span<const double> p, std::span<const double> q);
double jeffreys(std::span<const double> p, std::span<const double> q);

double kl(const DiscreteDistribution& p, const DiscreteDistribution& q);
double jeffreys(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Two-bin KL between [p, 1-p] and [q, 1-q].
double kl_two_bin(double p, double q);
/// Two-bin J-divergence between [p, 1-p] and [q, 1-q].
double jeffreys_two_bin(double p, double q);

/// Prior-weighted mixture of the entries of `column` over every class except
/// `excluded`, with weights renormalized over the remaining classes.
double pooled_complement(std::span<const double> column, const ClassPriors& priors,
                         std::size_t excluded);

/// Jeffreys-Multi-Hypothesis divergence: sum over classes of
/// KL(row_c, prior-weighted mixture of the other rows).
double jmh(const Matrix& theta, const ClassPriors& priors);

/// Pearson chi-square term (l/2) sum (p_hat - q)^2 / q plus Neyman term
/// (l/2) sum (p_hat - q)^2 / p_hat.
double noncentrality_j(std::span<const double> p_hat, std::span<const double> p_ref, double length);
double noncentrality_j(const NoncentralityInputs& inputs);

/// l * sum (p_hat - q)^2 / q.
double noncentrality_d(std::span<const double> p_hat, std::span<const double> p_ref, double length);

}  // namespace mdfs
