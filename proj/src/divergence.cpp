#include "mdfs/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mdfs {

namespace {

void require_same_size(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::Precondition, "distributions differ in size (" +
                                             std::to_string(p.size()) + " vs " +
                                             std::to_string(q.size()) + ")");
  }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw Error(ErrorKind::Precondition, "distribution needs K >= 2 bins");
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorKind::Precondition, "negative or NaN probability");
  }
  if (std::fabs(compensated_sum(probs_) - 1.0) > 1e-9) {
    throw Error(ErrorKind::Precondition, "probabilities do not sum to 1");
  }
}

ClassPriors::ClassPriors(std::vector<double> priors) : priors_(std::move(priors)) {
  if (priors_.empty()) throw Error(ErrorKind::Precondition, "empty class priors");
  for (double p : priors_) {
    if (!(p > 0.0)) throw Error(ErrorKind::Precondition, "class priors must be positive");
  }
  if (std::fabs(compensated_sum(priors_) - 1.0) > 1e-12) {
    throw Error(ErrorKind::Precondition, "class priors do not sum to 1");
  }
}

ClassPriors ClassPriors::uniform(std::size_t n) {
  return ClassPriors(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ClassPriors ClassPriors::from_counts(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw Error(ErrorKind::Precondition, "class counts are all zero");
  std::vector<double> p;
  p.reserve(counts.size());
  for (auto c : counts) p.push_back(static_cast<double>(c) / static_cast<double>(total));
  return ClassPriors(std::move(p));
}

double kl(std::span<const double> p, std::span<const double> q) {
  require_same_size(p, q);
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0) {
      throw Error(ErrorKind::UndefinedDivergence, "q_" + std::to_string(i) + " = 0 where p > 0");
    }
    s.add(p[i] * std::log(p[i] / q[i]));
  }
  // Rounding can leave a tiny negative value for p ~= q.
  return std::max(0.0, s.value());
}

double jeffreys(std::span<const double> p, std::span<const double> q) {
  return kl(p, q) + kl(q, p);
}

double kl(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  return kl(p.probs(), q.probs());
}

double jeffreys(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  return jeffreys(p.probs(), q.probs());
}

double kl_two_bin(double p, double q) {
  const double pp[2] = {p, 1.0 - p};
  const double qq[2] = {q, 1.0 - q};
  return kl(pp, qq);
}

double jeffreys_two_bin(double p, double q) { return kl_two_bin(p, q) + kl_two_bin(q, p); }

double pooled_complement(std::span<const double> column, const ClassPriors& priors,
                         std::size_t excluded) {
  const std::size_t n = column.size();
  if (n < 2) throw Error(ErrorKind::Precondition, "pooled complement needs N >= 2");
  if (priors.size() != n) throw Error(ErrorKind::Precondition, "prior count does not match N");
  CompensatedSum mass;
  for (std::size_t k = 0; k < n; ++k) {
    if (k != excluded) mass.add(priors[k]);
  }
  const double denom = mass.value();
  CompensatedSum q;
  for (std::size_t k = 0; k < n; ++k) {
    if (k != excluded) q.add(priors[k] / denom * column[k]);
  }
  return q.value();
}

double jmh(const Matrix& theta, const ClassPriors& priors) {
  const std::size_t n = theta.rows();
  const std::size_t m = theta.cols();
  if (n < 2) throw Error(ErrorKind::Precondition, "JMH needs N >= 2");
  std::vector<double> mixture(m);
  CompensatedSum total;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < m; ++i) {
      mixture[i] = pooled_complement(theta.column(i), priors, c);
    }
    total.add(kl(theta.row(c), mixture));
  }
  return total.value();
}

double noncentrality_j(std::span<const double> p_hat, std::span<const double> p_ref,
                       double length) {
  require_same_size(p_hat, p_ref);
  if (!(length > 0.0)) throw Error(ErrorKind::Precondition, "length must be positive");
  CompensatedSum pearson;
  CompensatedSum neyman;
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    const double d = p_hat[i] - p_ref[i];
    if (p_ref[i] == 0.0 && p_hat[i] == 0.0) continue;
    if (p_ref[i] <= 0.0 || p_hat[i] <= 0.0) {
      throw Error(ErrorKind::UndefinedDivergence,
                  "zero probability in chi-square denominator at bin " + std::to_string(i));
    }
    pearson.add(d * d / p_ref[i]);
    neyman.add(d * d / p_hat[i]);
  }
  return 0.5 * length * pearson.value() + 0.5 * length * neyman.value();
}

double noncentrality_j(const NoncentralityInputs& inputs) {
  return noncentrality_j(inputs.p_hat.probs(), inputs.p_ref.probs(), inputs.length);
}

double noncentrality_d(std::span<const double> p_hat, std::span<const double> p_ref,
                       double length) {
  require_same_size(p_hat, p_ref);
  CompensatedSum pearson;
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    if (p_ref[i] <= 0.0) {
      throw Error(ErrorKind::UndefinedDivergence, "zero reference probability at bin " + std::to_string(i));
    }
    const double d = p_hat[i] - p_ref[i];
    pearson.add(d * d / p_ref[i]);
  }
  return length * pearson.value();
}

}  // namespace mdfs
