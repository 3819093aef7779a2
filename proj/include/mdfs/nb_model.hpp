#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdfs/common.hpp"
#include "mdfs/corpus.hpp"

namespace mdfs {

/// Per-class term and document tallies (exact integers).
struct ClassCounts {
  std::size_t num_classes = 0;
  std::size_t vocab_size = 0;
  std::vector<std::uint64_t> term_counts;  // N x M row-major
  std::vector<std::uint64_t> class_totals;
  std::vector<std::size_t> doc_counts;

  std::uint64_t term_count(std::size_t c, std::size_t i) const {
    return term_counts[c * vocab_size + i];
  }
};

/// Additive smoothing p_ic = (l_ic + beta1) / (l_c + beta2). An unset beta2
/// means beta1 * M, which keeps every row a probability distribution.
struct Smoothing {
  double beta1 = 1.0;
  std::optional<double> beta2;

  double resolved_beta2(std::size_t vocab_size) const {
    return beta2 ? *beta2 : beta1 * static_cast<double>(vocab_size);
  }
};

class MnbModel {
 public:
  MnbModel() = default;
  /// `theta` rows must be strictly positive. `class_prior` entries may be 0
  /// (a class with no training documents is never predicted).
  MnbModel(Matrix theta, std::vector<double> class_prior, double beta1, double beta2,
           std::vector<std::string> class_names = {});

  /// Restores a model whose log priors are known exactly (CSV import).
  static MnbModel with_log_prior(Matrix theta, std::vector<double> class_log_prior, double beta1,
                                 double beta2, std::vector<std::string> class_names);

  std::size_t num_classes() const noexcept { return theta_.rows(); }
  std::size_t vocab_size() const noexcept { return theta_.cols(); }
  const Matrix& theta() const noexcept { return theta_; }
  const Matrix& log_theta() const noexcept { return log_theta_; }
  const std::vector<double>& class_prior() const noexcept { return class_prior_; }
  const std::vector<double>& class_log_prior() const noexcept { return class_log_prior_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  double beta1() const noexcept { return beta1_; }
  double beta2() const noexcept { return beta2_; }

  /// sum_i x_i log p_ic, multinomial coefficient omitted.
  double log_likelihood(const SparseDocVector& doc, std::size_t class_id) const;
  /// log-likelihood plus log prior for every class.
  std::vector<double> class_scores(const SparseDocVector& doc) const;
  /// MAP class; ties go to the lowest class id.
  std::size_t classify(const SparseDocVector& doc) const;

 private:
  Matrix theta_;
  Matrix log_theta_;
  std::vector<double> class_prior_;
  std::vector<double> class_log_prior_;
  std::vector<std::string> class_names_;
  double beta1_ = 1.0;
  double beta2_ = 0.0;
};

ClassCounts accumulate_counts(const LabeledCorpus& corpus);

MnbModel fit(const ClassCounts& counts, const Smoothing& smoothing = {});
MnbModel fit(const LabeledCorpus& corpus, const Smoothing& smoothing = {});

/// How counts of unselected features are treated when refitting.
/// Discard drops them; PoolRest keeps them as one extra "rest" bin, so a model
/// on r features is a multinomial over r + 1 bins.
enum class SubsetMode { Discard, PoolRest };

/// Model trained on a reduced vocabulary together with the full-to-reduced
/// index map, so documents over the full vocabulary can be classified.
class SubsetModel {
 public:
  SubsetModel(MnbModel model, std::vector<std::size_t> features, std::size_t full_vocab_size,
              SubsetMode mode = SubsetMode::Discard);

  const MnbModel& model() const noexcept { return model_; }
  const std::vector<std::size_t>& features() const noexcept { return features_; }
  SubsetMode mode() const noexcept { return mode_; }

  SparseDocVector project(const SparseDocVector& doc) const;
  std::size_t classify(const SparseDocVector& doc) const { return model_.classify(project(doc)); }

 private:
  MnbModel model_;
  std::vector<std::size_t> features_;
  std::vector<std::int64_t> reduced_index_;  // -1 for unselected features
  SubsetMode mode_;
};

/// Retrains on the vocabulary restricted to `features` (in the given order).
/// beta2 defaults to beta1 times the reduced vocabulary size.
SubsetModel refit_on_subset(const LabeledCorpus& corpus, const std::vector<std::size_t>& features,
                            const Smoothing& smoothing = {}, SubsetMode mode = SubsetMode::Discard);

void write_model_csv(std::ostream& out, const MnbModel& model);
MnbModel read_model_csv(std::istream& in);

}  // namespace mdfs
