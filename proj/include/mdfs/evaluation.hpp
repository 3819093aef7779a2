#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdfs/corpus.hpp"
#include "mdfs/nb_model.hpp"
#include "mdfs/ranking.hpp"

namespace mdfs {

/// counts(true, predicted).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes)
      : n_(num_classes), counts_(num_classes * num_classes, 0) {}

  std::size_t num_classes() const noexcept { return n_; }
  std::uint64_t operator()(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * n_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted);
  std::uint64_t total() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(std::span<const std::pair<std::size_t, std::size_t>> predictions,
                          std::size_t num_classes);

struct Metrics {
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
};

/// One-vs-rest precision/recall/F1 per class, averaged with `weights`
/// (class priors). Zero denominators give 0.
Metrics metrics(const ConfusionMatrix& cm, std::span<const double> weights);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified k-fold partition of document indices, deterministic in seed.
std::vector<Fold> kfold_split(const LabeledCorpus& corpus, std::size_t k, std::uint64_t seed);

/// Stratified single train/test split with roughly `test_fraction` of each
/// class held out (at least one training document per class is kept).
Fold holdout_split(const LabeledCorpus& corpus, double test_fraction, std::uint64_t seed);

/// Any classifier that can be trained on a feature subset.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(const LabeledCorpus& train, const std::vector<std::size_t>& features) = 0;
  virtual std::size_t predict(const SparseDocVector& doc) const = 0;
};

class MnbClassifier final : public Classifier {
 public:
  explicit MnbClassifier(Smoothing smoothing = {}, SubsetMode mode = SubsetMode::Discard)
      : smoothing_(smoothing), mode_(mode) {}
  void fit(const LabeledCorpus& train, const std::vector<std::size_t>& features) override;
  std::size_t predict(const SparseDocVector& doc) const override;

 private:
  Smoothing smoothing_;
  SubsetMode mode_;
  std::optional<SubsetModel> model_;
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;

struct SweepRow {
  Method method = Method::MD;
  std::size_t budget = 0;
  std::string fold;  // fold id, "holdout", or "mean"
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t train_docs = 0;
  std::size_t test_docs = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

struct Protocol {
  enum class Kind { KFold, Holdout, Presplit };
  Kind kind = Kind::KFold;
  std::size_t folds = 10;
  double test_fraction = 0.3;
  const LabeledCorpus* test_corpus = nullptr;  // Presplit only

  static Protocol kfold(std::size_t k) { return {Kind::KFold, k, 0.0, nullptr}; }
  static Protocol holdout(double fraction) { return {Kind::Holdout, 0, fraction, nullptr}; }
  static Protocol presplit(const LabeledCorpus& test) { return {Kind::Presplit, 0, 0.0, &test}; }
};

struct SweepOptions {
  RankOptions rank;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  SubsetMode subset_mode = SubsetMode::Discard;
  ClassifierFactory classifier;  // defaults to MnbClassifier with rank.smoothing and subset_mode
};

/// {10, 20, 50, 100, 200, 500, 1000, 2000} restricted to [1, M].
std::vector<std::size_t> default_budgets(std::size_t vocab_size);

/// For every (method, budget, fold): rank on the training part only, refit
/// on the top-r features, classify the test part. K-fold runs also emit
/// "mean" rows averaging the folds.
SweepReport sweep(const LabeledCorpus& corpus, const std::vector<Method>& methods,
                  std::vector<std::size_t> budgets, const Protocol& protocol,
                  const SweepOptions& options = {});

void write_sweep_csv(std::ostream& out, const SweepReport& report);

}  // namespace mdfs
