#include "mdfs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

namespace mdfs {

namespace {

// Uniform integer in [0, n) by rejection, so splits do not depend on the
// standard library's distribution implementation.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

std::vector<std::vector<std::size_t>> docs_by_class(const LabeledCorpus& corpus) {
  std::vector<std::vector<std::size_t>> by_class(corpus.num_classes());
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    by_class.at(corpus.docs[i].label_id).push_back(i);
  }
  return by_class;
}

double safe_ratio(double num, double denom) { return denom > 0.0 ? num / denom : 0.0; }

std::string format_metric(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

struct FoldResult {
  std::vector<SweepRow> rows;  // method-major, then budget
};

}  // namespace

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
  if (truth >= n_ || predicted >= n_) {
    throw Error(ErrorKind::Precondition, "class id out of range in confusion matrix");
  }
  ++counts_[truth * n_ + predicted];
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

ConfusionMatrix confusion(std::span<const std::pair<std::size_t, std::size_t>> predictions,
                          std::size_t num_classes) {
  ConfusionMatrix cm(num_classes);
  for (const auto& [truth, predicted] : predictions) cm.add(truth, predicted);
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm, std::span<const double> weights) {
  const std::size_t n = cm.num_classes();
  const std::uint64_t total = cm.total();
  if (total == 0) throw Error(ErrorKind::EmptyEvaluation, "no evaluated documents");
  if (weights.size() != n) throw Error(ErrorKind::Precondition, "weight count does not match N");
  Metrics m;
  m.precision.resize(n);
  m.recall.resize(n);
  m.f1.resize(n);
  std::uint64_t trace = 0;
  CompensatedSum wp, wr, wf;
  for (std::size_t c = 0; c < n; ++c) {
    const auto tp = static_cast<double>(cm(c, c));
    double predicted = 0.0, actual = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      predicted += static_cast<double>(cm(k, c));
      actual += static_cast<double>(cm(c, k));
    }
    trace += cm(c, c);
    m.precision[c] = safe_ratio(tp, predicted);  // TP / (TP + FP)
    m.recall[c] = safe_ratio(tp, actual);        // TP / (TP + FN)
    m.f1[c] = safe_ratio(2.0 * m.precision[c] * m.recall[c], m.precision[c] + m.recall[c]);
    wp.add(weights[c] * m.precision[c]);
    wr.add(weights[c] * m.recall[c]);
    wf.add(weights[c] * m.f1[c]);
  }
  m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  m.weighted_precision = wp.value();
  m.weighted_recall = wr.value();
  m.weighted_f1 = wf.value();
  return m;
}

std::vector<Fold> kfold_split(const LabeledCorpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::Precondition, "k-fold needs k >= 2");
  auto by_class = docs_by_class(corpus);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < k) {
      throw Error(ErrorKind::TooFewDocuments, "class '" + corpus.classes[c] + "' has " +
                                                  std::to_string(by_class[c].size()) +
                                                  " documents, fewer than k = " + std::to_string(k));
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(corpus.docs.size(), 0);
  std::size_t offset = 0;
  for (auto& ids : by_class) {
    shuffle(ids, rng);
    for (std::size_t j = 0; j < ids.size(); ++j) fold_of[ids[j]] = (offset + j) % k;
    offset = (offset + ids.size()) % k;
  }
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
    }
  }
  return folds;
}

Fold holdout_split(const LabeledCorpus& corpus, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::Precondition, "test fraction must lie in (0, 1)");
  }
  auto by_class = docs_by_class(corpus);
  std::mt19937_64 rng(seed);
  std::vector<char> is_test(corpus.docs.size(), 0);
  for (auto& ids : by_class) {
    shuffle(ids, rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(ids.size())));
    if (!ids.empty()) n_test = std::min(n_test, ids.size() - 1);
    for (std::size_t j = 0; j < n_test; ++j) is_test[ids[j]] = 1;
  }
  Fold fold;
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    (is_test[i] ? fold.test : fold.train).push_back(i);
  }
  if (fold.test.empty()) throw Error(ErrorKind::TooFewDocuments, "holdout split left no test documents");
  return fold;
}

void MnbClassifier::fit(const LabeledCorpus& train, const std::vector<std::size_t>& features) {
  model_.emplace(refit_on_subset(train, features, smoothing_, mode_));
}

std::size_t MnbClassifier::predict(const SparseDocVector& doc) const {
  if (!model_) throw Error(ErrorKind::Precondition, "classifier used before fit");
  return model_->classify(doc);
}

std::vector<std::size_t> default_budgets(std::size_t vocab_size) {
  std::vector<std::size_t> out;
  for (std::size_t r : {10, 20, 50, 100, 200, 500, 1000, 2000}) {
    if (r <= vocab_size) out.push_back(r);
  }
  if (out.empty()) out.push_back(vocab_size);
  return out;
}

SweepReport sweep(const LabeledCorpus& corpus, const std::vector<Method>& methods,
                  std::vector<std::size_t> budgets, const Protocol& protocol,
                  const SweepOptions& options) {
  if (methods.empty()) throw Error(ErrorKind::Precondition, "no methods to sweep");
  const std::size_t m = corpus.vocab_size();
  if (budgets.empty()) budgets = default_budgets(m);
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  for (std::size_t r : budgets) {
    if (r < 1 || r > m) {
      throw Error(ErrorKind::BudgetOutOfRange,
                  "budget " + std::to_string(r) + " outside [1, " + std::to_string(m) + "]");
    }
  }

  // Materialize (train, test) pairs.
  struct Split {
    LabeledCorpus train;
    LabeledCorpus test;
    std::string label;
  };
  std::vector<Split> splits;
  switch (protocol.kind) {
    case Protocol::Kind::KFold: {
      const auto folds = kfold_split(corpus, protocol.folds, options.seed);
      for (std::size_t f = 0; f < folds.size(); ++f) {
        splits.push_back({corpus.subset(folds[f].train), corpus.subset(folds[f].test), std::to_string(f)});
      }
      break;
    }
    case Protocol::Kind::Holdout: {
      const Fold fold = holdout_split(corpus, protocol.test_fraction, options.seed);
      splits.push_back({corpus.subset(fold.train), corpus.subset(fold.test), "holdout"});
      break;
    }
    case Protocol::Kind::Presplit: {
      if (protocol.test_corpus == nullptr) throw Error(ErrorKind::Precondition, "missing test corpus");
      if (protocol.test_corpus->vocab_size() != m ||
          protocol.test_corpus->num_classes() != corpus.num_classes()) {
        throw Error(ErrorKind::Precondition, "test corpus does not share the training vocabulary");
      }
      splits.push_back({corpus, *protocol.test_corpus, "holdout"});
      break;
    }
  }

  const ClassifierFactory factory = options.classifier
      ? options.classifier
      : ClassifierFactory([s = options.rank.smoothing, mode = options.subset_mode] {
          return std::make_unique<MnbClassifier>(s, mode);
        });

  auto run_split = [&](const Split& split) {
    FoldResult result;
    if (split.test.docs.empty()) throw Error(ErrorKind::EmptyEvaluation, "empty test split");
    const auto train_counts = split.train.class_doc_counts();
    std::vector<double> weights(train_counts.size());
    for (std::size_t c = 0; c < weights.size(); ++c) {
      weights[c] = static_cast<double>(train_counts[c]) / static_cast<double>(split.train.docs.size());
    }
    for (Method method : methods) {
      const FeatureRanking ranking = rank_features(split.train, method, options.rank);
      for (std::size_t r : budgets) {
        auto clf = factory();
        clf->fit(split.train, select_top(ranking, r));
        ConfusionMatrix cm(corpus.num_classes());
        for (const auto& doc : split.test.docs) cm.add(doc.label_id, clf->predict(doc));
        const Metrics mt = metrics(cm, weights);
        result.rows.push_back({method, r, split.label, mt.accuracy, mt.weighted_precision,
                               mt.weighted_recall, mt.weighted_f1, split.train.docs.size(),
                               split.test.docs.size()});
      }
    }
    return result;
  };

  std::vector<FoldResult> results(splits.size());
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, splits.size()));
  if (threads == 1) {
    for (std::size_t s = 0; s < splits.size(); ++s) results[s] = run_split(splits[s]);
  } else {
    std::vector<std::exception_ptr> errors(splits.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t s = t; s < splits.size(); s += threads) {
          try {
            results[s] = run_split(splits[s]);
          } catch (...) {
            errors[s] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SweepReport report;
  const std::size_t per_split = methods.size() * budgets.size();
  for (std::size_t cell = 0; cell < per_split; ++cell) {
    CompensatedSum acc, prec, rec, f1;
    double train_docs = 0.0, test_docs = 0.0;
    for (const auto& res : results) {
      const SweepRow& row = res.rows[cell];
      report.rows.push_back(row);
      acc.add(row.accuracy);
      prec.add(row.precision);
      rec.add(row.recall);
      f1.add(row.f1);
      train_docs += static_cast<double>(row.train_docs);
      test_docs += static_cast<double>(row.test_docs);
    }
    if (protocol.kind == Protocol::Kind::KFold) {
      const double k = static_cast<double>(results.size());
      const SweepRow& first = results.front().rows[cell];
      report.rows.push_back({first.method, first.budget, "mean", acc.value() / k, prec.value() / k,
                             rec.value() / k, f1.value() / k,
                             static_cast<std::size_t>(std::llround(train_docs / k)),
                             static_cast<std::size_t>(std::llround(test_docs / k))});
    }
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "method,r,fold,accuracy,precision,recall,f1,train_docs,test_docs\n";
  for (const auto& row : report.rows) {
    out << method_name(row.method) << ',' << row.budget << ',' << row.fold << ','
        << format_metric(row.accuracy) << ',' << format_metric(row.precision) << ','
        << format_metric(row.recall) << ',' << format_metric(row.f1) << ',' << row.train_docs << ','
        << row.test_docs << '\n';
  }
}

}  // namespace mdfs
