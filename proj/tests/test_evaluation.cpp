#include <doctest.h>

#include <algorithm>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "mdfs/evaluation.hpp"
#include "mdfs/synthetic.hpp"
#include "test_util.hpp"

using namespace mdfs;

namespace {

ConfusionMatrix cm_from(const std::vector<std::vector<std::uint64_t>>& rows) {
  ConfusionMatrix cm(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t p = 0; p < rows[t].size(); ++p) {
      for (std::uint64_t k = 0; k < rows[t][p]; ++k) cm.add(t, p);
    }
  }
  return cm;
}

// Two classes, one informative feature (index 0) and nine features with the
// same distribution in both classes.
LabeledCorpus known_optimum_corpus(std::size_t docs_per_class, std::uint64_t seed) {
  std::vector<std::vector<double>> rows(2, std::vector<double>(10, 0.0));
  for (std::size_t i = 1; i < 10; ++i) {
    rows[0][i] = 0.7 / 9.0;
    rows[1][i] = 0.97 / 9.0;
  }
  rows[0][0] = 0.3;
  rows[1][0] = 0.03;
  GeneratorSpec spec;
  spec.theta_star = Matrix::from_rows(rows);
  spec.doc_length = {20, 40};
  spec.docs_per_class = {docs_per_class, docs_per_class};
  spec.seed = seed;
  return sample_corpus(spec);
}

}  // namespace

TEST_CASE("confusion") {
  const std::vector<std::pair<std::size_t, std::size_t>> perfect{{0, 0}, {1, 1}, {2, 2}, {1, 1}};
  const auto cm = confusion(perfect, 3);
  CHECK(cm(1, 1) == 2);
  CHECK(cm(0, 1) == 0);
  CHECK(cm.total() == 4);
  const std::vector<std::pair<std::size_t, std::size_t>> one{{0, 1}};
  CHECK(confusion(one, 2)(0, 1) == 1);
  CHECK(confusion({}, 2).total() == 0);
  CHECK_THROWS_AS(confusion(std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}}, 2), Error);
}

TEST_CASE("metrics by hand") {
  // Class 0: TP 8, FP 2, FN 2.
  const auto cm = cm_from({{8, 2}, {2, 8}});
  const std::vector<double> w{0.5, 0.5};
  const auto m = metrics(cm, w);
  CHECK(m.precision[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.recall[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.f1[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.accuracy == doctest::Approx(0.8).epsilon(1e-15));

  SUBCASE("diagonal") {
    const auto d = metrics(cm_from({{3, 0, 0}, {0, 5, 0}, {0, 0, 1}}), std::vector<double>{0.2, 0.3, 0.5});
    CHECK(d.accuracy == 1.0);
    for (double f : d.f1) CHECK(f == 1.0);
    CHECK(d.weighted_f1 == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("weighted f1") {
    // Class 0 perfect, class 1: precision 1/3, recall 1 gives F1 0.5.
    const auto x = metrics(cm_from({{5, 0}, {0, 1}}), std::vector<double>{0.75, 0.25});
    CHECK(x.weighted_f1 == 1.0);
    const auto y = metrics(cm_from({{4, 2}, {0, 1}}), std::vector<double>{0.75, 0.25});
    CHECK(y.f1[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(y.precision[0] == 1.0);
    CHECK(y.recall[0] == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
    CHECK(y.f1[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(y.weighted_f1 == doctest::Approx(0.75 * 0.8 + 0.25 * 0.5).epsilon(1e-15));
    const std::vector<double> f1{1.0, 0.5};
    CHECK(0.75 * f1[0] + 0.25 * f1[1] == 0.875);
  }
  SUBCASE("zero denominators give zero") {
    const auto z = metrics(cm_from({{4, 0}, {3, 0}}), std::vector<double>{0.5, 0.5});
    CHECK(z.precision[1] == 0.0);
    CHECK(z.recall[1] == 0.0);
    CHECK(z.f1[1] == 0.0);
  }
  SUBCASE("empty") {
    try {
      metrics(ConfusionMatrix(2), std::vector<double>{0.5, 0.5});
      FAIL("expected EmptyEvaluation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyEvaluation);
    }
  }
}

TEST_CASE("property: accuracy equals prior-weighted recall with test priors") {
  std::mt19937_64 rng(30);
  std::uniform_int_distribution<int> cell(0, 9);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + t % 4;
    std::vector<std::vector<std::uint64_t>> rows(n, std::vector<std::uint64_t>(n));
    for (auto& r : rows) {
      for (auto& x : r) x = cell(rng);
    }
    rows[0][0] += 1;
    const auto cm = cm_from(rows);
    std::vector<double> w(n);
    for (std::size_t c = 0; c < n; ++c) {
      std::uint64_t s = 0;
      for (auto x : rows[c]) s += x;
      w[c] = static_cast<double>(s) / static_cast<double>(cm.total());
    }
    const auto m = metrics(cm, w);
    CHECK(m.weighted_recall == doctest::Approx(m.accuracy).epsilon(1e-12));
    for (std::size_t c = 0; c < n; ++c) {
      for (double v : {m.precision[c], m.recall[c], m.f1[c]}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      if (m.precision[c] + m.recall[c] == 0.0) CHECK(m.f1[c] == 0.0);
    }
  }
}

TEST_CASE("kfold split") {
  const auto corpus = known_optimum_corpus(2, 1);
  const auto folds = kfold_split(corpus, 2, 5);
  REQUIRE(folds.size() == 2);
  for (const auto& f : folds) {
    REQUIRE(f.test.size() == 2);
    CHECK(corpus.docs[f.test[0]].label_id != corpus.docs[f.test[1]].label_id);
  }

  SUBCASE("partition, stratification, determinism") {
    const auto big = known_optimum_corpus(23, 2);
    const auto a = kfold_split(big, 10, 42);
    const auto b = kfold_split(big, 10, 42);
    std::multiset<std::size_t> all;
    for (std::size_t f = 0; f < a.size(); ++f) {
      CHECK(a[f].test == b[f].test);
      CHECK(a[f].train.size() + a[f].test.size() == big.docs.size());
      all.insert(a[f].test.begin(), a[f].test.end());
      std::size_t c0 = 0;
      for (auto i : a[f].test) c0 += big.docs[i].label_id == 0;
      CHECK(c0 >= 2);
      CHECK(c0 <= 3);
      std::vector<std::size_t> inter;
      std::set_intersection(a[f].train.begin(), a[f].train.end(), a[f].test.begin(), a[f].test.end(),
                            std::back_inserter(inter));
      CHECK(inter.empty());
    }
    CHECK(all.size() == big.docs.size());
    CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == big.docs.size());
    const auto other = kfold_split(big, 10, 43);
    bool differs = false;
    for (std::size_t f = 0; f < a.size(); ++f) differs = differs || a[f].test != other[f].test;
    CHECK(differs);
  }
  SUBCASE("too few documents") {
    try {
      kfold_split(corpus, 3, 1);
      FAIL("expected TooFewDocuments");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TooFewDocuments);
    }
  }
}

TEST_CASE("holdout split") {
  const auto corpus = known_optimum_corpus(10, 3);
  const auto f = holdout_split(corpus, 0.3, 9);
  CHECK(f.test.size() == 6);
  CHECK(f.train.size() == 14);
  CHECK(holdout_split(corpus, 0.3, 9).test == f.test);
  CHECK_THROWS_AS(holdout_split(corpus, 1.0, 9), Error);
}

TEST_CASE("sweep") {
  const auto corpus = known_optimum_corpus(40, 4);

  SUBCASE("known optimum at budget 1") {
    for (Method m : {Method::MD, Method::MDGreedy, Method::MDChi2}) {
      CHECK(rank_features(corpus, m).order.front() == 0);
    }
    SweepOptions pooled;
    pooled.subset_mode = SubsetMode::PoolRest;
    const auto report =
        sweep(corpus, {Method::MD, Method::MDGreedy, Method::MDChi2}, {1}, Protocol::kfold(5), pooled);
    for (const auto& row : report.rows) {
      if (row.fold == "mean") CHECK(row.accuracy > 0.5 + 0.2);
    }
    // Dropping the rest leaves a single bin with theta = 1, so only the prior decides.
    const auto discard = sweep(corpus, {Method::MD}, {1}, Protocol::kfold(5));
    for (const auto& row : discard.rows) {
      if (row.fold == "mean") CHECK(row.accuracy == doctest::Approx(0.5));
    }
  }
  SUBCASE("row layout") {
    const auto report = sweep(corpus, {Method::MD, Method::DF}, {5, 1, 5}, Protocol::kfold(4));
    // 2 methods x 2 budgets x (4 folds + mean).
    REQUIRE(report.rows.size() == 20);
    CHECK(report.rows[0].method == Method::MD);
    CHECK(report.rows[0].budget == 1);
    CHECK(report.rows[0].fold == "0");
    CHECK(report.rows[4].fold == "mean");
    CHECK(report.rows[5].budget == 5);
    CHECK(report.rows[10].method == Method::DF);
    for (const auto& row : report.rows) {
      for (double v : {row.accuracy, row.precision, row.recall, row.f1}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
  SUBCASE("full budget equals full-vocabulary naive Bayes") {
    const auto report = sweep(corpus, {Method::MD}, {10}, Protocol::holdout(0.25), SweepOptions{});
    REQUIRE(report.rows.size() == 1);
    const auto fold = holdout_split(corpus, 0.25, 1);
    const auto model = fit(corpus.subset(fold.train));
    std::size_t correct = 0;
    for (auto i : fold.test) correct += model.classify(corpus.docs[i]) == corpus.docs[i].label_id;
    CHECK(report.rows[0].accuracy == doctest::Approx(double(correct) / fold.test.size()).epsilon(1e-15));
    CHECK(report.rows[0].fold == "holdout");
  }
  SUBCASE("threads do not change results") {
    SweepOptions one, four;
    four.threads = 4;
    const auto a = sweep(corpus, {Method::MD, Method::CHI}, {1, 3}, Protocol::kfold(5), one);
    const auto b = sweep(corpus, {Method::MD, Method::CHI}, {1, 3}, Protocol::kfold(5), four);
    std::ostringstream sa, sb;
    write_sweep_csv(sa, a);
    write_sweep_csv(sb, b);
    CHECK(sa.str() == sb.str());
  }
  SUBCASE("identical rankings give identical rows") {
    const auto report = sweep(corpus, {Method::MD, Method::MD}, {2}, Protocol::kfold(3));
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(report.rows[k].accuracy == report.rows[k + 4].accuracy);
      CHECK(report.rows[k].f1 == report.rows[k + 4].f1);
    }
  }
  SUBCASE("budget out of range") {
    try {
      sweep(corpus, {Method::MD}, {11}, Protocol::kfold(3));
      FAIL("expected BudgetOutOfRange");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BudgetOutOfRange);
    }
  }
  SUBCASE("presplit") {
    const auto test = known_optimum_corpus(10, 99);
    const auto report = sweep(corpus, {Method::GSS}, {2}, Protocol::presplit(test));
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].test_docs == 20);
    CHECK(report.rows[0].train_docs == 80);
  }
}

TEST_CASE("no test-set leakage") {
  const auto corpus = known_optimum_corpus(20, 6);
  const auto folds = kfold_split(corpus, 4, 1);
  auto mutated = corpus;
  for (auto i : folds[0].test) {
    mutated.docs[i].counts = {{3, 50}};
    mutated.docs[i].length = 50;
  }
  for (Method m : all_methods()) {
    const auto a = rank_features(corpus.subset(folds[0].train), m);
    const auto b = rank_features(mutated.subset(folds[0].train), m);
    CHECK(a.order == b.order);
    CHECK(a.scores == b.scores);
  }
  // The features handed to the classifier in fold 0 must not react to the
  // mutation either.
  struct Recorder final : Classifier {
    std::shared_ptr<std::vector<std::vector<std::size_t>>> log;
    void fit(const LabeledCorpus&, const std::vector<std::size_t>& features) override { log->push_back(features); }
    std::size_t predict(const SparseDocVector&) const override { return 0; }
  };
  auto selected = [&](const LabeledCorpus& c) {
    auto log = std::make_shared<std::vector<std::vector<std::size_t>>>();
    SweepOptions opts;
    opts.classifier = [log] {
      auto r = std::make_unique<Recorder>();
      r->log = log;
      return r;
    };
    sweep(c, {Method::MD, Method::CHI}, {3}, Protocol::kfold(4), opts);
    return *log;
  };
  const auto base = selected(corpus);
  const auto moved = selected(mutated);
  REQUIRE(base.size() == 8);
  // Fold 0 runs first for each method: entries 0 and 1 of the single-threaded log.
  CHECK(base[0] == moved[0]);
  CHECK(base[1] == moved[1]);
}

TEST_CASE("custom classifier factory") {
  struct Majority final : Classifier {
    std::size_t label = 0;
    void fit(const LabeledCorpus& train, const std::vector<std::size_t>&) override {
      const auto counts = train.class_doc_counts();
      label = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
    std::size_t predict(const SparseDocVector&) const override { return label; }
  };
  const auto corpus = known_optimum_corpus(10, 7);
  SweepOptions opts;
  opts.classifier = [] { return std::make_unique<Majority>(); };
  const auto report = sweep(corpus, {Method::DF}, {1}, Protocol::kfold(5), opts);
  CHECK(report.rows.back().accuracy == doctest::Approx(0.5));
}

TEST_CASE("sweep csv and default budgets") {
  CHECK(default_budgets(5000) == std::vector<std::size_t>{10, 20, 50, 100, 200, 500, 1000, 2000});
  CHECK(default_budgets(150) == std::vector<std::size_t>{10, 20, 50, 100});
  CHECK(default_budgets(4) == std::vector<std::size_t>{4});
  SweepReport r;
  r.rows.push_back({Method::MDChi2, 10, "mean", 0.5, 0.25, 0.125, 1.0, 9, 1});
  std::ostringstream out;
  write_sweep_csv(out, r);
  CHECK(out.str() ==
        "method,r,fold,accuracy,precision,recall,f1,train_docs,test_docs\n"
        "md-chi2,10,mean,0.500000,0.250000,0.125000,1.000000,9,1\n");
}
