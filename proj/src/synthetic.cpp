#include "mdfs/synthetic.hpp"

#include <algorithm>
#include <random>

#include "mdfs/nb_model.hpp"
#include "mdfs/ranking.hpp"

namespace mdfs {

namespace {

constexpr double kMonotoneTolerance = 1e-9;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Matrix random_theta(std::size_t num_classes, std::size_t vocab_size, double concentration,
                    std::uint64_t seed) {
  if (vocab_size < 2) throw Error(ErrorKind::Precondition, "random_theta needs M >= 2");
  if (!(concentration > 0.0)) throw Error(ErrorKind::Precondition, "concentration must be positive");
  Matrix theta(num_classes, vocab_size);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto rng = stream(seed, c);
    std::gamma_distribution<double> gamma(concentration, 1.0);
    // Tiny concentrations can underflow every draw; redraw in that case.
    double total = 0.0;
    while (!(total > 0.0)) {
      for (std::size_t i = 0; i < vocab_size; ++i) theta(c, i) = gamma(rng);
      total = compensated_sum(theta.row(c));
    }
    for (double& p : theta.row(c)) p /= total;
  }
  return theta;
}

LabeledCorpus sample_corpus(const GeneratorSpec& spec) {
  const std::size_t n = spec.num_classes();
  const std::size_t m = spec.vocab_size();
  if (n == 0 || m == 0) throw Error(ErrorKind::Precondition, "empty generator theta");
  if (spec.docs_per_class.size() != n) {
    throw Error(ErrorKind::Precondition, "docs_per_class must have one entry per class");
  }
  if (spec.doc_length.min > spec.doc_length.max) {
    throw Error(ErrorKind::Precondition, "doc length range is empty");
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (spec.docs_per_class[c] < 1) throw Error(ErrorKind::Precondition, "docs_per_class must be >= 1");
    for (double p : spec.theta_star.row(c)) {
      if (!(p >= 0.0)) throw Error(ErrorKind::Precondition, "negative theta entry");
    }
    if (std::fabs(compensated_sum(spec.theta_star.row(c)) - 1.0) > 1e-9) {
      throw Error(ErrorKind::Precondition, "theta row does not sum to 1");
    }
  }

  LabeledCorpus corpus;
  for (std::size_t c = 0; c < n; ++c) corpus.classes.push_back("c" + std::to_string(c));
  std::vector<std::discrete_distribution<std::uint32_t>> term_dist;
  term_dist.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto row = spec.theta_star.row(c);
    term_dist.emplace_back(row.begin(), row.end());
  }

  std::uint64_t doc_index = 0;
  std::vector<std::uint32_t> tally(m, 0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t d = 0; d < spec.docs_per_class[c]; ++d, ++doc_index) {
      auto rng = stream(spec.seed, doc_index);
      std::uint64_t length = spec.doc_length.min;
      if (spec.doc_length.max > spec.doc_length.min) {
        std::uniform_int_distribution<std::uint64_t> len(spec.doc_length.min, spec.doc_length.max);
        length = len(rng);
      }
      std::fill(tally.begin(), tally.end(), 0);
      for (std::uint64_t t = 0; t < length; ++t) ++tally[term_dist[c](rng)];
      SparseDocVector doc;
      doc.label_id = c;
      for (std::uint32_t i = 0; i < m; ++i) {
        if (tally[i] > 0) doc.counts.push_back({i, tally[i]});
      }
      doc.length = length;
      corpus.docs.push_back(std::move(doc));
    }
  }
  std::vector<std::string> terms(m);
  for (std::size_t i = 0; i < m; ++i) terms[i] = "w" + std::to_string(i);
  corpus.vocabulary = Vocabulary(std::move(terms), std::vector<std::size_t>(m, 0));
  corpus.vocabulary = Vocabulary(corpus.vocabulary.terms(), recount_doc_freq(corpus));
  return corpus;
}

MonotonicitySummary theorem1_harness(std::size_t trials, std::size_t vocab_size, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::Precondition, "trials must be >= 1");
  MonotonicitySummary summary;
  summary.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    GeneratorSpec spec;
    spec.theta_star = random_theta(2, vocab_size, 1.0, seed + 2 * t);
    spec.priors = {0.5, 0.5};
    spec.doc_length = {5, 15};
    spec.docs_per_class = {20, 20};
    spec.seed = seed + 2 * t + 1;
    const MnbModel model = fit(sample_corpus(spec));
    const FeatureRanking greedy = md_rank_two_class_greedy(model.theta());
    bool violated = false;
    for (std::size_t k = 1; k < greedy.step_divergences.size(); ++k) {
      const double drop = greedy.step_divergences[k - 1] - greedy.step_divergences[k];
      summary.max_violation = std::max(summary.max_violation, drop);
      violated = violated || drop > kMonotoneTolerance;
    }
    if (violated) ++summary.violations;
  }
  return summary;
}

}  // namespace mdfs
