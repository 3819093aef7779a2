#include "mdfs/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace mdfs {

namespace {

// Scores closer than this (relative) count as tied in the greedy argmax.
constexpr double kTieTolerance = 1e-12;

void validate_theta(const Matrix& theta, std::size_t required_rows = 0) {
  if (required_rows != 0 && theta.rows() != required_rows) {
    throw Error(ErrorKind::InvalidModel, "expected " + std::to_string(required_rows) +
                                             " classes, got " + std::to_string(theta.rows()));
  }
  if (theta.rows() < 2) throw Error(ErrorKind::InvalidModel, "need at least 2 classes");
  if (theta.cols() < 1) throw Error(ErrorKind::InvalidModel, "empty vocabulary");
  for (std::size_t c = 0; c < theta.rows(); ++c) {
    for (double p : theta.row(c)) {
      if (!(p > 0.0) || p > 1.0) {
        throw Error(ErrorKind::InvalidModel, "term probabilities must lie in (0, 1]");
      }
    }
    if (std::fabs(compensated_sum(theta.row(c)) - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidModel, "row " + std::to_string(c) + " does not sum to 1");
    }
  }
}

std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

FeatureRanking ranking_from_scores(Method method, const std::vector<double>& scores) {
  FeatureRanking r;
  r.method = method;
  r.order = descending_order(scores);
  r.scores.reserve(scores.size());
  for (std::size_t i : r.order) r.scores.push_back(scores[i]);
  return r;
}

// Contribution of one bin to J: (a - b) ln(a / b). Zero when both are empty.
double j_bin(double a, double b) {
  if (a <= 0.0 && b <= 0.0) return 0.0;
  return (a - b) * std::log(a / b);
}

struct GreedyResult {
  std::vector<std::size_t> order;
  std::vector<double> steps;
};

GreedyResult run_greedy(const Matrix& theta, std::size_t max_steps) {
  const std::size_t m = theta.cols();
  const auto p1 = theta.row(0);
  const auto p2 = theta.row(1);
  std::vector<char> selected(m, 0);
  CompensatedSum base;  // J over the already selected bins
  GreedyResult out;
  const std::size_t steps = std::min(max_steps, m);
  for (std::size_t k = 0; k < steps; ++k) {
    CompensatedSum rem1, rem2;
    for (std::size_t i = 0; i < m; ++i) {
      if (!selected[i]) {
        rem1.add(p1[i]);
        rem2.add(p2[i]);
      }
    }
    const double r1 = rem1.value();
    const double r2 = rem2.value();
    const double prefix = base.value();
    std::size_t best = m;
    double best_j = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (selected[i]) continue;
      double t1 = r1 - p1[i];
      double t2 = r2 - p2[i];
      if (t1 <= 0.0 || t2 <= 0.0) {
        // Only reachable through cancellation when the remainder is
        // negligible next to p_i; recompute it directly.
        CompensatedSum s1, s2;
        for (std::size_t j = 0; j < m; ++j) {
          if (!selected[j] && j != i) {
            s1.add(p1[j]);
            s2.add(p2[j]);
          }
        }
        t1 = s1.value();
        t2 = s2.value();
      }
      const double j = prefix + j_bin(p1[i], p2[i]) + j_bin(t1, t2);
      const double tol = kTieTolerance * std::max(1.0, std::fabs(best_j));
      if (best == m || j > best_j + tol) {
        best = i;
        best_j = j;
      }
    }
    selected[best] = 1;
    base.add(j_bin(p1[best], p2[best]));
    out.order.push_back(best);
    out.steps.push_back(best_j);
  }
  return out;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::MD: return "md";
    case Method::MDGreedy: return "md-greedy";
    case Method::MDChi2: return "md-chi2";
    case Method::DF: return "df";
    case Method::MI: return "mi";
    case Method::CET: return "cet";
    case Method::IG: return "ig";
    case Method::CHI: return "chi";
    case Method::GSS: return "gss";
    case Method::TFIDF: return "tfidf";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::MD,  Method::MDGreedy, Method::MDChi2,
                                              Method::DF,  Method::MI,       Method::CET,
                                              Method::IG,  Method::CHI,      Method::GSS,
                                              Method::TFIDF};
  return methods;
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  throw Error(ErrorKind::UnknownMethod, "'" + std::string(name) + "'");
}

FeatureRanking md_rank_two_class_greedy(const Matrix& theta) {
  validate_theta(theta, 2);
  GreedyResult g = run_greedy(theta, theta.cols());
  FeatureRanking r;
  r.method = Method::MDGreedy;
  r.order = std::move(g.order);
  r.scores = g.steps;
  r.step_divergences = std::move(g.steps);
  return r;
}

FeatureRanking md_rank_two_class(const Matrix& theta) {
  validate_theta(theta, 2);
  std::vector<double> scores(theta.cols());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = jeffreys_two_bin(theta(0, i), theta(1, i));
  }
  return ranking_from_scores(Method::MD, scores);
}

FeatureRanking md_rank_multiclass(const Matrix& theta, const ClassPriors& priors) {
  validate_theta(theta);
  if (priors.size() != theta.rows()) throw Error(ErrorKind::InvalidModel, "prior count mismatch");
  std::vector<double> scores(theta.cols());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto column = theta.column(i);
    CompensatedSum s;
    for (std::size_t c = 0; c < column.size(); ++c) {
      s.add(kl_two_bin(column[c], pooled_complement(column, priors, c)));
    }
    scores[i] = s.value();
  }
  return ranking_from_scores(Method::MD, scores);
}

FeatureRanking md_chi2_rank(const Matrix& theta, const ClassPriors& priors, double length) {
  validate_theta(theta);
  if (priors.size() != theta.rows()) throw Error(ErrorKind::InvalidModel, "prior count mismatch");
  std::vector<double> scores(theta.cols());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto column = theta.column(i);
    CompensatedSum s;
    for (std::size_t c = 0; c < column.size(); ++c) {
      const double q = pooled_complement(column, priors, c);
      const double p_hat[2] = {column[c], 1.0 - column[c]};
      const double p_ref[2] = {q, 1.0 - q};
      s.add(noncentrality_j(p_hat, p_ref, length));
    }
    scores[i] = s.value();
  }
  return ranking_from_scores(Method::MDChi2, scores);
}

std::vector<double> prefix_divergence_curve(const Matrix& theta, const ClassPriors& priors,
                                            const std::vector<std::size_t>& order) {
  validate_theta(theta);
  const std::size_t n = theta.rows();
  const std::size_t m = theta.cols();
  std::vector<double> curve;
  curve.reserve(order.size());
  std::vector<char> selected(m, 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    selected.at(order[k]) = 1;
    std::vector<double> pool(n);
    bool any_pool = false;
    for (std::size_t c = 0; c < n; ++c) {
      CompensatedSum s;
      for (std::size_t i = 0; i < m; ++i) {
        if (!selected[i]) s.add(theta(c, i));
      }
      pool[c] = std::max(0.0, s.value());
      any_pool = any_pool || pool[c] > 0.0;
    }
    Matrix bins(n, k + 1 + (any_pool ? 1 : 0));
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t j = 0; j <= k; ++j) bins(c, j) = theta(c, order[j]);
      if (any_pool) bins(c, k + 1) = pool[c];
    }
    curve.push_back(jmh(bins, priors));
  }
  return curve;
}

AgreementReport algorithm_agreement_check(const Matrix& theta) {
  validate_theta(theta, 2);
  if (theta.cols() < 2) throw Error(ErrorKind::Precondition, "agreement check needs M >= 2");
  const FeatureRanking efficient = md_rank_two_class(theta);
  const GreedyResult greedy = run_greedy(theta, 2);

  AgreementReport r;
  r.e1 = efficient.order[0];
  r.e2 = efficient.order[1];
  auto tail_term = [&](std::size_t e) {
    const double a = 1.0 - theta(0, e);
    const double b = 1.0 - theta(1, e);
    return a * std::log(a / b);
  };
  auto head_term = [&](std::size_t e) {
    return theta(0, e) * std::log(theta(0, e) / theta(1, e));
  };
  r.delta = tail_term(r.e2) - tail_term(r.e1);
  r.bound = head_term(r.e1) - head_term(r.e2);
  r.condition_holds = r.delta <= r.bound;
  r.greedy_first = greedy.order[0];
  r.efficient_first = r.e1;
  r.first_picks_agree = r.greedy_first == r.efficient_first;
  r.greedy_second = greedy.order[1];
  r.second_picks_agree = r.greedy_second == r.e2;
  return r;
}

BinaryEventTables build_binary_event_tables(const LabeledCorpus& corpus) {
  const std::size_t m = corpus.vocab_size();
  const std::size_t n = corpus.num_classes();
  std::vector<std::size_t> present(m * n, 0);  // docs of class c containing term t
  std::vector<std::size_t> df(m, 0);
  const auto class_docs = corpus.class_doc_counts();
  for (const auto& d : corpus.docs) {
    for (const auto& tc : d.counts) {
      ++present[tc.index * n + d.label_id];
      ++df[tc.index];
    }
  }
  const double total = static_cast<double>(corpus.docs.size()) + 4.0;
  const std::size_t num_docs = corpus.docs.size();
  BinaryEventTables tables(m, n);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t a = present[t * n + c];
      const std::size_t b = df[t] - a;
      const std::size_t cc = class_docs[c] - a;
      const std::size_t d = num_docs - class_docs[c] - b;
      auto& cell = tables.at(t, c);
      cell.t_c = (static_cast<double>(a) + 1.0) / total;
      cell.t_nc = (static_cast<double>(b) + 1.0) / total;
      cell.nt_c = (static_cast<double>(cc) + 1.0) / total;
      cell.nt_nc = (static_cast<double>(d) + 1.0) / total;
    }
  }
  return tables;
}

double score_binary_table(Method method, const BinaryTable& t) {
  // x log(x / y) with the 0 log 0 = 0 convention.
  auto xlog = [](double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; };
  switch (method) {
    case Method::MI:
      return std::log(t.t_c / (t.p_t() * t.p_c()));
    case Method::CET:
      return xlog(t.t_c, t.p_t() * t.p_c());
    case Method::IG:
      return xlog(t.t_c, t.p_t() * t.p_c()) + xlog(t.nt_c, t.p_nt() * t.p_c());
    case Method::CHI: {
      const double denom = t.t_c * t.t_nc * t.nt_c * t.nt_nc;
      const double num = t.t_c * t.nt_nc - t.t_nc * t.nt_c;
      if (denom == 0.0) {
        if (num == 0.0) return 0.0;
        throw Error(ErrorKind::UndefinedDivergence, "chi-square table has an empty cell");
      }
      return num * num / denom;
    }
    case Method::GSS:
      return t.t_c * t.nt_nc - t.t_nc * t.nt_c;
    default:
      throw Error(ErrorKind::UnknownMethod,
                  std::string(method_name(method)) + " is not a 2x2-table score");
  }
}

FeatureRanking baseline_rank(const LabeledCorpus& corpus, Method method, Aggregation aggregation) {
  if (corpus.docs.empty()) throw Error(ErrorKind::Precondition, "empty corpus");
  const std::size_t m = corpus.vocab_size();
  std::vector<double> scores(m, 0.0);
  switch (method) {
    case Method::DF: {
      const auto df = recount_doc_freq(corpus);
      for (std::size_t t = 0; t < m; ++t) scores[t] = static_cast<double>(df[t]);
      break;
    }
    case Method::TFIDF: {
      const auto df = recount_doc_freq(corpus);
      std::vector<double> tf(m, 0.0);
      for (const auto& d : corpus.docs) {
        for (const auto& tc : d.counts) tf[tc.index] += tc.count;
      }
      const double num_docs = static_cast<double>(corpus.docs.size());
      for (std::size_t t = 0; t < m; ++t) {
        scores[t] = df[t] == 0 ? 0.0 : tf[t] * std::log(num_docs / static_cast<double>(df[t]));
      }
      break;
    }
    case Method::MI:
    case Method::CET:
    case Method::IG:
    case Method::CHI:
    case Method::GSS: {
      const auto tables = build_binary_event_tables(corpus);
      const auto class_docs = corpus.class_doc_counts();
      const double num_docs = static_cast<double>(corpus.docs.size());
      for (std::size_t t = 0; t < m; ++t) {
        CompensatedSum avg;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < corpus.num_classes(); ++c) {
          const double s = score_binary_table(method, tables.at(t, c));
          avg.add(static_cast<double>(class_docs[c]) / num_docs * s);
          best = std::max(best, s);
        }
        scores[t] = aggregation == Aggregation::Max ? best : avg.value();
      }
      break;
    }
    default:
      throw Error(ErrorKind::UnknownMethod,
                  std::string(method_name(method)) + " is not a baseline method");
  }
  return ranking_from_scores(method, scores);
}

std::vector<std::size_t> select_top(const FeatureRanking& ranking, std::size_t r) {
  if (r < 1 || r > ranking.order.size()) {
    throw Error(ErrorKind::BudgetOutOfRange, "budget " + std::to_string(r) + " outside [1, " +
                                                 std::to_string(ranking.order.size()) + "]");
  }
  return {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(r)};
}

FeatureRanking rank_features(const LabeledCorpus& corpus, Method method,
                             const RankOptions& options) {
  switch (method) {
    case Method::MD:
    case Method::MDGreedy:
    case Method::MDChi2: {
      if (corpus.num_classes() < 2) throw Error(ErrorKind::Precondition, "need at least 2 classes");
      if (method == Method::MDGreedy && corpus.num_classes() != 2) {
        throw Error(ErrorKind::Precondition,
                    "md-greedy is defined for 2 classes only; this corpus has " +
                        std::to_string(corpus.num_classes()) + " (use md or md-chi2)");
      }
      const auto class_docs = corpus.class_doc_counts();
      for (std::size_t c = 0; c < class_docs.size(); ++c) {
        if (class_docs[c] == 0) {
          throw Error(ErrorKind::Precondition, "class '" + corpus.classes[c] + "' has no documents");
        }
      }
      const MnbModel model = fit(corpus, options.smoothing);
      const ClassPriors priors = ClassPriors::from_counts(class_docs);
      if (method == Method::MDGreedy) return md_rank_two_class_greedy(model.theta());
      if (method == Method::MD) return md_rank_multiclass(model.theta(), priors);
      return md_chi2_rank(model.theta(), priors, options.length);
    }
    default:
      return baseline_rank(corpus, method, options.aggregation);
  }
}

void write_ranking_csv(std::ostream& out, const FeatureRanking& ranking, const Vocabulary& vocab,
                       const std::string& params) {
  out << "# method=" << method_name(ranking.method);
  if (!params.empty()) out << ' ' << params;
  out << '\n' << "rank,feature_index,term,score\n";
  char buf[32];
  for (std::size_t k = 0; k < ranking.order.size(); ++k) {
    const std::size_t f = ranking.order[k];
    std::snprintf(buf, sizeof buf, "%.17g", ranking.scores[k]);
    out << (k + 1) << ',' << f << ',' << (f < vocab.size() ? vocab.term(f) : std::string()) << ','
        << buf << '\n';
  }
}

}  // namespace mdfs
