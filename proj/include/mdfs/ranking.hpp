#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mdfs/common.hpp"
#include "mdfs/corpus.hpp"
#include "mdfs/divergence.hpp"
#include "mdfs/nb_model.hpp"

namespace mdfs {

enum class Method { MD, MDGreedy, MDChi2, DF, MI, CET, IG, CHI, GSS, TFIDF };

std::string_view method_name(Method method);
/// Accepts the CLI spellings (md, md-greedy, md-chi2, df, mi, cet, ig, chi,
/// gss, tfidf); throws UnknownMethod otherwise.
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

struct FeatureRanking {
  Method method = Method::MD;
  std::vector<std::size_t> order;         // permutation of 0..M-1, best first
  std::vector<double> scores;             // aligned with order
  std::vector<double> step_divergences;   // greedy only: J attained at each step
};

/// Greedy forward selection maximizing the J-divergence of the (k+1)-bin
/// distributions {selected features, candidate, pooled remainder}. O(M^2).
/// Requires a 2 x M strictly positive row-stochastic theta.
FeatureRanking md_rank_two_class_greedy(const Matrix& theta);

/// Scores each feature by the J-divergence of its two-bin split
/// [p_i, 1 - p_i] between the two classes. O(M).
FeatureRanking md_rank_two_class(const Matrix& theta);

/// Scores each feature by sum_c KL([p_ic, 1 - p_ic], [q_ic, 1 - q_ic]), where
/// q_ic pools the other classes with renormalized prior weights. O(MN^2).
FeatureRanking md_rank_multiclass(const Matrix& theta, const ClassPriors& priors);

/// As md_rank_multiclass with the J-divergence noncentrality parameter in
/// place of KL. Scores scale linearly with `length`.
FeatureRanking md_chi2_rank(const Matrix& theta, const ClassPriors& priors, double length = 1.0);

/// JMH divergence of the (k+1)-bin distributions formed by the first k
/// features of `order` plus the pooled remainder, for k = 1..M. At N = 2
/// this is the greedy J value for that prefix.
std::vector<double> prefix_divergence_curve(const Matrix& theta, const ClassPriors& priors,
                                            const std::vector<std::size_t>& order);

/// Compares the first pick of the greedy and the efficient two-class
/// rankers. `delta` and `bound` are the two sides of the condition under
/// which forward-KL and J orderings agree on the top two features.
struct AgreementReport {
  std::size_t e1 = 0;
  std::size_t e2 = 0;
  double delta = 0.0;
  double bound = 0.0;
  bool condition_holds = false;
  std::size_t greedy_first = 0;
  std::size_t efficient_first = 0;
  bool first_picks_agree = false;
  std::size_t greedy_second = 0;
  bool second_picks_agree = false;
};

AgreementReport algorithm_agreement_check(const Matrix& theta);

/// Smoothed 2x2 document-event table for one (term, class) pair.
struct BinaryTable {
  double t_c = 0.0;    // term present, class c
  double t_nc = 0.0;   // term present, other class
  double nt_c = 0.0;   // term absent, class c
  double nt_nc = 0.0;  // term absent, other class

  double p_t() const noexcept { return t_c + t_nc; }
  double p_nt() const noexcept { return nt_c + nt_nc; }
  double p_c() const noexcept { return t_c + nt_c; }
  double p_nc() const noexcept { return t_nc + nt_nc; }
};

class BinaryEventTables {
 public:
  BinaryEventTables(std::size_t num_terms, std::size_t num_classes)
      : num_terms_(num_terms), num_classes_(num_classes), cells_(num_terms * num_classes) {}

  std::size_t num_terms() const noexcept { return num_terms_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  BinaryTable& at(std::size_t term, std::size_t cls) { return cells_[term * num_classes_ + cls]; }
  const BinaryTable& at(std::size_t term, std::size_t cls) const {
    return cells_[term * num_classes_ + cls];
  }

 private:
  std::size_t num_terms_;
  std::size_t num_classes_;
  std::vector<BinaryTable> cells_;
};

/// Document-level presence/absence tables with add-one smoothing on each of
/// the four cells: (count + 1) / (D + 4).
BinaryEventTables build_binary_event_tables(const LabeledCorpus& corpus);

/// Per-(term, class) score for MI, CET, IG, CHI or GSS.
double score_binary_table(Method method, const BinaryTable& table);

enum class Aggregation { WeightedAverage, Max };

FeatureRanking baseline_rank(const LabeledCorpus& corpus, Method method,
                             Aggregation aggregation = Aggregation::WeightedAverage);

/// First r entries of the ranking order; 1 <= r <= M.
std::vector<std::size_t> select_top(const FeatureRanking& ranking, std::size_t r);

struct RankOptions {
  Smoothing smoothing;
  double length = 1.0;
  Aggregation aggregation = Aggregation::WeightedAverage;
};

/// Ranks the corpus's features with any method. MD-family methods score the
/// smoothed naive Bayes estimates with document-fraction class priors.
FeatureRanking rank_features(const LabeledCorpus& corpus, Method method,
                             const RankOptions& options = {});

/// CSV `rank,feature_index,term,score`, preceded by a `#` parameter line.
void write_ranking_csv(std::ostream& out, const FeatureRanking& ranking, const Vocabulary& vocab,
                       const std::string& params);

}  // namespace mdfs
