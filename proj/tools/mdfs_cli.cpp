// mdfs: feature ranking and naive Bayes evaluation from the command line.
//
// Exit codes: 0 success, 1 property-check failure, 2 input/parse error,
// 3 precondition violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdfs/corpus.hpp"
#include "mdfs/evaluation.hpp"
#include "mdfs/nb_model.hpp"
#include "mdfs/ranking.hpp"
#include "mdfs/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitPrecondition = 3;

struct InputOptions {
  std::string input;
  std::string format = "dir";
  std::size_t min_df = 2;
  std::string stoplist;
  bool keep_case = false;
};

struct ModelOptions {
  double beta1 = 1.0;
  std::optional<double> beta2;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.input, "Corpus path")->required();
  cmd->add_option("--format", in.format, "Corpus format")
      ->check(CLI::IsMember({"dir", "tsv", "sparse"}));
  cmd->add_option("--min-df", in.min_df, "Minimum document frequency")->check(CLI::PositiveNumber);
  cmd->add_option("--stoplist", in.stoplist, "Stoplist file, one term per line");
  cmd->add_flag("--keep-case", in.keep_case, "Do not lowercase tokens");
}

void add_model_options(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--beta1", m.beta1, "Smoothing numerator");
  cmd->add_option("--beta2", m.beta2, "Smoothing denominator (default beta1 * vocabulary size)");
}

class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_path(const std::string& path, const char* what) {
  if (path.empty() || !fs::exists(path)) {
    throw InputError(std::string(what) + " not found: " + path);
  }
}

mdfs::PreprocessConfig preprocess_config(const InputOptions& in) {
  mdfs::PreprocessConfig config;
  config.min_df = in.min_df;
  config.lowercase = !in.keep_case;
  if (!in.stoplist.empty()) {
    require_path(in.stoplist, "stoplist");
    config.stoplist = mdfs::read_stoplist(in.stoplist);
  }
  return config;
}

mdfs::LabeledCorpus load_input(const InputOptions& in) {
  require_path(in.input, "input");
  return mdfs::load_corpus(in.input, mdfs::parse_corpus_format(in.format), preprocess_config(in));
}

mdfs::Smoothing smoothing_of(const ModelOptions& m) { return {m.beta1, m.beta2}; }

std::string format_param(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Writes to --out when given, otherwise standard output.
template <typename Fn>
void emit(const std::string& out_path, Fn&& write) {
  if (out_path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InputError("cannot write " + out_path);
  write(out);
}

void print_stats(std::ostream& os, const mdfs::LabeledCorpus& corpus) {
  std::uint64_t tokens = 0;
  for (const auto& d : corpus.docs) tokens += d.length;
  const auto per_class = corpus.class_doc_counts();
  os << "documents: " << corpus.docs.size() << '\n'
     << "classes: " << corpus.num_classes() << '\n'
     << "vocabulary: " << corpus.vocab_size() << '\n'
     << "tokens: " << tokens << '\n';
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    os << "class " << corpus.classes[c] << ": " << per_class[c] << " documents\n";
  }
}

int cmd_build_vocab(const InputOptions& in, const std::string& out_path) {
  const auto corpus = load_input(in);
  if (out_path.empty()) {
    print_stats(std::cerr, corpus);
    mdfs::write_vocabulary_csv(std::cout, corpus.vocabulary);
  } else {
    emit(out_path, [&](std::ostream& os) { mdfs::write_vocabulary_csv(os, corpus.vocabulary); });
    print_stats(std::cout, corpus);
  }
  return kExitOk;
}

int cmd_rank(const InputOptions& in, const ModelOptions& model, const std::string& method_name,
             double length, const std::string& aggregation, const std::string& out_path) {
  const auto method = mdfs::parse_method(method_name);
  const auto corpus = load_input(in);
  mdfs::RankOptions options;
  options.smoothing = smoothing_of(model);
  options.length = length;
  options.aggregation = aggregation == "max" ? mdfs::Aggregation::Max
                                             : mdfs::Aggregation::WeightedAverage;
  const auto ranking = mdfs::rank_features(corpus, method, options);
  std::ostringstream params;
  params << "classes=" << corpus.num_classes() << " vocab=" << corpus.vocab_size()
         << " beta1=" << format_param(options.smoothing.beta1)
         << " beta2=" << format_param(options.smoothing.resolved_beta2(corpus.vocab_size()))
         << " length=" << format_param(length) << " aggregation=" << aggregation
         << " min_df=" << in.min_df;
  emit(out_path, [&](std::ostream& os) {
    mdfs::write_ranking_csv(os, ranking, corpus.vocabulary, params.str());
  });
  return kExitOk;
}

struct SweepFlags {
  std::vector<std::string> methods;
  std::vector<std::size_t> budgets;
  std::size_t folds = 10;
  double test_fraction = 0.0;
  std::string test_input;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool pool_rest = false;
  std::string out;
};

int cmd_sweep(const InputOptions& in, const ModelOptions& model, const SweepFlags& flags) {
  std::vector<mdfs::Method> methods;
  for (const auto& name : flags.methods) methods.push_back(mdfs::parse_method(name));
  if (!flags.test_input.empty()) require_path(flags.test_input, "test input");
  const auto corpus = load_input(in);

  std::optional<mdfs::LabeledCorpus> test;
  mdfs::Protocol protocol = mdfs::Protocol::kfold(flags.folds);
  if (!flags.test_input.empty()) {
    test = mdfs::load_corpus_like(flags.test_input, mdfs::parse_corpus_format(in.format),
                                  preprocess_config(in), corpus);
    protocol = mdfs::Protocol::presplit(*test);
  } else if (flags.test_fraction > 0.0) {
    protocol = mdfs::Protocol::holdout(flags.test_fraction);
  }
  mdfs::SweepOptions options;
  options.rank.smoothing = smoothing_of(model);
  options.seed = flags.seed;
  options.threads = flags.threads;
  if (flags.pool_rest) options.subset_mode = mdfs::SubsetMode::PoolRest;
  const auto report = mdfs::sweep(corpus, methods, flags.budgets, protocol, options);
  emit(flags.out, [&](std::ostream& os) { mdfs::write_sweep_csv(os, report); });
  return kExitOk;
}

struct SyntheticFlags {
  std::size_t classes = 2;
  std::size_t vocab = 50;
  std::size_t docs = 100;
  std::uint64_t doc_length = 0;
  std::uint64_t min_length = 50;
  std::uint64_t max_length = 150;
  double concentration = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string theta_out;
  bool theorem1_check = false;
  std::size_t trials = 100;
};

int cmd_gen_synthetic(const SyntheticFlags& f) {
  if (f.theorem1_check) {
    if (f.classes != 2) throw InputError("--theorem1-check requires --classes 2");
    if (f.vocab < 2) throw InputError("--vocab must be at least 2");
    const auto summary = mdfs::theorem1_harness(f.trials, f.vocab, f.seed);
    std::cout << "monotonicity: trials=" << summary.trials << " violations=" << summary.violations
              << " max_violation=" << format_param(summary.max_violation) << ' '
              << (summary.passed() ? "PASS" : "FAIL") << '\n';
    return summary.passed() ? kExitOk : kExitPropertyFailure;
  }
  if (f.out.empty()) throw InputError("--out is required unless --theorem1-check is given");
  if (f.classes < 1 || f.vocab < 2 || f.docs < 1) {
    throw InputError("need --classes >= 1, --vocab >= 2, --docs >= 1");
  }
  mdfs::GeneratorSpec spec;
  spec.theta_star = mdfs::random_theta(f.classes, f.vocab, f.concentration, f.seed);
  spec.priors.assign(f.classes, 1.0 / static_cast<double>(f.classes));
  spec.doc_length = f.doc_length > 0 ? mdfs::DocLength{f.doc_length, f.doc_length}
                                     : mdfs::DocLength{f.min_length, f.max_length};
  if (spec.doc_length.min > spec.doc_length.max) throw InputError("--min-length exceeds --max-length");
  spec.docs_per_class.assign(f.classes, f.docs);
  spec.seed = f.seed + 1;
  const auto corpus = mdfs::sample_corpus(spec);
  emit(f.out, [&](std::ostream& os) { mdfs::write_sparse_corpus(os, corpus); });
  if (!f.theta_out.empty()) {
    emit(f.theta_out, [&](std::ostream& os) {
      for (std::size_t c = 0; c < spec.theta_star.rows(); ++c) {
        for (std::size_t i = 0; i < spec.theta_star.cols(); ++i) {
          os << (i ? "," : "") << format_param(spec.theta_star(c, i));
        }
        os << '\n';
      }
    });
  }
  return kExitOk;
}

int cmd_train(const InputOptions& in, const ModelOptions& model, const std::string& out_path) {
  const auto corpus = load_input(in);
  const auto fitted = mdfs::fit(corpus, smoothing_of(model));
  emit(out_path, [&](std::ostream& os) { mdfs::write_model_csv(os, fitted); });
  return kExitOk;
}

int exit_code_for(mdfs::ErrorKind kind) {
  switch (kind) {
    case mdfs::ErrorKind::ParseError:
    case mdfs::ErrorKind::EmptyVocabulary:
    case mdfs::ErrorKind::UnknownClass:
    case mdfs::ErrorKind::UnknownMethod:
    case mdfs::ErrorKind::InvalidSmoothing:
      return kExitInputError;
    default:
      return kExitPrecondition;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature ranking (MD, MD-chi2 and classical baselines) for multinomial naive Bayes"};
  app.require_subcommand(1);
  std::size_t threads_hint = 1;

  InputOptions vocab_in;
  std::string vocab_out;
  auto* build_vocab = app.add_subcommand("build-vocab", "Build the pruned vocabulary");
  add_input_options(build_vocab, vocab_in);
  build_vocab->add_option("--out", vocab_out, "Vocabulary CSV path (default stdout)");

  InputOptions rank_in;
  ModelOptions rank_model;
  std::string rank_method = "md";
  std::string rank_out;
  std::string aggregation = "avg";
  double length = 1.0;
  auto* rank = app.add_subcommand("rank", "Rank features with one method");
  add_input_options(rank, rank_in);
  add_model_options(rank, rank_model);
  rank->add_option("--method", rank_method, "md, md-greedy, md-chi2, df, mi, cet, ig, chi, gss, tfidf");
  rank->add_option("--length", length, "Effective length l for md-chi2")->check(CLI::PositiveNumber);
  rank->add_option("--aggregation", aggregation, "Per-class baseline aggregation")
      ->check(CLI::IsMember({"avg", "max"}));
  rank->add_option("--out", rank_out, "Ranking CSV path (default stdout)");
  rank->add_option("--threads", threads_hint, "Thread hint");

  InputOptions sweep_in;
  ModelOptions sweep_model;
  SweepFlags sweep_flags;
  sweep_flags.methods = {"md", "md-chi2", "df", "mi", "cet", "ig", "chi", "gss", "tfidf"};
  auto* sweep = app.add_subcommand("sweep", "Accuracy/F1 versus feature budget");
  add_input_options(sweep, sweep_in);
  add_model_options(sweep, sweep_model);
  sweep->add_option("--method", sweep_flags.methods, "Comma-separated methods")->delimiter(',');
  sweep->add_option("--budgets", sweep_flags.budgets, "Comma-separated budgets (default 10..2000 grid)")
      ->delimiter(',');
  sweep->add_option("--folds", sweep_flags.folds, "k for stratified k-fold")->check(CLI::Range(2, 1000));
  sweep->add_option("--test-fraction", sweep_flags.test_fraction, "Holdout fraction instead of k-fold")
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--test-input", sweep_flags.test_input, "Separate test corpus (same format)");
  sweep->add_option("--seed", sweep_flags.seed, "Split seed");
  sweep->add_option("--threads", sweep_flags.threads, "Worker threads over folds");
  sweep->add_flag("--pool-rest", sweep_flags.pool_rest,
                  "Keep one extra bin holding the counts of unselected terms");
  sweep->add_option("--out", sweep_flags.out, "Report CSV path (default stdout)");

  SyntheticFlags syn;
  auto* gen = app.add_subcommand("gen-synthetic", "Sample a multinomial corpus in sparse format");
  gen->add_option("--classes", syn.classes, "Number of classes");
  gen->add_option("--vocab", syn.vocab, "Vocabulary size M");
  gen->add_option("--docs", syn.docs, "Documents per class");
  auto* fixed_len = gen->add_option("--doc-length", syn.doc_length, "Fixed document length");
  auto* min_len = gen->add_option("--min-length", syn.min_length, "Minimum document length");
  auto* max_len = gen->add_option("--max-length", syn.max_length, "Maximum document length");
  fixed_len->excludes(min_len)->excludes(max_len);
  gen->add_option("--concentration", syn.concentration, "Symmetric Dirichlet concentration")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", syn.seed, "Random seed");
  gen->add_option("--out", syn.out, "Sparse corpus output path");
  gen->add_option("--theta-out", syn.theta_out, "Write the true theta as CSV");
  auto* t1 = gen->add_flag("--theorem1-check", syn.theorem1_check, "Run the greedy monotonicity harness");
  gen->add_option("--trials", syn.trials, "Harness trials")->check(CLI::PositiveNumber)->needs(t1);
  gen->add_option("--threads", threads_hint, "Thread hint");

  InputOptions train_in;
  ModelOptions train_model;
  std::string train_out;
  auto* train = app.add_subcommand("train", "Fit naive Bayes and export the model CSV");
  add_input_options(train, train_in);
  add_model_options(train, train_model);
  train->add_option("--out", train_out, "Model CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*build_vocab) return cmd_build_vocab(vocab_in, vocab_out);
    if (*rank) return cmd_rank(rank_in, rank_model, rank_method, length, aggregation, rank_out);
    if (*sweep) return cmd_sweep(sweep_in, sweep_model, sweep_flags);
    if (*gen) return cmd_gen_synthetic(syn);
    if (*train) return cmd_train(train_in, train_model, train_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const mdfs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
