#include "mdfs/nb_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mdfs {

namespace {

std::string format_double(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t lineno) {
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(ErrorKind::ParseError, "model line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

MnbModel::MnbModel(Matrix theta, std::vector<double> class_prior, double beta1, double beta2,
                   std::vector<std::string> class_names)
    : theta_(std::move(theta)),
      log_theta_(theta_.rows(), theta_.cols()),
      class_prior_(std::move(class_prior)),
      class_names_(std::move(class_names)),
      beta1_(beta1),
      beta2_(beta2) {
  if (class_prior_.size() != theta_.rows()) {
    throw Error(ErrorKind::InvalidModel, "prior length does not match class count");
  }
  if (class_names_.empty()) {
    for (std::size_t c = 0; c < theta_.rows(); ++c) class_names_.push_back("c" + std::to_string(c));
  }
  for (std::size_t c = 0; c < theta_.rows(); ++c) {
    for (std::size_t i = 0; i < theta_.cols(); ++i) {
      const double p = theta_(c, i);
      if (!(p > 0.0)) throw Error(ErrorKind::InvalidModel, "non-positive term probability");
      log_theta_(c, i) = std::log(p);
    }
  }
  class_log_prior_.reserve(class_prior_.size());
  for (double p : class_prior_) {
    if (p < 0.0) throw Error(ErrorKind::InvalidModel, "negative class prior");
    class_log_prior_.push_back(p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity());
  }
}

MnbModel MnbModel::with_log_prior(Matrix theta, std::vector<double> class_log_prior, double beta1,
                                  double beta2, std::vector<std::string> class_names) {
  std::vector<double> prior;
  prior.reserve(class_log_prior.size());
  for (double lp : class_log_prior) prior.push_back(std::exp(lp));
  MnbModel m(std::move(theta), std::move(prior), beta1, beta2, std::move(class_names));
  m.class_log_prior_ = std::move(class_log_prior);
  return m;
}

double MnbModel::log_likelihood(const SparseDocVector& doc, std::size_t class_id) const {
  const auto row = log_theta_.row(class_id);
  CompensatedSum s;
  for (const auto& tc : doc.counts) s.add(static_cast<double>(tc.count) * row[tc.index]);
  return s.value();
}

std::vector<double> MnbModel::class_scores(const SparseDocVector& doc) const {
  std::vector<double> scores(num_classes());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    scores[c] = log_likelihood(doc, c) + class_log_prior_[c];
  }
  return scores;
}

std::size_t MnbModel::classify(const SparseDocVector& doc) const {
  const auto scores = class_scores(doc);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

ClassCounts accumulate_counts(const LabeledCorpus& corpus) {
  ClassCounts out;
  out.num_classes = corpus.num_classes();
  out.vocab_size = corpus.vocab_size();
  out.term_counts.assign(out.num_classes * out.vocab_size, 0);
  out.class_totals.assign(out.num_classes, 0);
  out.doc_counts.assign(out.num_classes, 0);
  for (const auto& d : corpus.docs) {
    const std::size_t c = d.label_id;
    ++out.doc_counts.at(c);
    for (const auto& tc : d.counts) {
      out.term_counts[c * out.vocab_size + tc.index] += tc.count;
      out.class_totals[c] += tc.count;
    }
  }
  return out;
}

MnbModel fit(const ClassCounts& counts, const Smoothing& smoothing) {
  const double beta1 = smoothing.beta1;
  const double beta2 = smoothing.resolved_beta2(counts.vocab_size);
  if (!(beta1 > 0.0) || !(beta2 > 0.0)) {
    throw Error(ErrorKind::InvalidSmoothing, "beta1 and beta2 must be positive");
  }
  Matrix theta(counts.num_classes, counts.vocab_size);
  for (std::size_t c = 0; c < counts.num_classes; ++c) {
    const double denom = static_cast<double>(counts.class_totals[c]) + beta2;
    for (std::size_t i = 0; i < counts.vocab_size; ++i) {
      theta(c, i) = (static_cast<double>(counts.term_count(c, i)) + beta1) / denom;
    }
  }
  std::size_t total_docs = 0;
  for (auto n : counts.doc_counts) total_docs += n;
  std::vector<double> prior(counts.num_classes, 0.0);
  if (total_docs > 0) {
    for (std::size_t c = 0; c < prior.size(); ++c) {
      prior[c] = static_cast<double>(counts.doc_counts[c]) / static_cast<double>(total_docs);
    }
  }
  return MnbModel(std::move(theta), std::move(prior), beta1, beta2);
}

MnbModel fit(const LabeledCorpus& corpus, const Smoothing& smoothing) {
  MnbModel m = fit(accumulate_counts(corpus), smoothing);
  return MnbModel(m.theta(), m.class_prior(), m.beta1(), m.beta2(), corpus.classes);
}

SubsetModel::SubsetModel(MnbModel model, std::vector<std::size_t> features,
                         std::size_t full_vocab_size, SubsetMode mode)
    : model_(std::move(model)), features_(std::move(features)),
      reduced_index_(full_vocab_size, -1), mode_(mode) {
  for (std::size_t k = 0; k < features_.size(); ++k) {
    reduced_index_.at(features_[k]) = static_cast<std::int64_t>(k);
  }
}

SparseDocVector SubsetModel::project(const SparseDocVector& doc) const {
  SparseDocVector out;
  out.label_id = doc.label_id;
  std::uint32_t rest = 0;
  for (const auto& tc : doc.counts) {
    const auto r = reduced_index_.at(tc.index);
    if (r >= 0) {
      out.counts.push_back({static_cast<std::uint32_t>(r), tc.count});
      out.length += tc.count;
    } else {
      rest += tc.count;
    }
  }
  std::sort(out.counts.begin(), out.counts.end(),
            [](const TermCount& a, const TermCount& b) { return a.index < b.index; });
  if (mode_ == SubsetMode::PoolRest && rest > 0) {
    out.counts.push_back({static_cast<std::uint32_t>(features_.size()), rest});
    out.length += rest;
  }
  return out;
}

SubsetModel refit_on_subset(const LabeledCorpus& corpus, const std::vector<std::size_t>& features,
                            const Smoothing& smoothing, SubsetMode mode) {
  if (features.empty()) throw Error(ErrorKind::EmptySubset, "feature subset is empty");
  std::vector<char> seen(corpus.vocab_size(), 0);
  for (std::size_t f : features) {
    if (f >= corpus.vocab_size()) throw Error(ErrorKind::Precondition, "feature index out of range");
    if (seen[f]) throw Error(ErrorKind::Precondition, "duplicate feature index");
    seen[f] = 1;
  }
  const std::size_t r = features.size();
  const std::size_t bins = mode == SubsetMode::PoolRest ? r + 1 : r;
  std::vector<std::int64_t> reduced_index(corpus.vocab_size(), mode == SubsetMode::PoolRest ? static_cast<std::int64_t>(r) : -1);
  for (std::size_t k = 0; k < r; ++k) reduced_index[features[k]] = static_cast<std::int64_t>(k);

  ClassCounts counts;
  counts.num_classes = corpus.num_classes();
  counts.vocab_size = bins;
  counts.term_counts.assign(counts.num_classes * bins, 0);
  counts.class_totals.assign(counts.num_classes, 0);
  counts.doc_counts.assign(counts.num_classes, 0);
  for (const auto& d : corpus.docs) {
    ++counts.doc_counts.at(d.label_id);
    for (const auto& tc : d.counts) {
      const auto k = reduced_index[tc.index];
      if (k < 0) continue;
      counts.term_counts[d.label_id * bins + static_cast<std::size_t>(k)] += tc.count;
      counts.class_totals[d.label_id] += tc.count;
    }
  }

  Smoothing s = smoothing;
  if (!s.beta2) s.beta2 = s.beta1 * static_cast<double>(bins);
  MnbModel m = fit(counts, s);
  return SubsetModel(MnbModel(m.theta(), m.class_prior(), m.beta1(), m.beta2(), corpus.classes),
                     features, corpus.vocab_size(), mode);
}

void write_model_csv(std::ostream& out, const MnbModel& model) {
  out << "M,N,beta1,beta2\n";
  out << model.vocab_size() << ',' << model.num_classes() << ',' << format_double(model.beta1())
      << ',' << format_double(model.beta2()) << '\n';
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    out << model.class_names()[c] << ',' << format_double(model.class_log_prior()[c]);
    for (double p : model.theta().row(c)) out << ',' << format_double(p);
    out << '\n';
  }
}

MnbModel read_model_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line() || line != "M,N,beta1,beta2") {
    throw Error(ErrorKind::ParseError, "model: expected header 'M,N,beta1,beta2'");
  }
  if (!next_line()) throw Error(ErrorKind::ParseError, "model: missing dimensions line");
  const auto dims = split_csv(line);
  if (dims.size() != 4) throw Error(ErrorKind::ParseError, "model: bad dimensions line");
  const auto m = static_cast<std::size_t>(parse_double(dims[0], lineno));
  const auto n = static_cast<std::size_t>(parse_double(dims[1], lineno));
  const double beta1 = parse_double(dims[2], lineno);
  const double beta2 = parse_double(dims[3], lineno);
  if (m == 0 || n == 0) throw Error(ErrorKind::ParseError, "model: M and N must be positive");

  Matrix theta(n, m);
  std::vector<double> log_prior(n);
  std::vector<std::string> names(n);
  for (std::size_t c = 0; c < n; ++c) {
    if (!next_line()) throw Error(ErrorKind::ParseError, "model: missing class row");
    const auto fields = split_csv(line);
    if (fields.size() != m + 2) {
      throw Error(ErrorKind::ParseError, "model line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(m + 2) + " fields");
    }
    names[c] = fields[0];
    log_prior[c] = parse_double(fields[1], lineno);
    for (std::size_t i = 0; i < m; ++i) theta(c, i) = parse_double(fields[i + 2], lineno);
    if (std::fabs(compensated_sum(theta.row(c)) - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidModel, "model row for '" + names[c] + "' does not sum to 1");
    }
  }
  return MnbModel::with_log_prior(std::move(theta), std::move(log_prior), beta1, beta2,
                                  std::move(names));
}

}  // namespace mdfs
