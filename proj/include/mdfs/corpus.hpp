#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mdfs {

struct RawDocument {
  std::string label;
  std::string text;
};

struct PreprocessConfig {
  std::set<std::string> stoplist;
  std::size_t min_df = 2;
  bool lowercase = true;
};

/// Ordered term set. Terms are kept in byte-lexicographic order so feature
/// indices do not depend on document order.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// `terms` must be unique; `doc_freq` is aligned with it.
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& doc_freq() const noexcept { return doc_freq_; }
  const std::string& term(std::size_t i) const { return terms_.at(i); }

  /// Returns size() when the term is not in the vocabulary.
  std::size_t find(std::string_view term) const;

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && doc_freq_ == other.doc_freq_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TermCount {
  std::uint32_t index;
  std::uint32_t count;
  bool operator==(const TermCount&) const = default;
};

struct SparseDocVector {
  std::size_t label_id = 0;
  std::vector<TermCount> counts;  // strictly increasing index, count >= 1
  std::uint64_t length = 0;

  bool operator==(const SparseDocVector&) const = default;
};

struct LabeledCorpus {
  Vocabulary vocabulary;
  std::vector<std::string> classes;
  std::vector<SparseDocVector> docs;

  std::size_t num_classes() const noexcept { return classes.size(); }
  std::size_t vocab_size() const noexcept { return vocabulary.size(); }

  /// Corpus over the same vocabulary and classes holding docs[indices[k]].
  LabeledCorpus subset(const std::vector<std::size_t>& indices) const;
  /// Per-class document counts.
  std::vector<std::size_t> class_doc_counts() const;
};

enum class CorpusFormat { Directory, Tsv, Sparse };

CorpusFormat parse_corpus_format(std::string_view tag);

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config);

Vocabulary build_vocabulary(const std::vector<RawDocument>& docs, const PreprocessConfig& config);

SparseDocVector vectorize(const RawDocument& doc, const Vocabulary& vocab,
                          const std::vector<std::string>& classes, const PreprocessConfig& config);

/// Builds vocabulary and vectors from raw documents. Class order is the order
/// of first appearance unless `classes` is supplied.
LabeledCorpus build_corpus(const std::vector<RawDocument>& docs, const PreprocessConfig& config,
                           std::vector<std::string> classes = {});

/// Vectorizes `docs` against an existing vocabulary and class list (held-out
/// test sets).
LabeledCorpus vectorize_corpus(const std::vector<RawDocument>& docs, const Vocabulary& vocab,
                               const std::vector<std::string>& classes,
                               const PreprocessConfig& config);

std::vector<RawDocument> read_directory_documents(const std::filesystem::path& root);
std::vector<RawDocument> read_tsv_documents(const std::filesystem::path& path);
LabeledCorpus read_sparse_corpus(const std::filesystem::path& path);
LabeledCorpus parse_sparse_corpus(std::istream& in, const std::string& source_name);

LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                          const PreprocessConfig& config);

/// Loads a held-out corpus over a reference corpus's vocabulary and classes.
LabeledCorpus load_corpus_like(const std::filesystem::path& path, CorpusFormat format,
                               const PreprocessConfig& config, const LabeledCorpus& reference);

/// Document frequencies recomputed from vectors (one entry per feature).
std::vector<std::size_t> recount_doc_freq(const LabeledCorpus& corpus);

void write_vocabulary_csv(std::ostream& out, const Vocabulary& vocab);
void write_sparse_corpus(std::ostream& out, const LabeledCorpus& corpus);

std::set<std::string> read_stoplist(const std::filesystem::path& path);

}  // namespace mdfs
