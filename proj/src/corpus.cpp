#include "mdfs/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mdfs/common.hpp"

namespace mdfs {

namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one UTF-8 sequence starting at `pos` and advances it. Malformed
// input decodes to U+FFFD, which the tokenizer treats as a separator.
char32_t next_code_point(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos++]);
  if (b0 < 0x80) return b0;
  std::size_t extra = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    return kInvalid;
  }
  if (pos + extra > s.size()) {
    pos = s.size();
    return kInvalid;
  }
  for (std::size_t i = 0; i < extra; ++i) {
    const auto b = static_cast<unsigned char>(s[pos]);
    if ((b & 0xC0) != 0x80) return kInvalid;
    cp = (cp << 6) | (b & 0x3F);
    ++pos;
  }
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Letter ranges for the common alphabetic scripts. Locale-independent so that
// tokenization is identical on every machine.
bool is_letter(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (cp >= 0xC0 && cp <= 0x2AF) return cp != 0xD7 && cp != 0xF7;
  if (cp >= 0x370 && cp <= 0x3FF) return cp != 0x375 && cp != 0x37E && cp != 0x384 && cp != 0x385 && cp != 0x387;
  if (cp >= 0x400 && cp <= 0x52F) return cp < 0x482 || cp > 0x489;
  if (cp >= 0x531 && cp <= 0x587) return true;
  if (cp >= 0x5D0 && cp <= 0x5EA) return true;
  if (cp >= 0x620 && cp <= 0x64A) return true;
  if (cp >= 0x904 && cp <= 0x939) return true;
  if (cp >= 0x3041 && cp <= 0x30FF) return cp != 0x30FB;
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;
  if (cp >= 0xAC00 && cp <= 0xD7A3) return true;
  return false;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0x80) return cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x12F && cp % 2 == 0) return cp + 1;
  if (cp >= 0x132 && cp <= 0x137 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x139 && cp <= 0x148 && cp % 2 == 1) return cp + 1;
  if (cp >= 0x14A && cp <= 0x177 && cp % 2 == 0) return cp + 1;
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + msg);
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t class_index(const std::vector<std::string>& classes, const std::string& label) {
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw Error(ErrorKind::UnknownClass, "label '" + label + "'");
  return static_cast<std::size_t>(it - classes.begin());
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)) {
  if (doc_freq_.size() != terms_.size()) {
    throw Error(ErrorKind::Precondition, "vocabulary doc_freq size mismatch");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) {
      throw Error(ErrorKind::Precondition, "duplicate vocabulary term '" + terms_[i] + "'");
    }
  }
}

std::size_t Vocabulary::find(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  return it == index_.end() ? terms_.size() : it->second;
}

LabeledCorpus LabeledCorpus::subset(const std::vector<std::size_t>& indices) const {
  LabeledCorpus out{vocabulary, classes, {}};
  out.docs.reserve(indices.size());
  for (std::size_t i : indices) out.docs.push_back(docs.at(i));
  return out;
}

std::vector<std::size_t> LabeledCorpus::class_doc_counts() const {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (const auto& d : docs) ++counts.at(d.label_id);
  return counts;
}

CorpusFormat parse_corpus_format(std::string_view tag) {
  if (tag == "dir") return CorpusFormat::Directory;
  if (tag == "tsv") return CorpusFormat::Tsv;
  if (tag == "sparse") return CorpusFormat::Sparse;
  throw Error(ErrorKind::ParseError, "unknown corpus format '" + std::string(tag) + "'");
}

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !config.stoplist.contains(current)) tokens.push_back(current);
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = next_code_point(text, pos);
    if (is_letter(cp)) {
      append_utf8(current, config.lowercase ? to_lower(cp) : cp);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Vocabulary build_vocabulary(const std::vector<RawDocument>& docs, const PreprocessConfig& config) {
  if (config.min_df < 1) throw Error(ErrorKind::Precondition, "min_df must be >= 1");
  if (docs.empty()) throw Error(ErrorKind::EmptyVocabulary, "no documents");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    auto tokens = tokenize(doc.text, config);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[std::move(t)];
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> freq;
  for (auto& [term, count] : df) {  // std::map iterates in byte order
    if (count >= config.min_df) {
      terms.push_back(term);
      freq.push_back(count);
    }
  }
  if (terms.empty()) throw Error(ErrorKind::EmptyVocabulary, "no term survives pruning");
  return Vocabulary(std::move(terms), std::move(freq));
}

SparseDocVector vectorize(const RawDocument& doc, const Vocabulary& vocab,
                          const std::vector<std::string>& classes, const PreprocessConfig& config) {
  SparseDocVector out;
  out.label_id = class_index(classes, doc.label);
  std::vector<std::uint32_t> ids;
  for (const auto& t : tokenize(doc.text, config)) {
    const std::size_t i = vocab.find(t);
    if (i < vocab.size()) ids.push_back(static_cast<std::uint32_t>(i));
  }
  std::sort(ids.begin(), ids.end());
  for (std::size_t k = 0; k < ids.size();) {
    std::size_t j = k;
    while (j < ids.size() && ids[j] == ids[k]) ++j;
    out.counts.push_back({ids[k], static_cast<std::uint32_t>(j - k)});
    k = j;
  }
  out.length = ids.size();
  return out;
}

LabeledCorpus build_corpus(const std::vector<RawDocument>& docs, const PreprocessConfig& config,
                           std::vector<std::string> classes) {
  if (classes.empty()) {
    for (const auto& d : docs) {
      if (d.label.empty()) throw Error(ErrorKind::ParseError, "empty class label");
      if (std::find(classes.begin(), classes.end(), d.label) == classes.end()) {
        classes.push_back(d.label);
      }
    }
  }
  Vocabulary vocab = build_vocabulary(docs, config);
  return vectorize_corpus(docs, vocab, classes, config);
}

LabeledCorpus vectorize_corpus(const std::vector<RawDocument>& docs, const Vocabulary& vocab,
                               const std::vector<std::string>& classes,
                               const PreprocessConfig& config) {
  LabeledCorpus corpus{vocab, classes, {}};
  corpus.docs.reserve(docs.size());
  for (const auto& d : docs) corpus.docs.push_back(vectorize(d, vocab, classes, config));
  return corpus;
}

std::vector<RawDocument> read_directory_documents(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw Error(ErrorKind::ParseError, "not a directory: " + root.string());
  }
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && entry.path().filename().string().front() != '.') {
      class_dirs.push_back(entry.path());
    }
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  std::vector<RawDocument> docs;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().filename().string().front() != '.') {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    const std::string label = dir.filename().string();
    for (const auto& f : files) docs.push_back({label, read_file(f)});
  }
  if (docs.empty()) throw Error(ErrorKind::ParseError, "no documents under " + root.string());
  return docs;
}

std::vector<RawDocument> read_tsv_documents(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) parse_error(path.string(), lineno, "missing TAB separator");
    if (tab == 0) parse_error(path.string(), lineno, "empty class label");
    docs.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  if (docs.empty()) throw Error(ErrorKind::ParseError, "no documents in " + path.string());
  return docs;
}

LabeledCorpus parse_sparse_corpus(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t vocab_size = 0;
  std::size_t num_classes = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream header(line);
    std::string m_tok, n_tok, rest;
    header >> m_tok >> n_tok;
    if (!parse_uint(m_tok, vocab_size) || !parse_uint(n_tok, num_classes) || (header >> rest)) {
      parse_error(source, lineno, "expected header 'M N'");
    }
    have_header = true;
    break;
  }
  if (!have_header) parse_error(source, lineno, "missing header");
  if (vocab_size == 0) throw Error(ErrorKind::EmptyVocabulary, source + ": M = 0");
  if (num_classes == 0) parse_error(source, lineno, "N must be >= 1");

  LabeledCorpus corpus;
  std::vector<std::string> terms(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) terms[i] = "w" + std::to_string(i);
  for (std::size_t c = 0; c < num_classes; ++c) corpus.classes.push_back("c" + std::to_string(c));

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tok;
    fields >> tok;
    SparseDocVector doc;
    if (!parse_uint(tok, doc.label_id) || doc.label_id >= num_classes) {
      parse_error(source, lineno, "bad label id '" + tok + "'");
    }
    while (fields >> tok) {
      const auto colon = tok.find(':');
      std::uint32_t idx = 0, count = 0;
      if (colon == std::string::npos ||
          !parse_uint(std::string_view(tok).substr(0, colon), idx) ||
          !parse_uint(std::string_view(tok).substr(colon + 1), count)) {
        parse_error(source, lineno, "bad feature '" + tok + "'");
      }
      if (idx >= vocab_size) parse_error(source, lineno, "feature index out of range: " + tok);
      if (count == 0) parse_error(source, lineno, "zero count: " + tok);
      if (!doc.counts.empty() && doc.counts.back().index >= idx) {
        parse_error(source, lineno, "feature indices must be strictly increasing");
      }
      doc.counts.push_back({idx, count});
      doc.length += count;
    }
    corpus.docs.push_back(std::move(doc));
  }
  corpus.vocabulary = Vocabulary(std::move(terms), std::vector<std::size_t>(vocab_size, 0));
  corpus.vocabulary = Vocabulary(corpus.vocabulary.terms(), recount_doc_freq(corpus));
  return corpus;
}

LabeledCorpus read_sparse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  return parse_sparse_corpus(in, path.string());
}

LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                          const PreprocessConfig& config) {
  switch (format) {
    case CorpusFormat::Directory: return build_corpus(read_directory_documents(path), config);
    case CorpusFormat::Tsv: return build_corpus(read_tsv_documents(path), config);
    case CorpusFormat::Sparse: return read_sparse_corpus(path);
  }
  throw Error(ErrorKind::ParseError, "unknown corpus format");
}

LabeledCorpus load_corpus_like(const std::filesystem::path& path, CorpusFormat format,
                               const PreprocessConfig& config, const LabeledCorpus& reference) {
  if (format == CorpusFormat::Sparse) {
    LabeledCorpus c = read_sparse_corpus(path);
    if (c.vocab_size() != reference.vocab_size() || c.num_classes() != reference.num_classes()) {
      throw Error(ErrorKind::ParseError, path.string() + ": M/N differ from the training corpus");
    }
    c.vocabulary = reference.vocabulary;
    c.classes = reference.classes;
    return c;
  }
  const auto docs = format == CorpusFormat::Directory ? read_directory_documents(path)
                                                      : read_tsv_documents(path);
  return vectorize_corpus(docs, reference.vocabulary, reference.classes, config);
}

std::vector<std::size_t> recount_doc_freq(const LabeledCorpus& corpus) {
  std::vector<std::size_t> df(corpus.vocab_size(), 0);
  for (const auto& d : corpus.docs) {
    for (const auto& tc : d.counts) ++df.at(tc.index);
  }
  return df;
}

void write_vocabulary_csv(std::ostream& out, const Vocabulary& vocab) {
  out << "index,term,doc_freq\n";
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << i << ',' << vocab.terms()[i] << ',' << vocab.doc_freq()[i] << '\n';
  }
}

void write_sparse_corpus(std::ostream& out, const LabeledCorpus& corpus) {
  out << corpus.vocab_size() << ' ' << corpus.num_classes() << '\n';
  for (const auto& d : corpus.docs) {
    out << d.label_id;
    for (const auto& tc : d.counts) out << ' ' << tc.index << ':' << tc.count;
    out << '\n';
  }
}

std::set<std::string> read_stoplist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open stoplist " + path.string());
  std::set<std::string> words;
  std::string line;
  PreprocessConfig lower;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') continue;
    for (auto& t : tokenize(line, lower)) words.insert(std::move(t));
  }
  return words;
}

}  // namespace mdfs
