#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "mdfs/common.hpp"
#include "mdfs/corpus.hpp"
#include "test_util.hpp"

using namespace mdfs;
using mdfs::testing::TempDir;
using mdfs::testing::write_file;

namespace {

PreprocessConfig config(std::size_t min_df = 2, std::set<std::string> stop = {}) {
  PreprocessConfig c;
  c.min_df = min_df;
  c.stoplist = std::move(stop);
  return c;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected mdfs::Error");
  return ErrorKind::Precondition;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("The cat sat", config(1, {"the"})) == std::vector<std::string>{"cat", "sat"});
  CHECK(tokenize("", config()).empty());
  CHECK(tokenize("Cat cat CAT", config()) == std::vector<std::string>{"cat", "cat", "cat"});

  SUBCASE("punctuation and digits separate tokens") {
    CHECK(tokenize("e-mail: foo42bar, x!", config()) ==
          std::vector<std::string>{"e", "mail", "foo", "bar", "x"});
  }
  SUBCASE("keep case") {
    auto c = config();
    c.lowercase = false;
    CHECK(tokenize("Cat cat", c) == std::vector<std::string>{"Cat", "cat"});
  }
  SUBCASE("non-ascii letters") {
    CHECK(tokenize("Café ÜBER Σοφία", config()) ==
          std::vector<std::string>{"café", "über", "σοφία"});
    CHECK(tokenize("Москва", config()) == std::vector<std::string>{"москва"});
  }
  SUBCASE("malformed utf-8 is a separator") {
    CHECK(tokenize(std::string("ab\xff" "cd"), config()) == std::vector<std::string>{"ab", "cd"});
    CHECK(tokenize(std::string("ab\xc3"), config()) == std::vector<std::string>{"ab"});
  }
  SUBCASE("stoplist applies after case folding") {
    CHECK(tokenize("THE end", config(1, {"the"})) == std::vector<std::string>{"end"});
  }
}

TEST_CASE("build_vocabulary") {
  const std::vector<RawDocument> docs{{"x", "a b"}, {"x", "a c"}, {"x", "a"}};
  const auto v2 = build_vocabulary(docs, config(2));
  CHECK(v2.terms() == std::vector<std::string>{"a"});
  CHECK(v2.doc_freq() == std::vector<std::size_t>{3});
  const auto v1 = build_vocabulary(docs, config(1));
  CHECK(v1.terms() == std::vector<std::string>{"a", "b", "c"});
  CHECK(v1.doc_freq() == std::vector<std::size_t>{3, 1, 1});
  CHECK(v1.find("b") == 1);
  CHECK(v1.find("zzz") == v1.size());

  CHECK(kind_of([&] { build_vocabulary(docs, config(1, {"a", "b", "c"})); }) ==
        ErrorKind::EmptyVocabulary);
  CHECK(kind_of([&] { build_vocabulary({}, config(1)); }) == ErrorKind::EmptyVocabulary);
}

TEST_CASE("repeated term counts once per document") {
  CHECK(kind_of([] { build_vocabulary({{"x", "q q q"}, {"x", "r"}}, config(2)); }) ==
        ErrorKind::EmptyVocabulary);
}

TEST_CASE("vectorize") {
  const Vocabulary vocab({"a", "b", "c"}, {1, 1, 1});
  const std::vector<std::string> classes{"x", "y"};
  const auto v = vectorize({"y", "a b a"}, vocab, classes, config());
  CHECK(v.label_id == 1);
  CHECK(v.counts == std::vector<TermCount>{{0, 2}, {1, 1}});
  CHECK(v.length == 3);
  const auto oov = vectorize({"x", "z z"}, vocab, classes, config());
  CHECK(oov.counts.empty());
  CHECK(oov.length == 0);
  CHECK(kind_of([&] { vectorize({"sports", "a"}, vocab, {"politics"}, config()); }) ==
        ErrorKind::UnknownClass);
}

TEST_CASE("build_corpus keeps first-appearance class order and empty docs") {
  const auto corpus = build_corpus(
      {{"sports", "ball goal"}, {"politics", "vote ball"}, {"sports", "goal vote"}, {"politics", "!!!"}},
      config(2));
  CHECK(corpus.classes == std::vector<std::string>{"sports", "politics"});
  CHECK(corpus.vocabulary.terms() == std::vector<std::string>{"ball", "goal", "vote"});
  REQUIRE(corpus.docs.size() == 4);
  CHECK(corpus.docs[3].length == 0);
  CHECK(corpus.class_doc_counts() == std::vector<std::size_t>{2, 2});
}

TEST_CASE("property: round trip, pruning soundness, idempotence, determinism") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta",
                                       "theta", "iota", "kappa", "Lambda", "MU"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> len(0, 12);
  std::uniform_int_distribution<std::size_t> min_df(1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RawDocument> docs;
    const int n_docs = 3 + trial % 7;
    for (int d = 0; d < n_docs; ++d) {
      std::string text;
      for (int k = len(rng); k > 0; --k) text += words[pick(rng)] + (k % 3 ? " " : ", ");
      docs.push_back({d % 2 ? "odd" : "even", text});
    }
    docs.push_back({"even", "alpha alpha beta"});
    docs.push_back({"odd", "alpha beta beta"});
    docs.push_back({"odd", "alpha beta"});
    const auto cfg = config(min_df(rng), {"eta"});
    const auto corpus = build_corpus(docs, cfg);

    for (std::size_t d = 0; d < docs.size(); ++d) {
      std::uint64_t in_vocab = 0;
      for (const auto& t : tokenize(docs[d].text, cfg)) {
        in_vocab += corpus.vocabulary.find(t) < corpus.vocab_size();
      }
      CHECK(corpus.docs[d].length == in_vocab);
      std::uint64_t s = 0;
      for (const auto& tc : corpus.docs[d].counts) s += tc.count;
      CHECK(s == corpus.docs[d].length);
    }
    for (std::size_t i = 0; i < corpus.vocab_size(); ++i) {
      CHECK(corpus.vocabulary.doc_freq()[i] >= cfg.min_df);
      CHECK(corpus.vocabulary.terms()[i] != "eta");
    }
    CHECK(std::is_sorted(corpus.vocabulary.terms().begin(), corpus.vocabulary.terms().end()));
    CHECK(recount_doc_freq(corpus) == corpus.vocabulary.doc_freq());

    // Rebuilding from the vectorized text changes nothing.
    std::vector<RawDocument> again;
    for (const auto& d : corpus.docs) {
      std::string text;
      for (const auto& tc : d.counts) {
        for (std::uint32_t k = 0; k < tc.count; ++k) text += corpus.vocabulary.term(tc.index) + " ";
      }
      again.push_back({corpus.classes[d.label_id], text});
    }
    const auto rebuilt = build_corpus(again, cfg, corpus.classes);
    CHECK(rebuilt.vocabulary == corpus.vocabulary);
    CHECK(rebuilt.docs == corpus.docs);

    const auto twice = build_corpus(docs, cfg);
    CHECK(twice.vocabulary == corpus.vocabulary);
    CHECK(twice.docs == corpus.docs);
  }
}

TEST_CASE("term order does not depend on document order") {
  std::vector<RawDocument> docs{{"a", "x y z"}, {"b", "z y w"}, {"a", "w x"}, {"b", "y"}};
  const auto c1 = build_corpus(docs, config(1), {"a", "b"});
  std::reverse(docs.begin(), docs.end());
  const auto c2 = build_corpus(docs, config(1), {"a", "b"});
  CHECK(c1.vocabulary == c2.vocabulary);
}

TEST_CASE("directory format") {
  TempDir dir("dircorpus");
  write_file(dir / "comp/1.txt", "computer code computer");
  write_file(dir / "comp/2.txt", "code compile");
  write_file(dir / "alt/1.txt", "faith belief code");
  write_file(dir / "alt/2.txt", "belief faith");
  write_file(dir / "alt/.hidden", "ignored ignored");
  const auto corpus = load_corpus(dir.path(), CorpusFormat::Directory, config(2));
  CHECK(corpus.classes == std::vector<std::string>{"alt", "comp"});
  CHECK(corpus.vocabulary.terms() == std::vector<std::string>{"belief", "code", "faith"});
  CHECK(corpus.docs.size() == 4);
  CHECK(corpus.class_doc_counts() == std::vector<std::size_t>{2, 2});
  CHECK(kind_of([&] { load_corpus(dir / "missing", CorpusFormat::Directory, config()); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("tsv format") {
  TempDir dir("tsv");
  write_file(dir / "c.tsv", "sports\tgame tonight\npolitics\tvote tonight\r\n\nsports\tgame day\n");
  const auto corpus = load_corpus(dir / "c.tsv", CorpusFormat::Tsv, config(1));
  CHECK(corpus.classes == std::vector<std::string>{"sports", "politics"});
  CHECK(corpus.docs.size() == 3);
  CHECK(corpus.vocabulary.terms() == std::vector<std::string>{"day", "game", "tonight", "vote"});

  write_file(dir / "bad.tsv", "sports\tok\nno tab here\n");
  try {
    load_corpus(dir / "bad.tsv", CorpusFormat::Tsv, config(1));
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("bad.tsv:2") != std::string::npos);
  }
}

TEST_CASE("sparse format") {
  std::istringstream in("10 2\n1 4:2 9:1\n0\n0 0:3\n");
  const auto corpus = parse_sparse_corpus(in, "mem");
  CHECK(corpus.vocab_size() == 10);
  CHECK(corpus.classes == std::vector<std::string>{"c0", "c1"});
  REQUIRE(corpus.docs.size() == 3);
  CHECK(corpus.docs[0].label_id == 1);
  CHECK(corpus.docs[0].counts == std::vector<TermCount>{{4, 2}, {9, 1}});
  CHECK(corpus.docs[0].length == 3);
  CHECK(corpus.docs[1].counts.empty());
  CHECK(corpus.vocabulary.doc_freq()[4] == 1);
  CHECK(corpus.vocabulary.doc_freq()[0] == 1);

  std::ostringstream out;
  write_sparse_corpus(out, corpus);
  CHECK(out.str() == "10 2\n1 4:2 9:1\n0\n0 0:3\n");

  auto error_at = [](const std::string& text) {
    std::istringstream s(text);
    try {
      parse_sparse_corpus(s, "f");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
      return std::string(e.what());
    }
    FAIL("expected ParseError");
    return std::string();
  };
  CHECK(error_at("").find("missing header") != std::string::npos);
  CHECK(error_at("3\n").find("f:1") != std::string::npos);
  CHECK(error_at("3 2\n0 1:1 1:2\n").find("f:2") != std::string::npos);
  CHECK(error_at("3 2\n0 3:1\n").find("out of range") != std::string::npos);
  CHECK(error_at("3 2\n2 0:1\n").find("label") != std::string::npos);
  CHECK(error_at("3 2\n0 0:0\n").find("zero count") != std::string::npos);
  CHECK(error_at("3 2\n0 0-1\n").find("bad feature") != std::string::npos);
}

TEST_CASE("held-out corpus reuses the reference vocabulary") {
  TempDir dir("like");
  write_file(dir / "train.tsv", "a\tx y\na\tx z\nb\ty z\nb\tz w\n");
  write_file(dir / "test.tsv", "b\tz q q\na\tx\n");
  const auto train = load_corpus(dir / "train.tsv", CorpusFormat::Tsv, config(1));
  const auto test = load_corpus_like(dir / "test.tsv", CorpusFormat::Tsv, config(1), train);
  CHECK(test.vocabulary == train.vocabulary);
  CHECK(test.classes == train.classes);
  REQUIRE(test.docs.size() == 2);
  CHECK(test.docs[0].label_id == 1);
  CHECK(test.docs[0].length == 1);

  write_file(dir / "unknown.tsv", "c\tx\n");
  CHECK(kind_of([&] { load_corpus_like(dir / "unknown.tsv", CorpusFormat::Tsv, config(1), train); }) ==
        ErrorKind::UnknownClass);
}

TEST_CASE("vocabulary csv and stoplist file") {
  const Vocabulary vocab({"a", "b"}, {3, 2});
  std::ostringstream out;
  write_vocabulary_csv(out, vocab);
  CHECK(out.str() == "index,term,doc_freq\n0,a,3\n1,b,2\n");

  TempDir dir("stop");
  write_file(dir / "stop.txt", "the\n\nAnd\r\nof\n");
  const auto stop = read_stoplist(dir / "stop.txt");
  CHECK(stop.count("the") == 1);
  CHECK(stop.count("of") == 1);
  CHECK(stop.count("and") == 1);
}

TEST_CASE("format tags") {
  CHECK(parse_corpus_format("dir") == CorpusFormat::Directory);
  CHECK(parse_corpus_format("tsv") == CorpusFormat::Tsv);
  CHECK(parse_corpus_format("sparse") == CorpusFormat::Sparse);
  CHECK(kind_of([] { parse_corpus_format("xml"); }) == ErrorKind::ParseError);
}

TEST_CASE("subset keeps vocabulary and classes") {
  const auto corpus = build_corpus({{"a", "x y"}, {"b", "x"}, {"a", "y y"}}, config(1));
  const auto sub = corpus.subset({2, 0});
  CHECK(sub.vocabulary == corpus.vocabulary);
  CHECK(sub.classes == corpus.classes);
  REQUIRE(sub.docs.size() == 2);
  CHECK(sub.docs[0] == corpus.docs[2]);
}
