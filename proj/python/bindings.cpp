#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mdfs/corpus.hpp"
#include "mdfs/divergence.hpp"
#include "mdfs/evaluation.hpp"
#include "mdfs/nb_model.hpp"
#include "mdfs/ranking.hpp"
#include "mdfs/synthetic.hpp"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<double>>;

mdfs::PreprocessConfig make_config(std::size_t min_df, const std::set<std::string>& stoplist,
                                   bool lowercase) {
  mdfs::PreprocessConfig c;
  c.min_df = min_df;
  c.stoplist = stoplist;
  c.lowercase = lowercase;
  return c;
}

mdfs::ClassPriors make_priors(const std::vector<double>& priors, std::size_t n) {
  return priors.empty() ? mdfs::ClassPriors::uniform(n) : mdfs::ClassPriors(priors);
}

py::dict metrics_dict(const mdfs::Metrics& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  d["weighted_precision"] = m.weighted_precision;
  d["weighted_recall"] = m.weighted_recall;
  d["weighted_f1"] = m.weighted_f1;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Maximum-discrimination feature selection for multinomial naive Bayes";
  py::register_exception<mdfs::Error>(m, "MdfsError", PyExc_ValueError);

  m.def("tokenize",
        [](const std::string& text, const std::set<std::string>& stoplist, bool lowercase) {
          return mdfs::tokenize(text, make_config(1, stoplist, lowercase));
        },
        py::arg("text"), py::arg("stoplist") = std::set<std::string>{}, py::arg("lowercase") = true);

  py::class_<mdfs::LabeledCorpus>(m, "Corpus")
      .def_property_readonly("classes", [](const mdfs::LabeledCorpus& c) { return c.classes; })
      .def_property_readonly("terms", [](const mdfs::LabeledCorpus& c) { return c.vocabulary.terms(); })
      .def_property_readonly("doc_freq", [](const mdfs::LabeledCorpus& c) { return c.vocabulary.doc_freq(); })
      .def_property_readonly("vocab_size", &mdfs::LabeledCorpus::vocab_size)
      .def_property_readonly("num_classes", &mdfs::LabeledCorpus::num_classes)
      .def("__len__", [](const mdfs::LabeledCorpus& c) { return c.docs.size(); })
      .def("labels", [](const mdfs::LabeledCorpus& c) {
        std::vector<std::size_t> out;
        for (const auto& d : c.docs) out.push_back(d.label_id);
        return out;
      })
      .def("doc", [](const mdfs::LabeledCorpus& c, std::size_t i) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;
        for (const auto& tc : c.docs.at(i).counts) counts.emplace_back(tc.index, tc.count);
        return py::make_tuple(c.docs.at(i).label_id, counts);
      })
      .def("to_sparse", [](const mdfs::LabeledCorpus& c) {
        std::ostringstream os;
        mdfs::write_sparse_corpus(os, c);
        return os.str();
      });

  m.def("corpus_from_documents",
        [](const std::vector<std::pair<std::string, std::string>>& docs, std::size_t min_df,
           const std::set<std::string>& stoplist, bool lowercase) {
          std::vector<mdfs::RawDocument> raw;
          for (const auto& [label, text] : docs) raw.push_back({label, text});
          return mdfs::build_corpus(raw, make_config(min_df, stoplist, lowercase));
        },
        py::arg("documents"), py::arg("min_df") = 2, py::arg("stoplist") = std::set<std::string>{},
        py::arg("lowercase") = true);
  m.def("load_corpus",
        [](const std::string& path, const std::string& format, std::size_t min_df,
           const std::set<std::string>& stoplist, bool lowercase) {
          return mdfs::load_corpus(path, mdfs::parse_corpus_format(format),
                                   make_config(min_df, stoplist, lowercase));
        },
        py::arg("path"), py::arg("format") = "dir", py::arg("min_df") = 2,
        py::arg("stoplist") = std::set<std::string>{}, py::arg("lowercase") = true);

  m.def("kl", [](const std::vector<double>& p, const std::vector<double>& q) { return mdfs::kl(p, q); });
  m.def("jeffreys", [](const std::vector<double>& p, const std::vector<double>& q) { return mdfs::jeffreys(p, q); });
  m.def("jmh", [](const Rows& theta, const std::vector<double>& priors) {
          return mdfs::jmh(mdfs::Matrix::from_rows(theta), make_priors(priors, theta.size()));
        },
        py::arg("theta"), py::arg("priors") = std::vector<double>{});
  m.def("pooled_complement",
        [](const std::vector<double>& column, const std::vector<double>& priors, std::size_t excluded) {
          return mdfs::pooled_complement(column, make_priors(priors, column.size()), excluded);
        },
        py::arg("column"), py::arg("priors"), py::arg("excluded"));
  m.def("noncentrality_j",
        [](const std::vector<double>& p_hat, const std::vector<double>& p_ref, double length) {
          return mdfs::noncentrality_j(p_hat, p_ref, length);
        },
        py::arg("p_hat"), py::arg("p_ref"), py::arg("length") = 1.0);

  py::class_<mdfs::MnbModel>(m, "MnbModel")
      .def_property_readonly("theta", [](const mdfs::MnbModel& x) { return x.theta().to_rows(); })
      .def_property_readonly("class_log_prior", &mdfs::MnbModel::class_log_prior)
      .def_property_readonly("class_names", &mdfs::MnbModel::class_names)
      .def_property_readonly("beta1", &mdfs::MnbModel::beta1)
      .def_property_readonly("beta2", &mdfs::MnbModel::beta2)
      .def("classify", [](const mdfs::MnbModel& x, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& counts) {
        mdfs::SparseDocVector doc;
        for (const auto& [i, n] : counts) {
          doc.counts.push_back({i, n});
          doc.length += n;
        }
        return x.classify(doc);
      })
      .def("to_csv", [](const mdfs::MnbModel& x) {
        std::ostringstream os;
        mdfs::write_model_csv(os, x);
        return os.str();
      });
  m.def("model_from_csv", [](const std::string& text) {
    std::istringstream is(text);
    return mdfs::read_model_csv(is);
  });
  m.def("fit",
        [](const mdfs::LabeledCorpus& corpus, double beta1, std::optional<double> beta2) {
          return mdfs::fit(corpus, mdfs::Smoothing{beta1, beta2});
        },
        py::arg("corpus"), py::arg("beta1") = 1.0, py::arg("beta2") = py::none());

  py::class_<mdfs::FeatureRanking>(m, "FeatureRanking")
      .def_property_readonly("method", [](const mdfs::FeatureRanking& r) { return std::string(mdfs::method_name(r.method)); })
      .def_readonly("order", &mdfs::FeatureRanking::order)
      .def_readonly("scores", &mdfs::FeatureRanking::scores)
      .def_readonly("step_divergences", &mdfs::FeatureRanking::step_divergences)
      .def("top", &mdfs::select_top, py::arg("r"));

  m.def("md_rank_two_class_greedy", [](const Rows& theta) {
    return mdfs::md_rank_two_class_greedy(mdfs::Matrix::from_rows(theta));
  });
  m.def("md_rank_two_class", [](const Rows& theta) {
    return mdfs::md_rank_two_class(mdfs::Matrix::from_rows(theta));
  });
  m.def("md_rank_multiclass",
        [](const Rows& theta, const std::vector<double>& priors) {
          return mdfs::md_rank_multiclass(mdfs::Matrix::from_rows(theta), make_priors(priors, theta.size()));
        },
        py::arg("theta"), py::arg("priors") = std::vector<double>{});
  m.def("md_chi2_rank",
        [](const Rows& theta, const std::vector<double>& priors, double length) {
          return mdfs::md_chi2_rank(mdfs::Matrix::from_rows(theta), make_priors(priors, theta.size()), length);
        },
        py::arg("theta"), py::arg("priors") = std::vector<double>{}, py::arg("length") = 1.0);
  m.def("rank_features",
        [](const mdfs::LabeledCorpus& corpus, const std::string& method, double beta1,
           std::optional<double> beta2, double length) {
          mdfs::RankOptions opts;
          opts.smoothing = {beta1, beta2};
          opts.length = length;
          return mdfs::rank_features(corpus, mdfs::parse_method(method), opts);
        },
        py::arg("corpus"), py::arg("method") = "md", py::arg("beta1") = 1.0,
        py::arg("beta2") = py::none(), py::arg("length") = 1.0);
  m.def("algorithm_agreement_check", [](const Rows& theta) {
    const auto r = mdfs::algorithm_agreement_check(mdfs::Matrix::from_rows(theta));
    py::dict d;
    d["e1"] = r.e1;
    d["e2"] = r.e2;
    d["delta"] = r.delta;
    d["bound"] = r.bound;
    d["condition_holds"] = r.condition_holds;
    d["greedy_first"] = r.greedy_first;
    d["first_picks_agree"] = r.first_picks_agree;
    d["greedy_second"] = r.greedy_second;
    d["second_picks_agree"] = r.second_picks_agree;
    return d;
  });

  m.def("metrics",
        [](const std::vector<std::vector<std::uint64_t>>& counts, const std::vector<double>& weights) {
          mdfs::ConfusionMatrix cm(counts.size());
          for (std::size_t t = 0; t < counts.size(); ++t) {
            for (std::size_t p = 0; p < counts[t].size(); ++p) {
              for (std::uint64_t k = 0; k < counts[t][p]; ++k) cm.add(t, p);
            }
          }
          return metrics_dict(mdfs::metrics(cm, weights));
        },
        py::arg("confusion"), py::arg("weights"));
  m.def("sweep",
        [](const mdfs::LabeledCorpus& corpus, const std::vector<std::string>& methods,
           const std::vector<std::size_t>& budgets, std::size_t folds, double test_fraction,
           std::uint64_t seed, double beta1, bool pool_rest) {
          std::vector<mdfs::Method> ms;
          for (const auto& name : methods) ms.push_back(mdfs::parse_method(name));
          mdfs::SweepOptions opts;
          opts.seed = seed;
          opts.rank.smoothing.beta1 = beta1;
          if (pool_rest) opts.subset_mode = mdfs::SubsetMode::PoolRest;
          const auto protocol = test_fraction > 0.0 ? mdfs::Protocol::holdout(test_fraction)
                                                    : mdfs::Protocol::kfold(folds);
          py::list rows;
          for (const auto& r : mdfs::sweep(corpus, ms, budgets, protocol, opts).rows) {
            py::dict d;
            d["method"] = std::string(mdfs::method_name(r.method));
            d["r"] = r.budget;
            d["fold"] = r.fold;
            d["accuracy"] = r.accuracy;
            d["precision"] = r.precision;
            d["recall"] = r.recall;
            d["f1"] = r.f1;
            d["train_docs"] = r.train_docs;
            d["test_docs"] = r.test_docs;
            rows.append(d);
          }
          return rows;
        },
        py::arg("corpus"), py::arg("methods"), py::arg("budgets") = std::vector<std::size_t>{},
        py::arg("folds") = 10, py::arg("test_fraction") = 0.0, py::arg("seed") = 1,
        py::arg("beta1") = 1.0, py::arg("pool_rest") = false);

  m.def("random_theta",
        [](std::size_t n, std::size_t vocab, double concentration, std::uint64_t seed) {
          return mdfs::random_theta(n, vocab, concentration, seed).to_rows();
        },
        py::arg("num_classes"), py::arg("vocab_size"), py::arg("concentration") = 1.0,
        py::arg("seed") = 1);
  m.def("sample_corpus",
        [](const Rows& theta, const std::vector<std::size_t>& docs_per_class,
           std::uint64_t min_length, std::uint64_t max_length, std::uint64_t seed) {
          mdfs::GeneratorSpec spec;
          spec.theta_star = mdfs::Matrix::from_rows(theta);
          spec.docs_per_class = docs_per_class;
          spec.doc_length = {min_length, max_length};
          spec.seed = seed;
          return mdfs::sample_corpus(spec);
        },
        py::arg("theta"), py::arg("docs_per_class"), py::arg("min_length") = 100,
        py::arg("max_length") = 100, py::arg("seed") = 1);
  m.def("theorem1_harness",
        [](std::size_t trials, std::size_t vocab, std::uint64_t seed) {
          const auto s = mdfs::theorem1_harness(trials, vocab, seed);
          py::dict d;
          d["trials"] = s.trials;
          d["violations"] = s.violations;
          d["max_violation"] = s.max_violation;
          d["passed"] = s.passed();
          return d;
        },
        py::arg("trials") = 100, py::arg("vocab_size") = 20, py::arg("seed") = 1);
}
