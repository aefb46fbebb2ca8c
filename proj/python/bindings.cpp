#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "q2p/pipeline.hpp"

namespace py = pybind11;
using namespace q2p;

namespace {

std::vector<float> vector_of(const EmbeddingSpace& s, const std::string& key) {
    auto row = s.at(key);
    return {row.begin(), row.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Query embeddings from clicked-product vectors";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<Error>(m, "Error");

    py::enum_<Field>(m, "Field")
        .value("brand", Field::brand)
        .value("product_type", Field::product_type)
        .value("activity", Field::activity)
        .value("description", Field::description);

    py::enum_<SpaceKind>(m, "SpaceKind")
        .value("product", SpaceKind::product)
        .value("query", SpaceKind::query)
        .value("text", SpaceKind::text);

    py::enum_<ClickSource>(m, "ClickSource")
        .value("real", ClickSource::real)
        .value("synthetic", ClickSource::synthetic);

    m.def("normalize_query", &normalize_query);

    // data ----------------------------------------------------------------
    py::class_<Product>(m, "Product")
        .def(py::init<>())
        .def_readwrite("product_id", &Product::product_id)
        .def_readwrite("brand", &Product::brand)
        .def_readwrite("product_type", &Product::product_type)
        .def_readwrite("activity", &Product::activity)
        .def_readwrite("description", &Product::description);

    py::class_<Catalog>(m, "Catalog")
        .def(py::init<>())
        .def("add", &Catalog::add)
        .def("__len__", &Catalog::size)
        .def("__contains__", &Catalog::contains)
        .def("products", &Catalog::products);

    py::class_<Session>(m, "Session")
        .def(py::init<std::string, std::vector<std::string>>(), py::arg("session_id"), py::arg("events"))
        .def_readwrite("session_id", &Session::session_id)
        .def_readwrite("events", &Session::events);

    py::class_<ClickLog>(m, "ClickLog")
        .def(py::init<ClickSource>(), py::arg("source") = ClickSource::real)
        .def("add", &ClickLog::add)
        .def("__len__", &ClickLog::size)
        .def("events", [](const ClickLog& l) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& e : l.events()) out.emplace_back(e.query, e.product_id);
            return out;
        });

    m.def("load_catalog", [](const std::string& p) { return load_catalog(p); });
    m.def("load_sessions", [](const std::string& p) { return load_sessions(p); });
    m.def("load_click_log", [](const std::string& p, ClickSource s) { return load_click_log(p, s); },
          py::arg("path"), py::arg("source") = ClickSource::real);

    // spaces --------------------------------------------------------------
    py::class_<EmbeddingSpace>(m, "EmbeddingSpace")
        .def(py::init<std::size_t, SpaceKind>())
        .def("add", [](EmbeddingSpace& s, const std::string& k, const std::vector<float>& v) { s.add(k, v); })
        .def_property_readonly("dimension", &EmbeddingSpace::dimension)
        .def_property_readonly("kind", &EmbeddingSpace::kind)
        .def("keys", &EmbeddingSpace::keys)
        .def("__len__", &EmbeddingSpace::size)
        .def("__contains__", &EmbeddingSpace::contains)
        .def("__getitem__", &vector_of)
        .def("cosine", [](const EmbeddingSpace& s, const std::string& a, const std::string& b) {
            return cosine(s.at(a), s.at(b));
        })
        .def("save", [](const EmbeddingSpace& s, const std::string& p) { save_embeddings(p, s); });
    m.def("load_embeddings", &load_embeddings, py::arg("path"), py::arg("kind"));

    // training ------------------------------------------------------------
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_static("text_defaults", &TrainConfig::text_defaults)
        .def_readwrite("dimension", &TrainConfig::dimension)
        .def_readwrite("window", &TrainConfig::window)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("ns_exponent", &TrainConfig::ns_exponent)
        .def_readwrite("negatives_per_positive", &TrainConfig::negatives_per_positive)
        .def_readwrite("learning_rate_initial", &TrainConfig::learning_rate_initial)
        .def_readwrite("min_count", &TrainConfig::min_count)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("threads", &TrainConfig::threads);

    m.def("train", [](const SessionSet& s, const TrainConfig& c) {
        py::gil_scoped_release nogil;
        return train(s, c);
    });
    m.def("train_text", [](const std::vector<std::vector<std::string>>& corpus, const TrainConfig& c) {
        py::gil_scoped_release nogil;
        return train_text(corpus, c);
    });
    m.def("nearest_neighbors", &nearest_neighbors, py::arg("space"), py::arg("key"), py::arg("k"));

    // search and synthetic clicks -----------------------------------------
    py::class_<InvertedIndex>(m, "InvertedIndex")
        .def_property_readonly("doc_count", &InvertedIndex::doc_count)
        .def("doc_frequency", &InvertedIndex::doc_frequency)
        .def("search", [](const InvertedIndex& idx, const std::string& q, std::size_t limit) {
            std::vector<std::pair<std::string, double>> out;
            for (const auto& h : idx.search(q, limit)) out.emplace_back(h.product_id, h.score);
            return out;
        }, py::arg("query"), py::arg("limit") = 50);
    m.def("tokenize", &tokenize);
    m.def("build_index", [](const Catalog& c) { return build_index(c); });

    py::class_<PopularityDistribution>(m, "PopularityDistribution")
        .def(py::init<std::map<std::string, double>>())
        .def("weight", &PopularityDistribution::weight);
    m.def("estimate_popularity", &estimate_popularity);

    m.def("generate_synthetic_events",
          [](const std::vector<std::string>& words, const InvertedIndex& idx,
             const PopularityDistribution& dist, int n, int limit, std::uint64_t seed) {
              SynthConfig cfg;
              cfg.simulations_per_word = n;
              cfg.search_limit = limit;
              cfg.seed = seed;
              auto ev = generate_synthetic_events(words, idx, dist, cfg);
              return py::make_tuple(std::move(ev.log), ev.skipped);
          },
          py::arg("words"), py::arg("index"), py::arg("popularity"),
          py::arg("simulations_per_word") = 500, py::arg("search_limit") = 50, py::arg("seed") = 1);

    // query embedding -----------------------------------------------------
    m.def("build_lexicon",
          [](const std::vector<const ClickLog*>& logs, const EmbeddingSpace& products, int rank) {
              auto lex = build_lexicon(aggregate_clicks(logs), products, RankConfig{rank});
              return py::make_tuple(std::move(lex.space), lex.omitted);
          },
          py::arg("logs"), py::arg("products"), py::arg("rank") = 5);
    m.def("embed_query",
          [](const std::map<std::string, std::uint64_t>& counts, const EmbeddingSpace& products, int rank) {
              return embed_query(ClickHistogram{"", counts}, products, RankConfig{rank});
          },
          py::arg("counts"), py::arg("products"), py::arg("rank") = 5);

    // evaluation ----------------------------------------------------------
    py::class_<Analogy>(m, "Analogy")
        .def(py::init([](std::string a, std::string b, std::string c, std::string d, Field f1, Field f2) {
                 return Analogy{std::move(a), std::move(b), std::move(c), std::move(d), {f1, f2}};
             }),
             py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
             py::arg("source_field") = Field::brand, py::arg("target_field") = Field::activity)
        .def_readonly("a", &Analogy::a)
        .def_readonly("b", &Analogy::b)
        .def_readonly("c", &Analogy::c)
        .def_readonly("d", &Analogy::d)
        .def("__eq__", [](const Analogy& x, const Analogy& y) { return x == y; })
        .def("__repr__", [](const Analogy& x) {
            return x.a + " : " + x.b + " = " + x.c + " : ? (" + x.d + ")";
        });

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("hit_rate", &EvalReport::hit_rate)
        .def_readonly("coverage", &EvalReport::coverage)
        .def_readonly("n_analogies", &EvalReport::n_analogies)
        .def_readonly("n_covered", &EvalReport::n_covered)
        .def_readonly("random_baseline", &EvalReport::random_baseline);

    m.def("gini", [](const std::vector<double>& x) { return gini(x); });
    m.def("generate_analogies",
          [](const Catalog& c, Field f1, Field f2, double percentile, int k, std::uint64_t seed) {
              return generate_analogies(c, {f1, f2}, AnalogyGenConfig{percentile, k, seed});
          },
          py::arg("catalog"), py::arg("source_field") = Field::brand,
          py::arg("target_field") = Field::activity, py::arg("gini_percentile") = 75.0,
          py::arg("samples_per_entity") = 10, py::arg("seed") = 1);
    m.def("candidate_sets", &candidate_sets);
    m.def("hit_rate",
          [](const EmbeddingSpace& s, const AnalogySet& a, const CandidateSets& c,
             const std::vector<int>& cutoffs, bool open_vocabulary) {
              return hit_rate(s, a, c, cutoffs, HitRateOptions{open_vocabulary});
          },
          py::arg("space"), py::arg("analogies"), py::arg("candidates"),
          py::arg("cutoffs") = std::vector<int>{5, 10}, py::arg("open_vocabulary") = false);
    m.def("similarity_accuracy",
          [](const EmbeddingSpace& s,
             const std::vector<std::tuple<std::string, std::string, std::string, std::string>>& rows) {
              std::vector<SimilarityTriplet> t;
              for (const auto& [anchor, a, b, choice] : rows) {
                  if (choice != "a" && choice != "b") throw Error("human choice must be 'a' or 'b'");
                  t.push_back({anchor, a, b, choice == "a" ? Choice::a : Choice::b});
              }
              return similarity_accuracy(s, t).accuracy;
          });

    // pipeline ------------------------------------------------------------
    m.def("run",
          [](const std::string& command, const std::string& config_json, const std::string& mode) {
              auto cfg = PipelineConfig::from_json_text(config_json);
              cfg.finalize();
              py::gil_scoped_release nogil;
              CommandResult r;
              if (command == "simulate-shop") r = cmd_simulate_shop(cfg);
              else if (command == "train-products") r = cmd_train_products(cfg);
              else if (command == "embed-queries") r = cmd_embed_queries(cfg, parse_lexicon_mode(mode));
              else if (command == "build-analogies") r = cmd_build_analogies(cfg);
              else if (command == "evaluate") r = cmd_evaluate(cfg);
              else throw Error("unknown command '" + command + "'");
              std::vector<std::string> written;
              for (const auto& p : r.written) written.push_back(p.string());
              return written;
          },
          py::arg("command"), py::arg("config_json"), py::arg("mode") = "merged");
}
