#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "q2p/pipeline.hpp"

using namespace q2p;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("q2p_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

PipelineConfig small_config(const fs::path& out) {
    auto cfg = PipelineConfig::from_json_text(R"({
        "n_brands": 6, "n_types": 3, "n_activities": 6, "products_per_cell": 2,
        "n_sessions": 2000, "dimension": 16, "epochs": 3,
        "simulations_per_word": 50, "seed": 5
    })");
    cfg.out = out.string();
    cfg.catalog = (out / "catalog.jsonl").string();
    cfg.sessions = (out / "sessions.jsonl").string();
    cfg.clicks = (out / "clicks.jsonl").string();
    cfg.finalize();
    return cfg;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
    return out;
}

}  // namespace

TEST_CASE("config parsing") {
    auto cfg = PipelineConfig::from_json_text(R"({"rank": 3, "cutoffs": [5, 10, 20], "type_pairs": ["brand:product_type"]})");
    CHECK(cfg.rank.rank == 3);
    CHECK(cfg.cutoffs == std::vector<int>{5, 10, 20});
    CHECK(cfg.type_pairs == std::vector<std::pair<Field, Field>>{{Field::brand, Field::product_type}});
    CHECK_THROWS_AS(PipelineConfig::from_json_text(R"({"colour": 1})"), Error);
    CHECK_THROWS_AS(PipelineConfig::from_json_text(R"({"type_pairs": ["brand:colour"]})"), Error);
    CHECK_THROWS_AS(PipelineConfig::from_json_text("[1]"), Error);
    CHECK_THROWS_AS(parse_type_pair("brand"), Error);

    PipelineConfig a, b;
    a.seed = b.seed = 11;
    a.finalize();
    b.finalize();
    CHECK(a.train.seed == b.train.seed);
    CHECK(a.train.seed != a.synth.seed);
}

TEST_CASE("output set removes temporaries without commit") {
    TempDir dir("outset");
    {
        OutputSet out(dir.path);
        out.open("a.txt") << "x";
    }
    CHECK(fs::is_empty(dir.path));
    {
        OutputSet out(dir.path);
        out.open("a.txt") << "x";
        CHECK(out.commit().size() == 1);
    }
    CHECK(slurp(dir.path / "a.txt") == "x");
}

TEST_CASE("pipeline subcommands") {
    TempDir dir("pipe");
    auto cfg = small_config(dir.path);

    SUBCASE("missing inputs fail before any work") {
        auto c = cfg;
        c.sessions.clear();
        CHECK_THROWS_AS(cmd_train_products(c), Error);
        c = cfg;
        c.sessions = (dir.path / "absent.jsonl").string();
        CHECK_THROWS_AS(cmd_train_products(c), Error);
        c = cfg;
        c.lexicon = (dir.path / "absent.txt").string();
        CHECK_THROWS_AS(cmd_evaluate(c), Error);
        CHECK(fs::is_empty(dir.path));
    }

    SUBCASE("full run") {
        cmd_simulate_shop(cfg);
        for (const char* f : {"catalog.jsonl", "sessions.jsonl", "clicks.jsonl", "ground_truth.json"})
            CHECK(fs::exists(dir.path / f));

        auto tr = cmd_train_products(cfg);
        const auto vectors = slurp(dir.path / "product_vectors.txt");
        CHECK(vectors.rfind("36 16\n", 0) == 0);
        CHECK(fs::exists(dir.path / "ingestion_report.txt"));

        cmd_embed_queries(cfg, LexiconMode::merged);
        cmd_embed_queries(cfg, LexiconMode::synthetic);
        CHECK(fs::exists(dir.path / "lexicon_merged.txt"));
        CHECK(fs::exists(dir.path / "lexicon_synthetic.txt"));

        cmd_build_analogies(cfg);
        CHECK(fs::file_size(dir.path / "analogies_brand_activity.jsonl") > 0);

        auto ev = cfg;
        ev.lexicon = (dir.path / "lexicon_merged.txt").string();
        ev.cutoffs = {5, 10, 20};
        cmd_evaluate(ev);
        auto report = nlohmann::json::parse(slurp(dir.path / "eval_report.json"));
        const auto& hr = report["overall"]["hit_rate"];
        CHECK(hr.size() == 3);
        CHECK(hr.contains("20"));
        const auto table = slurp(dir.path / "eval_report.txt");
        CHECK(table.find("HR@20") != std::string::npos);

        // Second pass with the same config reproduces every file.
        const auto first = snapshot(dir.path);
        cmd_simulate_shop(cfg);
        cmd_train_products(cfg);
        cmd_embed_queries(cfg, LexiconMode::merged);
        cmd_embed_queries(cfg, LexiconMode::synthetic);
        cmd_build_analogies(cfg);
        cmd_evaluate(ev);
        CHECK(snapshot(dir.path) == first);
    }

    SUBCASE("unmatchable word lands in the skip report") {
        cmd_simulate_shop(cfg);
        cmd_train_products(cfg);
        {
            std::ofstream w(dir.path / "words.txt");
            w << "brand0\nzzzunmatchable\n";
        }
        auto c = cfg;
        c.words = (dir.path / "words.txt").string();
        cmd_embed_queries(c, LexiconMode::synthetic);
        CHECK(slurp(dir.path / "embed_report_synthetic.txt").find("zzzunmatchable") !=
              std::string::npos);
    }
}
