// Command-line driver: simulate-shop, train-products, embed-queries,
// build-analogies, evaluate.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "q2p/pipeline.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<std::string> catalog, sessions, clicks, words, product_vectors, lexicon,
        triplets;
    std::vector<std::string> analogies;
    std::vector<std::string> type_pairs;
    std::vector<int> cutoffs;
    std::optional<int> epochs, dimension, rank;
    std::string mode = "merged";
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "flat JSON config file");
    cmd->add_option("--seed", o.seed, "global seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads (>1 is not reproducible)");
    cmd->add_option("--catalog", o.catalog, "catalog JSON-lines");
    cmd->add_option("--sessions", o.sessions, "sessions JSON-lines");
    cmd->add_option("--clicks", o.clicks, "real click log JSON-lines");
}

q2p::PipelineConfig resolve(const Overrides& o) {
    q2p::PipelineConfig c = o.config.empty() ? q2p::PipelineConfig{} : q2p::PipelineConfig::load(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.out = *o.out;
    if (o.threads) c.threads = *o.threads;
    if (o.catalog) c.catalog = *o.catalog;
    if (o.sessions) c.sessions = *o.sessions;
    if (o.clicks) c.clicks = *o.clicks;
    if (o.words) c.words = *o.words;
    if (o.product_vectors) c.product_vectors = *o.product_vectors;
    if (o.lexicon) c.lexicon = *o.lexicon;
    if (o.triplets) c.triplets = *o.triplets;
    if (!o.analogies.empty()) c.analogies = o.analogies;
    if (!o.type_pairs.empty()) {
        c.type_pairs.clear();
        for (const auto& tp : o.type_pairs) c.type_pairs.push_back(q2p::parse_type_pair(tp));
    }
    if (!o.cutoffs.empty()) c.cutoffs = o.cutoffs;
    if (o.epochs) c.train.epochs = *o.epochs;
    if (o.dimension) c.train.dimension = *o.dimension;
    if (o.rank) c.rank.rank = *o.rank;
    c.finalize();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grounded query embeddings from product sessions and clicks"};
    app.require_subcommand(1);
    Overrides o;

    auto* shop = app.add_subcommand("simulate-shop", "generate a synthetic shop dataset");
    add_common(shop, o);

    auto* trainp = app.add_subcommand("train-products", "train the product space from sessions");
    add_common(trainp, o);
    trainp->add_option("--epochs", o.epochs, "training epochs");
    trainp->add_option("--dimension", o.dimension, "vector size");

    auto* embed = app.add_subcommand("embed-queries", "build the query lexicon");
    add_common(embed, o);
    embed->add_option("--mode", o.mode, "real | synthetic | merged")
        ->check(CLI::IsMember({"real", "synthetic", "merged"}));
    embed->add_option("--words", o.words, "word list for synthetic events (one per line)");
    embed->add_option("--product-vectors", o.product_vectors, "default <out>/product_vectors.txt");
    embed->add_option("--rank", o.rank, "top clicked products per query");

    auto* analog = app.add_subcommand("build-analogies", "generate taxonomy analogies");
    add_common(analog, o);
    analog->add_option("--type-pair", o.type_pairs, "e.g. brand:activity (repeatable)");

    auto* eval = app.add_subcommand("evaluate", "score a lexicon on analogies and triplets");
    add_common(eval, o);
    eval->add_option("--lexicon", o.lexicon, "query lexicon to score");
    eval->add_option("--analogies", o.analogies, "analogy files (repeatable)");
    eval->add_option("--triplets", o.triplets, "similarity triplets JSON-lines");
    eval->add_option("--type-pair", o.type_pairs, "pairs whose default analogy files are read");
    eval->add_option("--cutoffs", o.cutoffs, "e.g. 5,10,20")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        const q2p::PipelineConfig config = resolve(o);
        if (config.threads > 1) {
            std::cerr << "warning: --threads " << config.threads
                      << " runs unsynchronized updates; outputs are not reproducible\n";
        }
        q2p::CommandResult res;
        if (*shop) {
            res = q2p::cmd_simulate_shop(config);
        } else if (*trainp) {
            res = q2p::cmd_train_products(config);
        } else if (*embed) {
            res = q2p::cmd_embed_queries(config, q2p::parse_lexicon_mode(o.mode));
        } else if (*analog) {
            res = q2p::cmd_build_analogies(config);
        } else if (*eval) {
            res = q2p::cmd_evaluate(config);
        }
        for (const auto& n : res.notes) std::cout << n << "\n";
        for (const auto& p : res.written) std::cout << "wrote " << p.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
