#include "q2p/pipeline.hpp"

#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace q2p {

namespace fs = std::filesystem;
using json = nlohmann::json;

LexiconMode parse_lexicon_mode(std::string_view name) {
    if (name == "real") return LexiconMode::real;
    if (name == "synthetic") return LexiconMode::synthetic;
    if (name == "merged") return LexiconMode::merged;
    throw Error("unknown lexicon mode '" + std::string(name) + "' (real|synthetic|merged)");
}

std::string_view lexicon_mode_name(LexiconMode mode) {
    switch (mode) {
        case LexiconMode::real: return "real";
        case LexiconMode::synthetic: return "synthetic";
        case LexiconMode::merged: return "merged";
    }
    return "?";
}

std::pair<Field, Field> parse_type_pair(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error("type pair must look like 'brand:activity', got '" + std::string(text) + "'");
    }
    const Field a = parse_field(text.substr(0, colon));
    const Field b = parse_field(text.substr(colon + 1));
    if (!is_taxonomy_field(a) || !is_taxonomy_field(b) || a == b) {
        throw Error("type pair needs two distinct taxonomy fields, got '" + std::string(text) + "'");
    }
    return {a, b};
}

// ---------------------------------------------------------------------------

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error("config must be a JSON object");

    PipelineConfig c;
    for (const auto& [key, v] : doc.items()) {
        try {
            if (key == "catalog") c.catalog = v.get<std::string>();
            else if (key == "sessions") c.sessions = v.get<std::string>();
            else if (key == "clicks") c.clicks = v.get<std::string>();
            else if (key == "words") c.words = v.get<std::string>();
            else if (key == "product_vectors") c.product_vectors = v.get<std::string>();
            else if (key == "lexicon") c.lexicon = v.get<std::string>();
            else if (key == "analogies") c.analogies = v.get<std::vector<std::string>>();
            else if (key == "triplets") c.triplets = v.get<std::string>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "dimension") c.train.dimension = v.get<int>();
            else if (key == "window") c.train.window = v.get<int>();
            else if (key == "epochs") c.train.epochs = v.get<int>();
            else if (key == "ns_exponent") c.train.ns_exponent = v.get<double>();
            else if (key == "negatives") c.train.negatives_per_positive = v.get<int>();
            else if (key == "learning_rate") c.train.learning_rate_initial = v.get<double>();
            else if (key == "min_count") c.train.min_count = v.get<int>();
            else if (key == "rank") c.rank.rank = v.get<int>();
            else if (key == "simulations_per_word") c.synth.simulations_per_word = v.get<int>();
            else if (key == "search_limit") c.synth.search_limit = v.get<int>();
            else if (key == "gini_percentile") c.analogy.gini_percentile = v.get<double>();
            else if (key == "samples_per_entity") c.analogy.samples_per_entity = v.get<int>();
            else if (key == "n_brands") c.shop.n_brands = v.get<int>();
            else if (key == "n_types") c.shop.n_types = v.get<int>();
            else if (key == "n_activities") c.shop.n_activities = v.get<int>();
            else if (key == "products_per_cell") c.shop.products_per_cell = v.get<int>();
            else if (key == "n_sessions") c.shop.n_sessions = v.get<int>();
            else if (key == "session_length_min") c.shop.session_length_min = v.get<int>();
            else if (key == "session_length_max") c.shop.session_length_max = v.get<int>();
            else if (key == "zipf_exponent") c.shop.popularity_zipf_exponent = v.get<double>();
            else if (key == "cluster_stay_probability") c.shop.cluster_stay_probability = v.get<double>();
            else if (key == "activity_purity") c.shop.activity_purity = v.get<double>();
            else if (key == "real_clicks_per_query") c.shop.real_clicks_per_query = v.get<int>();
            else if (key == "click_noise") c.shop.click_noise = v.get<double>();
            else if (key == "type_pairs") {
                c.type_pairs.clear();
                for (const auto& tp : v.get<std::vector<std::string>>()) {
                    c.type_pairs.push_back(parse_type_pair(tp));
                }
            }
            else if (key == "cutoffs") c.cutoffs = v.get<std::vector<int>>();
            else if (key == "open_vocabulary") c.open_vocabulary = v.get<bool>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "threads") c.threads = v.get<int>();
            else throw Error("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw Error("config key '" + key + "': " + e.what());
        }
    }
    return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

void PipelineConfig::finalize() {
    train.seed = derive_seed(seed, "prodvec");
    synth.seed = derive_seed(seed, "synth");
    analogy.seed = derive_seed(seed, "evalkit");
    shop.seed = derive_seed(seed, "shop");
    train.threads = threads;
    synth.threads = threads;
}

void PipelineConfig::validate() const {
    train.validate();
    rank.validate();
    synth.validate();
    analogy.validate();
    shop.validate();
    if (threads < 1) throw Error("threads must be >= 1");
    if (cutoffs.empty()) throw Error("at least one cutoff is required");
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        if (cutoffs[i] < 1 || (i > 0 && cutoffs[i] <= cutoffs[i - 1])) {
            throw Error("cutoffs must be positive and strictly ascending");
        }
    }
    if (out.empty()) throw Error("output directory must be set");
}

// ---------------------------------------------------------------------------

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
        throw Error("output directory '" + dir_.string() + "' is not writable");
    }
}

OutputSet::~OutputSet() {
    if (committed_) return;
    for (auto& [path, stream] : files_) {
        stream->close();
        std::error_code ec;
        fs::remove(fs::path(path.string() + ".tmp"), ec);
    }
}

std::ostream& OutputSet::open(const std::string& name) {
    const fs::path target = dir_ / name;
    auto stream = std::make_unique<std::ofstream>(target.string() + ".tmp", std::ios::binary);
    if (!*stream) throw Error("cannot write '" + target.string() + "'");
    files_.emplace_back(target, std::move(stream));
    return *files_.back().second;
}

std::vector<fs::path> OutputSet::commit() {
    std::vector<fs::path> out;
    for (auto& [path, stream] : files_) {
        stream->close();
        if (!*stream) throw Error("failed writing '" + path.string() + "'");
    }
    for (auto& [path, stream] : files_) {
        fs::rename(path.string() + ".tmp", path);
        out.push_back(path);
    }
    committed_ = true;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw Error(std::string("no ") + what + " path configured");
    if (!fs::is_regular_file(path)) {
        throw Error(std::string(what) + " file '" + path + "' does not exist");
    }
}

std::string product_vectors_path(const PipelineConfig& c) {
    return c.product_vectors.empty() ? (fs::path(c.out) / "product_vectors.txt").string()
                                     : c.product_vectors;
}

std::vector<std::string> read_word_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open word list '" + path + "'");
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!normalize_query(line).empty()) words.push_back(line);
    }
    return words;
}

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (const auto& i : items) {
        if (!s.empty()) s += ' ';
        s += i;
    }
    return s;
}

std::string pair_name(std::pair<Field, Field> tp) {
    return std::string(field_name(tp.first)) + "_" + std::string(field_name(tp.second));
}

}  // namespace

std::vector<std::string> taxonomy_words(const Catalog& catalog) {
    std::set<std::string> words;
    for (const auto& p : catalog.products()) {
        for (Field f : {Field::brand, Field::product_type, Field::activity}) {
            if (auto v = p.value(f)) words.insert(*v);
        }
    }
    return {words.begin(), words.end()};
}

std::vector<std::vector<std::string>> description_corpus(const Catalog& catalog) {
    std::vector<std::vector<std::string>> corpus;
    for (const auto& p : catalog.products()) {
        auto toks = tokenize(p.description);
        if (!toks.empty()) corpus.push_back(std::move(toks));
    }
    return corpus;
}

CommandResult cmd_simulate_shop(const PipelineConfig& config) {
    config.validate();
    const SyntheticShop shop = generate_synthetic_shop(config.shop);
    OutputSet out(config.out);
    write_catalog(out.open("catalog.jsonl"), shop.catalog);
    write_sessions(out.open("sessions.jsonl"), shop.sessions);
    write_click_log(out.open("clicks.jsonl"), shop.clicks);
    write_ground_truth(out.open("ground_truth.json"), shop.truth);
    CommandResult res;
    res.written = out.commit();
    res.notes.push_back("products: " + std::to_string(shop.catalog.size()));
    res.notes.push_back("sessions: " + std::to_string(shop.sessions.size()));
    res.notes.push_back("real clicks: " + std::to_string(shop.clicks.size()));
    return res;
}

CommandResult cmd_train_products(const PipelineConfig& config) {
    config.validate();
    require_file(config.sessions, "sessions");
    if (!config.catalog.empty()) require_file(config.catalog, "catalog");

    IngestionReport report;
    std::optional<Catalog> catalog;
    if (!config.catalog.empty()) catalog = load_catalog(config.catalog, &report);
    const SessionSet sessions =
        load_sessions(config.sessions, catalog ? &*catalog : nullptr, &report);
    if (sessions.empty()) throw Error("no usable sessions in '" + config.sessions + "'");

    TrainStats stats;
    const EmbeddingSpace space = train(sessions, config.train, &stats);

    auto& sec = report.section("training");
    sec.loaded = space.size();
    if (config.train.threads > 1) {
        sec.warnings.push_back("trained with " + std::to_string(config.train.threads) +
                               " threads; output is not reproducible");
    }

    OutputSet out(config.out);
    write_embeddings(out.open("product_vectors.txt"), space);
    auto& rep = out.open("ingestion_report.txt");
    rep << report.to_text();
    rep << "[training]\nvocabulary: " << space.size() << "\ndimension: " << space.dimension()
        << "\npairs: " << stats.pairs << "\n";
    for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e) {
        rep << "epoch " << (e + 1) << " loss: " << std::setprecision(6) << stats.epoch_loss[e]
            << "\n";
    }

    CommandResult res;
    res.written = out.commit();
    res.notes.push_back("product vectors: " + std::to_string(space.size()) + " x " +
                        std::to_string(space.dimension()));
    return res;
}

CommandResult cmd_embed_queries(const PipelineConfig& config, LexiconMode mode) {
    config.validate();
    const std::string vec_path = product_vectors_path(config);
    require_file(vec_path, "product vectors");
    if (mode != LexiconMode::synthetic) require_file(config.clicks, "click log");
    if (mode != LexiconMode::real) {
        require_file(config.catalog, "catalog");
        require_file(config.sessions, "sessions");
        if (!config.words.empty()) require_file(config.words, "word list");
    }

    IngestionReport ingest;
    const EmbeddingSpace products = load_embeddings(vec_path, SpaceKind::product);

    std::optional<ClickLog> real;
    if (mode != LexiconMode::synthetic) {
        real = load_click_log(config.clicks, ClickSource::real, &ingest);
    }
    std::optional<SyntheticEvents> synthetic;
    if (mode != LexiconMode::real) {
        const Catalog catalog = load_catalog(config.catalog, &ingest);
        const SessionSet sessions = load_sessions(config.sessions, &catalog, &ingest);
        const auto words =
            config.words.empty() ? taxonomy_words(catalog) : read_word_list(config.words);
        if (words.empty()) throw Error("synthetic mode needs at least one word");
        const InvertedIndex index = build_index(catalog);
        synthetic = generate_synthetic_events(words, index, estimate_popularity(sessions),
                                              config.synth);
    }

    std::vector<const ClickLog*> logs;
    if (real) logs.push_back(&*real);
    if (synthetic) logs.push_back(&synthetic->log);
    const auto histograms = aggregate_clicks(logs);
    if (histograms.empty()) throw Error("no click events to embed");
    const Lexicon lex = build_lexicon(histograms, products, config.rank);

    const std::string tag(lexicon_mode_name(mode));
    OutputSet out(config.out);
    write_embeddings(out.open("lexicon_" + tag + ".txt"), lex.space);
    if (synthetic) write_click_log(out.open("synthetic_clicks.jsonl"), synthetic->log);
    auto& rep = out.open("embed_report_" + tag + ".txt");
    rep << ingest.to_text();
    rep << "[lexicon]\nmode: " << tag << "\nqueries: " << histograms.size()
        << "\nembedded: " << lex.space.size() << "\nomitted: " << lex.omitted.size() << "\n";
    for (const auto& q : lex.omitted) rep << "omitted: " << q << "\n";
    if (synthetic) {
        rep << "synthetic events: " << synthetic->log.size()
            << "\nskipped words: " << synthetic->skipped.size() << "\n";
        for (const auto& w : synthetic->skipped) rep << "skipped: " << w << "\n";
    }

    CommandResult res;
    res.written = out.commit();
    res.notes.push_back("lexicon: " + std::to_string(lex.space.size()) + " queries");
    if (!lex.omitted.empty()) res.notes.push_back("omitted: " + join(lex.omitted));
    if (synthetic && !synthetic->skipped.empty()) {
        res.notes.push_back("skipped words: " + join(synthetic->skipped));
    }
    return res;
}

CommandResult cmd_build_analogies(const PipelineConfig& config) {
    config.validate();
    require_file(config.catalog, "catalog");
    if (config.type_pairs.empty()) throw Error("no type pairs configured");
    const Catalog catalog = load_catalog(config.catalog);

    OutputSet out(config.out);
    CommandResult res;
    for (const auto& tp : config.type_pairs) {
        const AnalogySet set = generate_analogies(catalog, tp, config.analogy);
        write_analogies(out.open("analogies_" + pair_name(tp) + ".jsonl"), set);
        res.notes.push_back(pair_name(tp) + ": " + std::to_string(set.size()) + " analogies");
    }
    res.written = out.commit();
    return res;
}

CommandResult cmd_evaluate(const PipelineConfig& config) {
    config.validate();
    require_file(config.lexicon, "lexicon");
    std::vector<std::string> analogy_paths = config.analogies;
    if (analogy_paths.empty()) {
        for (const auto& tp : config.type_pairs) {
            analogy_paths.push_back((fs::path(config.out) / ("analogies_" + pair_name(tp) + ".jsonl")).string());
        }
    }
    for (const auto& p : analogy_paths) require_file(p, "analogy");
    if (!config.open_vocabulary) require_file(config.catalog, "catalog");
    if (!config.triplets.empty()) require_file(config.triplets, "triplet");

    const EmbeddingSpace lexicon = load_embeddings(config.lexicon, SpaceKind::query);
    CandidateSets candidates;
    if (!config.open_vocabulary) candidates = candidate_sets(load_catalog(config.catalog));
    HitRateOptions options{config.open_vocabulary};

    std::optional<SimilarityResult> st;
    if (!config.triplets.empty()) {
        const auto triplets = load_triplets(config.triplets);
        if (triplets.empty()) throw Error("triplet file '" + config.triplets + "' is empty");
        st = similarity_accuracy(lexicon, triplets);
    }

    std::vector<std::pair<std::string, EvalReport>> rows;
    AnalogySet all;
    for (const auto& p : analogy_paths) {
        AnalogySet set = load_analogies(p);
        EvalReport r = hit_rate(lexicon, set, candidates, config.cutoffs, options);
        if (st) r.st_accuracy = st->accuracy;
        rows.emplace_back(fs::path(p).stem().string(), r);
        all.insert(all.end(), set.begin(), set.end());
    }
    EvalReport overall = hit_rate(lexicon, all, candidates, config.cutoffs, options);
    if (st) overall.st_accuracy = st->accuracy;
    if (rows.size() > 1) rows.emplace_back("all", overall);

    nlohmann::ordered_json doc;
    doc["lexicon"] = config.lexicon;
    doc["overall"] = json::parse(report_json(overall));
    doc["sets"] = nlohmann::ordered_json::array();
    for (const auto& [name, r] : rows) {
        if (name == "all") continue;
        nlohmann::ordered_json entry;
        entry["name"] = name;
        entry["report"] = json::parse(report_json(r));
        doc["sets"].push_back(entry);
    }
    if (st) {
        doc["similarity"] = {{"accuracy", st->accuracy},
                             {"correct", st->correct},
                             {"missing", st->missing}};
    }

    OutputSet out(config.out);
    out.open("eval_report.json") << doc.dump(2) << "\n";
    out.open("eval_report.txt") << report_table(rows);

    CommandResult res;
    res.written = out.commit();
    res.notes.push_back(report_table(rows));
    return res;
}

std::string report_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    std::vector<int> cutoffs;
    if (!rows.empty()) {
        for (const auto& [k, v] : rows.front().second.hit_rate) cutoffs.push_back(k);
    }
    std::size_t width = 8;
    for (const auto& [name, r] : rows) width = std::max(width, name.size() + 2);
    out << std::left << std::setw(static_cast<int>(width)) << "set";
    for (int k : cutoffs) out << std::setw(9) << ("HR@" + std::to_string(k));
    out << std::setw(9) << "CV" << std::setw(9) << "ST" << std::setw(9) << "random"
        << "n\n";
    for (const auto& [name, r] : rows) {
        out << std::setw(static_cast<int>(width)) << name;
        for (int k : cutoffs) out << std::setw(9) << r.hit_rate.at(k);
        out << std::setw(9) << r.coverage;
        if (r.st_accuracy) {
            out << std::setw(9) << *r.st_accuracy;
        } else {
            out << std::setw(9) << "-";
        }
        out << std::setw(9) << r.random_baseline << r.n_analogies << "\n";
    }
    return out.str();
}

}  // namespace q2p
