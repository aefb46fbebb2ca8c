#include "q2p/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "q2p/random.hpp"

namespace q2p {

void AnalogyGenConfig::validate() const {
    if (!(gini_percentile > 0.0 && gini_percentile < 100.0)) {
        throw Error("AnalogyGenConfig: gini_percentile must lie in (0, 100)");
    }
    if (samples_per_entity < 1) throw Error("AnalogyGenConfig: samples_per_entity must be >= 1");
}

double gini(std::span<const double> frequencies) {
    if (frequencies.empty()) throw Error("gini of an empty distribution");
    std::vector<double> x(frequencies.begin(), frequencies.end());
    double total = 0.0;
    for (double v : x) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("gini needs finite non-negative values");
        total += v;
    }
    if (!(total > 0.0)) throw Error("gini of an all-zero distribution");
    if (x.size() == 1) return 0.0;

    // With x sorted ascending, Sum_i Sum_j |x_i - x_j| = 2 Sum_i (2i - n - 1) x_i
    // for 1-based i.
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
    }
    return acc / (n * total);
}

double percentile_nearest_rank(std::vector<double> values, double percentile) {
    if (values.empty()) throw Error("percentile of an empty list");
    if (!(percentile > 0.0 && percentile <= 100.0)) throw Error("percentile must lie in (0, 100]");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

namespace {

/// entity -> (target label -> count), over products carrying both labels.
std::map<std::string, std::map<std::string, std::uint64_t>> cross_counts(
    const Catalog& catalog, Field entity_field, Field target_field, std::set<std::string>& vocab) {
    std::map<std::string, std::map<std::string, std::uint64_t>> out;
    for (const auto& p : catalog.products()) {
        auto t = p.value(target_field);
        if (!t) continue;
        vocab.insert(*t);
        auto e = p.value(entity_field);
        if (!e) continue;
        ++out[*e][*t];
    }
    return out;
}

void require_taxonomy(Field f) {
    if (!is_taxonomy_field(f)) {
        throw Error("'" + std::string(field_name(f)) + "' is not a taxonomy field");
    }
}

}  // namespace

std::vector<std::pair<std::string, std::uint64_t>> label_distribution(
    const Catalog& catalog, Field entity_field, const std::string& entity_value,
    Field target_field) {
    require_taxonomy(entity_field);
    require_taxonomy(target_field);
    std::set<std::string> vocab;
    const auto counts = cross_counts(catalog, entity_field, target_field, vocab);
    const auto it = counts.find(normalize_label(entity_value));
    if (it == counts.end()) {
        throw Error("no product with " + std::string(field_name(entity_field)) + " '" +
                    entity_value + "' carries a " + std::string(field_name(target_field)) +
                    " label");
    }
    std::vector<std::pair<std::string, std::uint64_t>> out;
    for (const auto& label : vocab) {
        auto c = it->second.find(label);
        out.emplace_back(label, c == it->second.end() ? 0 : c->second);
    }
    return out;
}

std::vector<EntityProfile> entity_profiles(const Catalog& catalog, Field entity_field,
                                           Field target_field) {
    require_taxonomy(entity_field);
    require_taxonomy(target_field);
    std::set<std::string> vocab;
    const auto counts = cross_counts(catalog, entity_field, target_field, vocab);
    std::vector<EntityProfile> out;
    for (const auto& [entity, dist] : counts) {
        std::vector<double> freq;
        std::string top;
        std::uint64_t best = 0;
        for (const auto& label : vocab) {
            auto c = dist.find(label);
            const std::uint64_t n = c == dist.end() ? 0 : c->second;
            freq.push_back(static_cast<double>(n));
            if (n > best) {  // vocab is ascending, so ties keep the smaller label
                best = n;
                top = label;
            }
        }
        out.push_back({entity, gini(freq), top});
    }
    return out;
}

AnalogySet generate_analogies(const Catalog& catalog, std::pair<Field, Field> type_pair,
                              const AnalogyGenConfig& config) {
    config.validate();
    const auto [entity_field, target_field] = type_pair;
    if (entity_field == target_field) throw Error("analogy type pair needs two distinct fields");
    const auto profiles = entity_profiles(catalog, entity_field, target_field);
    if (profiles.size() < 2) {
        throw Error("fewer than two entities carry both " + std::string(field_name(entity_field)) +
                    " and " + std::string(field_name(target_field)));
    }

    std::vector<double> ginis;
    for (const auto& p : profiles) ginis.push_back(p.gini);
    const double threshold = percentile_nearest_rank(ginis, config.gini_percentile);
    std::vector<const EntityProfile*> qualified;
    for (const auto& p : profiles) {
        if (p.gini >= threshold) qualified.push_back(&p);
    }
    if (qualified.size() < 2) {
        throw Error("fewer than two entities reach the Gini threshold");
    }

    Rng rng(derive_seed(config.seed, "analogies/" + std::string(field_name(entity_field)) + "/" +
                                         std::string(field_name(target_field))));
    AnalogySet out;
    std::set<Analogy> seen;
    auto emit = [&](const EntityProfile& x, const EntityProfile& y) {
        Analogy an{to_key(x.entity), to_key(x.top_label), to_key(y.entity), to_key(y.top_label),
                   type_pair};
        if (seen.insert(an).second) out.push_back(std::move(an));
    };
    for (std::size_t i = 0; i < qualified.size(); ++i) {
        for (int k = 0; k < config.samples_per_entity; ++k) {
            std::size_t j = rng.below(qualified.size() - 1);
            if (j >= i) ++j;
            emit(*qualified[i], *qualified[j]);
            emit(*qualified[j], *qualified[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::optional<std::vector<std::pair<std::string, double>>> solve_analogy(
    const EmbeddingSpace& space, const std::string& a, const std::string& b,
    const std::string& c, std::span<const std::string> candidates) {
    if (candidates.empty()) throw Error("solve_analogy needs at least one candidate");
    const auto va = space.find(a), vb = space.find(b), vc = space.find(c);
    if (va.empty() || vb.empty() || vc.empty()) return std::nullopt;

    std::vector<double> target(space.dimension());
    double target_sq = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
        target[k] = static_cast<double>(vb[k]) - va[k] + vc[k];
        target_sq += target[k] * target[k];
    }
    const double target_norm = std::sqrt(target_sq);
    auto cos_to_target = [&](std::span<const float> v) {
        double d = 0.0;
        for (std::size_t k = 0; k < target.size(); ++k) d += target[k] * v[k];
        const double nv = norm(v);
        return target_norm == 0.0 || nv == 0.0 ? 0.0 : d / (target_norm * nv);
    };
    std::set<std::string> uniq(candidates.begin(), candidates.end());
    std::vector<std::pair<std::string, double>> ranked;
    for (const auto& cand : uniq) {
        if (cand == a || cand == b || cand == c) continue;
        const auto v = space.find(cand);
        if (v.empty()) continue;
        ranked.emplace_back(cand, cos_to_target(v));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    return ranked;
}

CandidateSets candidate_sets(const Catalog& catalog) {
    std::map<Field, std::set<std::string>> sets;
    for (const auto& p : catalog.products()) {
        for (Field f : {Field::brand, Field::product_type, Field::activity}) {
            if (auto v = p.value(f)) sets[f].insert(to_key(*v));
        }
    }
    CandidateSets out;
    for (auto& [f, s] : sets) out[f] = std::vector<std::string>(s.begin(), s.end());
    return out;
}

EvalReport hit_rate(const EmbeddingSpace& space, const AnalogySet& analogies,
                    const CandidateSets& candidates, const std::vector<int>& cutoffs,
                    HitRateOptions options) {
    if (analogies.empty()) throw Error("hit_rate needs a non-empty analogy set");
    if (cutoffs.empty()) throw Error("hit_rate needs at least one cutoff");
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        if (cutoffs[i] < 1 || (i > 0 && cutoffs[i] <= cutoffs[i - 1])) {
            throw Error("cutoffs must be positive and strictly ascending");
        }
    }

    EvalReport report;
    report.n_analogies = analogies.size();
    std::map<int, std::size_t> hits;
    double baseline = 0.0;
    for (const auto& an : analogies) {
        if (!space.contains(an.d)) continue;
        std::span<const std::string> pool;
        if (options.open_vocabulary) {
            pool = space.keys();
        } else {
            auto it = candidates.find(an.type_pair.second);
            if (it == candidates.end() || it->second.empty()) {
                throw Error("no candidate tokens for field '" +
                            std::string(field_name(an.type_pair.second)) + "'");
            }
            pool = it->second;
        }
        auto ranked = solve_analogy(space, an.a, an.b, an.c, pool);
        if (!ranked) continue;
        ++report.n_covered;
        if (!ranked->empty()) baseline += 1.0 / static_cast<double>(ranked->size());
        std::size_t pos = 0;
        while (pos < ranked->size() && (*ranked)[pos].first != an.d) ++pos;
        for (int k : cutoffs) {
            if (pos < ranked->size() && pos < static_cast<std::size_t>(k)) ++hits[k];
        }
    }
    report.coverage =
        static_cast<double>(report.n_covered) / static_cast<double>(report.n_analogies);
    for (int k : cutoffs) {
        report.hit_rate[k] = report.n_covered
                                 ? static_cast<double>(hits[k]) / static_cast<double>(report.n_covered)
                                 : 0.0;
    }
    report.random_baseline =
        report.n_covered ? baseline / static_cast<double>(report.n_covered) : 0.0;
    return report;
}

SimilarityResult similarity_accuracy(const EmbeddingSpace& space,
                                     std::span<const SimilarityTriplet> triplets) {
    SimilarityResult res;
    if (triplets.empty()) return res;
    for (std::size_t i = 0; i < triplets.size(); ++i) {
        const auto& t = triplets[i];
        const auto anchor = space.find(t.anchor), oa = space.find(t.option_a),
                   ob = space.find(t.option_b);
        if (anchor.empty() || oa.empty() || ob.empty()) {
            res.missing.push_back(i);
            continue;
        }
        const double ca = cosine(anchor, oa), cb = cosine(anchor, ob);
        if (ca == cb) continue;
        const Choice model = ca > cb ? Choice::a : Choice::b;
        if (model == t.human_choice) ++res.correct;
    }
    res.accuracy = static_cast<double>(res.correct) / static_cast<double>(triplets.size());
    return res;
}

// ---------------------------------------------------------------------------

void write_analogies(std::ostream& out, const AnalogySet& analogies) {
    for (const auto& an : analogies) {
        nlohmann::ordered_json obj;
        obj["a"] = an.a;
        obj["b"] = an.b;
        obj["c"] = an.c;
        obj["d"] = an.d;
        obj["type_pair"] = {field_name(an.type_pair.first), field_name(an.type_pair.second)};
        out << obj.dump() << '\n';
    }
}

namespace {

template <typename Fn>
void each_object(std::istream& in, const std::string& name, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
            if (!obj.is_object()) throw ParseError(name, line_no, "expected a JSON object");
            fn(obj);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(name, line_no, e.what());
        }
    }
}

std::string token_field(const nlohmann::json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
        throw Error(std::string("'") + key + "' must be a non-empty string");
    }
    return v.get<std::string>();
}

}  // namespace

AnalogySet read_analogies(std::istream& in, const std::string& name) {
    AnalogySet out;
    each_object(in, name, [&](const nlohmann::json& obj) {
        Analogy an;
        an.a = token_field(obj, "a");
        an.b = token_field(obj, "b");
        an.c = token_field(obj, "c");
        an.d = token_field(obj, "d");
        const auto& tp = obj.at("type_pair");
        if (!tp.is_array() || tp.size() != 2) throw Error("type_pair must hold two field names");
        an.type_pair = {parse_field(tp[0].get<std::string>()), parse_field(tp[1].get<std::string>())};
        if (an.a == an.c) throw Error("analogy sources a and c must differ");
        out.push_back(std::move(an));
    });
    return out;
}

AnalogySet load_analogies(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_analogies(in, path);
}

std::vector<SimilarityTriplet> read_triplets(std::istream& in, const std::string& name) {
    std::vector<SimilarityTriplet> out;
    each_object(in, name, [&](const nlohmann::json& obj) {
        SimilarityTriplet t;
        t.anchor = to_key(normalize_query(token_field(obj, "anchor")));
        t.option_a = to_key(normalize_query(token_field(obj, "option_a")));
        t.option_b = to_key(normalize_query(token_field(obj, "option_b")));
        const std::string choice = token_field(obj, "human_choice");
        if (choice == "a") {
            t.human_choice = Choice::a;
        } else if (choice == "b") {
            t.human_choice = Choice::b;
        } else {
            throw Error("human_choice must be \"a\" or \"b\"");
        }
        if (t.option_a == t.option_b || t.anchor == t.option_a || t.anchor == t.option_b) {
            throw Error("triplet tokens must be distinct");
        }
        out.push_back(std::move(t));
    });
    return out;
}

std::vector<SimilarityTriplet> load_triplets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_triplets(in, path);
}

std::string report_json(const EvalReport& report, int indent) {
    nlohmann::ordered_json obj;
    obj["n_analogies"] = report.n_analogies;
    obj["n_covered"] = report.n_covered;
    obj["coverage"] = report.coverage;
    nlohmann::ordered_json hr = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.hit_rate) hr[std::to_string(k)] = v;
    obj["hit_rate"] = hr;
    obj["random_baseline"] = report.random_baseline;
    obj["st_accuracy"] = report.st_accuracy ? nlohmann::ordered_json(*report.st_accuracy)
                                            : nlohmann::ordered_json(nullptr);
    return obj.dump(indent);
}

}  // namespace q2p
