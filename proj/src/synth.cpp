#include "q2p/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "q2p/random.hpp"

namespace q2p {

PopularityDistribution::PopularityDistribution(std::map<std::string, double> weights)
    : weights_(std::move(weights)) {
    bool positive = false;
    for (const auto& [id, w] : weights_) {
        if (!std::isfinite(w) || w < 0.0) {
            throw Error("popularity weight for '" + id + "' must be finite and non-negative");
        }
        positive = positive || w > 0.0;
    }
    if (!positive) throw Error("popularity distribution needs at least one positive weight");
}

double PopularityDistribution::weight(const std::string& product_id) const {
    auto it = weights_.find(product_id);
    return it == weights_.end() ? 0.0 : it->second;
}

PopularityDistribution estimate_popularity(const SessionSet& sessions) {
    if (sessions.empty()) throw Error("cannot estimate popularity from an empty SessionSet");
    std::map<std::string, double> w;
    for (const auto& s : sessions) {
        for (const auto& id : s.events) w[id] += 1.0;
    }
    return PopularityDistribution(std::move(w));
}

void SynthConfig::validate() const {
    if (simulations_per_word < 1) throw Error("SynthConfig: simulations_per_word must be >= 1");
    if (search_limit < 1) throw Error("SynthConfig: search_limit must be >= 1");
    if (threads < 1) throw Error("SynthConfig: threads must be >= 1");
}

namespace {

struct WordEvents {
    std::vector<std::string> clicks;
    bool skipped = false;
};

WordEvents simulate_word(const std::string& word, const InvertedIndex& index,
                         const PopularityDistribution& dist, const SynthConfig& config) {
    WordEvents out;
    const auto hits = index.search(word, static_cast<std::size_t>(config.search_limit));
    if (hits.empty()) {
        out.skipped = true;
        return out;
    }
    std::vector<double> w(hits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        w[i] = dist.weight(hits[i].product_id);
        total += w[i];
    }
    if (!(total > 0.0)) std::fill(w.begin(), w.end(), 1.0);

    const AliasTable table(w);
    Rng rng(derive_seed(config.seed, word));
    out.clicks.reserve(static_cast<std::size_t>(config.simulations_per_word));
    for (int i = 0; i < config.simulations_per_word; ++i) {
        out.clicks.push_back(hits[table.sample(rng)].product_id);
    }
    return out;
}

}  // namespace

SyntheticEvents generate_synthetic_events(const std::vector<std::string>& words,
                                          const InvertedIndex& index,
                                          const PopularityDistribution& dist,
                                          const SynthConfig& config) {
    config.validate();
    if (words.empty()) throw Error("synthetic event generation needs at least one word");

    std::set<std::string> unique;
    for (const auto& w : words) {
        std::string n = normalize_query(w);
        if (!n.empty()) unique.insert(std::move(n));
    }
    const std::vector<std::string> sorted(unique.begin(), unique.end());
    std::vector<WordEvents> per_word(sorted.size());

    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(config.threads), std::max<std::size_t>(1, sorted.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            per_word[i] = simulate_word(sorted[i], index, dist, config);
        }
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < sorted.size(); i += workers) {
                    per_word[i] = simulate_word(sorted[i], index, dist, config);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    SyntheticEvents result;
    std::vector<ClickEvent> events;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (per_word[i].skipped) {
            result.skipped.push_back(sorted[i]);
            continue;
        }
        for (auto& pid : per_word[i].clicks) events.push_back({sorted[i], std::move(pid)});
    }
    result.log = ClickLog(ClickSource::synthetic, std::move(events));
    return result;
}

// ---------------------------------------------------------------------------

void ShopSpec::validate() const {
    if (n_brands < 1 || n_types < 1 || n_activities < 1 || products_per_cell < 1 ||
        n_sessions < 1) {
        throw Error("ShopSpec: all counts must be >= 1");
    }
    if (session_length_min < 2 || session_length_max < session_length_min) {
        throw Error("ShopSpec: session lengths must satisfy 2 <= min <= max");
    }
    if (!(popularity_zipf_exponent >= 0.0) || !std::isfinite(popularity_zipf_exponent)) {
        throw Error("ShopSpec: popularity_zipf_exponent must be finite and >= 0");
    }
    auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!unit(cluster_stay_probability) || !unit(activity_purity) || !unit(click_noise)) {
        throw Error("ShopSpec: probabilities must lie in [0, 1]");
    }
    if (real_clicks_per_query < 0) throw Error("ShopSpec: real_clicks_per_query must be >= 0");
}

namespace {

std::string numbered(const std::string& prefix, std::size_t i, std::size_t n) {
    const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
    std::string digits = std::to_string(i);
    return prefix + std::string(width - std::min(width, digits.size()), '0') + digits;
}

const char* const kFiller[] = {
    "comfort", "classic", "light",  "premium", "durable", "soft",   "style",  "fit",
    "breathable", "new", "season", "edition", "quality", "design", "pro",    "everyday",
    "performance", "sleek", "warm", "fresh",
};

}  // namespace

SyntheticShop generate_synthetic_shop(const ShopSpec& spec) {
    spec.validate();
    SyntheticShop shop;

    const auto nb = static_cast<std::size_t>(spec.n_brands);
    const auto nt = static_cast<std::size_t>(spec.n_types);
    const auto na = static_cast<std::size_t>(spec.n_activities);
    const auto ppc = static_cast<std::size_t>(spec.products_per_cell);
    const std::size_t n_products = nb * nt * ppc;

    std::vector<std::string> brands, types, activities;
    for (std::size_t i = 0; i < nb; ++i) brands.push_back(numbered("brand", i, nb));
    for (std::size_t i = 0; i < nt; ++i) types.push_back(numbered("type", i, nt));
    for (std::size_t i = 0; i < na; ++i) activities.push_back(numbered("sport", i, na));

    // Catalog: one cell per (brand, type).
    Rng cat_rng(derive_seed(spec.seed, "shop/catalog"));
    std::vector<std::size_t> brand_of, type_of;
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t dominant = b % na;
        shop.truth.dominant_activity[brands[b]] = activities[dominant];
        shop.truth.brands[brands[b]] = static_cast<int>(nt * ppc);
        for (std::size_t t = 0; t < nt; ++t) {
            for (std::size_t k = 0; k < ppc; ++k) {
                Product p;
                p.product_id = numbered("p", brand_of.size(), n_products);
                std::size_t act = dominant;
                if (na > 1 && cat_rng.uniform() >= spec.activity_purity) {
                    act = (dominant + 1 + cat_rng.below(na - 1)) % na;
                }
                p.brand = brands[b];
                p.product_type = types[t];
                p.activity = activities[act];
                std::string desc = brands[b] + " " + types[t] + " " + activities[act];
                const auto fillers = 3 + cat_rng.below(4);
                for (std::uint64_t f = 0; f < fillers; ++f) {
                    desc += " ";
                    desc += kFiller[cat_rng.below(std::size(kFiller))];
                }
                p.description = std::move(desc);
                shop.catalog.add(std::move(p));
                brand_of.push_back(b);
                type_of.push_back(t);
            }
        }
    }
    const auto& products = shop.catalog.products();

    // Zipf popularity over a random ranking of the products.
    Rng pop_rng(derive_seed(spec.seed, "shop/popularity"));
    std::vector<std::size_t> order(n_products);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n_products; i > 1; --i) {
        std::swap(order[i - 1], order[pop_rng.below(i)]);
    }
    std::vector<double> popularity(n_products);
    for (std::size_t rank = 0; rank < n_products; ++rank) {
        popularity[order[rank]] =
            1.0 / std::pow(static_cast<double>(rank + 1), spec.popularity_zipf_exponent);
    }
    for (std::size_t i = 0; i < n_products; ++i) {
        shop.truth.popularity[products[i].product_id] = popularity[i];
    }

    // Per-cluster samplers.
    std::vector<std::vector<std::size_t>> by_brand(nb), by_type(nt);
    for (std::size_t i = 0; i < n_products; ++i) {
        by_brand[brand_of[i]].push_back(i);
        by_type[type_of[i]].push_back(i);
    }
    auto make_table = [&](const std::vector<std::size_t>& members) {
        std::vector<double> w;
        for (auto i : members) w.push_back(popularity[i]);
        return AliasTable(w);
    };
    std::vector<AliasTable> brand_tables, type_tables;
    for (const auto& m : by_brand) brand_tables.push_back(make_table(m));
    for (const auto& m : by_type) type_tables.push_back(make_table(m));
    const AliasTable global(popularity);

    Rng ses_rng(derive_seed(spec.seed, "shop/sessions"));
    shop.sessions.reserve(static_cast<std::size_t>(spec.n_sessions));
    for (int s = 0; s < spec.n_sessions; ++s) {
        Session session;
        session.session_id = numbered("s", static_cast<std::size_t>(s),
                                      static_cast<std::size_t>(spec.n_sessions));
        const auto len = ses_rng.between(spec.session_length_min, spec.session_length_max);
        std::size_t cur = global.sample(ses_rng);
        session.events.push_back(products[cur].product_id);
        for (std::int64_t k = 1; k < len; ++k) {
            if (ses_rng.uniform() < spec.cluster_stay_probability) {
                if (ses_rng.uniform() < 0.5) {
                    const auto b = brand_of[cur];
                    cur = by_brand[b][brand_tables[b].sample(ses_rng)];
                } else {
                    const auto t = type_of[cur];
                    cur = by_type[t][type_tables[t].sample(ses_rng)];
                }
            } else {
                cur = global.sample(ses_rng);
            }
            session.events.push_back(products[cur].product_id);
        }
        shop.sessions.push_back(std::move(session));
    }

    // Real-style clicks: each label is issued as a query once, clicks favour
    // popular products near the top of the result list plus uniform noise.
    const InvertedIndex index = build_index(shop.catalog);
    std::set<std::string> labels;
    for (const auto& p : products) {
        for (Field f : {Field::brand, Field::product_type, Field::activity}) {
            if (auto v = p.value(f)) labels.insert(*v);
        }
    }
    std::vector<ClickEvent> clicks;
    for (const auto& label : labels) {
        const auto hits = index.search(label, 50);
        if (hits.empty()) continue;
        std::vector<double> w(hits.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            w[i] = shop.truth.popularity[hits[i].product_id] / (1.0 + 0.1 * static_cast<double>(i));
        }
        const AliasTable table(w);
        Rng rng(derive_seed(spec.seed, "shop/real/" + label));
        for (int c = 0; c < spec.real_clicks_per_query; ++c) {
            const std::string& pid = rng.uniform() < spec.click_noise
                                         ? products[rng.below(n_products)].product_id
                                         : hits[table.sample(rng)].product_id;
            clicks.push_back({label, pid});
        }
    }
    shop.clicks = ClickLog(ClickSource::real, std::move(clicks));
    return shop;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    nlohmann::ordered_json obj;
    obj["brands"] = truth.brands;
    obj["dominant_activity"] = truth.dominant_activity;
    obj["popularity"] = truth.popularity;
    out << obj.dump(2) << '\n';
}

ClusterSessions generate_cluster_sessions(const ClusterSpec& spec) {
    if (spec.n_clusters < 1 || spec.products_per_cluster < 1 || spec.n_sessions < 1 ||
        spec.session_length_min < 2 || spec.session_length_max < spec.session_length_min) {
        throw Error("invalid ClusterSpec");
    }
    ClusterSessions out;
    const auto nc = static_cast<std::size_t>(spec.n_clusters);
    const auto ppc = static_cast<std::size_t>(spec.products_per_cluster);
    std::vector<std::vector<std::string>> members(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t k = 0; k < ppc; ++k) {
            std::string id = numbered("c" + std::to_string(c) + "_p", k, ppc);
            out.cluster_of[id] = static_cast<int>(c);
            members[c].push_back(std::move(id));
        }
    }
    Rng rng(derive_seed(spec.seed, "synth/clusters"));
    for (int s = 0; s < spec.n_sessions; ++s) {
        Session session;
        session.session_id = numbered("s", static_cast<std::size_t>(s),
                                      static_cast<std::size_t>(spec.n_sessions));
        const auto len = rng.between(spec.session_length_min, spec.session_length_max);
        std::size_t cluster = rng.below(nc);
        for (std::int64_t k = 0; k < len; ++k) {
            if (k > 0 && nc > 1 && rng.uniform() >= spec.stay_probability) {
                cluster = (cluster + 1 + rng.below(nc - 1)) % nc;
            }
            session.events.push_back(members[cluster][rng.below(ppc)]);
        }
        out.sessions.push_back(std::move(session));
    }
    return out;
}

}  // namespace q2p
