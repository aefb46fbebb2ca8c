#include "q2p/queryembed.hpp"

#include <algorithm>
#include <numeric>

namespace q2p {

void RankConfig::validate() const {
    if (rank < 1) throw Error("RankConfig: rank must be >= 1");
}

std::map<std::string, ClickHistogram> aggregate_clicks(const std::vector<const ClickLog*>& logs) {
    std::map<std::string, ClickHistogram> out;
    for (const ClickLog* log : logs) {
        for (const auto& e : log->events()) {
            auto& h = out[e.query];
            h.query = e.query;
            ++h.counts[e.product_id];
        }
    }
    return out;
}

std::map<std::string, ClickHistogram> aggregate_clicks(const ClickLog& log) {
    return aggregate_clicks(std::vector<const ClickLog*>{&log});
}

std::vector<std::pair<std::string, std::uint64_t>> top_clicked(const ClickHistogram& hist,
                                                               int rank) {
    std::vector<std::pair<std::string, std::uint64_t>> items(hist.counts.begin(),
                                                            hist.counts.end());
    // counts is keyed by id, so a stable sort on count keeps ids ascending.
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (items.size() > static_cast<std::size_t>(rank)) items.resize(static_cast<std::size_t>(rank));
    return items;
}

std::vector<double> embed_query(const ClickHistogram& hist, const EmbeddingSpace& products,
                                const RankConfig& config) {
    config.validate();
    if (hist.counts.empty()) throw Error("query '" + hist.query + "' has no clicks");
    for (const auto& [id, count] : hist.counts) {
        if (count == 0) throw Error("query '" + hist.query + "': zero count for '" + id + "'");
    }
    std::vector<std::pair<std::span<const float>, std::uint64_t>> chosen;
    std::uint64_t common = 0;
    for (const auto& [id, count] : top_clicked(hist, config.rank)) {
        auto v = products.find(id);
        if (v.empty()) continue;
        chosen.emplace_back(v, count);
        common = std::gcd(common, count);
    }
    if (chosen.empty()) {
        throw Error("query '" + hist.query + "': none of its top clicked products is embedded");
    }

    // Weights reduced by their gcd: scaling every count by a constant then
    // gives bit-identical output.
    std::vector<double> acc(products.dimension(), 0.0);
    double total = 0.0;
    for (const auto& [v, count] : chosen) {
        const double w = static_cast<double>(count / common);
        total += w;
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * static_cast<double>(v[k]);
    }
    for (auto& x : acc) x /= total;
    return acc;
}

Lexicon build_lexicon(const std::map<std::string, ClickHistogram>& histograms,
                      const EmbeddingSpace& products, const RankConfig& config) {
    config.validate();
    if (products.empty()) throw Error("product space is empty");
    if (histograms.empty()) throw Error("click log is empty");

    Lexicon lex{EmbeddingSpace(products.dimension(), SpaceKind::query), {}};
    std::vector<float> buf(products.dimension());
    for (const auto& [query, hist] : histograms) {
        std::vector<double> v;
        if (lex.space.contains(to_key(query))) {
            // "a b" and "a_b" share a key; the first in query order wins.
            lex.omitted.push_back(query);
            continue;
        }
        try {
            v = embed_query(hist, products, config);
        } catch (const Error&) {
            lex.omitted.push_back(query);
            continue;
        }
        std::transform(v.begin(), v.end(), buf.begin(),
                       [](double x) { return static_cast<float>(x); });
        lex.space.add(to_key(query), buf);
    }
    if (lex.space.empty()) throw Error("no query could be embedded");
    return lex;
}

Lexicon build_lexicon(const ClickLog& log, const EmbeddingSpace& products,
                      const RankConfig& config) {
    return build_lexicon(aggregate_clicks(log), products, config);
}

}  // namespace q2p
