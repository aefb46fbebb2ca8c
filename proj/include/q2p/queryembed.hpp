#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "q2p/datamodel.hpp"
#include "q2p/embedding_space.hpp"

namespace q2p {

/// Click counts per product for one normalized query.
struct ClickHistogram {
    std::string query;
    std::map<std::string, std::uint64_t> counts;

    bool operator==(const ClickHistogram&) const = default;
};

struct RankConfig {
    /// Number of most-clicked products that shape a query vector.
    int rank = 5;

    void validate() const;
};

/// Groups events by query and sums clicks per product.
std::map<std::string, ClickHistogram> aggregate_clicks(const ClickLog& log);

/// Sums several logs into one set of histograms.
std::map<std::string, ClickHistogram> aggregate_clicks(const std::vector<const ClickLog*>& logs);

/// The `rank` most clicked products (ties by ascending id), before any
/// embedding lookup.
std::vector<std::pair<std::string, std::uint64_t>> top_clicked(const ClickHistogram& hist, int rank);

/// Click-weighted mean of the top-ranked products that have a vector.
/// Throws when none of them is embedded.
std::vector<double> embed_query(const ClickHistogram& hist, const EmbeddingSpace& products,
                                const RankConfig& config);

struct Lexicon {
    EmbeddingSpace space{1, SpaceKind::query};
    /// Queries whose top-ranked products have no vectors.
    std::vector<std::string> omitted;
};

/// One vector per embeddable query, keyed by query with spaces as '_',
/// in ascending query order.
Lexicon build_lexicon(const ClickLog& log, const EmbeddingSpace& products,
                      const RankConfig& config);
Lexicon build_lexicon(const std::map<std::string, ClickHistogram>& histograms,
                      const EmbeddingSpace& products, const RankConfig& config);

}  // namespace q2p
