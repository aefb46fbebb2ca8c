#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "q2p/datamodel.hpp"
#include "q2p/searchindex.hpp"

namespace q2p {

/// Non-negative product weights with at least one positive entry.
class PopularityDistribution {
public:
    PopularityDistribution() = default;
    explicit PopularityDistribution(std::map<std::string, double> weights);

    /// 0 for products without a recorded weight.
    double weight(const std::string& product_id) const;
    const std::map<std::string, double>& weights() const noexcept { return weights_; }

private:
    std::map<std::string, double> weights_;
};

/// Interaction count of every product across all sessions.
PopularityDistribution estimate_popularity(const SessionSet& sessions);

struct SynthConfig {
    int simulations_per_word = 500;
    int search_limit = 50;
    std::uint64_t seed = 1;
    /// Per-word streams make the output independent of this value.
    int threads = 1;

    void validate() const;
};

struct SyntheticEvents {
    ClickLog log{ClickSource::synthetic};
    /// Normalized words whose search returned nothing.
    std::vector<std::string> skipped;
};

/// Simulated search-and-click: every word is searched once, then
/// `simulations_per_word` clicks are drawn from the popularity distribution
/// restricted to the result list (uniform when all of those weights are 0).
/// Words are normalized and de-duplicated; events come out grouped by word
/// in ascending order.
SyntheticEvents generate_synthetic_events(const std::vector<std::string>& words,
                                          const InvertedIndex& index,
                                          const PopularityDistribution& dist,
                                          const SynthConfig& config);

// ---------------------------------------------------------------------------
// Synthetic shop

struct ShopSpec {
    int n_brands = 8;
    int n_types = 5;
    int n_activities = 8;
    int products_per_cell = 4;
    int n_sessions = 50000;
    int session_length_min = 3;
    int session_length_max = 12;
    double popularity_zipf_exponent = 1.0;
    std::uint64_t seed = 1;

    /// Chance that a session step stays in the current brand/type cluster.
    double cluster_stay_probability = 0.8;
    /// Share of a brand's products carrying its dominant activity.
    double activity_purity = 1.0;
    /// Clicks simulated per label query in the real-style log.
    int real_clicks_per_query = 20;
    /// Share of real-style clicks landing on a random catalog product.
    double click_noise = 0.1;

    void validate() const;
};

struct GroundTruth {
    /// Brand -> number of products.
    std::map<std::string, int> brands;
    std::map<std::string, std::string> dominant_activity;
    /// Planted product weights.
    std::map<std::string, double> popularity;
};

struct SyntheticShop {
    Catalog catalog;
    SessionSet sessions;
    ClickLog clicks{ClickSource::real};
    GroundTruth truth;
};

SyntheticShop generate_synthetic_shop(const ShopSpec& spec);

void write_ground_truth(std::ostream& out, const GroundTruth& truth);

/// Sessions over `n_clusters` disjoint product groups; each step stays in
/// the current group with probability `stay_probability`.
struct ClusterSpec {
    int n_clusters = 2;
    int products_per_cluster = 10;
    int n_sessions = 1000;
    int session_length_min = 5;
    int session_length_max = 15;
    double stay_probability = 0.9;
    std::uint64_t seed = 1;
};

struct ClusterSessions {
    SessionSet sessions;
    /// Product id -> cluster number.
    std::map<std::string, int> cluster_of;
};

ClusterSessions generate_cluster_sessions(const ClusterSpec& spec);

}  // namespace q2p
