#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "q2p/datamodel.hpp"
#include "q2p/embedding_space.hpp"

namespace q2p {

/// a : b = c : d, where (a, c) come from `type_pair.first` and (b, d) from
/// `type_pair.second`. Tokens are label keys (spaces replaced by '_').
struct Analogy {
    std::string a, b, c, d;
    std::pair<Field, Field> type_pair;

    bool operator==(const Analogy&) const = default;
    auto operator<=>(const Analogy&) const = default;
};

using AnalogySet = std::vector<Analogy>;

struct AnalogyGenConfig {
    double gini_percentile = 75.0;
    int samples_per_entity = 10;
    std::uint64_t seed = 1;

    void validate() const;
};

enum class Choice { a, b };

struct SimilarityTriplet {
    std::string anchor, option_a, option_b;
    Choice human_choice = Choice::a;
};

struct EvalReport {
    std::map<int, double> hit_rate;
    double coverage = 0.0;
    std::size_t n_analogies = 0;
    std::size_t n_covered = 0;
    /// Mean of 1/|candidates| over covered analogies: the chance of a blind
    /// guess landing on the gold answer.
    double random_baseline = 0.0;
    std::optional<double> st_accuracy;
};

// ---------------------------------------------------------------------------
// Concentration

/// Sum_i Sum_j |x_i - x_j| / (2 n Sum x). Throws on an empty, negative or
/// all-zero input.
double gini(std::span<const double> frequencies);

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
double percentile_nearest_rank(std::vector<double> values, double percentile);

/// Counts of every `target_field` label in the catalog (ascending label
/// order, zeros included) for the products whose `entity_field` equals
/// `entity_value`. Throws if that entity has no product labeled with
/// `target_field`.
std::vector<std::pair<std::string, std::uint64_t>> label_distribution(
    const Catalog& catalog, Field entity_field, const std::string& entity_value,
    Field target_field);

struct EntityProfile {
    std::string entity;
    double gini;
    std::string top_label;
};

/// Gini and most frequent target label of every entity that has at least
/// one product labeled with both fields, in ascending entity order.
std::vector<EntityProfile> entity_profiles(const Catalog& catalog, Field entity_field,
                                           Field target_field);

/// Analogies between entities whose label distribution is concentrated
/// enough (Gini at or above the configured percentile). Every sampled pair
/// is emitted in both directions; duplicates are dropped, first occurrence
/// kept.
AnalogySet generate_analogies(const Catalog& catalog, std::pair<Field, Field> type_pair,
                              const AnalogyGenConfig& config);

// ---------------------------------------------------------------------------
// Scoring

/// 3CosAdd: candidates (minus a, b, c and tokens without vectors) ranked by
/// cosine to b - a + c, ties by ascending token. nullopt when a, b or c has
/// no vector.
std::optional<std::vector<std::pair<std::string, double>>> solve_analogy(
    const EmbeddingSpace& space, const std::string& a, const std::string& b,
    const std::string& c, std::span<const std::string> candidates);

/// Candidate tokens per taxonomy field.
using CandidateSets = std::map<Field, std::vector<std::string>>;

/// Label keys of every taxonomy field in the catalog.
CandidateSets candidate_sets(const Catalog& catalog);

struct HitRateOptions {
    /// Rank over every key in the space instead of the answer field's labels.
    bool open_vocabulary = false;
};

/// HR@k over covered analogies (all four tokens embedded) plus coverage.
EvalReport hit_rate(const EmbeddingSpace& space, const AnalogySet& analogies,
                    const CandidateSets& candidates, const std::vector<int>& cutoffs,
                    HitRateOptions options = {});

struct SimilarityResult {
    double accuracy = 0.0;
    std::size_t correct = 0;
    /// Indices of triplets with a token missing from the space.
    std::vector<std::size_t> missing;
};

/// Share of triplets where the option closer to the anchor (by cosine)
/// matches the human choice. Missing tokens and exact ties count as wrong.
SimilarityResult similarity_accuracy(const EmbeddingSpace& space,
                                     std::span<const SimilarityTriplet> triplets);

// ---------------------------------------------------------------------------
// Files

void write_analogies(std::ostream& out, const AnalogySet& analogies);
AnalogySet read_analogies(std::istream& in, const std::string& name);
AnalogySet load_analogies(const std::string& path);

/// Tokens are normalized like queries and keyed with '_'.
std::vector<SimilarityTriplet> read_triplets(std::istream& in, const std::string& name);
std::vector<SimilarityTriplet> load_triplets(const std::string& path);

std::string report_json(const EvalReport& report, int indent = 2);

}  // namespace q2p
