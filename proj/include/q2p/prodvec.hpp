#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "q2p/datamodel.hpp"
#include "q2p/embedding_space.hpp"
#include "q2p/random.hpp"

namespace q2p {

/// Skip-gram negative-sampling hyperparameters. Defaults are the product
/// space settings (50 dims, window 10, 30 epochs, 0.75 unigram exponent).
struct TrainConfig {
    int dimension = 50;
    int window = 10;
    int epochs = 30;
    double ns_exponent = 0.75;
    int negatives_per_positive = 5;
    double learning_rate_initial = 0.025;
    int min_count = 1;
    std::uint64_t seed = 1;
    /// 1 = deterministic. More threads run lock-free shared updates.
    int threads = 1;

    /// Same as the defaults but with min_count 5, for description text.
    static TrainConfig text_defaults();

    void validate() const;
};

/// Items ordered by descending frequency, ties by ascending identifier.
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> items, std::vector<std::uint64_t> counts);

    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const std::vector<std::string>& items() const noexcept { return items_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

    /// Index of `item` or -1 when out of vocabulary.
    std::int64_t find(std::string_view item) const;

    /// Item ids of a sequence with out-of-vocabulary items removed.
    std::vector<std::uint32_t> encode(std::span<const std::string> sequence) const;

private:
    std::vector<std::string> items_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

/// Throws if the input is empty or nothing survives `min_count`.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> sequences, int min_count);
Vocabulary build_vocabulary(const SessionSet& sessions, int min_count);

/// Ordered (center, context) position pairs of a sequence. For each center a
/// reach b is drawn uniformly from 1..window; with `rng == nullptr` the reach
/// is fixed at `window`.
std::vector<std::pair<std::size_t, std::size_t>> window_pairs(std::size_t length, int window,
                                                              Rng* rng);

/// (center, context) item pairs of a session; out-of-vocabulary items are
/// removed before windowing.
std::vector<std::pair<std::string, std::string>> generate_pairs(const Session& session,
                                                                const Vocabulary& vocab,
                                                                int window, Rng* rng);

/// Negative-sampling distribution: counts raised to `exponent`.
AliasTable negative_sampler(const Vocabulary& vocab, double exponent);

struct TrainStats {
    /// Mean SGNS loss per positive pair, one entry per epoch.
    std::vector<double> epoch_loss;
    std::uint64_t pairs = 0;
};

/// Product space from sessions (sessions play sentences, products words).
EmbeddingSpace train(const SessionSet& sessions, const TrainConfig& config,
                     TrainStats* stats = nullptr);

/// Word space from tokenized text, same optimizer.
EmbeddingSpace train_text(std::span<const std::vector<std::string>> corpus,
                          const TrainConfig& config, TrainStats* stats = nullptr);

/// Top-k by cosine excluding `key` itself; ties by ascending key.
std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingSpace& space,
                                                              std::string_view key,
                                                              std::size_t k);

}  // namespace q2p
