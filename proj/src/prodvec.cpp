#include "q2p/prodvec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace q2p {

TrainConfig TrainConfig::text_defaults() {
    TrainConfig c;
    c.min_count = 5;
    return c;
}

void TrainConfig::validate() const {
    if (dimension <= 0) throw Error("TrainConfig: dimension must be > 0");
    if (window < 1) throw Error("TrainConfig: window must be >= 1");
    if (epochs < 1) throw Error("TrainConfig: epochs must be >= 1");
    if (!(ns_exponent >= 0.0 && ns_exponent <= 1.0)) {
        throw Error("TrainConfig: ns_exponent must lie in [0, 1]");
    }
    if (negatives_per_positive < 1) throw Error("TrainConfig: negatives_per_positive must be >= 1");
    if (!(learning_rate_initial > 0.0)) throw Error("TrainConfig: learning rate must be > 0");
    if (min_count < 1) throw Error("TrainConfig: min_count must be >= 1");
    if (threads < 1) throw Error("TrainConfig: threads must be >= 1");
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> items, std::vector<std::uint64_t> counts)
    : items_(std::move(items)), counts_(std::move(counts)) {
    if (items_.size() != counts_.size()) throw Error("vocabulary items/counts size mismatch");
    for (std::size_t i = 0; i < items_.size(); ++i) {
        index_.emplace(items_[i], static_cast<std::uint32_t>(i));
    }
}

std::int64_t Vocabulary::find(std::string_view item) const {
    auto it = index_.find(std::string(item));
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::vector<std::uint32_t> Vocabulary::encode(std::span<const std::string> sequence) const {
    std::vector<std::uint32_t> out;
    out.reserve(sequence.size());
    for (const auto& s : sequence) {
        auto it = index_.find(s);
        if (it != index_.end()) out.push_back(it->second);
    }
    return out;
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> sequences, int min_count) {
    if (sequences.empty()) throw Error("cannot build a vocabulary from an empty corpus");
    std::unordered_map<std::string, std::uint64_t> freq;
    for (const auto& seq : sequences) {
        for (const auto& item : seq) ++freq[item];
    }
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [item, n] : freq) {
        if (n >= static_cast<std::uint64_t>(std::max(min_count, 1))) kept.emplace_back(item, n);
    }
    if (kept.empty()) {
        throw Error("vocabulary is empty after applying min_count=" + std::to_string(min_count));
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::string> items;
    std::vector<std::uint64_t> counts;
    items.reserve(kept.size());
    counts.reserve(kept.size());
    for (auto& [item, n] : kept) {
        items.push_back(std::move(item));
        counts.push_back(n);
    }
    return Vocabulary(std::move(items), std::move(counts));
}

namespace {

std::vector<std::vector<std::string>> session_sequences(const SessionSet& sessions) {
    std::vector<std::vector<std::string>> seqs;
    seqs.reserve(sessions.size());
    for (const auto& s : sessions) seqs.push_back(s.events);
    return seqs;
}

}  // namespace

Vocabulary build_vocabulary(const SessionSet& sessions, int min_count) {
    if (sessions.empty()) throw Error("cannot build a vocabulary from an empty SessionSet");
    return build_vocabulary(session_sequences(sessions), min_count);
}

// ---------------------------------------------------------------------------

namespace {

template <typename Fn>
void for_each_window_pair(std::size_t length, int window, Rng* rng, Fn&& fn) {
    if (length < 2) return;
    for (std::size_t i = 0; i < length; ++i) {
        const std::size_t reach =
            rng ? 1 + static_cast<std::size_t>(rng->below(static_cast<std::uint64_t>(window)))
                : static_cast<std::size_t>(window);
        const std::size_t lo = i >= reach ? i - reach : 0;
        const std::size_t hi = std::min(length - 1, i + reach);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j != i) fn(i, j);
        }
    }
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> window_pairs(std::size_t length, int window,
                                                              Rng* rng) {
    if (window < 1) throw Error("window must be >= 1");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for_each_window_pair(length, window, rng, [&](std::size_t i, std::size_t j) {
        out.emplace_back(i, j);
    });
    return out;
}

std::vector<std::pair<std::string, std::string>> generate_pairs(const Session& session,
                                                                const Vocabulary& vocab,
                                                                int window, Rng* rng) {
    const auto ids = vocab.encode(session.events);
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [i, j] : window_pairs(ids.size(), window, rng)) {
        out.emplace_back(vocab.items()[ids[i]], vocab.items()[ids[j]]);
    }
    return out;
}

AliasTable negative_sampler(const Vocabulary& vocab, double exponent) {
    std::vector<double> w(vocab.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::pow(static_cast<double>(vocab.counts()[i]), exponent);
    }
    return AliasTable(w);
}

// ---------------------------------------------------------------------------

namespace {

// Component access. The shared variant is used when several workers update
// the same matrices without locks.
struct PlainAccess {
    static float load(const float& x) { return x; }
    static void add(float& x, float v) { x += v; }
};

struct SharedAccess {
    static float load(const float& x) {
        return std::atomic_ref<float>(const_cast<float&>(x)).load(std::memory_order_relaxed);
    }
    static void add(float& x, float v) {
        std::atomic_ref<float> r(x);
        r.store(r.load(std::memory_order_relaxed) + v, std::memory_order_relaxed);
    }
};

double softplus(double x) {
    // log(1 + e^x) without overflow.
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

class SgnsModel {
public:
    SgnsModel(const Vocabulary& vocab, const TrainConfig& config)
        : vocab_(vocab),
          config_(config),
          dim_(static_cast<std::size_t>(config.dimension)),
          input_(vocab.size() * dim_),
          output_(vocab.size() * dim_, 0.0f),
          sampler_(negative_sampler(vocab, config.ns_exponent)) {
        Rng init(derive_seed(config.seed, "prodvec/init"));
        for (auto& x : input_) {
            x = static_cast<float>((init.uniform() - 0.5) / static_cast<double>(dim_));
        }
    }

    /// Trains on `seqs[begin, end)` for one epoch. `processed` counts centers
    /// across all workers and drives the learning-rate schedule.
    template <typename Access>
    void run_epoch(std::span<const std::vector<std::uint32_t>> seqs, Rng& rng,
                   std::atomic<std::uint64_t>& processed, std::uint64_t total_centers,
                   double& loss, std::uint64_t& pairs) {
        std::vector<float> grad(dim_);
        const double lr0 = config_.learning_rate_initial;
        for (const auto& seq : seqs) {
            const double progress =
                static_cast<double>(processed.load(std::memory_order_relaxed)) /
                static_cast<double>(total_centers);
            const float alpha = static_cast<float>(lr0 * std::max(1e-4, 1.0 - progress));
            for_each_window_pair(seq.size(), config_.window, &rng, [&](std::size_t i, std::size_t j) {
                loss += update<Access>(seq[i], seq[j], alpha, rng, grad);
                ++pairs;
            });
            processed.fetch_add(seq.size(), std::memory_order_relaxed);
        }
    }

    EmbeddingSpace publish(SpaceKind kind) const {
        EmbeddingSpace space(dim_, kind);
        for (std::size_t i = 0; i < vocab_.size(); ++i) {
            space.add(vocab_.items()[i],
                      std::span<const float>(input_.data() + i * dim_, dim_));
        }
        return space;
    }

private:
    template <typename Access>
    double update(std::uint32_t center, std::uint32_t context, float alpha, Rng& rng,
                  std::vector<float>& grad) {
        float* in = input_.data() + static_cast<std::size_t>(center) * dim_;
        std::fill(grad.begin(), grad.end(), 0.0f);
        double loss = 0.0;
        for (int n = 0; n <= config_.negatives_per_positive; ++n) {
            std::uint32_t target;
            float label;
            if (n == 0) {
                target = context;
                label = 1.0f;
            } else {
                target = static_cast<std::uint32_t>(sampler_.sample(rng));
                if (target == context) continue;
                label = 0.0f;
            }
            float* out = output_.data() + static_cast<std::size_t>(target) * dim_;
            float f = 0.0f;
            for (std::size_t k = 0; k < dim_; ++k) f += Access::load(in[k]) * Access::load(out[k]);
            const double sig = 1.0 / (1.0 + std::exp(-static_cast<double>(f)));
            loss += label > 0 ? softplus(-f) : softplus(f);
            const float g = (label - static_cast<float>(sig)) * alpha;
            for (std::size_t k = 0; k < dim_; ++k) {
                grad[k] += g * Access::load(out[k]);
                Access::add(out[k], g * Access::load(in[k]));
            }
        }
        for (std::size_t k = 0; k < dim_; ++k) Access::add(in[k], grad[k]);
        return loss;
    }

    const Vocabulary& vocab_;
    const TrainConfig& config_;
    std::size_t dim_;
    std::vector<float> input_;
    std::vector<float> output_;
    AliasTable sampler_;
};

EmbeddingSpace train_sequences(std::span<const std::vector<std::string>> corpus,
                               const TrainConfig& config, SpaceKind kind, TrainStats* stats) {
    config.validate();
    const Vocabulary vocab = build_vocabulary(corpus, config.min_count);

    std::vector<std::vector<std::uint32_t>> seqs;
    std::uint64_t centers = 0;
    for (const auto& s : corpus) {
        auto ids = vocab.encode(s);
        if (ids.size() < 2) continue;
        centers += ids.size();
        seqs.push_back(std::move(ids));
    }

    SgnsModel model(vocab, config);
    const std::uint64_t total_centers = std::max<std::uint64_t>(1, centers * config.epochs);
    std::atomic<std::uint64_t> processed{0};
    TrainStats local;

    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(config.threads), std::max<std::size_t>(1, seqs.size()));

    if (workers == 1) {
        Rng rng(derive_seed(config.seed, "prodvec/train"));
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            double loss = 0.0;
            std::uint64_t pairs = 0;
            model.run_epoch<PlainAccess>(seqs, rng, processed, total_centers, loss, pairs);
            local.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
            local.pairs += pairs;
        }
    } else {
        std::vector<Rng> rngs;
        for (std::size_t w = 0; w < workers; ++w) {
            rngs.emplace_back(derive_seed(config.seed, "prodvec/worker/" + std::to_string(w)));
        }
        const std::span<const std::vector<std::uint32_t>> all(seqs);
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            std::vector<double> loss(workers, 0.0);
            std::vector<std::uint64_t> pairs(workers, 0);
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                const std::size_t lo = all.size() * w / workers;
                const std::size_t hi = all.size() * (w + 1) / workers;
                pool.emplace_back([&, w, lo, hi] {
                    model.run_epoch<SharedAccess>(all.subspan(lo, hi - lo), rngs[w], processed,
                                                  total_centers, loss[w], pairs[w]);
                });
            }
            for (auto& t : pool) t.join();
            double l = 0.0;
            std::uint64_t p = 0;
            for (std::size_t w = 0; w < workers; ++w) {
                l += loss[w];
                p += pairs[w];
            }
            local.epoch_loss.push_back(p ? l / static_cast<double>(p) : 0.0);
            local.pairs += p;
        }
    }

    EmbeddingSpace space = model.publish(kind);
    if (stats) *stats = std::move(local);
    return space;
}

}  // namespace

EmbeddingSpace train(const SessionSet& sessions, const TrainConfig& config, TrainStats* stats) {
    config.validate();
    if (sessions.empty()) throw Error("cannot train on an empty SessionSet");
    return train_sequences(session_sequences(sessions), config, SpaceKind::product, stats);
}

EmbeddingSpace train_text(std::span<const std::vector<std::string>> corpus,
                          const TrainConfig& config, TrainStats* stats) {
    config.validate();
    if (corpus.empty()) throw Error("cannot train on an empty text corpus");
    return train_sequences(corpus, config, SpaceKind::text, stats);
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingSpace& space,
                                                              std::string_view key,
                                                              std::size_t k) {
    const auto q = space.at(key);
    if (k == 0) return {};
    std::vector<std::pair<std::string, double>> all;
    all.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (space.keys()[i] == key) continue;
        all.emplace_back(space.keys()[i], cosine(q, space.row(i)));
    }
    const std::size_t n = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                      [](const auto& a, const auto& b) {
                          return a.second != b.second ? a.second > b.second : a.first < b.first;
                      });
    all.resize(n);
    return all;
}

}  // namespace q2p
