#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace q2p {

/// Seeded generator with platform-independent draw routines.
///
/// The standard distributions are implementation-defined, so identical
/// seeds could produce different artifacts under different standard
/// libraries. Every draw here is derived from the raw mt19937_64 output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). `n` must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Index drawn proportionally to `weights` by linear scan. Weights must be
    /// non-negative with a positive sum.
    std::size_t weighted(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

/// Walker/Vose alias table: O(1) draws from a fixed discrete distribution.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(std::span<const double> weights);

    std::size_t sample(Rng& rng) const;
    std::size_t size() const noexcept { return prob_.size(); }
    bool empty() const noexcept { return prob_.empty(); }

    /// Normalized probability of outcome `i` as encoded by the table.
    double probability(std::size_t i) const { return normalized_[i]; }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
    std::vector<double> normalized_;
};

}  // namespace q2p
