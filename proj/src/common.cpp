#include "q2p/common.hpp"
#include "q2p/random.hpp"

#include <cctype>
#include <numeric>

namespace q2p {

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& what)
    : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

template <typename Fn>
void for_each_token(std::string_view text, Fn&& fn) {
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) fn(text.substr(start, i - start));
    }
}

}  // namespace

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string normalize_label(std::string_view text) {
    std::string out;
    for_each_token(text, [&](std::string_view tok) {
        if (!out.empty()) out.push_back(' ');
        out += ascii_lower(tok);
    });
    return out;
}

std::string normalize_query(std::string_view text) {
    std::string out;
    for_each_token(text, [&](std::string_view tok) {
        std::size_t b = 0, e = tok.size();
        while (b < e && is_ascii_punct(tok[b])) ++b;
        while (e > b && is_ascii_punct(tok[e - 1])) --e;
        if (b == e) return;
        if (!out.empty()) out.push_back(' ');
        out += ascii_lower(tok.substr(b, e - b));
    });
    return out;
}

std::string to_key(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c == ' ') c = '_';
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
    return mix64(mix64(seed) ^ fnv1a64(label));
}

// ---------------------------------------------------------------------------

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling on the top of the range keeps draws unbiased.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

std::size_t Rng::weighted(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double r = uniform() * total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        if (r < weights[i]) return i;
        r -= weights[i];
    }
    return last_positive;
}

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) return;
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw Error("alias table needs a positive total weight");

    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    normalized_.resize(n);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        normalized_[i] = weights[i] / total;
        scaled[i] = normalized_[i] * static_cast<double>(n);
    }

    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;  // rounding leftovers
}

std::size_t AliasTable::sample(Rng& rng) const {
    const std::size_t column = static_cast<std::size_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[column] ? column : alias_[column];
}

}  // namespace q2p
