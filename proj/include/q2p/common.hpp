#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace q2p {

/// Base error for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed input record. `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// ---------------------------------------------------------------------------
// Text normalization

/// Lowercase + trim + collapse internal whitespace runs to a single space.
std::string normalize_label(std::string_view text);

/// Lowercase, strip leading/trailing punctuation from every whitespace token,
/// drop tokens that become empty, and join with a single space.
std::string normalize_query(std::string_view text);

/// Replace spaces with '_' so that multiword strings can serve as keys in
/// the whitespace-separated embedding text format.
std::string to_key(std::string_view text);

/// ASCII lowercase; bytes >= 0x80 are passed through untouched.
std::string ascii_lower(std::string_view text);

// ---------------------------------------------------------------------------
// Seeding

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// splitmix64 finalizer; a bijective mixer used for seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derive an independent stream seed from a parent seed and a label
/// (module name, word, ...). Stable across platforms and releases.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;

}  // namespace q2p
