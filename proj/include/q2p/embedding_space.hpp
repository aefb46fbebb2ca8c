#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace q2p {

enum class SpaceKind { product, query, text };
std::string_view kind_name(SpaceKind kind);

/// Dense vectors keyed by token or product id.
///
/// Keys keep their insertion order, which is also the order used when the
/// space is written out. Every vector has `dimension()` finite components.
class EmbeddingSpace {
public:
    EmbeddingSpace(std::size_t dimension, SpaceKind kind);

    /// Throws on a duplicate key, whitespace in the key, a size mismatch or a
    /// non-finite component.
    void add(std::string key, std::span<const float> vector);

    std::size_t dimension() const noexcept { return dimension_; }
    SpaceKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return keys_.size(); }
    bool empty() const noexcept { return keys_.empty(); }

    const std::vector<std::string>& keys() const noexcept { return keys_; }
    bool contains(std::string_view key) const { return index_of(key) >= 0; }

    /// Row index of `key`, or -1.
    std::ptrdiff_t index_of(std::string_view key) const;

    std::span<const float> row(std::size_t i) const {
        return {data_.data() + i * dimension_, dimension_};
    }
    /// Empty span when the key is absent.
    std::span<const float> find(std::string_view key) const;
    /// Throws when the key is absent.
    std::span<const float> at(std::string_view key) const;

    bool operator==(const EmbeddingSpace& other) const;

private:
    std::size_t dimension_;
    SpaceKind kind_;
    std::vector<std::string> keys_;
    std::vector<float> data_;
    std::unordered_map<std::string, std::size_t> index_;
};

double dot(std::span<const float> a, std::span<const float> b);
double norm(std::span<const float> a);
/// Cosine similarity; 0 when either vector has zero norm.
double cosine(std::span<const float> a, std::span<const float> b);

/// Text format: a `<count> <dimension>` header, then `<key> <v1> ... <vd>`
/// per line with 6 significant digits.
void write_embeddings(std::ostream& out, const EmbeddingSpace& space);
void save_embeddings(const std::string& path, const EmbeddingSpace& space);
EmbeddingSpace read_embeddings(std::istream& in, SpaceKind kind, const std::string& name = "<stream>");
EmbeddingSpace load_embeddings(const std::string& path, SpaceKind kind);

}  // namespace q2p
