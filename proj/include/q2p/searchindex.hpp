#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "q2p/datamodel.hpp"

namespace q2p {

/// Lowercase and split on every non-alphanumeric byte. No stemming, no
/// stopwords. Bytes >= 0x80 count as alphanumeric so UTF-8 words survive.
std::vector<std::string> tokenize(std::string_view text);

struct Posting {
    std::string product_id;
    std::uint32_t term_frequency;

    bool operator==(const Posting&) const = default;
};

struct SearchHit {
    std::string product_id;
    double score;

    bool operator==(const SearchHit&) const = default;
};

/// Inverted index over selected product fields, scored with raw tf times
/// ln(N / df) under conjunctive (AND) matching.
class InvertedIndex {
public:
    std::size_t doc_count() const noexcept { return doc_count_; }
    const std::vector<Field>& indexed_fields() const noexcept { return fields_; }

    /// Postings sorted by product id; empty when the term is absent.
    const std::vector<Posting>& postings(std::string_view term) const;
    std::size_t doc_frequency(std::string_view term) const { return postings(term).size(); }
    std::size_t term_count() const noexcept { return postings_.size(); }

    /// Products containing every query token, best first (ties by id), at
    /// most `limit` of them.
    std::vector<SearchHit> search(std::string_view query, std::size_t limit) const;

private:
    friend InvertedIndex build_index(const Catalog&, const std::vector<Field>&);

    std::size_t doc_count_ = 0;
    std::vector<Field> fields_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

/// The default field set: description, brand, product type and activity.
std::vector<Field> default_index_fields();

/// Throws on an empty catalog or an empty field list.
InvertedIndex build_index(const Catalog& catalog,
                          const std::vector<Field>& fields = default_index_fields());

inline std::vector<SearchHit> search(const InvertedIndex& index, std::string_view query,
                                     std::size_t limit) {
    return index.search(query, limit);
}

}  // namespace q2p
