#include "q2p/searchindex.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace q2p {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const unsigned char c = static_cast<unsigned char>(ch);
        const bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                           (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (alnum) {
            cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<Field> default_index_fields() {
    return {Field::description, Field::brand, Field::product_type, Field::activity};
}

InvertedIndex build_index(const Catalog& catalog, const std::vector<Field>& fields) {
    if (catalog.empty()) throw Error("cannot index an empty catalog");
    if (fields.empty()) throw Error("index needs at least one field");

    // Sorted ids make every postings list come out sorted.
    std::vector<const Product*> docs;
    docs.reserve(catalog.size());
    for (const auto& p : catalog.products()) docs.push_back(&p);
    std::sort(docs.begin(), docs.end(),
              [](const Product* a, const Product* b) { return a->product_id < b->product_id; });

    InvertedIndex index;
    index.doc_count_ = catalog.size();
    index.fields_ = fields;
    for (const Product* p : docs) {
        std::map<std::string, std::uint32_t> tf;
        for (Field f : fields) {
            if (auto v = p->value(f)) {
                for (auto& t : tokenize(*v)) ++tf[t];
            }
        }
        for (auto& [term, n] : tf) index.postings_[term].push_back({p->product_id, n});
    }
    return index;
}

const std::vector<Posting>& InvertedIndex::postings(std::string_view term) const {
    static const std::vector<Posting> none;
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? none : it->second;
}

std::vector<SearchHit> InvertedIndex::search(std::string_view query, std::size_t limit) const {
    if (limit == 0) throw Error("search limit must be >= 1");
    const auto tokens = tokenize(query);
    if (tokens.empty()) return {};

    std::vector<const std::vector<Posting>*> lists;
    for (const auto& t : tokens) {
        const auto& pl = postings(t);
        if (pl.empty()) return {};
        lists.push_back(&pl);
    }

    // Walk the shortest list and probe the others by binary search.
    const auto shortest = std::min_element(lists.begin(), lists.end(), [](auto* a, auto* b) {
        return a->size() < b->size();
    });
    std::vector<SearchHit> hits;
    for (const Posting& cand : **shortest) {
        double score = 0.0;
        bool all = true;
        for (std::size_t q = 0; q < lists.size(); ++q) {
            const auto& pl = *lists[q];
            auto it = std::lower_bound(pl.begin(), pl.end(), cand.product_id,
                                       [](const Posting& p, const std::string& id) {
                                           return p.product_id < id;
                                       });
            if (it == pl.end() || it->product_id != cand.product_id) {
                all = false;
                break;
            }
            score += static_cast<double>(it->term_frequency) *
                     std::log(static_cast<double>(doc_count_) / static_cast<double>(pl.size()));
        }
        if (all) hits.push_back({cand.product_id, score});
    }

    auto better = [](const SearchHit& a, const SearchHit& b) {
        return a.score != b.score ? a.score > b.score : a.product_id < b.product_id;
    };
    if (hits.size() > limit) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(limit),
                          hits.end(), better);
        hits.resize(limit);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }
    return hits;
}

}  // namespace q2p
