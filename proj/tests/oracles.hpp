#pragma once

// Brute-force reference implementations used only by tests. None of these
// call into the library code paths they check.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "q2p/datamodel.hpp"
#include "q2p/embedding_space.hpp"
#include "q2p/evalkit.hpp"
#include "q2p/queryembed.hpp"

namespace oracle {

/// Sum over all ordered pairs |x_i - x_j| / (2 n sum).
inline double gini_pairwise(const std::vector<double>& x) {
    double diff = 0.0, total = 0.0;
    for (double a : x) {
        total += a;
        for (double b : x) diff += std::fabs(a - b);
    }
    return diff / (2.0 * static_cast<double>(x.size()) * total);
}

inline std::vector<std::string> split_alnum(const std::string& text) {
    std::vector<std::string> out(1);
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            out.back().push_back(static_cast<char>(std::tolower(c)));
        } else if (!out.back().empty()) {
            out.emplace_back();
        }
    }
    if (out.back().empty()) out.pop_back();
    return out;
}

struct Hit {
    std::string id;
    double score;
};

/// Scan every document, count occurrences per query token, score with
/// tf * ln(N / df) and keep documents that contain every token.
inline std::vector<Hit> scan_search(const q2p::Catalog& catalog,
                                    const std::vector<q2p::Field>& fields,
                                    const std::string& query, std::size_t limit) {
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    for (const auto& p : catalog.products()) {
        std::vector<std::string> toks;
        for (auto f : fields) {
            if (auto v = p.value(f)) {
                auto t = split_alnum(*v);
                toks.insert(toks.end(), t.begin(), t.end());
            }
        }
        docs.emplace_back(p.product_id, std::move(toks));
    }
    const auto qtok = split_alnum(query);
    if (qtok.empty()) return {};
    std::vector<double> df(qtok.size(), 0.0);
    for (std::size_t q = 0; q < qtok.size(); ++q) {
        for (const auto& [id, toks] : docs) {
            if (std::find(toks.begin(), toks.end(), qtok[q]) != toks.end()) df[q] += 1.0;
        }
    }
    const double n = static_cast<double>(docs.size());
    std::vector<Hit> hits;
    for (const auto& [id, toks] : docs) {
        double score = 0.0;
        bool all = true;
        for (std::size_t q = 0; q < qtok.size(); ++q) {
            const auto tf = std::count(toks.begin(), toks.end(), qtok[q]);
            if (tf == 0) {
                all = false;
                break;
            }
            score += static_cast<double>(tf) * std::log(n / df[q]);
        }
        if (all) hits.push_back({id, score});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (hits.size() > limit) hits.resize(limit);
    return hits;
}

/// Full sort by (count desc, id asc), keep the first `rank`, drop
/// unembedded ones, plain weighted mean.
inline std::optional<std::vector<double>> sort_select_average(
    const std::map<std::string, std::uint64_t>& counts, const q2p::EmbeddingSpace& space,
    int rank) {
    std::vector<std::pair<std::string, std::uint64_t>> all(counts.begin(), counts.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(rank)));
    std::vector<double> sum(space.dimension(), 0.0);
    double w = 0.0;
    for (const auto& [id, c] : all) {
        auto idx = space.index_of(id);
        if (idx < 0) continue;
        auto row = space.row(static_cast<std::size_t>(idx));
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += static_cast<double>(c) * row[k];
        w += static_cast<double>(c);
    }
    if (w == 0.0) return std::nullopt;
    for (auto& s : sum) s /= w;
    return sum;
}

struct BruteReport {
    std::size_t covered = 0;
    std::map<int, std::size_t> hits;
};

/// For each analogy: require all four tokens, compute b - a + c in double,
/// and count candidates that beat the gold answer (higher cosine, or equal
/// cosine with a smaller token). Gold rank = beaten-by + 1.
inline BruteReport brute_hit_rate(const q2p::EmbeddingSpace& space,
                                  const q2p::AnalogySet& analogies,
                                  const std::map<q2p::Field, std::vector<std::string>>& cands,
                                  const std::vector<int>& cutoffs) {
    auto vec = [&](const std::string& t) -> std::optional<std::vector<double>> {
        auto i = space.index_of(t);
        if (i < 0) return std::nullopt;
        auto r = space.row(static_cast<std::size_t>(i));
        return std::vector<double>(r.begin(), r.end());
    };
    auto cos = [](const std::vector<double>& x, const std::vector<double>& y) {
        double d = 0, xx = 0, yy = 0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            d += x[k] * y[k];
            xx += x[k] * x[k];
            yy += y[k] * y[k];
        }
        const double nx = std::sqrt(xx), ny = std::sqrt(yy);
        return nx == 0.0 || ny == 0.0 ? 0.0 : d / (nx * ny);
    };
    BruteReport rep;
    for (const auto& an : analogies) {
        auto va = vec(an.a), vb = vec(an.b), vc = vec(an.c), vd = vec(an.d);
        if (!va || !vb || !vc || !vd) continue;
        ++rep.covered;
        std::vector<double> t(va->size());
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = (*vb)[k] - (*va)[k] + (*vc)[k];
        const std::set<std::string> pool(cands.at(an.type_pair.second).begin(),
                                         cands.at(an.type_pair.second).end());
        if (!pool.count(an.d) || an.d == an.a || an.d == an.b || an.d == an.c) continue;
        const double gold = cos(t, *vd);
        std::size_t better = 0;
        for (const auto& cand : pool) {
            if (cand == an.a || cand == an.b || cand == an.c || cand == an.d) continue;
            auto v = vec(cand);
            if (!v) continue;
            const double s = cos(t, *v);
            if (s > gold || (s == gold && cand < an.d)) ++better;
        }
        for (int k : cutoffs) {
            if (better + 1 <= static_cast<std::size_t>(k)) ++rep.hits[k];
        }
    }
    return rep;
}

/// Average ranks for ties, then Pearson on the ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
