#include "q2p/embedding_space.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "q2p/common.hpp"

namespace q2p {

std::string_view kind_name(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::product: return "product";
        case SpaceKind::query: return "query";
        case SpaceKind::text: return "text";
    }
    return "?";
}

EmbeddingSpace::EmbeddingSpace(std::size_t dimension, SpaceKind kind)
    : dimension_(dimension), kind_(kind) {
    if (dimension == 0) throw Error("embedding dimension must be positive");
}

void EmbeddingSpace::add(std::string key, std::span<const float> vector) {
    if (key.empty()) throw Error("embedding key must be non-empty");
    if (key.find_first_of(" \t\r\n") != std::string::npos) {
        throw Error("embedding key '" + key + "' contains whitespace");
    }
    if (vector.size() != dimension_) {
        throw Error("vector for '" + key + "' has " + std::to_string(vector.size()) +
                    " components, expected " + std::to_string(dimension_));
    }
    for (float v : vector) {
        if (!std::isfinite(v)) throw Error("non-finite component in vector for '" + key + "'");
    }
    if (index_.count(key)) throw Error("duplicate embedding key '" + key + "'");
    index_.emplace(key, keys_.size());
    keys_.push_back(std::move(key));
    data_.insert(data_.end(), vector.begin(), vector.end());
}

std::ptrdiff_t EmbeddingSpace::index_of(std::string_view key) const {
    auto it = index_.find(std::string(key));
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::span<const float> EmbeddingSpace::find(std::string_view key) const {
    const auto i = index_of(key);
    return i < 0 ? std::span<const float>{} : row(static_cast<std::size_t>(i));
}

std::span<const float> EmbeddingSpace::at(std::string_view key) const {
    const auto i = index_of(key);
    if (i < 0) throw Error("key '" + std::string(key) + "' not in embedding space");
    return row(static_cast<std::size_t>(i));
}

bool EmbeddingSpace::operator==(const EmbeddingSpace& other) const {
    return dimension_ == other.dimension_ && kind_ == other.kind_ && keys_ == other.keys_ &&
           data_ == other.data_;
}

double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

double norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const float> a, std::span<const float> b) {
    const double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

// ---------------------------------------------------------------------------

void write_embeddings(std::ostream& out, const EmbeddingSpace& space) {
    out << space.size() << ' ' << space.dimension() << '\n';
    char buf[32];
    for (std::size_t i = 0; i < space.size(); ++i) {
        out << space.keys()[i];
        for (float v : space.row(i)) {
            std::snprintf(buf, sizeof buf, " %.6g", static_cast<double>(v));
            out << buf;
        }
        out << '\n';
    }
}

void save_embeddings(const std::string& path, const EmbeddingSpace& space) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    write_embeddings(out, space);
    if (!out) throw Error("failed writing '" + path + "'");
}

EmbeddingSpace read_embeddings(std::istream& in, SpaceKind kind, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(name, 1, "missing header");
    std::istringstream header(line);
    long long count = -1, dim = -1;
    if (!(header >> count >> dim) || count < 0 || dim <= 0) {
        throw ParseError(name, 1, "header must be '<count> <dimension>'");
    }
    EmbeddingSpace space(static_cast<std::size_t>(dim), kind);
    std::vector<float> vec(static_cast<std::size_t>(dim));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        std::string key;
        row >> key;
        for (auto& v : vec) {
            std::string tok;
            if (!(row >> tok)) throw ParseError(name, line_no, "too few components");
            char* end = nullptr;
            v = std::strtof(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size()) {
                throw ParseError(name, line_no, "bad number '" + tok + "'");
            }
        }
        std::string extra;
        if (row >> extra) throw ParseError(name, line_no, "too many components");
        try {
            space.add(std::move(key), vec);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(name, line_no, e.what());
        }
    }
    if (space.size() != static_cast<std::size_t>(count)) {
        throw ParseError(name, line_no, "header declares " + std::to_string(count) +
                                            " vectors, found " + std::to_string(space.size()));
    }
    return space;
}

EmbeddingSpace load_embeddings(const std::string& path, SpaceKind kind) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_embeddings(in, kind, path);
}

}  // namespace q2p
