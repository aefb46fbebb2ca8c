#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "q2p/random.hpp"
#include "q2p/searchindex.hpp"

using namespace q2p;

namespace {

Product make(std::string id, std::string desc, std::optional<std::string> brand = std::nullopt) {
    Product p;
    p.product_id = std::move(id);
    p.description = std::move(desc);
    p.brand = std::move(brand);
    return p;
}

const char* const kWords[] = {"tennis", "ski", "shoe", "red", "blue", "run",
                              "nike",   "cap", "bag",  "pro", "air",  "max"};

Catalog random_catalog(Rng& rng, int n) {
    Catalog c;
    for (int i = 0; i < n; ++i) {
        std::string desc;
        const auto len = rng.between(1, 8);
        for (int k = 0; k < len; ++k) {
            desc += kWords[rng.below(std::size(kWords))];
            desc += rng.below(4) ? " " : "-";
        }
        Product p = make("p" + std::to_string(rng.below(100000)) + "_" + std::to_string(i), desc);
        if (rng.below(2)) p.brand = kWords[rng.below(std::size(kWords))];
        if (rng.below(2)) p.activity = kWords[rng.below(std::size(kWords))];
        c.add(std::move(p));
    }
    return c;
}

}  // namespace

TEST_CASE("tokenize") {
    CHECK(tokenize("Nike Air-Max 90") == std::vector<std::string>{"nike", "air", "max", "90"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("SCARPE da corsa") == std::vector<std::string>{"scarpe", "da", "corsa"});
    CHECK(tokenize("--a__b--") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("build_index") {
    Catalog c;
    c.add(make("p2", "tennis racket"));
    c.add(make("p1", "running shoe"));
    auto idx = build_index(c);
    CHECK(idx.postings("tennis") == std::vector<Posting>{{"p2", 1}});
    CHECK(idx.doc_frequency("tennis") == 1);
    CHECK(idx.postings("golf").empty());
    CHECK(idx.doc_count() == 2);
    CHECK_THROWS_AS(build_index(Catalog{}), Error);
    CHECK_THROWS_AS(build_index(c, {}), Error);
    CHECK_THROWS_AS(parse_field("colour"), Error);

    Rng rng(5);
    auto big = random_catalog(rng, 60);
    auto bidx = build_index(big);
    for (const char* w : kWords) {
        const auto& pl = bidx.postings(w);
        CHECK(std::is_sorted(pl.begin(), pl.end(),
                             [](auto& a, auto& b) { return a.product_id < b.product_id; }));
        CHECK(bidx.doc_count() >= pl.size());
        // df against a full scan
        std::size_t df = 0;
        for (const auto& p : big.products()) {
            std::string all = p.description + " " + p.brand.value_or("") + " " + p.activity.value_or("");
            auto toks = oracle::split_alnum(all);
            if (std::find(toks.begin(), toks.end(), w) != toks.end()) ++df;
        }
        CHECK(df == pl.size());
    }
}

TEST_CASE("search scoring") {
    SUBCASE("single token, tf 2, N 10, df 1") {
        Catalog c;
        c.add(make("hit", "tennis ball tennis"));
        for (int i = 0; i < 9; ++i) c.add(make("d" + std::to_string(i), "ski boot"));
        auto hits = build_index(c).search("tennis", 5);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].score == doctest::Approx(4.605170186));
        CHECK(hits[0].score == 2.0 * std::log(10.0));
    }
    SUBCASE("AND semantics") {
        Catalog c;
        c.add(make("a", "red shoe"));
        c.add(make("b", "blue shoe"));
        auto idx = build_index(c);
        CHECK(idx.search("red golf", 5).empty());
        auto hits = idx.search("red shoe", 5);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].product_id == "a");
    }
    SUBCASE("token in every doc scores zero, id breaks the tie") {
        Catalog c;
        c.add(make("b", "shoe"));
        c.add(make("a", "shoe shoe"));
        auto hits = build_index(c).search("shoe", 5);
        REQUIRE(hits.size() == 2);
        CHECK(hits[0].score == 0.0);
        CHECK(hits[0].product_id == "a");
        CHECK(hits[1].product_id == "b");
    }
    SUBCASE("empty query and zero limit") {
        Catalog c;
        c.add(make("a", "x"));
        auto idx = build_index(c);
        CHECK(idx.search("  ", 3).empty());
        CHECK_THROWS_AS(idx.search("x", 0), Error);
    }
}

TEST_CASE("search equals a brute-force scan") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        auto cat = random_catalog(rng, 1 + static_cast<int>(rng.below(100)));
        auto idx = build_index(cat);
        for (int q = 0; q < 20; ++q) {
            std::string query;
            const auto n = rng.between(1, 3);
            for (int k = 0; k < n; ++k) query += std::string(kWords[rng.below(std::size(kWords))]) + " ";
            const std::size_t limit = 1 + rng.below(30);
            auto got = idx.search(query, limit);
            auto want = oracle::scan_search(cat, default_index_fields(), query, limit);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].product_id == want[i].id);
                CHECK(got[i].score == want[i].score);
            }
            // Raising the limit keeps the prefix.
            auto more = idx.search(query, limit + 10);
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(more[i] == got[i]);
        }
    }
}
