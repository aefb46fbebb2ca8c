#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "q2p/queryembed.hpp"
#include "q2p/random.hpp"

using namespace q2p;

namespace {

EmbeddingSpace toy2() {
    EmbeddingSpace s(2, SpaceKind::product);
    s.add("p1", std::vector<float>{1, 0});
    s.add("p2", std::vector<float>{0, 1});
    s.add("p3", std::vector<float>{5, 5});
    return s;
}

EmbeddingSpace random_space(Rng& rng, int n, int dim) {
    EmbeddingSpace s(static_cast<std::size_t>(dim), SpaceKind::product);
    for (int i = 0; i < n; ++i) {
        std::vector<float> v(static_cast<std::size_t>(dim));
        for (auto& x : v) x = static_cast<float>(rng.uniform() * 2 - 1);
        s.add("p" + std::to_string(i), v);
    }
    return s;
}

ClickHistogram random_hist(Rng& rng, int n_products) {
    ClickHistogram h{"q", {}};
    const auto k = rng.between(1, 12);
    for (int i = 0; i < k; ++i) {
        // a few ids outside the space
        const auto id = rng.below(static_cast<std::uint64_t>(n_products) + 3);
        h.counts["p" + std::to_string(id)] += 1 + rng.below(6);
    }
    return h;
}

}  // namespace

TEST_CASE("aggregate_clicks") {
    ClickLog log(ClickSource::real);
    log.add("shoes", "p1");
    log.add("shoes", "p1");
    log.add("shoes", "p2");
    log.add("bag", "p3");
    auto h = aggregate_clicks(log);
    CHECK(h.size() == 2);
    CHECK(h.at("shoes").counts == std::map<std::string, std::uint64_t>{{"p1", 2}, {"p2", 1}});
    CHECK(aggregate_clicks(ClickLog(ClickSource::real)).empty());
}

TEST_CASE("embed_query examples") {
    auto s = toy2();
    EmbeddingSpace s3(3, SpaceKind::product);
    s3.add("p1", std::vector<float>{1, 2, 3});
    CHECK(embed_query({"q", {{"p1", 1}}}, s3, {}) == std::vector<double>{1, 2, 3});

    auto v = embed_query({"q", {{"p1", 3}, {"p2", 1}}}, s, {2});
    CHECK(v == std::vector<double>{0.75, 0.25});

    ClickHistogram h{"q", {{"p1", 5}, {"p2", 4}, {"p3", 1}}};
    auto top2 = embed_query(h, s, {2});
    auto want = oracle::sort_select_average(h.counts, s, 2);
    REQUIRE(want);
    CHECK(top2[0] == doctest::Approx((*want)[0]));
    CHECK(top2[1] == doctest::Approx((*want)[1]));
    CHECK(top2[0] == doctest::Approx(5.0 / 9.0));

    CHECK_THROWS_AS(embed_query({"q", {{"zz", 4}}}, s, {}), Error);
    // Top-1 is unembedded: the set shrinks rather than reaching further.
    CHECK_THROWS_AS(embed_query({"q", {{"zz", 4}, {"p1", 1}}}, s, {1}), Error);
    CHECK_THROWS_AS(embed_query({"q", {{"p1", 0}}}, s, {}), Error);
    CHECK_THROWS_AS(RankConfig{0}.validate(), Error);
}

TEST_CASE("top_clicked breaks ties by id") {
    ClickHistogram h{"q", {{"b", 2}, {"a", 2}, {"c", 3}}};
    auto t = top_clicked(h, 2);
    REQUIRE(t.size() == 2);
    CHECK(t[0].first == "c");
    CHECK(t[1].first == "a");
}

TEST_CASE("embed_query matches the sort-select-average oracle") {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(15));
        auto space = random_space(rng, n, 1 + static_cast<int>(rng.below(6)));
        auto h = random_hist(rng, n);
        const int rank = 1 + static_cast<int>(rng.below(7));
        auto want = oracle::sort_select_average(h.counts, space, rank);
        if (!want) {
            CHECK_THROWS_AS(embed_query(h, space, {rank}), Error);
            continue;
        }
        auto got = embed_query(h, space, {rank});
        REQUIRE(got.size() == want->size());
        for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::fabs(got[k] - (*want)[k]) <= 1e-9);

        // scale invariance, exact
        ClickHistogram scaled = h;
        const auto m = 1 + rng.below(50);
        for (auto& [id, c] : scaled.counts) c *= m;
        CHECK(embed_query(scaled, space, {rank}) == got);

        // convex hull bounds per coordinate
        for (std::size_t k = 0; k < got.size(); ++k) {
            double lo = 1e300, hi = -1e300;
            for (const auto& [id, c] : top_clicked(h, rank)) {
                auto row = space.find(id);
                if (row.empty()) continue;
                lo = std::min(lo, double(row[k]));
                hi = std::max(hi, double(row[k]));
            }
            CHECK(got[k] >= lo - 1e-12);
            CHECK(got[k] <= hi + 1e-12);
        }

        // rank past the histogram size is the full mean
        if (static_cast<std::size_t>(rank) >= h.counts.size()) {
            CHECK(embed_query(h, space, {rank + 5}) == got);
        }
    }
}

TEST_CASE("build_lexicon") {
    auto s = toy2();
    SUBCASE("keys, omissions and rank 1") {
        ClickLog log(ClickSource::real);
        log.add("running shoes", "p1");
        log.add("running shoes", "p2");
        log.add("running shoes", "p1");
        log.add("mystery", "zz");
        log.add("bag", "p3");
        auto lex = build_lexicon(log, s, {1});
        CHECK(lex.space.kind() == SpaceKind::query);
        CHECK(lex.space.keys() == std::vector<std::string>{"bag", "running_shoes"});
        CHECK(lex.omitted == std::vector<std::string>{"mystery"});
        auto rs = lex.space.at("running_shoes");
        CHECK(std::vector<float>(rs.begin(), rs.end()) == std::vector<float>{1, 0});
    }
    SUBCASE("nothing embeddable") {
        ClickLog log(ClickSource::real);
        log.add("x", "zz");
        CHECK_THROWS_AS(build_lexicon(log, s, {}), Error);
    }
    SUBCASE("merging logs equals embedding the summed histogram") {
        Rng rng(5);
        ClickLog real(ClickSource::real), synth(ClickSource::synthetic), both(ClickSource::real);
        const char* qs[] = {"a", "b b", "c"};
        const char* ps[] = {"p1", "p2", "p3"};
        for (int i = 0; i < 200; ++i) {
            const char* q = qs[rng.below(3)];
            const char* p = ps[rng.below(3)];
            (rng.below(2) ? real : synth).add(q, p);
            both.add(q, p);
        }
        auto merged = build_lexicon(aggregate_clicks({&real, &synth}), s, {});
        auto direct = build_lexicon(both, s, {});
        CHECK(merged.space == direct.space);
    }
    SUBCASE("event order does not matter") {
        Rng rng(6);
        std::vector<ClickEvent> ev;
        for (int i = 0; i < 100; ++i) ev.push_back({std::string(1, char('a' + rng.below(4))), "p" + std::to_string(1 + rng.below(3))});
        ClickLog one(ClickSource::real, ev);
        std::reverse(ev.begin(), ev.end());
        ClickLog two(ClickSource::real, ev);
        CHECK(build_lexicon(one, s, {}).space == build_lexicon(two, s, {}).space);
    }
}
