#include <doctest.h>

#include <random>

#include "gen.hpp"
#include "guireplay/match.hpp"
#include "oracle.hpp"

using namespace guireplay;

TEST_CASE("cascade selections agree with the exhaustive oracle") {
    match::MatchConfig cfg;
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        std::mt19937_64 rng(seed * 977 + 13);
        testgen::SnapshotPool pool = testgen::make_pool(rng);
        profile::GuiSnapshot src = testgen::random_snapshot(pool, rng, 12, "src");
        profile::GuiSnapshot tgt = testgen::random_snapshot(pool, rng, 12, "tgt");

        for (size_t i = 0; i < src.size(); ++i) {
            match::MatchResult lib =
                match::match_widget(static_cast<int>(i), src, tgt, cfg);
            std::optional<int> expect =
                oracle::match_widget(static_cast<int>(i), src, tgt, cfg);
            INFO("seed ", seed, " widget ", i);
            CHECK(lib.matched == expect);
            ++checked;
        }
    }
    CHECK(checked > 200);
}
