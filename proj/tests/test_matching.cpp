#include <doctest.h>

#include <random>

#include "guireplay/imaging.hpp"
#include "guireplay/match.hpp"
#include "helpers.hpp"

using namespace guireplay;
using namespace guireplay::match;
using detect::WidgetKind;
using testutil::WidgetSpec;
using testutil::fill_rect;
using testutil::make_snapshot;
using testutil::solid;
using testutil::unit_axis;
using testutil::unit_mix;

namespace {

WidgetSpec text_w(const Bbox& b, const std::string& t, FeatureVector e = {}) {
    WidgetSpec s;
    s.box = b;
    s.kind = WidgetKind::Text;
    s.text = t;
    s.embedding = e.empty() ? unit_axis(3) : std::move(e);
    return s;
}

WidgetSpec icon_w(const Bbox& b, FeatureVector e) {
    WidgetSpec s;
    s.box = b;
    s.kind = WidgetKind::NonText;
    s.embedding = std::move(e);
    return s;
}

}  // namespace

TEST_CASE("normalize_text and containment") {
    CHECK(normalize_text("  Sign  In ") == "sign in");
    CHECK(normalize_text("SIGN IN") == "sign in");
    CHECK(normalize_text("") == "");

    CHECK(text_contains("Search", "Search flights"));
    CHECK(text_contains("flights to", "Search flights to Tokyo"));
    CHECK_FALSE(text_contains("cat", "dog"));
}

TEST_CASE("match_text_widget follows the containment cascade") {
    auto src = make_snapshot(400, 800, {text_w({100, 40, 130, 160}, "Continue")});

    SUBCASE("single containment candidate wins immediately") {
        auto tgt = make_snapshot(
            400, 800, {text_w({50, 40, 80, 160}, "Continue"), text_w({90, 40, 120, 160}, "Back")});
        MatchConfig cfg;
        MatchResult r = match_text_widget(0, src, tgt, cfg);
        REQUIRE(r.matched.has_value());
        CHECK(*r.matched == 0);
        CHECK(r.stage == MatchStage::TextContainment);
    }

    SUBCASE("broken lines resolve by longest content") {
        auto long_src = make_snapshot(800, 800, {text_w({10, 10, 40, 700}, "A B C D")});
        auto tgt = make_snapshot(
            300, 800, {text_w({10, 10, 40, 200}, "A B C"), text_w({50, 10, 80, 100}, "D")});
        MatchConfig cfg;
        MatchResult r = match_text_widget(0, long_src, tgt, cfg);
        REQUIRE(r.matched.has_value());
        CHECK(*r.matched == 0);  // "a b c" is the longest piece
        CHECK(r.stage == MatchStage::LongestContent);
    }

    SUBCASE("no containment means no match, ignoring every other attribute") {
        // Same shape and embedding as the source, but unrelated text.
        auto tgt = make_snapshot(
            400, 800,
            {text_w({100, 40, 130, 160}, "Something else"), text_w({10, 10, 20, 40}, "Nope")});
        MatchConfig cfg;
        MatchResult r = match_text_widget(0, src, tgt, cfg);
        CHECK_FALSE(r.matched.has_value());
        CHECK(r.stage == MatchStage::NoMatch);
        CHECK(r.candidates_considered == 0);
    }
}

TEST_CASE("duplicate text falls through to surrounding widgets") {
    // Two identical "Delete" buttons; their row labels differ.
    FeatureVector btn = unit_axis(5);
    auto make_gui = [&](const std::string& dev) {
        return make_snapshot(
            400, 800,
            {
                text_w({100, 10, 120, 90}, "ROW ONE"),
                text_w({100, 200, 120, 300}, "Delete", btn),
                text_w({200, 10, 220, 90}, "ROW TWO"),
                text_w({200, 200, 220, 300}, "Delete", btn),
            },
            dev);
    };
    auto src = make_gui("src");
    auto tgt = make_gui("tgt");
    MatchConfig cfg;

    MatchResult first = match_text_widget(1, src, tgt, cfg);
    REQUIRE(first.matched.has_value());
    CHECK(*first.matched == 1);
    MatchResult second = match_text_widget(3, src, tgt, cfg);
    REQUIRE(second.matched.has_value());
    CHECK(*second.matched == 3);
    CHECK(second.candidates_considered == 2);
}

TEST_CASE("match_nontext_widget embedding gate and tie-breaks") {
    FeatureVector probe = unit_axis(0);
    auto src = make_snapshot(400, 800, {icon_w({100, 100, 140, 140}, probe)});
    MatchConfig cfg;

    SUBCASE("unique candidate above the threshold") {
        auto tgt = make_snapshot(400, 800,
                                 {icon_w({50, 50, 90, 90}, probe),
                                  icon_w({200, 50, 240, 90}, unit_axis(7))});
        MatchResult r = match_nontext_widget(0, src, tgt, cfg);
        REQUIRE(r.matched.has_value());
        CHECK(*r.matched == 0);
        CHECK(r.stage == MatchStage::EmbeddingFilter);
        CHECK(r.similarity == doctest::Approx(1.0));
    }

    SUBCASE("no candidate reaches the threshold") {
        auto tgt = make_snapshot(400, 800, {icon_w({50, 50, 90, 90}, unit_mix(0, 1, 0.75))});
        MatchResult r = match_nontext_widget(0, src, tgt, cfg);
        CHECK_FALSE(r.matched.has_value());
        CHECK(r.stage == MatchStage::NoMatch);
    }

    SUBCASE("similarity 0.799 is excluded, 0.8 is admitted") {
        auto tgt = make_snapshot(400, 800, {icon_w({50, 50, 90, 90}, unit_mix(0, 1, 0.799))});
        CHECK_FALSE(match_nontext_widget(0, src, tgt, cfg).matched.has_value());

        auto tgt2 = make_snapshot(400, 800, {icon_w({50, 50, 90, 90}, unit_mix(0, 1, 0.8))});
        CHECK(match_nontext_widget(0, src, tgt2, cfg).matched.has_value());
    }

    SUBCASE("identical icons resolve by most matched neighbors") {
        // Source icon sits beside the "alpha" label; two identical icons on
        // the target differ only by their row labels.
        auto src2 = make_snapshot(400, 800,
                                  {icon_w({100, 10, 140, 50}, probe),
                                   text_w({105, 60, 125, 160}, "alpha")});
        auto tgt2 = make_snapshot(400, 800,
                                  {icon_w({40, 10, 80, 50}, probe),
                                   text_w({45, 60, 65, 160}, "beta"),
                                   icon_w({140, 10, 180, 50}, probe),
                                   text_w({145, 60, 165, 160}, "alpha")});
        MatchResult r = match_nontext_widget(0, src2, tgt2, cfg);
        REQUIRE(r.matched.has_value());
        CHECK(*r.matched == 2);
        CHECK(r.stage == MatchStage::NeighborFilter);
    }
}

TEST_CASE("threshold law: a below-threshold candidate never displaces a valid one") {
    std::mt19937_64 rng(41);
    MatchConfig cfg;
    for (int trial = 0; trial < 50; ++trial) {
        FeatureVector probe = unit_axis(static_cast<int>(rng() % 8));
        double low = 0.70 + 0.0199 * static_cast<double>(rng() % 5);  // < 0.8
        auto tgt = make_snapshot(400, 800,
                                 {icon_w({50, 50, 90, 90}, unit_mix(0, 1, low)),
                                  icon_w({200, 50, 240, 90}, probe)});
        auto src = make_snapshot(400, 800, {icon_w({100, 100, 140, 140}, probe)});
        MatchResult r = match_nontext_widget(0, src, tgt, cfg);
        REQUIRE(r.matched.has_value());
        CHECK(*r.matched == 1);  // never the sub-threshold distractor
    }
}

TEST_CASE("neighbor_score counts matched surrounding widgets") {
    FeatureVector icon = unit_axis(2);
    auto build = [&](const char* label) {
        return make_snapshot(
            400, 800,
            {
                WidgetSpec{{0, 0, 400, 400}, WidgetKind::NonText, true, std::nullopt,
                           unit_axis(9)},                      // parent container
                icon_w({30, 210, 70, 250}, icon),              // 1: up neighbor
                text_w({100, 100, 120, 200}, label),           // 2: left neighbor
                icon_w({90, 210, 130, 250}, unit_axis(4)),     // 3: probe widget
                icon_w({90, 300, 130, 340}, icon),             // 4: right neighbor
                text_w({150, 210, 170, 300}, "below"),         // 5: down neighbor
            });
    };
    auto src = build("row label");
    auto tgt = build("row label");
    MatchConfig cfg;
    // Probe widget 3: parent 0 + up 1 + left 2 + right 4 + down 5 all match.
    CHECK(neighbor_score(3, 3, src, tgt, cfg) == 5);

    auto lone_a = make_snapshot(400, 800, {icon_w({10, 10, 50, 50}, icon)});
    auto lone_b = make_snapshot(400, 800, {icon_w({60, 60, 100, 100}, icon)});
    CHECK(neighbor_score(0, 0, lone_a, lone_b, cfg) == 0);

    auto tgt2 = build("different words");
    CHECK(neighbor_score(3, 3, src, tgt2, cfg) == 4);  // text neighbor discriminates
}

TEST_CASE("gui_unchanged_same_device") {
    MatchConfig cfg;
    PixelImage a = solid(200, 400, 240, 240, 240);
    fill_rect(a, {50, 20, 120, 180}, 30, 60, 120);
    CHECK(gui_unchanged_same_device(a, a, cfg));

    // 1% Gaussian-like pixel noise stays under the tolerance.
    PixelImage noisy = a;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 2.55);
    for (auto& v : noisy.data)
        v = static_cast<std::uint8_t>(
            std::clamp<int>(static_cast<int>(std::lround(v + n(rng))), 0, 255));
    CHECK(gui_unchanged_same_device(a, noisy, cfg));

    // Shifted content reads as changed.
    PixelImage shifted = solid(200, 400, 240, 240, 240);
    fill_rect(shifted, {250, 20, 320, 180}, 30, 60, 120);
    CHECK_FALSE(gui_unchanged_same_device(a, shifted, cfg));

    PixelImage other(100, 100);
    CHECK_THROWS_AS(gui_unchanged_same_device(a, other, cfg), ContractError);
}

TEST_CASE("match_gui_cross_device fraction and ordering contract") {
    MatchConfig cfg;
    FeatureVector e0 = unit_axis(0), e1 = unit_axis(1);

    auto small = make_snapshot(300, 500,
                               {icon_w({10, 10, 50, 50}, e0), text_w({70, 10, 90, 120}, "alpha"),
                                icon_w({110, 10, 150, 50}, e1)},
                               "small");
    auto large = make_snapshot(
        600, 1000,
        {icon_w({20, 20, 100, 100}, e0), text_w({140, 20, 180, 240}, "alpha"),
         icon_w({220, 20, 300, 100}, e1), text_w({340, 20, 380, 200}, "extra text")},
        "large");

    match::GuiMatch gm = match_gui_cross_device(small, large, cfg);
    CHECK(gm.matched);
    CHECK(gm.fraction == doctest::Approx(1.0));

    // Disjoint content: text cannot match, fraction falls.
    auto other = make_snapshot(
        600, 1000, {text_w({20, 20, 60, 200}, "omega"), text_w({100, 20, 140, 200}, "sigma")},
        "large");
    match::GuiMatch miss = match_gui_cross_device(small, other, cfg);
    CHECK_FALSE(miss.matched);
    CHECK(miss.fraction < 1.0);

    auto empty = make_snapshot(300, 500, {}, "small");
    match::GuiMatch vac = match_gui_cross_device(empty, large, cfg);
    CHECK(vac.matched);
    CHECK(vac.fraction == doctest::Approx(1.0));

    CHECK_THROWS_AS(match_gui_cross_device(large, small, cfg), ContractError);
}

TEST_CASE("template_match_baseline finds exact pastes") {
    PixelImage target = solid(200, 150, 245, 245, 245);
    fill_rect(target, {30, 20, 60, 70}, 10, 40, 90);
    fill_rect(target, {90, 120, 130, 170}, 200, 90, 20);

    // The crop includes the widget edge so the template has texture.
    PixelImage clip = imaging::crop(target, {85, 115, 135, 175});
    Bbox found = template_match_baseline(clip, target);
    CHECK(found == Bbox{85, 115, 135, 175});

    // Uniform target: all placements tie, topmost-leftmost wins.
    PixelImage flat = solid(50, 50, 128, 128, 128);
    PixelImage small = solid(10, 10, 128, 128, 128);
    Bbox tie = template_match_baseline(small, flat);
    CHECK(tie == Bbox{0, 0, 10, 10});

    PixelImage big = solid(300, 300, 0, 0, 0);
    CHECK_THROWS_AS(template_match_baseline(big, target), ContractError);
}

TEST_CASE("container with absorbed text prefers the text path") {
    FeatureVector box_embed = unit_axis(6);
    WidgetSpec button;
    button.box = {100, 100, 150, 260};
    button.kind = WidgetKind::NonText;
    button.container = true;
    button.text = "CHECKOUT";
    button.embedding = box_embed;

    auto src = make_snapshot(400, 800, {button});

    // Target has a same-looking box with different text and a text widget
    // with the right words: the text path must win.
    WidgetSpec decoy = button;
    decoy.text = "CANCEL";
    decoy.box = {100, 100, 150, 260};
    auto tgt = make_snapshot(400, 800, {decoy, text_w({300, 100, 330, 260}, "checkout")});
    MatchConfig cfg;
    MatchResult r = match_widget(0, src, tgt, cfg);
    REQUIRE(r.matched.has_value());
    CHECK(*r.matched == 1);

    // Without any text match the clip path still finds the counterpart.
    auto tgt2 = make_snapshot(400, 800, {decoy});
    MatchResult r2 = match_widget(0, src, tgt2, cfg);
    REQUIRE(r2.matched.has_value());
    CHECK(*r2.matched == 0);
}
