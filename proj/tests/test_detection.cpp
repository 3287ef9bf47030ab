#include <doctest.h>

#include <cmath>
#include <set>

#include "guireplay/detect.hpp"
#include "guireplay/digest.hpp"
#include "guireplay/imaging.hpp"
#include "helpers.hpp"

using namespace guireplay;
using namespace guireplay::detect;
using testutil::fill_rect;
using testutil::solid;

namespace {

Region rect_ring(const Bbox& b) {
    Region r;
    r.bbox = b;
    for (int x = b.left; x < b.right; ++x) {
        r.pixels.push_back({x, b.top});
        r.pixels.push_back({x, b.bottom - 1});
    }
    for (int y = b.top; y < b.bottom; ++y) {
        r.pixels.push_back({b.left, y});
        r.pixels.push_back({b.right - 1, y});
    }
    r.area = static_cast<long long>(r.pixels.size());
    return r;
}

Region blob(const Bbox& b) {
    Region r;
    r.bbox = b;
    for (int y = b.top; y < b.bottom; ++y)
        for (int x = b.left; x < b.right; ++x) r.pixels.push_back({x, y});
    r.area = static_cast<long long>(r.pixels.size());
    return r;
}

Region circle_ring(int cx, int cy, int radius) {
    Region r;
    std::set<std::pair<int, int>> pts;
    for (int i = 0; i < 2000; ++i) {
        double a = i * 2.0 * 3.14159265358979 / 2000;
        pts.insert({cx + static_cast<int>(radius * std::cos(a)),
                    cy + static_cast<int>(radius * std::sin(a))});
    }
    r.bbox = {cy - radius, cx - radius, cy + radius + 1, cx + radius + 1};
    for (auto& [x, y] : pts) r.pixels.push_back({x, y});
    r.area = static_cast<long long>(r.pixels.size());
    return r;
}

std::shared_ptr<TextRegistry> registry_for(const PixelImage& img,
                                           std::vector<TextLine> lines) {
    auto reg = std::make_shared<TextRegistry>();
    reg->put(digest::image_digest(img), std::move(lines));
    return reg;
}

}  // namespace

TEST_CASE("recognize_container definition cases") {
    DetectConfig cfg;

    Region rect = rect_ring({10, 10, 70, 90});
    Region icon = blob({30, 30, 45, 45});
    CHECK(recognize_container(rect, {icon}, cfg));

    // Inner object reaching the border band defeats the container.
    Region touching = blob({11, 30, 30, 45});
    CHECK_FALSE(recognize_container(rect, {touching}, cfg));

    // A circle covers almost none of its bbox perimeter.
    Region circle = circle_ring(60, 60, 25);
    Region inner = blob({55, 55, 60, 60});
    CHECK_FALSE(recognize_container(circle, {inner}, cfg));

    // Hollow rectangle with no inner objects still reads as rectangular.
    CHECK(recognize_container(rect, {}, cfg));
}

TEST_CASE("merge_text_nontext rules") {
    std::vector<TextLine> none;
    std::vector<RawWidget> widgets{{{10, 10, 40, 80}, WidgetKind::NonText, false, {}}};
    auto merged = merge_text_nontext(none, widgets);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].kind == WidgetKind::NonText);

    // A plain non-text widget overlapping a text line is discarded.
    std::vector<TextLine> lines{{{20, 20, 32, 70}, "HELLO"}};
    merged = merge_text_nontext(lines, widgets);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].kind == WidgetKind::Text);
    CHECK(*merged[0].text == "HELLO");

    // A container fully enclosing its label keeps it as absorbed text.
    std::vector<RawWidget> button{{{10, 10, 40, 80}, WidgetKind::NonText, true, {}}};
    merged = merge_text_nontext(lines, button);
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].kind == WidgetKind::NonText);
    CHECK(merged[0].is_container);
    CHECK(*merged[0].text == "HELLO");
    CHECK(merged[1].kind == WidgetKind::Text);

    // Two enclosed lines concatenate top to bottom.
    std::vector<TextLine> two{{{24, 20, 30, 70}, "WORLD"}, {{12, 20, 18, 70}, "HELLO"}};
    merged = merge_text_nontext(two, button);
    REQUIRE(merged.size() == 3);
    CHECK(*merged[0].text == "HELLO WORLD");

    // Partially-overlapping text defeats the container exception.
    std::vector<TextLine> partial{{{35, 20, 50, 70}, "EDGE"}};
    merged = merge_text_nontext(partial, button);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].kind == WidgetKind::Text);
}

TEST_CASE("detect_nontext finds cards with nested icons") {
    DetectConfig cfg;
    PixelImage img = solid(240, 200, 250, 250, 250);
    fill_rect(img, {20, 20, 170, 220}, 224, 230, 238);  // card
    fill_rect(img, {40, 40, 70, 70}, 40, 90, 160);      // icon 1
    fill_rect(img, {40, 100, 70, 130}, 160, 60, 40);    // icon 2

    auto widgets = detect_nontext(img, cfg);
    REQUIRE(widgets.size() == 3);
    CHECK(widgets[0].bbox == Bbox{20, 20, 170, 220});
    CHECK(widgets[0].is_container);
    CHECK(widgets[1].bbox == Bbox{40, 40, 70, 70});
    CHECK(widgets[2].bbox == Bbox{40, 100, 70, 130});
}

TEST_CASE("framed artwork collapses to one plain widget") {
    DetectConfig cfg;
    PixelImage img = solid(200, 160, 250, 250, 250);
    // A photo-like box whose interior pattern runs to the frame.
    fill_rect(img, {30, 30, 130, 170}, 55, 61, 66);
    for (int x = 32; x < 168; x += 12)
        fill_rect(img, {32, x, 128, std::min(x + 6, 168)}, 180, 140, 60);

    auto widgets = detect_nontext(img, cfg);
    REQUIRE(widgets.size() == 1);
    CHECK(widgets[0].bbox == Bbox{30, 30, 130, 170});

    // After the merge stage an empty container is demoted to a plain widget.
    auto reg = registry_for(img, {});
    FixtureTextProvider provider(reg);
    auto final_widgets = detect_widgets(img, provider, cfg);
    REQUIRE(final_widgets.size() == 1);
    CHECK_FALSE(final_widgets[0].is_container);
}

TEST_CASE("blank image detects nothing") {
    DetectConfig cfg;
    CHECK(detect_nontext(solid(100, 100, 250, 250, 250), cfg).empty());
}

TEST_CASE("extract_screen_region recovers the pasted frame") {
    DetectConfig cfg;
    PixelImage screen = solid(200, 400, 250, 250, 250);
    fill_rect(screen, {20, 20, 60, 180}, 63, 81, 181);
    fill_rect(screen, {100, 30, 160, 90}, 25, 103, 210);
    fill_rect(screen, {200, 30, 260, 90}, 160, 60, 40);

    PixelImage photo = solid(300, 560, 0, 0, 0);
    for (int y = 0; y < 400; ++y)
        for (int x = 0; x < 200; ++x) {
            const std::uint8_t* p = screen.at(x, y);
            photo.set(40 + x, 70 + y, p[0], p[1], p[2]);
        }

    ScreenRegion region = extract_screen_region(photo, cfg);
    CHECK(std::abs(region.bbox.top - 70) <= 2);
    CHECK(std::abs(region.bbox.left - 40) <= 2);
    CHECK(std::abs(region.bbox.bottom - 470) <= 2);
    CHECK(std::abs(region.bbox.right - 240) <= 2);
    CHECK(region.screen_image.width == region.bbox.width());

    CHECK_THROWS_AS(extract_screen_region(solid(300, 500, 0, 0, 0), cfg), ScreenNotFound);

    // Screen shorter than half the photo height is rejected.
    PixelImage small_photo = solid(300, 900, 0, 0, 0);
    for (int y = 0; y < 400; ++y)
        for (int x = 0; x < 200; ++x) {
            const std::uint8_t* p = screen.at(x, y);
            small_photo.set(40 + x, 70 + y, p[0], p[1], p[2]);
        }
    CHECK_THROWS_AS(extract_screen_region(small_photo, cfg), ScreenNotFound);
}

TEST_CASE("fixture provider returns manifest lines and seeded noise") {
    PixelImage img = solid(120, 120, 250, 250, 250);
    std::vector<TextLine> lines{{{10, 10, 24, 80}, "ALPHA"}, {{40, 10, 54, 60}, "BETA"}};
    auto reg = registry_for(img, lines);

    FixtureTextProvider exact(reg);
    CHECK(exact.lines(img) == lines);

    FixtureTextProvider miss(reg);
    CHECK_THROWS_AS(miss.lines(solid(3, 3, 1, 2, 3)), TextProviderError);

    TextNoise noise;
    noise.jitter_px = 2;
    noise.seed = 9;
    FixtureTextProvider jitter_a(reg, noise);
    FixtureTextProvider jitter_b(reg, noise);
    CHECK(jitter_a.lines(img) == jitter_b.lines(img));  // seeded determinism

    for (std::uint64_t s = 0; s < 100; ++s) {
        TextNoise n{2, 0.0, s};
        FixtureTextProvider p(reg, n);
        auto out = p.lines(img);
        REQUIRE(out.size() == lines.size());
        for (size_t i = 0; i < out.size(); ++i) {
            CHECK(std::abs(out[i].bbox.top - lines[i].bbox.top) <= 2);
            CHECK(std::abs(out[i].bbox.left - lines[i].bbox.left) <= 2);
            CHECK(std::abs(out[i].bbox.bottom - lines[i].bbox.bottom) <= 2);
            CHECK(std::abs(out[i].bbox.right - lines[i].bbox.right) <= 2);
            CHECK(out[i].content == lines[i].content);
        }
    }

    TextNoise subst{0, 1.0, 3};
    FixtureTextProvider scrambled(reg, subst);
    auto noisy = scrambled.lines(img);
    CHECK(noisy[0].content != "ALPHA");  // rate 1.0 rewrites every letter
    CHECK(noisy[0].content.size() == 5);
}

TEST_CASE("detect_widgets merges provider text with detector boxes") {
    DetectConfig cfg;
    PixelImage blank = solid(100, 100, 250, 250, 250);
    auto reg = registry_for(blank, {});
    FixtureTextProvider provider(reg);
    CHECK(detect_widgets(blank, provider, cfg).empty());

    // Button-like fill with a centred label line.
    PixelImage img = solid(200, 120, 250, 250, 250);
    fill_rect(img, {30, 20, 80, 160}, 25, 103, 210);
    fill_rect(img, {48, 55, 62, 125}, 255, 255, 255);  // ink strokes
    auto reg2 = registry_for(img, {{{48, 55, 62, 125}, "GO NOW"}});
    FixtureTextProvider provider2(reg2);
    auto widgets = detect_widgets(img, provider2, cfg);

    REQUIRE(widgets.size() == 2);
    CHECK(widgets[0].kind == WidgetKind::NonText);
    CHECK(widgets[0].is_container);
    CHECK(*widgets[0].text == "GO NOW");
    CHECK(widgets[1].kind == WidgetKind::Text);

    // Determinism: same bytes, same provider output, equal results.
    auto again = detect_widgets(img, provider2, cfg);
    REQUIRE(again.size() == widgets.size());
    for (size_t i = 0; i < widgets.size(); ++i) {
        CHECK(again[i].bbox == widgets[i].bbox);
        CHECK(again[i].kind == widgets[i].kind);
        CHECK(again[i].text == widgets[i].text);
    }
}

TEST_CASE("detected widgets stay inside the image and respect text law") {
    DetectConfig cfg;
    PixelImage img = solid(300, 200, 250, 250, 250);
    fill_rect(img, {20, 20, 90, 280}, 224, 230, 238);
    fill_rect(img, {40, 40, 70, 70}, 40, 90, 160);
    fill_rect(img, {120, 20, 170, 120}, 25, 103, 210);
    auto reg = registry_for(
        img, {{{40, 90, 58, 200}, "ROW TITLE"}, {{135, 40, 152, 100}, "OK"}});
    FixtureTextProvider provider(reg);
    auto widgets = detect_widgets(img, provider, cfg);

    for (const auto& w : widgets) {
        CHECK(w.bbox.valid());
        CHECK(w.bbox.right <= img.width);
        CHECK(w.bbox.bottom <= img.height);
        if (w.kind == WidgetKind::Text) CHECK_FALSE(w.text->empty());
        if (w.kind == WidgetKind::NonText && !w.is_container) {
            for (const auto& t : widgets) {
                if (t.kind != WidgetKind::Text) continue;
                CHECK_FALSE(w.bbox.intersects(t.bbox));
            }
        }
        if (w.is_container) {
            bool has_child = false;
            for (const auto& o : widgets)
                if (&o != &w && w.bbox.strictly_contains(o.bbox)) has_child = true;
            CHECK(has_child);
        }
    }
}
