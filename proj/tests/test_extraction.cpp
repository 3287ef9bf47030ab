#include <doctest.h>

#include "guireplay/imaging.hpp"
#include "guireplay/profile.hpp"
#include "helpers.hpp"

using namespace guireplay;
using namespace guireplay::profile;
using detect::RawWidget;
using detect::WidgetKind;

namespace {

RawWidget box(int top, int left, int bottom, int right, bool container = false) {
    return {{top, left, bottom, right}, WidgetKind::NonText, container, {}};
}

}  // namespace

TEST_CASE("compute_shape") {
    ShapeTuple a = compute_shape({0, 0, 10, 10});
    CHECK(a.width == 10);
    CHECK(a.height == 10);
    CHECK(a.area == 100);
    CHECK(a.aspect_ratio == doctest::Approx(1.0));

    // (top, left, bottom, right) = (0, 0, 20, 10): tall box.
    ShapeTuple b = compute_shape({0, 0, 20, 10});
    CHECK(b.width == 10);
    CHECK(b.height == 20);
    CHECK(b.area == 200);
    CHECK(b.aspect_ratio == doctest::Approx(0.5));

    ShapeTuple c = compute_shape({5, 7, 6, 8});
    CHECK(c.width == 1);
    CHECK(c.height == 1);
    CHECK(c.area == 1);
    CHECK(c.aspect_ratio == doctest::Approx(1.0));

    CHECK_THROWS_AS(compute_shape({5, 5, 5, 9}), ContractError);
}

TEST_CASE("find_parent picks the smallest enclosing container") {
    std::vector<RawWidget> ws{
        box(0, 0, 100, 100, true),   // 0: outer container
        box(10, 10, 80, 80, true),   // 1: inner container
        box(20, 20, 40, 40),         // 2: widget
        box(0, 110, 20, 130),        // 3: top-level widget
    };
    CHECK(*find_parent(2, ws) == 1);
    CHECK(*find_parent(1, ws) == 0);
    CHECK_FALSE(find_parent(3, ws).has_value());
    CHECK_FALSE(find_parent(0, ws).has_value());

    // Parent relation is acyclic and antisymmetric.
    for (int i = 0; i < static_cast<int>(ws.size()); ++i) {
        auto p = find_parent(i, ws);
        if (p) {
            auto pp = find_parent(*p, ws);
            CHECK((!pp || *pp != i));
        }
    }
}

TEST_CASE("find_neighbors picks nearest overlap per direction") {
    // Lone widget.
    std::vector<RawWidget> lone{box(10, 10, 30, 30)};
    NeighborSet n = find_neighbors(0, lone);
    CHECK_FALSE(n.up);
    CHECK_FALSE(n.down);
    CHECK_FALSE(n.left);
    CHECK_FALSE(n.right);
    CHECK_FALSE(n.parent);

    // Vertical stack of three: the middle sees up and down only.
    std::vector<RawWidget> stack{box(0, 10, 20, 50), box(30, 10, 50, 50), box(60, 10, 80, 50)};
    NeighborSet mid = find_neighbors(1, stack);
    CHECK(*mid.up == 0);
    CHECK(*mid.down == 2);
    CHECK_FALSE(mid.left);
    CHECK_FALSE(mid.right);

    // Two candidates above at edge distances 5 and 12.
    std::vector<RawWidget> above{box(40, 10, 60, 50), box(23, 10, 35, 50), box(8, 10, 28 - 0, 50)};
    // widget 0 at top=40; candidate 1 bottom=35 (distance 5); candidate 2 bottom=28 (12).
    NeighborSet got = find_neighbors(0, above);
    CHECK(*got.up == 1);

    // Ancestors are excluded from the neighbor search.
    std::vector<RawWidget> nested{box(0, 0, 100, 100, true), box(40, 40, 60, 60)};
    NeighborSet inner = find_neighbors(1, nested);
    CHECK(*inner.parent == 0);
    CHECK_FALSE(inner.up);
    CHECK_FALSE(inner.left);
}

TEST_CASE("neighbor antisymmetry on aligned grids") {
    std::vector<RawWidget> grid;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            grid.push_back(box(r * 40, c * 40, r * 40 + 30, c * 40 + 30));
    for (int i = 0; i < 9; ++i) {
        NeighborSet n = find_neighbors(i, grid);
        if (n.down) {
            NeighborSet m = find_neighbors(*n.down, grid);
            CHECK(*m.up == i);
        }
        if (n.right) {
            NeighborSet m = find_neighbors(*n.right, grid);
            CHECK(*m.left == i);
        }
    }
}

TEST_CASE("build_profiles aligns profiles with widgets") {
    PixelImage img(120, 100);
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 120; ++x)
            img.set(x, y, static_cast<std::uint8_t>(x * 2), static_cast<std::uint8_t>(y * 2),
                    40);

    GuiSnapshot empty = build_profiles(img, {});
    CHECK(empty.size() == 0);

    std::vector<RawWidget> ws{box(10, 10, 40, 60), box(50, 10, 90, 110, true),
                              box(60, 20, 80, 40)};
    ws[2].kind = WidgetKind::Text;
    ws[2].text = "LABEL";
    GuiSnapshot snap = build_profiles(img, ws, {"dev", 120, 100, 160.0, false}, 7);

    REQUIRE(snap.size() == 3);
    CHECK(snap.page_offset == 7);
    for (size_t i = 0; i < snap.size(); ++i) {
        const WidgetProfile& p = snap.profiles[i];
        CHECK(p.location == snap.widgets[i].bbox);
        CHECK(p.shape == compute_shape(p.location));
        CHECK(p.clip.width == p.location.width());
        CHECK(p.clip.height == p.location.height());
        // Embedding equals the imaging pipeline applied to the crop.
        CHECK(p.clip_embedding == imaging::embed_clip(imaging::crop(img, p.location)));
        CHECK(p.norm_cx >= 0.0);
        CHECK(p.norm_cx <= 1.0);
        CHECK(p.norm_cy >= 0.0);
        CHECK(p.norm_cy <= 1.0);
    }
    CHECK(*snap.profiles[2].neighbors.parent == 1);
    CHECK(snap.profiles[2].text == "LABEL");
}
