#include "guireplay/render.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "guireplay/digest.hpp"

namespace guireplay::farm {

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

struct Palette {
    Rgb bg, card, card_border, bar, bar_border, bar_ink, ink, on_accent, button, frame;
    bool card_has_border, bar_has_border;
    int radius_div;       // rounded corners for buttons/cards: min(w,h)/div
    int icon_radius_div;  // icon tokens: width/div (large radius, never a container)
    int icon_variant;
    int hue_lift;         // icon hue brightness shift
};

const Palette kSkinA{
    {250, 250, 250}, {226, 232, 240}, {0, 0, 0},      {63, 81, 181},   {0, 0, 0},
    {255, 255, 255}, {33, 33, 33},    {255, 255, 255}, {25, 103, 210},  {55, 61, 66},
    false,           false,           20,              4,               0,
    0};

const Palette kSkinB{
    {255, 255, 255}, {240, 240, 245}, {174, 174, 178}, {244, 244, 248}, {174, 174, 178},
    {28, 28, 30},    {28, 28, 30},    {255, 255, 255}, {0, 122, 255},   {58, 58, 64},
    true,            true,            16,              3,               1,
    12};

const Rgb kIconHues[8] = {{198, 40, 40},  {173, 20, 87}, {106, 27, 154}, {40, 53, 147},
                          {2, 119, 189},  {0, 105, 92},  {230, 81, 0},   {93, 64, 55}};

inline std::uint8_t lift(std::uint8_t v, int d) {
    return static_cast<std::uint8_t>(std::clamp(int(v) + d, 0, 255));
}

Rgb icon_fill(std::uint64_t seed, const Palette& pal) {
    Rgb h = kIconHues[seed % 8];
    return {lift(h.r, pal.hue_lift), lift(h.g, pal.hue_lift), lift(h.b, pal.hue_lift)};
}

Rgb darken(Rgb c, double f) {
    return {static_cast<std::uint8_t>(c.r * f), static_cast<std::uint8_t>(c.g * f),
            static_cast<std::uint8_t>(c.b * f)};
}

// ---------------------------------------------------------------------------
// Procedural 5x7 glyphs: one fixed pattern per character.
// ---------------------------------------------------------------------------

std::uint64_t glyph_bits(char c) {
    if (c == ' ') return 0;
    std::uint64_t h = digest::mix_seed(0x9147u, std::string(1, c), 7u);
    std::uint64_t bits = h & ((1ull << 35) - 1);
    int pop = __builtin_popcountll(bits);
    if (pop < 12) {
        for (int r = 0; r < 7; ++r) bits |= 1ull << (r * 5 + 2);
    }
    return bits;
}

int text_width_px(const std::string& s, int fs) {
    if (s.empty()) return 0;
    return static_cast<int>(s.size()) * 6 * fs - fs;
}

std::vector<std::string> wrap_text(const std::string& s, int fs, int avail) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : s) {
        if (c == ' ') {
            if (!cur.empty()) words.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(cur);

    // Hard-break words that cannot fit a line on their own.
    size_t max_chars = std::max<size_t>(1, (avail + fs) / (6 * fs));
    std::vector<std::string> pieces;
    for (auto& w : words) {
        while (w.size() > max_chars) {
            pieces.push_back(w.substr(0, max_chars));
            w = w.substr(max_chars);
        }
        if (!w.empty()) pieces.push_back(w);
    }

    std::vector<std::string> lines;
    std::string line;
    for (const auto& w : pieces) {
        std::string probe = line.empty() ? w : line + " " + w;
        if (text_width_px(probe, fs) <= avail || line.empty()) {
            line = probe;
        } else {
            lines.push_back(line);
            line = w;
        }
    }
    if (!line.empty()) lines.push_back(line);
    if (lines.empty()) lines.push_back("");
    return lines;
}

// ---------------------------------------------------------------------------
// Layout tree
// ---------------------------------------------------------------------------

struct LineItem {
    std::string id;  // instance id, e.g. "title#0"
    std::string text;
    Bbox box;  // content coordinates
};

struct Node {
    const AbstractWidget* w = nullptr;
    Bbox box;
    bool visual = false;  // emits a ground-truth box and paints chrome
    std::vector<LineItem> lines;
    std::vector<Node> children;
};

struct Ctx {
    const DeviceProfile* prof;
    const Palette* pal;
    int fs;

    int dp(double v) const {
        return std::max(1, static_cast<int>(std::lround(v * prof->dpi / 160.0)));
    }
};

Ctx make_ctx(const DeviceProfile& prof) {
    Ctx c;
    c.prof = &prof;
    c.pal = prof.skin == Skin::SkinA ? &kSkinA : &kSkinB;
    c.fs = std::max(1, static_cast<int>(std::lround(2.0 * prof.dpi / 160.0)));
    return c;
}

std::string truncate_to(const std::string& s, int fs, int avail) {
    std::string t = s;
    while (!t.empty() && text_width_px(t, fs) > avail) t.pop_back();
    return t;
}

Node layout_widget(const Ctx& c, const AbstractWidget& w, int x, int y, int avail);

Node layout_grid(const Ctx& c, const AbstractWidget& w, int x, int y, int avail) {
    Node node;
    node.w = &w;
    node.visual = false;
    int min_w = c.dp(w.min_width_dp > 0 ? w.min_width_dp : 88);
    int per_row = std::max(1, avail / min_w);
    int cell_w = avail / per_row;
    int icon_side = c.dp(40);
    int caption_h = 7 * c.fs;
    int cell_h = icon_side + c.dp(4) + caption_h + c.dp(6);

    int i = 0;
    for (const AbstractWidget& item : w.children) {
        int row = i / per_row, col = i % per_row;
        int cx = x + col * cell_w, cy = y + row * cell_h;
        Node cell;
        cell.w = &item;
        cell.visual = true;  // the icon token
        cell.box = {cy, cx + (cell_w - icon_side) / 2, cy + icon_side,
                    cx + (cell_w - icon_side) / 2 + icon_side};
        std::string cap = truncate_to(item.text, c.fs, cell_w - c.dp(4));
        if (!cap.empty()) {
            int tw = text_width_px(cap, c.fs);
            int tx = cx + (cell_w - tw) / 2;
            int ty = cy + icon_side + c.dp(4);
            cell.lines.push_back({item.id + "#label", cap, {ty, tx, ty + caption_h, tx + tw}});
        }
        node.children.push_back(std::move(cell));
        ++i;
    }
    int rows = (i + per_row - 1) / per_row;
    node.box = {y, x, y + std::max(rows * cell_h - c.dp(6), 0), x + avail};
    return node;
}

Node layout_bar(const Ctx& c, const AbstractWidget& w, int x, int y, int avail) {
    Node node;
    node.w = &w;
    node.visual = true;
    int bh = c.dp(48);
    node.box = {y, x, y + bh, x + avail};
    int cursor = x + c.dp(14);
    int right_cursor = x + avail - c.dp(14);
    for (const AbstractWidget& child : w.children) {
        if (child.kind == WidgetType::Label) {
            std::string line = truncate_to(child.text, c.fs, avail / 2);
            int tw = text_width_px(line, c.fs);
            int ty = y + (bh - 7 * c.fs) / 2;
            Node ln;
            ln.w = &child;
            ln.visual = false;
            ln.box = {ty, cursor, ty + 7 * c.fs, cursor + tw};
            ln.lines.push_back({child.id + "#0", line, ln.box});
            cursor += tw + c.dp(12);
            node.children.push_back(std::move(ln));
        } else {  // icons collect at the right edge
            int side = c.dp(28);
            right_cursor -= side;
            Node ic;
            ic.w = &child;
            ic.visual = true;
            int ty = y + (bh - side) / 2;
            ic.box = {ty, right_cursor, ty + side, right_cursor + side};
            right_cursor -= c.dp(10);
            node.children.push_back(std::move(ic));
        }
    }
    return node;
}

Node layout_column(const Ctx& c, const AbstractWidget& w, int x, int y, int avail,
                   bool visual, int pad_in) {
    Node node;
    node.w = &w;
    node.visual = visual;
    int cy = y + pad_in;
    int cx = x + pad_in;
    int inner = avail - 2 * pad_in;
    for (const AbstractWidget& child : w.children) {
        Node cn = layout_widget(c, child, cx, cy, inner);
        cy = cn.box.bottom + c.dp(8);
        node.children.push_back(std::move(cn));
    }
    if (!w.children.empty()) cy -= c.dp(8);
    node.box = {y, x, cy + pad_in, x + avail};
    return node;
}

Node layout_widget(const Ctx& c, const AbstractWidget& w, int x, int y, int avail) {
    Node node;
    node.w = &w;
    switch (w.kind) {
        case WidgetType::Label: {
            node.visual = false;
            std::vector<std::string> lines = wrap_text(w.text, c.fs, avail);
            int ly = y;
            int max_r = x;
            for (size_t i = 0; i < lines.size(); ++i) {
                if (lines[i].empty()) continue;
                int tw = text_width_px(lines[i], c.fs);
                node.lines.push_back({w.id + "#" + std::to_string(i), lines[i],
                                      {ly, x, ly + 7 * c.fs, x + tw}});
                max_r = std::max(max_r, x + tw);
                ly += 9 * c.fs;
            }
            node.box = {y, x, std::max(y + 7 * c.fs, ly - 2 * c.fs), max_r};
            break;
        }
        case WidgetType::Button: {
            node.visual = true;
            std::string line = truncate_to(w.text, c.fs, avail - 2 * c.dp(12));
            int tw = text_width_px(line, c.fs);
            int bw = std::min(avail,
                              std::max(c.dp(std::max(64, w.min_width_dp)), tw + 2 * c.dp(12)));
            int bh = 7 * c.fs + 2 * c.dp(8);
            node.box = {y, x, y + bh, x + bw};
            int tx = x + (bw - tw) / 2;
            int ty = y + (bh - 7 * c.fs) / 2;
            if (!line.empty())
                node.lines.push_back({w.id + "#label", line, {ty, tx, ty + 7 * c.fs, tx + tw}});
            break;
        }
        case WidgetType::Icon: {
            node.visual = true;
            int side = c.dp(w.min_width_dp > 0 ? w.min_width_dp : 40);
            node.box = {y, x, y + side, x + side};
            break;
        }
        case WidgetType::ImageBox: {
            node.visual = true;
            int bw = avail;
            int bh = std::min(bw * 9 / 16, c.dp(200));
            node.box = {y, x, y + bh, x + bw};
            break;
        }
        case WidgetType::GridItem: {
            // Standalone grid item: icon with caption below.
            node.visual = true;
            int side = c.dp(40);
            node.box = {y, x, y + side, x + side};
            std::string cap = truncate_to(w.text, c.fs, avail);
            if (!cap.empty()) {
                int tw = text_width_px(cap, c.fs);
                int ty = y + side + c.dp(4);
                node.lines.push_back({w.id + "#label", cap, {ty, x, ty + 7 * c.fs, x + tw}});
            }
            break;
        }
        case WidgetType::Container: {
            if (w.layout == "grid") return layout_grid(c, w, x, y, avail);
            if (w.style == "bar") return layout_bar(c, w, x, y, avail);
            bool visual = w.style != "plain";
            return layout_column(c, w, x, y, avail, visual, visual ? c.dp(12) : 0);
        }
    }
    return node;
}

/// Horizontal strips: fixed-width cards flowing to the right.
Node layout_widget_h(const Ctx& c, const AbstractWidget& w, int x, int y, int avail_h) {
    int cw = c.dp(w.min_width_dp > 0 ? w.min_width_dp : 160);
    switch (w.kind) {
        case WidgetType::Container: {
            Node node = layout_column(c, w, x, y, cw, w.style != "plain",
                                      w.style != "plain" ? c.dp(12) : 0);
            return node;
        }
        case WidgetType::ImageBox: {
            Node node;
            node.w = &w;
            node.visual = true;
            int bh = std::min(avail_h, cw * 9 / 16);
            node.box = {y, x, y + bh, x + cw};
            return node;
        }
        default:
            return layout_widget(c, w, x, y, cw);
    }
}

struct PageLayout {
    std::vector<Node> roots;
    int content_length = 0;
};

PageLayout layout_page(const Ctx& c, const AbstractPage& page) {
    PageLayout out;
    int pad = c.dp(8);
    int gap = c.dp(8);

    // Nav containers render first on SkinA, last on SkinB.
    std::vector<const AbstractWidget*> order;
    std::vector<const AbstractWidget*> navs;
    for (const AbstractWidget& w : page.widgets)
        (w.nav ? navs : order).push_back(&w);
    if (c.prof->skin == Skin::SkinA)
        order.insert(order.begin(), navs.begin(), navs.end());
    else
        order.insert(order.end(), navs.begin(), navs.end());

    if (!page.horizontal) {
        int avail = c.prof->width - 2 * pad;
        int y = pad;
        for (const AbstractWidget* w : order) {
            Node n = layout_widget(c, *w, pad, y, avail);
            y = n.box.bottom + gap;
            out.roots.push_back(std::move(n));
        }
        out.content_length = y - gap + pad;
    } else {
        int avail_h = c.prof->height - 2 * pad;
        int x = pad;
        for (const AbstractWidget* w : order) {
            Node n = layout_widget_h(c, *w, x, pad, avail_h);
            x = n.box.right + gap;
            out.roots.push_back(std::move(n));
        }
        out.content_length = x - gap + pad;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Painter
// ---------------------------------------------------------------------------

struct Painter {
    PixelImage* img;
    int off_x = 0, off_y = 0;

    void px(int x, int y, Rgb c) {
        x -= off_x;
        y -= off_y;
        if (x < 0 || y < 0 || x >= img->width || y >= img->height) return;
        img->set(x, y, c.r, c.g, c.b);
    }

    void hspan(int x0, int x1, int y, Rgb c) {
        for (int x = x0; x < x1; ++x) px(x, y, c);
    }

    void fill_rect(const Bbox& b, Rgb c) {
        for (int y = b.top; y < b.bottom; ++y) hspan(b.left, b.right, y, c);
    }

    static int corner_inset(int dy, int r) {
        double t = r - dy - 0.5;
        return r - static_cast<int>(std::floor(std::sqrt(std::max(0.0, r * r - t * t))));
    }

    void fill_rrect(const Bbox& b, Rgb c, int r) {
        int h = b.height();
        r = std::clamp(r, 0, std::min(b.width(), h) / 2);
        for (int y = b.top; y < b.bottom; ++y) {
            int dy = y - b.top;
            int from_edge = std::min(dy, h - 1 - dy);
            int inset = from_edge < r ? corner_inset(from_edge, r) : 0;
            hspan(b.left + inset, b.right - inset, y, c);
        }
    }

    void glyph_line(const LineItem& line, int fs, Rgb c) {
        int x = line.box.left;
        for (char ch : line.text) {
            std::uint64_t bits = glyph_bits(ch);
            for (int gr = 0; gr < 7; ++gr)
                for (int gc = 0; gc < 5; ++gc)
                    if (bits & (1ull << (gr * 5 + gc)))
                        fill_rect({line.box.top + gr * fs, x + gc * fs,
                                   line.box.top + (gr + 1) * fs, x + (gc + 1) * fs},
                                  c);
            x += 6 * fs;
        }
    }

    void icon_token(const Bbox& b, std::uint64_t seed, const Palette& pal) {
        Rgb fill = icon_fill(seed, pal);
        int r = b.width() / pal.icon_radius_div;
        fill_rrect(b, fill, r);
        // 5x5 block pattern, one variant bit-flip set per skin.
        std::uint64_t bits = digest::mix_seed(seed, "icon", 0) & ((1ull << 25) - 1);
        if (pal.icon_variant == 1) {
            std::uint64_t flips = digest::mix_seed(seed, "variant", 1);
            bits ^= (1ull << (flips % 25)) | (1ull << ((flips >> 8) % 25)) |
                    (1ull << ((flips >> 16) % 25));
        }
        Rgb mark = darken(fill, 0.55);
        int m = std::max(2, b.width() / 5);
        int inner = b.width() - 2 * m;
        if (inner < 5) return;
        for (int gr = 0; gr < 5; ++gr)
            for (int gc = 0; gc < 5; ++gc)
                if (bits & (1ull << (gr * 5 + gc)))
                    fill_rect({b.top + m + gr * inner / 5, b.left + m + gc * inner / 5,
                               b.top + m + (gr + 1) * inner / 5,
                               b.left + m + (gc + 1) * inner / 5},
                              mark);
    }

    void image_pattern(const Bbox& b, std::uint64_t seed, const Palette& pal) {
        fill_rect(b, pal.frame);
        Bbox in{b.top + 2, b.left + 2, b.bottom - 2, b.right - 2};
        if (!in.valid()) return;
        // Full-bleed stripes: the artwork always touches the frame, so the
        // box is never mistaken for a container.
        Rgb a = icon_fill(seed, pal);
        Rgb c2 = icon_fill(seed >> 3, pal);
        Rgb b2 = {lift(c2.r, 70), lift(c2.g, 70), lift(c2.b, 70)};
        int stripe = std::max(6, in.width() / (5 + static_cast<int>(seed % 5)));
        for (int x = in.left; x < in.right; ++x) {
            bool odd = ((x - in.left) / stripe) % 2 == 1;
            for (int y = in.top; y < in.bottom; ++y) px(x, y, odd ? a : b2);
        }
        int band_top = in.top + static_cast<int>((seed >> 8) % 3) * in.height() / 4;
        int band_h = std::max(4, in.height() / 5);
        fill_rect({band_top, in.left, std::min(in.bottom, band_top + band_h), in.right},
                  darken(a, 0.6));
    }
};

int corner_radius(const Bbox& b, const Palette& pal) {
    return std::clamp(std::min(b.width(), b.height()) / pal.radius_div, 0, 6);
}

// Bar and button labels take the accent ink, which flows down the tree.
void paint_tree(Painter& p, const Ctx& c, const std::vector<Node>& roots,
                std::uint64_t nonce) {
    const Palette& pal = *c.pal;

    auto visit = [&](auto&& self, const Node& node, Rgb ink) -> void {
        const AbstractWidget& w = *node.w;
        Rgb child_ink = ink;
        if (node.visual) {
            switch (w.kind) {
                case WidgetType::Button:
                    p.fill_rrect(node.box, pal.button, corner_radius(node.box, pal));
                    child_ink = pal.on_accent;
                    break;
                case WidgetType::Icon:
                case WidgetType::GridItem:
                    p.icon_token(node.box, w.glyph_seed, pal);
                    break;
                case WidgetType::ImageBox: {
                    std::uint64_t seed = w.glyph_seed;
                    if (w.volatile_region) seed = digest::mix_seed(seed, "ad", nonce);
                    p.image_pattern(node.box, seed, pal);
                    break;
                }
                case WidgetType::Container: {
                    bool bar = w.style == "bar";
                    Rgb fill = bar ? pal.bar : pal.card;
                    int r = corner_radius(node.box, pal);
                    bool border = bar ? pal.bar_has_border : pal.card_has_border;
                    if (border) {
                        p.fill_rrect(node.box, bar ? pal.bar_border : pal.card_border, r);
                        Bbox in{node.box.top + 2, node.box.left + 2, node.box.bottom - 2,
                                node.box.right - 2};
                        if (in.valid()) p.fill_rrect(in, fill, std::max(0, r - 1));
                    } else {
                        p.fill_rrect(node.box, fill, r);
                    }
                    if (bar) child_ink = pal.bar_ink;
                    break;
                }
                default:
                    break;
            }
        }
        for (const LineItem& line : node.lines) p.glyph_line(line, c.fs, child_ink);
        for (const Node& child : node.children) self(self, child, child_ink);
    };
    for (const Node& n : roots) visit(visit, n, pal.ink);
}

// ---------------------------------------------------------------------------
// Ground truth emission
// ---------------------------------------------------------------------------

struct GtCollector {
    int off_x, off_y, vw, vh;
    std::vector<GroundTruthEntry> boxes;
    std::vector<std::pair<std::string, detect::TextLine>> lines;  // instance id + line

    Bbox to_view(const Bbox& b) const {
        return Bbox{b.top - off_y, b.left - off_x, b.bottom - off_y, b.right - off_x}.intersect(
            {0, 0, vh, vw});
    }

    bool line_fully_visible(const Bbox& b) const {
        return b.top >= off_y && b.bottom <= off_y + vh && b.left >= off_x &&
               b.right <= off_x + vw;
    }

    void collect(const Node& node) {
        if (node.visual) {
            Bbox v = to_view(node.box);
            if (v.valid() && v.width() >= 8 && v.height() >= 8) {
                GroundTruthEntry e;
                e.id = node.w->id;
                e.bbox = v;
                e.kind = detect::WidgetKind::NonText;
                boxes.push_back(std::move(e));
            }
        }
        for (const LineItem& li : node.lines) {
            if (!line_fully_visible(li.box)) continue;  // whole line or nothing
            detect::TextLine tl;
            tl.bbox = to_view(li.box);
            tl.content = li.text;
            lines.push_back({li.id, std::move(tl)});
        }
        for (const Node& ch : node.children) collect(ch);
    }
};

bool gt_order(const GroundTruthEntry& a, const GroundTruthEntry& b) {
    if (a.bbox.top != b.bbox.top) return a.bbox.top < b.bbox.top;
    if (a.bbox.left != b.bbox.left) return a.bbox.left < b.bbox.left;
    return a.id < b.id;
}

}  // namespace

std::string abstract_id(const std::string& instance_id) {
    size_t pos = instance_id.find('#');
    return pos == std::string::npos ? instance_id : instance_id.substr(0, pos);
}

int content_length(const AbstractPage& page, const DeviceProfile& profile) {
    Ctx c = make_ctx(profile);
    return layout_page(c, page).content_length;
}

int max_scroll_offset(const AbstractPage& page, const DeviceProfile& profile) {
    int viewport = page.horizontal ? profile.width : profile.height;
    return std::max(0, content_length(page, profile) - viewport);
}

RenderOutput render(const AbstractPage& page, const DeviceState& state) {
    const DeviceProfile& prof = state.profile;
    Ctx c = make_ctx(prof);
    PageLayout layout = layout_page(c, page);

    int viewport = page.horizontal ? prof.width : prof.height;
    int max_off = std::max(0, layout.content_length - viewport);
    int off = std::clamp(state.scroll_offset, 0, max_off);

    RenderOutput out;
    out.content_length = layout.content_length;
    out.clamped_offset = off;
    out.frame = PixelImage(prof.width, prof.height, c.pal->bg.r, c.pal->bg.g, c.pal->bg.b);

    Painter p;
    p.img = &out.frame;
    p.off_x = page.horizontal ? off : 0;
    p.off_y = page.horizontal ? 0 : off;
    paint_tree(p, c, layout.roots, state.volatile_nonce);

    GtCollector gt{p.off_x, p.off_y, prof.width, prof.height, {}, {}};
    for (const Node& n : layout.roots) gt.collect(n);

    // Text lines become Text ground truth; container boxes absorb the
    // content of lines fully inside them, mirroring the merge rule.
    for (auto& [iid, tl] : gt.lines) {
        GroundTruthEntry e;
        e.id = iid;
        e.bbox = tl.bbox;
        e.kind = detect::WidgetKind::Text;
        e.text = tl.content;
        gt.boxes.push_back(std::move(e));
        out.text_lines.push_back(tl);
    }
    for (GroundTruthEntry& e : gt.boxes) {
        if (e.kind != detect::WidgetKind::NonText) continue;
        std::vector<const detect::TextLine*> inside;
        for (auto& [iid, tl] : gt.lines)
            if (e.bbox.contains(tl.bbox)) inside.push_back(&tl);
        if (inside.empty()) continue;
        std::sort(inside.begin(), inside.end(),
                  [](const detect::TextLine* a, const detect::TextLine* b) {
                      if (a->bbox.top != b->bbox.top) return a->bbox.top < b->bbox.top;
                      return a->bbox.left < b->bbox.left;
                  });
        std::string joined;
        for (const detect::TextLine* t : inside) {
            if (!joined.empty()) joined += ' ';
            joined += t->content;
        }
        e.text = joined;
    }
    std::sort(gt.boxes.begin(), gt.boxes.end(), gt_order);
    std::sort(out.text_lines.begin(), out.text_lines.end(),
              [](const detect::TextLine& a, const detect::TextLine& b) {
                  if (a.bbox.top != b.bbox.top) return a.bbox.top < b.bbox.top;
                  return a.bbox.left < b.bbox.left;
              });
    out.ground_truth = std::move(gt.boxes);
    return out;
}

std::vector<ContentEntry> content_layout(const AbstractPage& page,
                                         const DeviceProfile& profile) {
    Ctx c = make_ctx(profile);
    PageLayout layout = layout_page(c, page);
    std::vector<ContentEntry> out;
    auto walk = [&](auto&& self, const Node& n) -> void {
        if (n.visual)
            out.push_back({n.w->id, n.box, detect::WidgetKind::NonText, std::nullopt});
        for (const LineItem& li : n.lines)
            out.push_back({li.id, li.box, detect::WidgetKind::Text, li.text});
        for (const Node& ch : n.children) self(self, ch);
    };
    for (const Node& n : layout.roots) walk(walk, n);
    return out;
}

PhotoOutput compose_photo(const PixelImage& frame, std::uint64_t noise_seed) {
    std::mt19937_64 rng(noise_seed);
    int mx = static_cast<int>(std::min(frame.width, frame.height) * 0.07) +
             static_cast<int>(rng() % 9);
    int my = static_cast<int>(std::min(frame.width, frame.height) * 0.07) +
             static_cast<int>(rng() % 9);

    PhotoOutput out;
    out.photo = PixelImage(frame.width + 2 * mx, frame.height + 2 * my, 0, 0, 0);
    out.screen_box = {my, mx, my + frame.height, mx + frame.width};
    for (int y = 0; y < frame.height; ++y) {
        std::copy(frame.data.begin() + frame.index(0, y),
                  frame.data.begin() + frame.index(0, y) + static_cast<size_t>(frame.width) * 3,
                  out.photo.data.begin() + out.photo.index(mx, my + y));
    }

    // sigma = 2/255, truncated at +-3 sigma so the pad stays clean.
    std::normal_distribution<double> noise(0.0, 2.0);
    for (std::uint8_t& v : out.photo.data) {
        double n = std::clamp(noise(rng), -6.0, 6.0);
        v = static_cast<std::uint8_t>(std::clamp(static_cast<int>(std::lround(v + n)), 0, 255));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in device table
// ---------------------------------------------------------------------------

const std::vector<DeviceProfile>& list_profiles() {
    static const std::vector<DeviceProfile> profiles = {
        {"D1", "8'' fold-out", 2200, 2480, 414.0, Skin::SkinA, DeviceKind::Virtual},
        {"D2", "6.5'' phone", 1600, 720, 270.0, Skin::SkinA, DeviceKind::PhysicalPhoto},
        {"D3", "6'' phone", 1080, 2340, 430.0, Skin::SkinA, DeviceKind::Virtual},
        {"D4", "5'' phone", 1080, 1920, 441.0, Skin::SkinA, DeviceKind::Virtual},
        {"D5", "3.7'' phone", 480, 800, 252.0, Skin::SkinA, DeviceKind::Virtual},
        {"D6", "6.7'' phone", 2778, 1284, 457.0, Skin::SkinB, DeviceKind::PhysicalPhoto},
        {"D7", "5.5'' phone", 1920, 1080, 400.0, Skin::SkinB, DeviceKind::PhysicalPhoto},
        {"D8", "10.2'' tablet", 2778, 1284, 300.0, Skin::SkinB, DeviceKind::PhysicalPhoto},
    };
    return profiles;
}

const DeviceProfile& profile_by_name(const std::string& name) {
    for (const DeviceProfile& p : list_profiles())
        if (p.name == name) return p;
    throw ConfigError("unknown device profile: " + name);
}

}  // namespace guireplay::farm
