#include "guireplay/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "guireplay/digest.hpp"
#include "guireplay/imaging.hpp"
#include "guireplay/png_io.hpp"
#include "guireplay/wire.hpp"

namespace guireplay::evalkit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Manifest and corpus
// ---------------------------------------------------------------------------

CorpusManifest manifest_from_json(const json& j) {
    CorpusManifest m;
    for (const auto& p : j.at("pages")) m.page_files.push_back(p.get<std::string>());
    for (const auto& p : j.at("profiles")) m.profiles.push_back(p.get<std::string>());
    if (j.contains("pair_plan"))
        for (const auto& pr : j.at("pair_plan"))
            m.pair_plan.emplace_back(pr[0].get<std::string>(), pr[1].get<std::string>());
    m.seed = j.value("seed", std::uint64_t{0});
    for (const std::string& p : m.profiles) farm::profile_by_name(p);  // ConfigError early
    return m;
}

json manifest_to_json(const CorpusManifest& m) {
    json j;
    j["pages"] = m.page_files;
    j["profiles"] = m.profiles;
    json pairs = json::array();
    for (const auto& [s, t] : m.pair_plan) pairs.push_back(json::array({s, t}));
    j["pair_plan"] = pairs;
    j["seed"] = m.seed;
    return j;
}

CorpusManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("manifest: cannot open " + path);
    json j;
    in >> j;
    return manifest_from_json(j);
}

namespace {

farm::PageSet load_all_pages(const std::vector<std::string>& files) {
    farm::PageSet all;
    for (const std::string& f : files) {
        farm::PageSet one = farm::load_pages(f);
        for (auto& [id, p] : one.pages) {
            if (all.pages.count(id)) throw ConfigError("duplicate page id across files: " + id);
            all.pages[id] = std::move(p);
        }
    }
    if (all.pages.empty()) throw ConfigError("no pages in manifest");
    return all;
}

json gt_to_json(const farm::GroundTruthEntry& e) {
    json j;
    j["id"] = e.id;
    j["bbox"] = serialize::bbox_to_json(e.bbox);
    j["kind"] = e.kind == detect::WidgetKind::Text ? "Text" : "NonText";
    if (e.text) j["text"] = *e.text;
    return j;
}

farm::GroundTruthEntry gt_from_json(const json& j) {
    farm::GroundTruthEntry e;
    e.id = j.at("id").get<std::string>();
    e.bbox = serialize::bbox_from_json(j.at("bbox"));
    e.kind = j.at("kind").get<std::string>() == "Text" ? detect::WidgetKind::Text
                                                       : detect::WidgetKind::NonText;
    if (j.contains("text")) e.text = j.at("text").get<std::string>();
    return e;
}

detect::DetectConfig detect_config_for(const farm::DeviceProfile& prof,
                                       const detect::DetectConfig& base) {
    detect::DetectConfig c = base;
    c.dpi = prof.dpi;
    return c;
}

}  // namespace

void gen_corpus(const CorpusManifest& manifest, const std::string& out_dir) {
    farm::PageSet pages = load_all_pages(manifest.page_files);
    fs::create_directories(fs::path(out_dir) / "frames");

    auto registry = std::make_shared<detect::TextRegistry>();
    json index = json::array();

    for (const std::string& prof_name : manifest.profiles) {
        const farm::DeviceProfile& prof = farm::profile_by_name(prof_name);
        for (const auto& [page_id, page] : pages.pages) {
            int max_off = farm::max_scroll_offset(page, prof);
            std::vector<int> offsets{0};
            if (max_off > 0) {
                std::uint64_t s =
                    digest::mix_seed(manifest.seed, page_id + "|" + prof_name, 1);
                offsets.push_back(1 + static_cast<int>(s % static_cast<std::uint64_t>(max_off)));
            }
            for (int off : offsets) {
                farm::DeviceState st{prof, page_id, off, manifest.seed, 0, ""};
                farm::RenderOutput ro = farm::render(page, st);

                PixelImage to_save = ro.frame;
                std::string digest_hex;
                if (prof.kind == farm::DeviceKind::PhysicalPhoto) {
                    std::uint64_t nseed = digest::mix_seed(
                        manifest.seed, page_id + "@" + std::to_string(ro.clamped_offset), 0);
                    farm::PhotoOutput photo = farm::compose_photo(ro.frame, nseed);
                    to_save = photo.photo;
                    PixelImage region = imaging::crop(photo.photo, photo.screen_box);
                    digest_hex = digest::image_digest(region);
                } else {
                    digest_hex = digest::image_digest(ro.frame);
                }
                registry->put(digest_hex, ro.text_lines);

                std::string fname = prof_name + "_" + page_id + "_" +
                                    std::to_string(ro.clamped_offset) + ".png";
                pngio::write_png((fs::path(out_dir) / "frames" / fname).string(), to_save);

                json entry;
                entry["page"] = page_id;
                entry["profile"] = prof_name;
                entry["offset"] = ro.clamped_offset;
                entry["frame"] = "frames/" + fname;
                entry["digest"] = digest_hex;
                json gts = json::array();
                for (const auto& g : ro.ground_truth) gts.push_back(gt_to_json(g));
                entry["ground_truth"] = gts;
                index.push_back(std::move(entry));
            }
        }
    }

    registry->save_manifest((fs::path(out_dir) / "registry.json").string());
    std::ofstream idx((fs::path(out_dir) / "index.json").string(), std::ios::trunc);
    idx << index.dump(2) << "\n";
    std::ofstream mf((fs::path(out_dir) / "manifest.json").string(), std::ios::trunc);
    mf << manifest_to_json(manifest).dump(2) << "\n";
}

const CorpusEntry* Corpus::find(const std::string& page, const std::string& profile,
                                int offset) const {
    for (const CorpusEntry& e : entries)
        if (e.page == page && e.profile == profile && e.offset == offset) return &e;
    return nullptr;
}

PixelImage Corpus::load_frame(const CorpusEntry& e) const {
    return pngio::read_png((fs::path(dir) / e.frame_file).string());
}

Corpus load_corpus(const std::string& dir) {
    Corpus c;
    c.dir = dir;
    c.manifest = load_manifest((fs::path(dir) / "manifest.json").string());
    c.registry = std::make_shared<detect::TextRegistry>(
        (fs::path(dir) / "registry.json").string());
    std::ifstream in((fs::path(dir) / "index.json").string());
    if (!in.good()) throw IoError("load_corpus: missing index.json in " + dir);
    json index;
    in >> index;
    for (const json& ej : index) {
        CorpusEntry e;
        e.page = ej.at("page").get<std::string>();
        e.profile = ej.at("profile").get<std::string>();
        e.offset = ej.at("offset").get<int>();
        e.frame_file = ej.at("frame").get<std::string>();
        e.digest = ej.at("digest").get<std::string>();
        for (const json& gj : ej.at("ground_truth")) e.ground_truth.push_back(gt_from_json(gj));
        c.entries.push_back(std::move(e));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Detection fidelity
// ---------------------------------------------------------------------------

namespace {

/// Builds a snapshot for a corpus entry (extracting the screen region for
/// photo profiles first).
profile::GuiSnapshot snapshot_for_entry(const Corpus& corpus, const CorpusEntry& e,
                                        const detect::DetectConfig& base) {
    const farm::DeviceProfile& prof = farm::profile_by_name(e.profile);
    detect::DetectConfig dcfg = detect_config_for(prof, base);
    PixelImage img = corpus.load_frame(e);
    if (prof.kind == farm::DeviceKind::PhysicalPhoto)
        img = detect::extract_screen_region(img, dcfg).screen_image;
    detect::FixtureTextProvider provider(corpus.registry);
    return profile::detect_gui(img, provider, dcfg,
                               {prof.name, prof.width, prof.height, prof.dpi,
                                prof.kind == farm::DeviceKind::PhysicalPhoto},
                               e.offset);
}

/// GT index -> detected index at IoU >= 0.8, greedy by IoU.
std::vector<int> map_gt_to_detected(const std::vector<farm::GroundTruthEntry>& gt,
                                    const profile::GuiSnapshot& snap, double min_iou = 0.8) {
    struct Cand {
        double iou;
        int gi, di;
    };
    std::vector<Cand> cands;
    for (size_t gi = 0; gi < gt.size(); ++gi)
        for (size_t di = 0; di < snap.size(); ++di) {
            double iou = bbox_iou(gt[gi].bbox, snap.widgets[di].bbox);
            if (iou >= min_iou) cands.push_back({iou, static_cast<int>(gi), static_cast<int>(di)});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.gi != b.gi) return a.gi < b.gi;
        return a.di < b.di;
    });
    std::vector<int> out(gt.size(), -1);
    std::vector<char> used(snap.size(), 0);
    for (const Cand& c : cands) {
        if (out[c.gi] >= 0 || used[c.di]) continue;
        out[c.gi] = c.di;
        used[c.di] = 1;
    }
    return out;
}

}  // namespace

DetectionFidelity eval_detection(const Corpus& corpus, const detect::DetectConfig& dcfg,
                                 bool include_photo) {
    DetectionFidelity out;
    for (const CorpusEntry& e : corpus.entries) {
        const farm::DeviceProfile& prof = farm::profile_by_name(e.profile);
        if (!include_photo && prof.kind == farm::DeviceKind::PhysicalPhoto) continue;
        profile::GuiSnapshot snap = snapshot_for_entry(corpus, e, dcfg);
        std::vector<int> m = map_gt_to_detected(e.ground_truth, snap, 0.9);
        for (size_t gi = 0; gi < e.ground_truth.size(); ++gi) {
            ++out.total_gt;
            if (m[gi] < 0) continue;
            ++out.detected_iou90;
            if (snap.widgets[m[gi]].kind != e.ground_truth[gi].kind) ++out.miskind;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Widget matching evaluation
// ---------------------------------------------------------------------------

namespace {

struct PairContext {
    const profile::GuiSnapshot* src = nullptr;
    const profile::GuiSnapshot* tgt = nullptr;
    const CorpusEntry* src_entry = nullptr;
    const CorpusEntry* tgt_entry = nullptr;
    std::vector<int> src_gt_to_det, tgt_gt_to_det;
    std::map<int, std::string> tgt_det_to_abs;  // detected idx -> abstract id
};

std::string det_abstract_id(const PairContext& ctx, int det_idx) {
    auto it = ctx.tgt_det_to_abs.find(det_idx);
    return it == ctx.tgt_det_to_abs.end() ? std::string() : it->second;
}

/// Sampled source widget: a GT instance with a detected counterpart whose
/// abstract id is also present on the target.
struct Sample {
    std::string abs_id;
    int src_gt = -1;
    int src_det = -1;
    bool is_text = false;
};

std::vector<Sample> build_samples(const PairContext& ctx, std::uint64_t seed, int text_cap,
                                  int nontext_cap) {
    std::set<std::string> tgt_ids;
    for (const auto& g : ctx.tgt_entry->ground_truth) tgt_ids.insert(farm::abstract_id(g.id));

    std::vector<Sample> text, nontext;
    std::set<std::string> seen;
    const auto& gt = ctx.src_entry->ground_truth;
    for (size_t gi = 0; gi < gt.size(); ++gi) {
        std::string abs = farm::abstract_id(gt[gi].id);
        if (seen.count(abs) || !tgt_ids.count(abs)) continue;
        if (ctx.src_gt_to_det[gi] < 0) continue;
        seen.insert(abs);
        Sample s{abs, static_cast<int>(gi), ctx.src_gt_to_det[gi],
                 gt[gi].kind == detect::WidgetKind::Text};
        (s.is_text ? text : nontext).push_back(std::move(s));
    }
    std::mt19937_64 rng(seed);
    std::shuffle(text.begin(), text.end(), rng);
    std::shuffle(nontext.begin(), nontext.end(), rng);
    if (static_cast<int>(text.size()) > text_cap) text.resize(text_cap);
    if (static_cast<int>(nontext.size()) > nontext_cap) nontext.resize(nontext_cap);
    std::vector<Sample> out = std::move(text);
    out.insert(out.end(), nontext.begin(), nontext.end());
    return out;
}

// Single-modal baselines.

std::optional<int> text_only_match(int ws_idx, const profile::GuiSnapshot& src,
                                   const profile::GuiSnapshot& tgt) {
    const auto& ws = src.profiles[ws_idx];
    if (!ws.text || match::normalize_text(*ws.text).empty()) return std::nullopt;
    std::optional<int> best;
    size_t best_len = 0;
    for (size_t j = 0; j < tgt.size(); ++j) {
        const auto& wt = tgt.profiles[j];
        if (!wt.text) continue;
        std::string nt = match::normalize_text(*wt.text);
        if (nt.empty()) continue;
        if (!match::text_contains(*ws.text, *wt.text) &&
            !match::text_contains(*wt.text, *ws.text))
            continue;
        if (!best || nt.size() > best_len) {
            best = static_cast<int>(j);
            best_len = nt.size();
        }
    }
    return best;
}

std::optional<int> embedding_only_match(int ws_idx, const profile::GuiSnapshot& src,
                                        const profile::GuiSnapshot& tgt) {
    const auto& ws = src.profiles[ws_idx];
    std::optional<int> best;
    double best_sim = -2.0;
    for (size_t j = 0; j < tgt.size(); ++j) {
        double sim =
            imaging::cosine_similarity(ws.clip_embedding, tgt.profiles[j].clip_embedding);
        if (sim > best_sim) {
            best_sim = sim;
            best = static_cast<int>(j);
        }
    }
    return best;
}

bool template_match_correct(const PairContext& ctx, const Sample& s) {
    const PixelImage& clip = ctx.src->profiles[s.src_det].clip;
    if (clip.width > ctx.tgt->image.width || clip.height > ctx.tgt->image.height)
        return false;  // native-scale template cannot even be placed
    Bbox found = match::template_match_baseline(clip, ctx.tgt->image);
    Point center{(found.left + found.right) / 2, (found.top + found.bottom) / 2};
    for (const auto& g : ctx.tgt_entry->ground_truth)
        if (farm::abstract_id(g.id) == s.abs_id && g.bbox.contains_point(center.x, center.y))
            return true;
    return false;
}

}  // namespace

MatchingReport eval_matching(const Corpus& corpus, const serialize::EngineConfig& cfg,
                             std::uint64_t seed, int text_per_page, int nontext_per_page,
                             int baseline_cap) {
    MatchingReport report;

    // Baseline pair: the largest screen-area gap in the plan.
    double best_gap = -1.0;
    for (const auto& [s, t] : corpus.manifest.pair_plan) {
        const auto& ps = farm::profile_by_name(s);
        const auto& pt = farm::profile_by_name(t);
        double as = double(ps.width) * ps.height, at = double(pt.width) * pt.height;
        double gap = std::max(as, at) / std::max(1.0, std::min(as, at));
        if (gap > best_gap) {
            best_gap = gap;
            report.baseline_pair = s + "->" + t;
        }
    }

    std::vector<std::string> page_ids;
    {
        std::set<std::string> ids;
        for (const auto& e : corpus.entries) ids.insert(e.page);
        page_ids.assign(ids.begin(), ids.end());
    }
    std::set<std::string> plan_profiles;
    for (const auto& [s, t] : corpus.manifest.pair_plan) {
        plan_profiles.insert(s);
        plan_profiles.insert(t);
    }

    int baseline_done = 0;
    // Page-major: each (page, profile) frame is detected once and shared by
    // every pair that needs it.
    for (const std::string& page_id : page_ids) {
        std::map<std::string, std::shared_ptr<profile::GuiSnapshot>> snaps;
        std::map<std::string, const CorpusEntry*> page_entries;
        for (const std::string& prof : plan_profiles) {
            const CorpusEntry* e = corpus.find(page_id, prof, 0);
            if (!e) continue;
            page_entries[prof] = e;
            snaps[prof] = std::make_shared<profile::GuiSnapshot>(
                snapshot_for_entry(corpus, *e, cfg.detect));
        }
        for (const auto& [src_name, tgt_name] : corpus.manifest.pair_plan) {
            std::string pair_key = src_name + "->" + tgt_name;
            bool is_baseline_pair = pair_key == report.baseline_pair;
            if (!snaps.count(src_name) || !snaps.count(tgt_name)) continue;
            const CorpusEntry* se = page_entries[src_name];
            const CorpusEntry* te = page_entries[tgt_name];
            PairContext ctx;
            ctx.src_entry = se;
            ctx.tgt_entry = te;
            ctx.src = snaps[src_name].get();
            ctx.tgt = snaps[tgt_name].get();
            ctx.src_gt_to_det = map_gt_to_detected(se->ground_truth, *ctx.src);
            ctx.tgt_gt_to_det = map_gt_to_detected(te->ground_truth, *ctx.tgt);
            for (size_t gi = 0; gi < te->ground_truth.size(); ++gi)
                if (ctx.tgt_gt_to_det[gi] >= 0)
                    ctx.tgt_det_to_abs[ctx.tgt_gt_to_det[gi]] =
                        farm::abstract_id(te->ground_truth[gi].id);
            std::vector<Sample> samples =
                build_samples(ctx, digest::mix_seed(seed, pair_key + page_id, 3),
                              text_per_page, nontext_per_page);

            for (const Sample& s : samples) {
                match::MatchResult res =
                    match::match_widget(s.src_det, *ctx.src, *ctx.tgt, cfg.match);
                std::string matched_abs =
                    res.matched ? det_abstract_id(ctx, *res.matched) : std::string();
                bool correct = !matched_abs.empty() && matched_abs == s.abs_id;
                report.widget_matrix[pair_key].total++;
                if (correct) report.widget_matrix[pair_key].correct++;

                bool in_baseline = is_baseline_pair && baseline_done < baseline_cap;

                json log;
                log["pair"] = pair_key;
                log["page"] = page_id;
                log["source_id"] = s.abs_id;
                log["kind"] = s.is_text ? "Text" : "NonText";
                log["stage"] = match::stage_name(res.stage);
                log["candidates_considered"] = res.candidates_considered;
                log["matched_id"] = matched_abs;
                log["similarity"] = res.similarity;
                log["correct"] = correct;
                log["method"] = "multimodal";
                log["baseline"] = in_baseline;
                report.logs.push_back(std::move(log));

                if (in_baseline) {
                    ++baseline_done;
                    auto score = [&](const char* method, std::optional<int> m) {
                        std::string abs = m ? det_abstract_id(ctx, *m) : std::string();
                        bool ok = !abs.empty() && abs == s.abs_id;
                        report.baseline_rows[method].total++;
                        if (ok) report.baseline_rows[method].correct++;
                        json l;
                        l["pair"] = pair_key;
                        l["page"] = page_id;
                        l["source_id"] = s.abs_id;
                        l["method"] = method;
                        l["matched_id"] = abs;
                        l["correct"] = ok;
                        report.logs.push_back(std::move(l));
                    };
                    report.baseline_rows["multimodal"].total++;
                    if (correct) report.baseline_rows["multimodal"].correct++;
                    score("text_only", text_only_match(s.src_det, *ctx.src, *ctx.tgt));
                    score("embedding_only", embedding_only_match(s.src_det, *ctx.src, *ctx.tgt));
                    bool tm = template_match_correct(ctx, s);
                    report.baseline_rows["template_matching"].total++;
                    if (tm) report.baseline_rows["template_matching"].correct++;
                    json l;
                    l["pair"] = pair_key;
                    l["page"] = page_id;
                    l["source_id"] = s.abs_id;
                    l["method"] = "template_matching";
                    l["correct"] = tm;
                    report.logs.push_back(std::move(l));
                }
            }
        }
    }
    return report;
}

bool verify_matching_report(const MatchingReport& report) {
    std::map<std::string, Tally> matrix, check_rows;
    for (const json& l : report.logs) {
        std::string method = l.value("method", std::string("multimodal"));
        bool correct = l.value("correct", false);
        if (method == "multimodal" && l.contains("stage")) {
            auto& t = matrix[l.at("pair").get<std::string>()];
            t.total++;
            if (correct) t.correct++;
            if (l.value("baseline", false)) {
                auto& bt = check_rows["multimodal"];
                bt.total++;
                if (correct) bt.correct++;
            }
        } else if (method == "text_only" || method == "embedding_only" ||
                   method == "template_matching") {
            auto& t = check_rows[method];
            t.total++;
            if (correct) t.correct++;
        }
    }
    for (const auto& [k, t] : report.widget_matrix) {
        auto it = matrix.find(k);
        if (it == matrix.end() || it->second.total != t.total ||
            it->second.correct != t.correct)
            return false;
    }
    for (const char* m : {"multimodal", "text_only", "embedding_only", "template_matching"}) {
        auto a = report.baseline_rows.find(m);
        auto b = check_rows.find(m);
        bool ae = a == report.baseline_rows.end() || a->second.total == 0;
        bool be = b == check_rows.end() || b->second.total == 0;
        if (ae != be) return false;
        if (!ae && (a->second.total != b->second.total || a->second.correct != b->second.correct))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// GUI matching evaluation
// ---------------------------------------------------------------------------

GuiMatchingReport eval_gui_matching(const Corpus& corpus, const serialize::EngineConfig& cfg,
                                    std::uint64_t seed, int min_pairs) {
    GuiMatchingReport report;
    std::vector<std::string> page_ids;
    for (const auto& e : corpus.entries)
        if (std::find(page_ids.begin(), page_ids.end(), e.page) == page_ids.end())
            page_ids.push_back(e.page);
    std::sort(page_ids.begin(), page_ids.end());

    struct Planned {
        const CorpusEntry* small;
        const CorpusEntry* large;
        bool expect;
    };
    std::vector<Planned> plan;
    std::mt19937_64 rng(digest::mix_seed(seed, "guipairs", 5));

    auto area = [](const std::string& name) {
        const auto& p = farm::profile_by_name(name);
        return static_cast<long long>(p.width) * p.height;
    };

    size_t page_cursor = 0;
    while (static_cast<int>(plan.size()) < min_pairs) {
        for (const auto& [a, b] : corpus.manifest.pair_plan) {
            if (static_cast<int>(plan.size()) >= min_pairs) break;
            std::string small = area(a) <= area(b) ? a : b;
            std::string large = area(a) <= area(b) ? b : a;
            const std::string& page = page_ids[page_cursor % page_ids.size()];
            ++page_cursor;
            const CorpusEntry* s0 = corpus.find(page, small, 0);
            const CorpusEntry* l0 = corpus.find(page, large, 0);
            if (s0 && l0) plan.push_back({s0, l0, true});
            if (page_ids.size() >= 2) {
                const std::string& other =
                    page_ids[(page_cursor + rng() % (page_ids.size() - 1)) % page_ids.size()];
                const CorpusEntry* lx = corpus.find(other, large, 0);
                if (s0 && lx && other != page) plan.push_back({s0, lx, false});
            }
        }
        if (page_cursor > page_ids.size() * corpus.manifest.pair_plan.size() * 4) break;
    }

    for (const Planned& p : plan) {
        profile::GuiSnapshot small = snapshot_for_entry(corpus, *p.small, cfg.detect);
        profile::GuiSnapshot large = snapshot_for_entry(corpus, *p.large, cfg.detect);
        match::GuiMatch gm = match::match_gui_cross_device(small, large, cfg.match);
        bool correct = gm.matched == p.expect;
        std::string key = p.small->profile + "->" + p.large->profile;
        report.classification.total++;
        if (correct) report.classification.correct++;
        report.per_pair[key].total++;
        if (correct) report.per_pair[key].correct++;
        json l;
        l["small"] = json{{"page", p.small->page}, {"profile", p.small->profile}};
        l["large"] = json{{"page", p.large->page}, {"profile", p.large->profile}};
        l["expect"] = p.expect;
        l["matched"] = gm.matched;
        l["fraction"] = gm.fraction;
        l["correct"] = correct;
        report.logs.push_back(std::move(l));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Replay suite
// ---------------------------------------------------------------------------

std::vector<TestCase> load_test_cases(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("test cases: cannot open " + path);
    json doc;
    in >> doc;
    std::vector<TestCase> cases;
    for (const json& cj : doc.at("cases")) {
        TestCase tc;
        tc.name = cj.at("name").get<std::string>();
        tc.source_device = cj.at("source_device").get<std::string>();
        tc.start_page = cj.at("start_page").get<std::string>();
        tc.correction_budget = cj.value("correction_budget", 1);
        tc.scroll_expansion = cj.value("scroll_expansion", false);
        for (const json& sj : cj.at("steps")) {
            ScriptStep s;
            s.type = farm::action_from_name(sj.at("type").get<std::string>());
            s.target = sj.value("target", std::string());
            s.distance_frac = sj.value("distance_frac", 0.0);
            s.text = sj.value("text", std::string());
            s.duration_ms = sj.value("duration_ms", 0);
            if (farm::widget_dependent(s.type) && s.target.empty())
                throw ConfigError("test case " + tc.name + ": widget step requires target");
            tc.steps.push_back(std::move(s));
        }
        if (tc.steps.empty()) throw ConfigError("test case " + tc.name + ": no steps");
        cases.push_back(std::move(tc));
    }
    return cases;
}

bool TestCaseReport::pass_zero_correction() const {
    for (const DeviceCaseResult& d : devices)
        if (d.failures > 0) return false;
    return true;
}

bool TestCaseReport::pass_one_correction() const {
    for (const DeviceCaseResult& d : devices)
        if (d.failures > 1) return false;
    return true;
}

namespace {

struct TargetRig {
    std::string profile_name;
    std::unique_ptr<farm::SimulatedDevice> sim;          // in-process state (and oracle)
    std::unique_ptr<farm::DeviceHandle> adapter;         // optional proxied handle
    std::unique_ptr<replay::VisionDevice> vision;
};

std::set<std::string> abs_id_set(const std::vector<farm::GroundTruthEntry>& gt) {
    std::set<std::string> out;
    for (const auto& e : gt) out.insert(farm::abstract_id(e.id));
    return out;
}

/// Picks the ground-truth box for a scripted target: widget boxes win over
/// their text-line instances.
std::optional<Bbox> gt_box_for(const std::vector<farm::GroundTruthEntry>& gt,
                               const std::string& abs_id) {
    const farm::GroundTruthEntry* best = nullptr;
    for (const auto& e : gt) {
        if (farm::abstract_id(e.id) != abs_id) continue;
        if (!best) {
            best = &e;
            continue;
        }
        bool e_nontext = e.kind == detect::WidgetKind::NonText;
        bool b_nontext = best->kind == detect::WidgetKind::NonText;
        if (e_nontext && !b_nontext) best = &e;
    }
    if (!best) return std::nullopt;
    return best->bbox;
}

double offset_fraction(const farm::SimulatedDevice& dev) {
    int span = dev.content_len() - dev.viewport_len();
    if (span <= 0) return 0.0;
    return static_cast<double>(dev.state().scroll_offset) / span;
}

}  // namespace

TestCaseReport replay_test_case(const TestCase& tc, const farm::PageSet& pages,
                                const std::vector<std::string>& target_profiles,
                                const serialize::EngineConfig& cfg, const ReplayOpts& opts) {
    TestCaseReport report;
    report.name = tc.name;
    report.scroll_expansion = tc.scroll_expansion;

    auto registry = std::make_shared<detect::TextRegistry>(opts.registry_manifest);
    detect::FixtureTextProvider provider(registry);
    auto cache = std::make_shared<replay::SnapshotCache>();

    const farm::DeviceProfile& src_prof = farm::profile_by_name(tc.source_device);
    farm::SimulatedDevice source(
        &pages, farm::DeviceState{src_prof, tc.start_page, 0, opts.seed, 0, ""}, registry);
    replay::VisionDevice src_vision(source, provider,
                                    detect_config_for(src_prof, cfg.detect), cache);

    std::vector<TargetRig> rigs;
    for (const std::string& name : target_profiles) {
        if (name == tc.source_device) continue;
        const farm::DeviceProfile& prof = farm::profile_by_name(name);
        TargetRig rig;
        rig.profile_name = name;
        rig.sim = std::make_unique<farm::SimulatedDevice>(
            &pages, farm::DeviceState{prof, tc.start_page, 0, opts.seed, 0, ""}, registry);
        if (opts.use_adapter) {
            wire::AdapterEndpoint ep;
            ep.argv = {opts.adapter_binary,
                       "serve-device",
                       "--pages",
                       opts.pages_path,
                       "--profile",
                       name,
                       "--page",
                       tc.start_page,
                       "--seed",
                       std::to_string(opts.seed),
                       "--registry",
                       opts.registry_manifest};
            ep.photo_source = prof.kind == farm::DeviceKind::PhysicalPhoto;
            ep.tag = {prof.name, prof.width, prof.height, prof.dpi, ep.photo_source};
            rig.adapter = wire::external_device_session(ep);
            rig.vision = std::make_unique<replay::VisionDevice>(
                *rig.adapter, provider, detect_config_for(prof, cfg.detect), cache);
        } else {
            rig.vision = std::make_unique<replay::VisionDevice>(
                *rig.sim, provider, detect_config_for(prof, cfg.detect), cache);
        }
        report.devices.push_back({name, {}, 0});
        rigs.push_back(std::move(rig));
    }

    for (const ScriptStep& step : tc.steps) {
        // --- record on the source -------------------------------------------------
        replay::ActionRecord rec;
        std::set<std::string> src_after_ids;
        if (farm::widget_dependent(step.type)) {
            auto gt = source.current_ground_truth();
            auto box = gt_box_for(gt, step.target);
            if (!box) {
                // The tester scrolls the source until the widget is on screen.
                auto content = farm::content_layout(pages.require(source.state().current_page),
                                                    src_prof);
                std::optional<Bbox> cbox;
                for (const auto& ce : content)
                    if (farm::abstract_id(ce.id) == step.target &&
                        ce.kind == detect::WidgetKind::NonText) {
                        cbox = ce.box;
                        break;
                    }
                if (!cbox)
                    for (const auto& ce : content)
                        if (farm::abstract_id(ce.id) == step.target) {
                            cbox = ce.box;
                            break;
                        }
                if (!cbox)
                    throw ConfigError("test case " + tc.name + ": target " + step.target +
                                      " not on page " + source.state().current_page);
                bool horizontal = pages.require(source.state().current_page).horizontal;
                int center = horizontal ? (cbox->left + cbox->right) / 2
                                        : (cbox->top + cbox->bottom) / 2;
                source.force_scroll(center - source.viewport_len() / 2);
                gt = source.current_ground_truth();
                box = gt_box_for(gt, step.target);
                if (!box)
                    throw ConfigError("test case " + tc.name + ": target " + step.target +
                                      " cannot be brought on screen");
            }
            Point p{(box->left + box->right) / 2, (box->top + box->bottom) / 2};
            rec = replay::record_scripted_action(src_vision, step.type, p, 0, step.text,
                                                 step.duration_ms);
        } else {
            int dist = static_cast<int>(std::lround(step.distance_frac *
                                                    source.viewport_len()));
            rec = replay::record_scripted_action(src_vision, step.type, {0, 0}, dist);
            src_after_ids = abs_id_set(source.current_ground_truth());
        }

        // --- replay on every target ----------------------------------------------
        for (size_t ri = 0; ri < rigs.size(); ++ri) {
            TargetRig& rig = rigs[ri];
            DeviceCaseResult& result = report.devices[ri];

            replay::ReplayOutcome outcome = replay::replay_action(rec, *rig.vision, cfg.match);

            StepOutcome so;
            so.status = outcome.status;
            so.scroll_steps = outcome.scroll_steps_used;
            so.executed_point = outcome.executed_point;
            so.gui_fraction = outcome.gui_fraction;

            if (opts.check_correctness && !opts.use_adapter) {
                if (farm::widget_dependent(step.type)) {
                    if (outcome.status == replay::ReplayStatus::Replayed &&
                        outcome.executed_point) {
                        for (const auto& e : rig.sim->gt_at_last_execute()) {
                            if (farm::abstract_id(e.id) == step.target &&
                                e.bbox.contains_point(outcome.executed_point->x,
                                                      outcome.executed_point->y)) {
                                so.correct = true;
                                break;
                            }
                        }
                    }
                } else {
                    if (outcome.status == replay::ReplayStatus::Replayed) {
                        std::set<std::string> tgt_ids =
                            abs_id_set(rig.sim->current_ground_truth());
                        long long ta = static_cast<long long>(rig.sim->state().profile.width) *
                                       rig.sim->state().profile.height;
                        long long sa = static_cast<long long>(src_prof.width) * src_prof.height;
                        const auto& small = ta <= sa ? tgt_ids : src_after_ids;
                        const auto& large = ta <= sa ? src_after_ids : tgt_ids;
                        so.correct = std::includes(large.begin(), large.end(), small.begin(),
                                                   small.end());
                    }
                }

                if (tc.scroll_expansion && farm::widget_dependent(step.type) &&
                    so.scroll_steps > 0) {
                    report.expansion_seen = true;
                    if (!so.correct) report.expansion_located = false;
                }

                if (!so.correct) {
                    result.failures++;
                    if (opts.corrections && result.failures <= tc.correction_budget) {
                        // Simulated manual correction: align the target with
                        // the source's post-step state.
                        so.corrected = true;
                        rig.sim->reset(source.state().current_page, 0);
                        double frac = offset_fraction(source);
                        int span = rig.sim->content_len() - rig.sim->viewport_len();
                        if (span > 0)
                            rig.sim->force_scroll(
                                static_cast<int>(std::lround(frac * span)));
                    }
                }
            } else {
                so.correct = outcome.status == replay::ReplayStatus::Replayed;
            }
            result.steps.push_back(std::move(so));
        }
    }
    return report;
}

SuiteReport run_replay_suite(const std::vector<TestCase>& cases, const farm::PageSet& pages,
                             const std::vector<std::string>& profiles,
                             const serialize::EngineConfig& cfg, const ReplayOpts& opts) {
    SuiteReport suite;
    for (const TestCase& tc : cases) {
        TestCaseReport r = replay_test_case(tc, pages, profiles, cfg, opts);
        suite.cases_zero.total++;
        if (r.pass_zero_correction()) suite.cases_zero.correct++;
        suite.cases_one.total++;
        if (r.pass_one_correction()) suite.cases_one.correct++;
        if (r.scroll_expansion) {
            suite.expansion_cases++;
            if (r.expansion_seen && r.expansion_located) suite.expansion_located++;
        }
        for (const DeviceCaseResult& d : r.devices) {
            for (size_t si = 0; si < d.steps.size(); ++si) {
                bool dependent = farm::widget_dependent(tc.steps[si].type);
                Tally& t = dependent ? suite.dependent_actions : suite.independent_actions;
                t.total++;
                if (d.steps[si].correct) t.correct++;
            }
        }
        suite.cases.push_back(std::move(r));
    }
    return suite;
}

json SuiteReport::to_json() const {
    json j;
    j["action_accuracy"] = json{
        {"widget_dependent",
         json{{"correct", dependent_actions.correct}, {"total", dependent_actions.total},
              {"accuracy", dependent_actions.accuracy()}}},
        {"widget_independent",
         json{{"correct", independent_actions.correct}, {"total", independent_actions.total},
              {"accuracy", independent_actions.accuracy()}}}};
    j["testcase_accuracy"] =
        json{{"zero_correction", json{{"correct", cases_zero.correct},
                                      {"total", cases_zero.total},
                                      {"accuracy", cases_zero.accuracy()}}},
             {"one_correction", json{{"correct", cases_one.correct},
                                     {"total", cases_one.total},
                                     {"accuracy", cases_one.accuracy()}}}};
    j["scroll_expansion"] =
        json{{"cases", expansion_cases}, {"located", expansion_located}};
    json cases_json = json::array();
    for (const TestCaseReport& r : cases) {
        json cj;
        cj["name"] = r.name;
        cj["pass_zero_correction"] = r.pass_zero_correction();
        cj["pass_one_correction"] = r.pass_one_correction();
        json devices = json::array();
        for (const DeviceCaseResult& d : r.devices) {
            json dj;
            dj["device"] = d.device;
            dj["failures"] = d.failures;
            json steps = json::array();
            for (const StepOutcome& s : d.steps) {
                json sj;
                sj["status"] = replay::status_name(s.status);
                sj["correct"] = s.correct;
                sj["corrected"] = s.corrected;
                sj["scroll_steps"] = s.scroll_steps;
                if (s.executed_point)
                    sj["executed_point"] = json::array({s.executed_point->x, s.executed_point->y});
                steps.push_back(std::move(sj));
            }
            dj["steps"] = steps;
            devices.push_back(std::move(dj));
        }
        cj["devices"] = devices;
        cases_json.push_back(std::move(cj));
    }
    j["cases"] = cases_json;
    return j;
}

json eval_report_json(const MatchingReport& m, const GuiMatchingReport& g,
                      const SuiteReport& s, const DetectionFidelity& d) {
    json j = s.to_json();
    json matrix;
    for (const auto& [k, t] : m.widget_matrix)
        matrix[k] = json{{"correct", t.correct}, {"total", t.total}, {"accuracy", t.accuracy()}};
    j["widget_match_accuracy"] = matrix;
    json rows;
    for (const auto& [k, t] : m.baseline_rows)
        rows[k] = json{{"correct", t.correct}, {"total", t.total}, {"accuracy", t.accuracy()}};
    j["baseline_rows"] = rows;
    j["baseline_pair"] = m.baseline_pair;
    json gui;
    for (const auto& [k, t] : g.per_pair)
        gui[k] = json{{"correct", t.correct}, {"total", t.total}, {"accuracy", t.accuracy()}};
    j["gui_match_accuracy"] = gui;
    j["gui_match_overall"] = json{{"correct", g.classification.correct},
                                  {"total", g.classification.total},
                                  {"accuracy", g.classification.accuracy()}};
    j["detection_fidelity"] = json{{"total_gt", d.total_gt},
                                   {"detected_iou90", d.detected_iou90},
                                   {"miskind", d.miskind},
                                   {"rate", d.rate()}};
    return j;
}

}  // namespace guireplay::evalkit
