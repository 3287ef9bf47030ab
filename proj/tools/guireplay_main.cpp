#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "guireplay/device.hpp"
#include "guireplay/digest.hpp"
#include "guireplay/evalkit.hpp"
#include "guireplay/imaging.hpp"
#include "guireplay/page.hpp"
#include "guireplay/png_io.hpp"
#include "guireplay/profile.hpp"
#include "guireplay/render.hpp"
#include "guireplay/replay.hpp"
#include "guireplay/serialize.hpp"
#include "guireplay/wire.hpp"

namespace fs = std::filesystem;
using namespace guireplay;
using serialize::json;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out = "out";
    std::vector<std::string> profiles;
    double gui_match_fraction = -1.0;

    serialize::EngineConfig engine() const {
        serialize::EngineConfig cfg;
        if (!config_path.empty()) cfg = serialize::load_engine_config(config_path);
        if (gui_match_fraction > 0) cfg.match.gui_match_fraction = gui_match_fraction;
        return cfg;
    }
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void draw_box(PixelImage& img, const Bbox& b, std::uint8_t r, std::uint8_t g, std::uint8_t bl) {
    auto put = [&](int x, int y) {
        if (x >= 0 && y >= 0 && x < img.width && y < img.height) img.set(x, y, r, g, bl);
    };
    for (int x = b.left; x < b.right; ++x) {
        put(x, b.top);
        put(x, b.bottom - 1);
    }
    for (int y = b.top; y < b.bottom; ++y) {
        put(b.left, y);
        put(b.right - 1, y);
    }
}

profile::GuiSnapshot snapshot_from_png(const std::string& path,
                                       const std::shared_ptr<detect::TextRegistry>& registry,
                                       const serialize::EngineConfig& cfg, bool photo,
                                       double dpi) {
    PixelImage img = pngio::read_png(path);
    detect::DetectConfig dcfg = cfg.detect;
    if (dpi > 0) dcfg.dpi = dpi;
    if (photo) img = detect::extract_screen_region(img, dcfg).screen_image;
    detect::FixtureTextProvider provider(registry);
    return profile::detect_gui(img, provider, dcfg);
}

void write_text(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path().empty()
                               ? "."
                               : fs::path(path).parent_path().string());
    std::ofstream out(path, std::ios::trunc);
    if (!out.good()) throw IoError("cannot write " + path);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"guireplay: vision-only GUI record-and-replay with a simulated device farm"};
    app.require_subcommand(1);

    GlobalOpts g;
    std::string profiles_csv;
    app.add_option("--config", g.config_path, "engine config JSON (detect + match sections)");
    app.add_option("--seed", g.seed, "global deterministic seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--profiles", profiles_csv, "comma-separated device profile names");
    app.add_option("--gui-match-fraction", g.gui_match_fraction,
                   "override gui_match_fraction");

    // --- gen-pages -----------------------------------------------------------
    auto* gen_pages = app.add_subcommand("gen-pages", "write a procedural page corpus file");
    int page_count = 24;
    std::string pages_out = "pages.json";
    gen_pages->add_option("--count", page_count, "number of pages");
    gen_pages->add_option("--file", pages_out, "output page file");

    // --- gen-corpus ----------------------------------------------------------
    auto* gen_corpus_cmd = app.add_subcommand("gen-corpus", "render frames + ground truth");
    std::string manifest_path;
    std::string corpus_pages_csv;
    gen_corpus_cmd->add_option("--manifest", manifest_path, "corpus manifest JSON");
    gen_corpus_cmd->add_option("--pages", corpus_pages_csv,
                               "comma-separated page files (instead of --manifest)");

    // --- detect ---------------------------------------------------------------
    auto* detect_cmd = app.add_subcommand("detect", "detect widgets on one image");
    std::string detect_image, detect_registry;
    bool detect_photo = false, detect_overlay = false;
    double detect_dpi = 0;
    detect_cmd->add_option("--image", detect_image, "input PNG")->required();
    detect_cmd->add_option("--registry", detect_registry, "text fixture manifest JSON");
    detect_cmd->add_flag("--photo", detect_photo, "input is a camera photo");
    detect_cmd->add_flag("--overlay", detect_overlay, "write annotated PNG");
    detect_cmd->add_option("--dpi", detect_dpi, "device dpi for detector scaling");

    // --- match-widget ----------------------------------------------------------
    auto* mw = app.add_subcommand("match-widget", "match one widget across two images");
    std::string mw_source, mw_target, mw_registry;
    int mw_x = -1, mw_y = -1, mw_index = -1;
    double mw_dpi_s = 0, mw_dpi_t = 0;
    mw->add_option("--source", mw_source)->required();
    mw->add_option("--target", mw_target)->required();
    mw->add_option("--registry", mw_registry);
    mw->add_option("--x", mw_x);
    mw->add_option("--y", mw_y);
    mw->add_option("--index", mw_index);
    mw->add_option("--source-dpi", mw_dpi_s);
    mw->add_option("--target-dpi", mw_dpi_t);

    // --- match-gui --------------------------------------------------------------
    auto* mg = app.add_subcommand("match-gui", "cross-device whole-GUI match");
    std::string mg_small, mg_large, mg_registry;
    mg->add_option("--small", mg_small, "smaller-screen PNG")->required();
    mg->add_option("--large", mg_large, "larger-screen PNG")->required();
    mg->add_option("--registry", mg_registry);

    // --- record -------------------------------------------------------------------
    auto* rec_cmd = app.add_subcommand("record", "record a script on a simulated device");
    std::string rec_pages, rec_profile = "D3", rec_page = "home", rec_script;
    rec_cmd->add_option("--pages", rec_pages)->required();
    rec_cmd->add_option("--profile", rec_profile);
    rec_cmd->add_option("--page", rec_page);
    rec_cmd->add_option("--script", rec_script, "steps JSON file")->required();

    // --- replay ---------------------------------------------------------------------
    auto* replay_cmd = app.add_subcommand("replay", "replay test cases across profiles");
    std::string replay_pages, replay_cases;
    bool replay_adapter = false;
    std::string replay_adapter_bin;
    replay_cmd->add_option("--pages", replay_pages)->required();
    replay_cmd->add_option("--cases", replay_cases)->required();
    replay_cmd->add_flag("--adapter", replay_adapter, "proxy targets over the wire protocol");
    replay_cmd->add_option("--adapter-binary", replay_adapter_bin,
                           "binary for serve-device children (default: this binary)");

    // --- eval -----------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "corpus matching + GUI matching evaluation");
    std::string eval_corpus;
    eval_cmd->add_option("--corpus", eval_corpus, "corpus directory")->required();

    // --- serve-device -----------------------------------------------------------------
    auto* serve = app.add_subcommand("serve-device", "serve one simulated device over stdio");
    std::string serve_pages, serve_profile, serve_page, serve_registry;
    serve->add_option("--pages", serve_pages)->required();
    serve->add_option("--profile", serve_profile)->required();
    serve->add_option("--page", serve_page)->required();
    serve->add_option("--registry", serve_registry, "shared text manifest file");

    // --- ocr-fixture ------------------------------------------------------------------
    auto* ocr = app.add_subcommand("ocr-fixture",
                                   "external OCR adapter: PNG on stdin, text lines on stdout");
    std::string ocr_manifest;
    ocr->add_option("--manifest", ocr_manifest, "digest -> lines manifest")->required();

    CLI11_PARSE(app, argc, argv);
    if (!profiles_csv.empty()) g.profiles = split_list(profiles_csv);

    try {
        serialize::EngineConfig cfg = g.engine();

        if (*gen_pages) {
            farm::PageSet set = farm::generate_pages(g.seed, page_count);
            farm::save_pages(set, pages_out);
            std::cout << "wrote " << set.pages.size() << " pages to " << pages_out << "\n";
            return 0;
        }

        if (*gen_corpus_cmd) {
            evalkit::CorpusManifest m;
            if (!manifest_path.empty()) {
                m = evalkit::load_manifest(manifest_path);
            } else {
                if (corpus_pages_csv.empty())
                    throw ConfigError("gen-corpus: need --manifest or --pages");
                m.page_files = split_list(corpus_pages_csv);
                m.profiles = g.profiles;
                if (m.profiles.empty())
                    for (const auto& p : farm::list_profiles()) m.profiles.push_back(p.name);
                for (size_t i = 0; i + 1 < m.profiles.size(); ++i)
                    m.pair_plan.emplace_back(m.profiles[i], m.profiles[i + 1]);
                m.seed = g.seed;
            }
            evalkit::gen_corpus(m, g.out);
            std::cout << "corpus written to " << g.out << "\n";
            return 0;
        }

        if (*detect_cmd) {
            auto registry = detect_registry.empty()
                                ? std::make_shared<detect::TextRegistry>()
                                : std::make_shared<detect::TextRegistry>(detect_registry);
            profile::GuiSnapshot snap =
                snapshot_from_png(detect_image, registry, cfg, detect_photo, detect_dpi);
            fs::create_directories(g.out);
            json doc = serialize::save_snapshot(snap, g.out);
            write_text(g.out + "/snapshot.json", doc.dump(2) + "\n");
            if (detect_overlay) {
                PixelImage annotated = snap.image;
                for (const auto& w : snap.widgets)
                    draw_box(annotated, w.bbox,
                             w.kind == detect::WidgetKind::Text ? 46 : 200,
                             w.kind == detect::WidgetKind::Text ? 125 : 40, 50);
                pngio::write_png(g.out + "/overlay.png", annotated);
            }
            std::cout << snap.size() << " widgets -> " << g.out << "/snapshot.json\n";
            return 0;
        }

        if (*mw) {
            auto registry = mw_registry.empty()
                                ? std::make_shared<detect::TextRegistry>()
                                : std::make_shared<detect::TextRegistry>(mw_registry);
            profile::GuiSnapshot src =
                snapshot_from_png(mw_source, registry, cfg, false, mw_dpi_s);
            profile::GuiSnapshot tgt =
                snapshot_from_png(mw_target, registry, cfg, false, mw_dpi_t);
            int idx = mw_index;
            if (idx < 0) {
                if (mw_x < 0 || mw_y < 0)
                    throw ConfigError("match-widget: need --index or --x/--y");
                long long best_area = 0;
                for (size_t i = 0; i < src.size(); ++i)
                    if (src.widgets[i].bbox.contains_point(mw_x, mw_y) &&
                        (idx < 0 || src.widgets[i].bbox.area() < best_area)) {
                        idx = static_cast<int>(i);
                        best_area = src.widgets[i].bbox.area();
                    }
                if (idx < 0) throw ConfigError("match-widget: point hits no widget");
            }
            match::MatchResult res = match::match_widget(idx, src, tgt, cfg.match);
            json out;
            out["source_widget"] = idx;
            out["stage"] = match::stage_name(res.stage);
            out["candidates_considered"] = res.candidates_considered;
            out["similarity"] = res.similarity;
            if (res.matched) {
                out["matched_widget"] = *res.matched;
                out["matched_bbox"] = serialize::bbox_to_json(tgt.widgets[*res.matched].bbox);
            } else {
                out["matched_widget"] = nullptr;
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*mg) {
            auto registry = mg_registry.empty()
                                ? std::make_shared<detect::TextRegistry>()
                                : std::make_shared<detect::TextRegistry>(mg_registry);
            profile::GuiSnapshot small = snapshot_from_png(mg_small, registry, cfg, false, 0);
            profile::GuiSnapshot large = snapshot_from_png(mg_large, registry, cfg, false, 0);
            match::GuiMatch gm = match::match_gui_cross_device(small, large, cfg.match);
            json out{{"matched", gm.matched}, {"fraction", gm.fraction}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*rec_cmd) {
            farm::PageSet pages = farm::load_pages(rec_pages);
            auto registry = std::make_shared<detect::TextRegistry>();
            farm::SimulatedDevice dev(
                &pages,
                farm::DeviceState{farm::profile_by_name(rec_profile), rec_page, 0, g.seed, 0,
                                  ""},
                registry);
            detect::FixtureTextProvider provider(registry);
            detect::DetectConfig dcfg = cfg.detect;
            dcfg.dpi = farm::profile_by_name(rec_profile).dpi;
            replay::VisionDevice vision(dev, provider, dcfg);

            std::ifstream in(rec_script);
            if (!in.good()) throw ConfigError("record: cannot open script " + rec_script);
            json script;
            in >> script;
            fs::create_directories(g.out);
            json records = json::array();
            for (const json& sj : script.at("steps")) {
                farm::ActionType type = farm::action_from_name(sj.at("type").get<std::string>());
                Point p{sj.value("x", 0), sj.value("y", 0)};
                int dist = sj.value("distance", 0);
                replay::ActionRecord rec = replay::record_scripted_action(
                    vision, type, p, dist, sj.value("text", std::string()),
                    sj.value("duration_ms", 0));
                records.push_back(serialize::record_to_json(rec, g.out));
            }
            write_text(g.out + "/recording.json", records.dump(2) + "\n");
            std::cout << records.size() << " actions recorded -> " << g.out << "\n";
            return 0;
        }

        if (*replay_cmd) {
            farm::PageSet pages = farm::load_pages(replay_pages);
            std::vector<evalkit::TestCase> cases = evalkit::load_test_cases(replay_cases);
            std::vector<std::string> profiles = g.profiles;
            if (profiles.empty()) profiles = {"D1", "D3", "D4", "D5"};
            fs::create_directories(g.out);

            evalkit::ReplayOpts opts;
            opts.seed = g.seed;
            opts.use_adapter = replay_adapter;
            if (replay_adapter) {
                opts.adapter_binary = replay_adapter_bin.empty()
                                          ? fs::canonical("/proc/self/exe").string()
                                          : replay_adapter_bin;
                opts.pages_path = replay_pages;
                opts.registry_manifest = (fs::path(g.out) / "registry.json").string();
                opts.check_correctness = false;
                opts.corrections = false;
            }
            evalkit::SuiteReport suite =
                evalkit::run_replay_suite(cases, pages, profiles, cfg, opts);
            write_text(g.out + "/replay_report.json", suite.to_json().dump(2) + "\n");
            std::cout << "0-correction " << suite.cases_zero.correct << "/"
                      << suite.cases_zero.total << ", 1-correction "
                      << suite.cases_one.correct << "/" << suite.cases_one.total << " -> "
                      << g.out << "/replay_report.json\n";
            return 0;
        }

        if (*eval_cmd) {
            evalkit::Corpus corpus = evalkit::load_corpus(eval_corpus);
            evalkit::MatchingReport m = evalkit::eval_matching(corpus, cfg, g.seed);
            evalkit::GuiMatchingReport gm = evalkit::eval_gui_matching(corpus, cfg, g.seed);
            evalkit::DetectionFidelity d = evalkit::eval_detection(corpus, cfg.detect);
            fs::create_directories(g.out);
            std::string logs;
            for (const json& l : m.logs) logs += l.dump() + "\n";
            for (const json& l : gm.logs) logs += l.dump() + "\n";
            write_text(g.out + "/match_logs.jsonl", logs);
            evalkit::SuiteReport empty_suite;
            write_text(g.out + "/eval_report.json",
                       evalkit::eval_report_json(m, gm, empty_suite, d).dump(2) + "\n");
            if (!evalkit::verify_matching_report(m))
                throw Error("eval: aggregate/log recomputation mismatch");
            std::cout << "eval report -> " << g.out << "/eval_report.json\n";
            return 0;
        }

        if (*serve) {
            farm::PageSet pages = farm::load_pages(serve_pages);
            auto registry = serve_registry.empty()
                                ? std::make_shared<detect::TextRegistry>()
                                : std::make_shared<detect::TextRegistry>(serve_registry);
            farm::SimulatedDevice dev(
                &pages,
                farm::DeviceState{farm::profile_by_name(serve_profile), serve_page, 0, g.seed,
                                  0, ""},
                registry);
            wire::serve_device(dev, stdin, stdout);
            return 0;
        }

        if (*ocr) {
            // Read all PNG bytes from stdin, answer with the fixture lines.
            std::vector<std::uint8_t> bytes;
            std::uint8_t buf[65536];
            size_t n;
            while ((n = std::fread(buf, 1, sizeof(buf), stdin)) > 0)
                bytes.insert(bytes.end(), buf, buf + n);
            PixelImage img = pngio::decode_png(bytes);
            detect::TextRegistry registry(ocr_manifest);
            auto lines = registry.get(digest::image_digest(img));
            if (!lines) {
                std::cerr << "ocr-fixture: unknown image digest\n";
                return 2;
            }
            json arr = json::array();
            for (const auto& l : *lines)
                arr.push_back(json{{"top", l.bbox.top},
                                   {"left", l.bbox.left},
                                   {"bottom", l.bbox.bottom},
                                   {"right", l.bbox.right},
                                   {"content", l.content}});
            std::cout << arr.dump() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
