#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/device.hpp"
#include "guireplay/replay.hpp"
#include "guireplay/serialize.hpp"

namespace guireplay::evalkit {

using serialize::json;

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

struct CorpusManifest {
    std::vector<std::string> page_files;
    std::vector<std::string> profiles;
    std::vector<std::pair<std::string, std::string>> pair_plan;  // (source, target)
    std::uint64_t seed = 0;
};

CorpusManifest load_manifest(const std::string& path);
json manifest_to_json(const CorpusManifest& m);
CorpusManifest manifest_from_json(const json& j);

/// Renders every page on every profile at offset 0 plus one seeded offset,
/// writing frames, ground truth (the correspondence tables) and the text
/// registry. Byte-identical for identical (manifest, seed).
void gen_corpus(const CorpusManifest& manifest, const std::string& out_dir);

struct CorpusEntry {
    std::string page;
    std::string profile;
    int offset = 0;
    std::string frame_file;  // relative to corpus dir
    std::string digest;
    std::vector<farm::GroundTruthEntry> ground_truth;
};

struct Corpus {
    std::string dir;
    CorpusManifest manifest;
    std::vector<CorpusEntry> entries;
    std::shared_ptr<detect::TextRegistry> registry;

    const CorpusEntry* find(const std::string& page, const std::string& profile,
                            int offset) const;
    PixelImage load_frame(const CorpusEntry& e) const;
};

Corpus load_corpus(const std::string& dir);

// ---------------------------------------------------------------------------
// Accuracy fragments
// ---------------------------------------------------------------------------

struct Tally {
    long long correct = 0;
    long long total = 0;
    bool defined() const { return total > 0; }
    double accuracy() const { return total > 0 ? double(correct) / double(total) : 0.0; }
};

struct DetectionFidelity {
    long long total_gt = 0;
    long long detected_iou90 = 0;
    long long miskind = 0;
    double rate() const { return total_gt ? double(detected_iou90) / double(total_gt) : 0.0; }
};

/// GT-vs-detected comparison over the corpus entries (Virtual profiles only
/// unless include_photo is set).
DetectionFidelity eval_detection(const Corpus& corpus, const detect::DetectConfig& dcfg,
                                 bool include_photo = false);

struct MatchingReport {
    std::map<std::string, Tally> widget_matrix;  // "Ds->Dt"
    std::map<std::string, Tally> baseline_rows;  // method -> tally on baseline pair
    std::string baseline_pair;
    std::vector<json> logs;  // one JSON object per evaluated widget
};

MatchingReport eval_matching(const Corpus& corpus, const serialize::EngineConfig& cfg,
                             std::uint64_t seed, int text_per_page = 25,
                             int nontext_per_page = 25, int baseline_cap = 40);

/// Recomputes every aggregate from the raw logs; true when they agree exactly.
bool verify_matching_report(const MatchingReport& report);

struct GuiMatchingReport {
    Tally classification;             // corresponding vs non-corresponding
    std::map<std::string, Tally> per_pair;
    std::vector<json> logs;
};

GuiMatchingReport eval_gui_matching(const Corpus& corpus, const serialize::EngineConfig& cfg,
                                    std::uint64_t seed, int min_pairs = 100);

// ---------------------------------------------------------------------------
// Replay suite
// ---------------------------------------------------------------------------

struct ScriptStep {
    farm::ActionType type = farm::ActionType::Click;
    std::string target;        // ground-truth abstract id (widget-dependent)
    double distance_frac = 0;  // of the source viewport (widget-independent)
    std::string text;
    int duration_ms = 0;
};

struct TestCase {
    std::string name;
    std::string source_device;
    std::string start_page;
    int correction_budget = 1;
    bool scroll_expansion = false;  // authored flag: some target must scroll
    std::vector<ScriptStep> steps;
};

std::vector<TestCase> load_test_cases(const std::string& path);

struct StepOutcome {
    replay::ReplayStatus status = replay::ReplayStatus::WidgetNotFound;
    bool correct = false;
    bool corrected = false;
    int scroll_steps = 0;
    std::optional<Point> executed_point;
    double gui_fraction = 0.0;
};

struct DeviceCaseResult {
    std::string device;
    std::vector<StepOutcome> steps;
    int failures = 0;  // pre-correction incorrect steps
};

struct TestCaseReport {
    std::string name;
    bool scroll_expansion = false;
    bool expansion_seen = false;     // some device needed >= 1 scroll step
    bool expansion_located = true;   // every expansion ended in a correct replay
    std::vector<DeviceCaseResult> devices;

    bool pass_zero_correction() const;
    bool pass_one_correction() const;
};

struct ReplayOpts {
    bool corrections = true;
    bool check_correctness = true;   // needs in-process simulated targets
    bool use_adapter = false;        // proxy targets through serve-device children
    std::string adapter_binary;
    std::string pages_path;          // page file handed to adapter children
    std::string registry_manifest;   // shared digest->lines manifest file
    std::uint64_t seed = 0;
};

TestCaseReport replay_test_case(const TestCase& tc, const farm::PageSet& pages,
                                const std::vector<std::string>& target_profiles,
                                const serialize::EngineConfig& cfg, const ReplayOpts& opts);

struct SuiteReport {
    std::vector<TestCaseReport> cases;
    Tally dependent_actions;    // per (device, step), pre-correction
    Tally independent_actions;
    Tally cases_zero;
    Tally cases_one;
    long long expansion_cases = 0;
    long long expansion_located = 0;

    json to_json() const;
};

SuiteReport run_replay_suite(const std::vector<TestCase>& cases, const farm::PageSet& pages,
                             const std::vector<std::string>& profiles,
                             const serialize::EngineConfig& cfg, const ReplayOpts& opts);

/// Combined report document with all accuracy fragments.
json eval_report_json(const MatchingReport& m, const GuiMatchingReport& g,
                      const SuiteReport& s, const DetectionFidelity& d);

}  // namespace guireplay::evalkit
