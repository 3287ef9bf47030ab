#pragma once

#include <json.hpp>

#include <string>

#include "guireplay/detect.hpp"
#include "guireplay/match.hpp"
#include "guireplay/profile.hpp"
#include "guireplay/replay.hpp"

namespace guireplay::serialize {

using json = nlohmann::json;

json bbox_to_json(const Bbox& b);
Bbox bbox_from_json(const json& j);

/// Snapshot document: boxes, kinds, text, embeddings, neighbor indices; the
/// image itself lives in a digest-named PNG sidecar.
json snapshot_to_json(const profile::GuiSnapshot& s);
profile::GuiSnapshot snapshot_from_json(const json& j, PixelImage image);

/// Writes <digest>.png next to the document and returns the document.
json save_snapshot(const profile::GuiSnapshot& s, const std::string& dir);
profile::GuiSnapshot load_snapshot(const json& j, const std::string& dir);

json record_to_json(const replay::ActionRecord& r, const std::string& dir);
replay::ActionRecord record_from_json(const json& j, const std::string& dir);

json detect_config_to_json(const detect::DetectConfig& c);
detect::DetectConfig detect_config_from_json(const json& j);
json match_config_to_json(const match::MatchConfig& c);
match::MatchConfig match_config_from_json(const json& j);

struct EngineConfig {
    detect::DetectConfig detect;
    match::MatchConfig match;
};
EngineConfig load_engine_config(const std::string& path);
json engine_config_to_json(const EngineConfig& c);

json match_log_to_json(const replay::MatchLogEntry& e);

}  // namespace guireplay::serialize
