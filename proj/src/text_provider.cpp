#include "guireplay/text_provider.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>

#include "guireplay/digest.hpp"
#include "guireplay/png_io.hpp"
#include "guireplay/proc.hpp"

namespace guireplay::detect {

using nlohmann::json;

namespace {

json line_to_json(const TextLine& l) {
    return json{{"top", l.bbox.top},
                {"left", l.bbox.left},
                {"bottom", l.bbox.bottom},
                {"right", l.bbox.right},
                {"content", l.content}};
}

TextLine line_from_json(const json& j) {
    TextLine l;
    l.bbox = {j.at("top").get<int>(), j.at("left").get<int>(), j.at("bottom").get<int>(),
              j.at("right").get<int>()};
    l.content = j.at("content").get<std::string>();
    return l;
}

}  // namespace

TextRegistry::TextRegistry(std::string manifest_path) : manifest_path_(std::move(manifest_path)) {
    std::ifstream probe(manifest_path_);
    if (probe.good()) entries_ = load_manifest(manifest_path_);
}

void TextRegistry::put(const std::string& image_digest, std::vector<TextLine> lines) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!manifest_path_.empty()) {
        // Merge entries other writers (adapter children) appended meanwhile.
        std::ifstream probe(manifest_path_);
        if (probe.good()) {
            probe.close();
            for (auto& [k, v] : load_manifest(manifest_path_))
                if (!entries_.count(k)) entries_[k] = std::move(v);
        }
    }
    entries_[image_digest] = std::move(lines);
    if (!manifest_path_.empty()) {
        json j = json::object();
        for (const auto& [digest, ls] : entries_) {
            json arr = json::array();
            for (const auto& l : ls) arr.push_back(line_to_json(l));
            j[digest] = arr;
        }
        std::ofstream out(manifest_path_ + ".tmp", std::ios::trunc);
        out << j.dump();
        out.close();
        std::rename((manifest_path_ + ".tmp").c_str(), manifest_path_.c_str());
    }
}

std::optional<std::vector<TextLine>> TextRegistry::get(const std::string& image_digest) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = entries_.find(image_digest);
        if (it != entries_.end()) return it->second;
    }
    reload();
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(image_digest);
    if (it != entries_.end()) return it->second;
    return std::nullopt;
}

void TextRegistry::reload() const {
    if (manifest_path_.empty()) return;
    std::ifstream probe(manifest_path_);
    if (!probe.good()) return;
    probe.close();
    auto loaded = load_manifest(manifest_path_);
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& [k, v] : loaded) entries_[k] = std::move(v);
}

std::map<std::string, std::vector<TextLine>> TextRegistry::load_manifest(
    const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw IoError("TextRegistry: cannot open manifest " + path);
    json j;
    in >> j;
    std::map<std::string, std::vector<TextLine>> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::vector<TextLine> lines;
        for (const auto& lj : it.value()) lines.push_back(line_from_json(lj));
        out[it.key()] = std::move(lines);
    }
    return out;
}

void TextRegistry::save_manifest(const std::string& path) const {
    std::lock_guard<std::mutex> lock(mu_);
    json j = json::object();
    for (const auto& [digest, ls] : entries_) {
        json arr = json::array();
        for (const auto& l : ls) arr.push_back(line_to_json(l));
        j[digest] = arr;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out.good()) throw IoError("TextRegistry: cannot write manifest " + path);
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

FixtureTextProvider::FixtureTextProvider(std::shared_ptr<const TextRegistry> registry,
                                         TextNoise noise)
    : registry_(std::move(registry)), noise_(noise) {
    if (!registry_) throw ContractError("FixtureTextProvider: null registry");
}

std::vector<TextLine> FixtureTextProvider::lines(const PixelImage& img) const {
    auto found = registry_->get(digest::image_digest(img));
    if (!found)
        throw TextProviderError("FixtureTextProvider: unknown image digest");
    std::vector<TextLine> out = *found;

    if (noise_.jitter_px > 0 || noise_.substitution_rate > 0.0) {
        std::mt19937_64 rng(noise_.seed);
        std::uniform_int_distribution<int> jitter(-noise_.jitter_px, noise_.jitter_px);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<int> letter(0, 25);
        for (auto& l : out) {
            if (noise_.jitter_px > 0) {
                Bbox b = l.bbox;
                b.top = std::clamp(b.top + jitter(rng), 0, img.height - 1);
                b.left = std::clamp(b.left + jitter(rng), 0, img.width - 1);
                b.bottom = std::clamp(b.bottom + jitter(rng), b.top + 1, img.height);
                b.right = std::clamp(b.right + jitter(rng), b.left + 1, img.width);
                l.bbox = b;
            }
            if (noise_.substitution_rate > 0.0) {
                for (char& c : l.content) {
                    if (c != ' ' && unit(rng) < noise_.substitution_rate)
                        c = static_cast<char>('A' + letter(rng));
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

SubprocessTextProvider::SubprocessTextProvider(std::vector<std::string> argv, int timeout_ms)
    : argv_(std::move(argv)), timeout_ms_(timeout_ms) {
    if (argv_.empty()) throw ContractError("SubprocessTextProvider: empty command");
}

std::vector<TextLine> SubprocessTextProvider::lines(const PixelImage& img) const {
    std::vector<std::uint8_t> png = pngio::encode_png(img);
    std::vector<std::uint8_t> raw;
    int exit_code;
    try {
        proc::ChildProcess child(argv_);
        child.write_all(png.data(), png.size());
        child.close_stdin();
        raw = child.read_to_end(timeout_ms_);
        exit_code = child.wait();
    } catch (const DeviceIOError& e) {
        throw TextProviderError(std::string("ocr adapter: ") + e.what());
    }
    if (exit_code != 0)
        throw TextProviderError("ocr adapter: exit code " + std::to_string(exit_code));
    try {
        json j = json::parse(raw.begin(), raw.end());
        std::vector<TextLine> out;
        for (const auto& lj : j) out.push_back(line_from_json(lj));
        return out;
    } catch (const json::exception& e) {
        throw TextProviderError(std::string("ocr adapter: bad output: ") + e.what());
    }
}

}  // namespace guireplay::detect
