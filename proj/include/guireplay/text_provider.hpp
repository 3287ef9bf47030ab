#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "guireplay/types.hpp"

namespace guireplay::detect {

/// One OCR-style text line: a box plus its single-line content.
struct TextLine {
    Bbox bbox;
    std::string content;

    bool operator==(const TextLine& o) const { return bbox == o.bbox && content == o.content; }
};

/// Behavioural contract: given an image, return its text lines. Providers
/// must be deterministic for identical input bytes and line-granular (no
/// paragraph merging).
class TextProvider {
public:
    virtual ~TextProvider() = default;
    virtual std::vector<TextLine> lines(const PixelImage& img) const = 0;
};

/// digest -> lines mapping shared between the device farm (writer) and the
/// fixture provider (reader). Thread-safe; optionally mirrored to a JSON
/// manifest file so a child-process farm can feed an in-process detector.
class TextRegistry {
public:
    TextRegistry() = default;
    explicit TextRegistry(std::string manifest_path);

    void put(const std::string& image_digest, std::vector<TextLine> lines);
    std::optional<std::vector<TextLine>> get(const std::string& image_digest) const;

    /// Re-reads the manifest file, merging new entries. No-op without a path.
    void reload() const;

    static std::map<std::string, std::vector<TextLine>> load_manifest(const std::string& path);
    void save_manifest(const std::string& path) const;

private:
    mutable std::mutex mu_;
    mutable std::map<std::string, std::vector<TextLine>> entries_;
    std::string manifest_path_;
};

/// Seeded perturbation applied by the fixture provider for robustness tests.
struct TextNoise {
    int jitter_px = 0;          // each box edge moved by a value in [-jitter, +jitter]
    double substitution_rate = 0.0;  // per-character replacement probability
    std::uint64_t seed = 0;
};

/// Fixture-backed provider: looks lines up by image digest. Unknown digest
/// throws TextProviderError.
class FixtureTextProvider : public TextProvider {
public:
    explicit FixtureTextProvider(std::shared_ptr<const TextRegistry> registry,
                                 TextNoise noise = {});
    std::vector<TextLine> lines(const PixelImage& img) const override;

private:
    std::shared_ptr<const TextRegistry> registry_;
    TextNoise noise_;
};

/// External OCR adapter: runs a child process per image, feeding PNG bytes on
/// stdin and parsing a JSON array of {top,left,bottom,right,content} from
/// stdout. Nonzero exit or malformed output throws TextProviderError.
class SubprocessTextProvider : public TextProvider {
public:
    explicit SubprocessTextProvider(std::vector<std::string> argv, int timeout_ms = 15000);
    std::vector<TextLine> lines(const PixelImage& img) const override;

private:
    std::vector<std::string> argv_;
    int timeout_ms_;
};

}  // namespace guireplay::detect
