#pragma once

// Visual and textual guidance: text-to-image, image editing, captioning and
// completion suggestions, each behind a port with a seeded mock and an HTTP
// client. Also the mock embedders used in place of CLIP/DINO.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "vecdraw/metrics.hpp"
#include "vecdraw/net.hpp"
#include "vecdraw/raster.hpp"

namespace vecdraw {

struct Provenance {
    std::string provider;
    std::string operation;
    std::uint64_t seed = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

template <class T>
struct Guided {
    T value;
    Provenance provenance;
};

struct GuidanceBundle {
    std::optional<Guided<RasterImage>> image_complete;   // G_ic
    std::optional<Guided<RasterImage>> image_edited;     // G_ie
    std::optional<Guided<RasterImage>> image_partial;    // G_ip
    std::optional<Guided<std::string>> text_complete;    // G_tc
    std::optional<Guided<std::string>> text_suggestion;  // G_tp

    bool empty() const {
        return !image_complete && !image_edited && !image_partial && !text_complete && !text_suggestion;
    }
};

std::string text_to_image_prompt(const std::string& description);
std::string edit_image_prompt(const std::string& description);
std::string caption_prompt();
std::string suggestion_prompt(const std::string& description);

inline constexpr std::size_t kMaxCaptionWords = 60;
inline constexpr const char* kBlankCaption = "blank white canvas";

/// Keeps the first `max_words` whitespace-separated words.
std::string truncate_words(const std::string& text, std::size_t max_words);

class GuidancePort {
public:
    virtual ~GuidancePort() = default;
    virtual RasterImage text_to_image(const std::string& text) = 0;
    virtual RasterImage edit_image(const RasterImage& image, const std::string& text) = 0;
    virtual std::string caption_image(const RasterImage& image) = 0;
    virtual std::string suggest_completion(const std::string& text, const RasterImage& partial_image) = 0;
    virtual Provenance provenance(const std::string& operation) const = 0;
};

/// Seeded procedural backends; every call is a pure function of its inputs
/// and cfg.seed.
class MockGuidance : public GuidancePort {
public:
    explicit MockGuidance(std::uint64_t seed = 0, int resolution = kDefaultResolution);
    RasterImage text_to_image(const std::string& text) override;
    RasterImage edit_image(const RasterImage& image, const std::string& text) override;
    std::string caption_image(const RasterImage& image) override;
    std::string suggest_completion(const std::string& text, const RasterImage& partial_image) override;
    Provenance provenance(const std::string& operation) const override;

private:
    std::uint64_t seed_;
    int resolution_;
};

/// JSON-over-HTTP client. Routes under cfg.endpoint: /text_to_image,
/// /edit_image, /caption, /suggest.
class HttpGuidance : public GuidancePort {
public:
    HttpGuidance(BackendConfig cfg, int resolution = kDefaultResolution);
    RasterImage text_to_image(const std::string& text) override;
    RasterImage edit_image(const RasterImage& image, const std::string& text) override;
    std::string caption_image(const RasterImage& image) override;
    std::string suggest_completion(const std::string& text, const RasterImage& partial_image) override;
    Provenance provenance(const std::string& operation) const override;

private:
    RasterImage image_reply(const nlohmann::json& reply, const std::string& op) const;
    std::string text_reply(const nlohmann::json& reply, const std::string& op) const;
    BackendConfig cfg_;
    int resolution_;
};

std::unique_ptr<GuidancePort> make_guidance(const BackendConfig& cfg, int resolution = kDefaultResolution);

// Free-function forms of the four operations.
RasterImage text_to_image(const std::string& text, const BackendConfig& cfg, int resolution = kDefaultResolution);
RasterImage edit_image(const RasterImage& image, const std::string& text, const BackendConfig& cfg);
std::string caption_image(const RasterImage& image, const BackendConfig& cfg);
std::string suggest_completion(const std::string& text, const RasterImage& partial_image, const BackendConfig& cfg);

/// 256-bin byte histograms: UTF-8 bytes of text, channel bytes of images.
class HistogramEmbedder : public EmbeddingPort {
public:
    Embedding embed_text(const std::string& text) override;
    Embedding embed_image(const RasterImage& image) override;
    std::string provider() const override { return "mock:histogram"; }
};

/// Shared color-name space: images count non-white pixels by nearest palette
/// color, texts count palette color words (black when none are named).
class PaletteEmbedder : public EmbeddingPort {
public:
    Embedding embed_text(const std::string& text) override;
    Embedding embed_image(const RasterImage& image) override;
    std::string provider() const override { return "mock:palette"; }
};

struct NamedColor {
    const char* name;
    std::uint8_t r, g, b;
};

/// Palette shared by the mock backends; index 0 is white.
const std::vector<NamedColor>& mock_palette();
std::size_t nearest_palette_index(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace vecdraw
