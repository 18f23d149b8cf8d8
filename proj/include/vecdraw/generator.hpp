#pragma once

// SVG generator modules: prompt construction, backend ports, and the
// validity-gated generate loop.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vecdraw/metrics.hpp"
#include "vecdraw/net.hpp"
#include "vecdraw/raster.hpp"
#include "vecdraw/svg.hpp"

namespace vecdraw {

enum class ModuleKind { Image2Svg, Text2Svg, ImageText2Svg, Text2SvgPartial, ImageText2SvgPartial };

std::string_view to_string(ModuleKind kind);  // image2svg, text2svg, ...
std::optional<ModuleKind> parse_module_kind(std::string_view name);
bool is_partial(ModuleKind kind);

struct GenerationRequest {
    ModuleKind kind = ModuleKind::Text2Svg;
    std::optional<std::string> text;
    std::optional<std::string> aux_text;  // G_tc or G_tp for imagetext2svg
    std::vector<RasterImage> images;
    std::optional<SvgDocument> partial_svg;
    std::uint64_t seed = 0;

    /// Throws MissingRequiredInput when the kind's inputs are absent.
    void validate() const;
};

inline constexpr const char* kAuxTextSeparator = "\n";

std::string build_prompt(const GenerationRequest& req);

class GeneratorBackendPort {
public:
    virtual ~GeneratorBackendPort() = default;
    /// Raw model reply for one attempt.
    virtual std::string complete(const std::string& prompt, const std::vector<RasterImage>& images,
                                 std::uint64_t seed) = 0;
    virtual std::string provider() const = 0;
};

/// POST {prompt, images: [png_base64...], seed, max_tokens} -> {text}.
class HttpGenerator : public GeneratorBackendPort {
public:
    explicit HttpGenerator(BackendConfig cfg, int max_tokens = 4096);
    std::string complete(const std::string& prompt, const std::vector<RasterImage>& images,
                         std::uint64_t seed) override;
    std::string provider() const override;

private:
    BackendConfig cfg_;
    int max_tokens_;
};

/// Content hash of one backend call, used as the fixture key.
std::string request_hash(const std::string& prompt, const std::vector<RasterImage>& images, std::uint64_t seed);

/// Replies from `<fixtures>/<request_hash>.svg` when present. Otherwise:
/// completion prompts get the existing SVG plus seeded extra paths, image
/// prompts a block vectorization of the first image, and text prompts a
/// seeded shape composition.
class MockGenerator : public GeneratorBackendPort {
public:
    explicit MockGenerator(std::optional<std::filesystem::path> fixtures = std::nullopt);
    std::string complete(const std::string& prompt, const std::vector<RasterImage>& images,
                         std::uint64_t seed) override;
    std::string provider() const override { return "mock:generator"; }

private:
    std::optional<std::filesystem::path> fixtures_;
};

/// Block vectorization: one rectangle path per run of equal-colored cells.
SvgDocument vectorize_blocks(const RasterImage& image, int cells);

/// First `<svg ...>...</svg>` span in `reply`.
std::optional<std::string> extract_svg(std::string_view reply);

inline constexpr int kGenerationRetries = 2;

struct Generation {
    SvgDocument document;
    std::string svg_text;  // canonical
    int attempts = 0;
};

/// Extracts, checks and normalizes the backend reply, retrying invalid
/// replies with fresh seeds. Partial kinds must also preserve the partial SVG.
/// Raises GenerationInvalid when every attempt fails.
Generation generate(const GenerationRequest& req, GeneratorBackendPort& backend);

}  // namespace vecdraw
