#pragma once

// Validity checking, image/text similarity scores, preservation checking and
// candidate selection.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "vecdraw/net.hpp"
#include "vecdraw/raster.hpp"
#include "vecdraw/svg.hpp"

namespace vecdraw {

struct Diagnostic {
    std::string code;  // ErrorCode name, or DisallowedCommand / NonCanonicalViewBox / NonFiniteBounds / RenderFailed
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct ValidityReport {
    int valid = 0;
    std::vector<Diagnostic> diagnostics;
    bool blank_render = false;
};

/// Strict parse, restricted alphabet on the raw path letters, viewBox
/// "0 0 200 200", finite coordinates, then a render at 224.
ValidityReport check_svg(std::string_view code);

enum class ReferenceKind { Text, Image };

struct Score {
    std::string metric;  // "ssim", "mse", "clip", "dino"
    double value = 0.0;
    ReferenceKind reference = ReferenceKind::Image;
    std::string provider = "native";
};

/// Lower is better only for "mse".
bool higher_is_better(std::string_view metric);

inline constexpr double kSsimC1 = (0.01 * 255) * (0.01 * 255);
inline constexpr double kSsimC2 = (0.03 * 255) * (0.03 * 255);
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// Mean squared difference over all channels, intensities scaled to [0, 1].
Score mse(const RasterImage& a, const RasterImage& b);

/// Mean SSIM over the valid region of an 11x11 Gaussian window on luma.
Score ssim(const RasterImage& a, const RasterImage& b);

struct Embedding {
    std::vector<double> vector;  // unit norm
    std::string provider;

    /// Normalizes `raw`; a zero or non-finite vector raises ProviderMalformedResponse.
    static Embedding from_raw(std::vector<double> raw, std::string provider);
};

double cosine(const Embedding& a, const Embedding& b);

class EmbeddingPort {
public:
    virtual ~EmbeddingPort() = default;
    virtual Embedding embed_text(const std::string& text) = 0;
    virtual Embedding embed_image(const RasterImage& image) = 0;
    virtual std::string provider() const = 0;
};

/// Wire contract: POST {kind: "text"|"image", payload} -> {vector: [...]};
/// images travel as base64 PNG.
class HttpEmbedder : public EmbeddingPort {
public:
    explicit HttpEmbedder(BackendConfig cfg);
    Embedding embed_text(const std::string& text) override;
    Embedding embed_image(const RasterImage& image) override;
    std::string provider() const override;

private:
    Embedding request(const std::string& kind, const std::string& payload);
    BackendConfig cfg_;
};

/// 100 * max(0, cosine(text, image)).
Score clip_score(const std::string& text, const RasterImage& image, EmbeddingPort& embedder);

Score dino_similarity(const RasterImage& a, const RasterImage& b, EmbeddingPort& embedder);

/// True iff the canonical text of each partial path equals, in order, the
/// leading paths of `output`.
bool preservation_check(const SvgDocument& partial, const SvgDocument& output);

/// Best index by the scores' shared metric orientation; ties go to the lowest
/// index. Raises EmptyCandidateSet on an empty list and InvalidArgument when
/// metrics differ.
std::size_t select_best(const std::vector<Score>& scores);
std::size_t select_best(const std::vector<double>& values, bool higher_better);

}  // namespace vecdraw
