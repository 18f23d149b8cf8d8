#include <limits>

#include "procedural.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/guidance.hpp"

namespace vecdraw {

const std::vector<NamedColor>& mock_palette() {
    static const std::vector<NamedColor> palette{
        {"white", 255, 255, 255}, {"black", 0, 0, 0},       {"gray", 128, 128, 128},  {"red", 220, 30, 30},
        {"orange", 245, 140, 20}, {"yellow", 240, 220, 40}, {"green", 40, 160, 60},   {"cyan", 40, 200, 220},
        {"blue", 30, 80, 220},    {"purple", 130, 50, 180}, {"pink", 240, 120, 180}, {"brown", 130, 80, 40},
    };
    return palette;
}

std::size_t nearest_palette_index(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const auto& palette = mock_palette();
    std::size_t best = 0;
    int best_d = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < palette.size(); ++i) {
        const int dr = r - palette[i].r, dg = g - palette[i].g, db = b - palette[i].b;
        const int d = dr * dr + dg * dg + db * db;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

Embedding HistogramEmbedder::embed_text(const std::string& text) {
    if (text.empty()) throw Error(ErrorCode::InvalidArgument, "cannot embed empty text");
    std::vector<double> bins(256, 0.0);
    for (unsigned char c : text) bins[c] += 1.0;
    return Embedding::from_raw(std::move(bins), provider());
}

Embedding HistogramEmbedder::embed_image(const RasterImage& image) {
    std::vector<double> bins(256, 0.0);
    for (auto v : image.pixels()) bins[v] += 1.0;
    return Embedding::from_raw(std::move(bins), provider());
}

Embedding PaletteEmbedder::embed_text(const std::string& text) {
    std::vector<double> bins(mock_palette().size(), 0.0);
    const auto words = detail::color_words(text);
    for (auto i : words) bins[i] += 1.0;
    if (words.empty()) bins[1] = 1.0;
    return Embedding::from_raw(std::move(bins), provider());
}

Embedding PaletteEmbedder::embed_image(const RasterImage& image) {
    std::vector<double> bins(mock_palette().size(), 0.0);
    bool inked = false;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (image.is_white(x, y)) continue;
            const auto* p = image.at(x, y);
            const auto i = nearest_palette_index(p[0], p[1], p[2]);
            if (i == 0) continue;
            bins[i] += 1.0;
            inked = true;
        }
    }
    if (!inked) bins[0] = 1.0;
    return Embedding::from_raw(std::move(bins), provider());
}

}  // namespace vecdraw
