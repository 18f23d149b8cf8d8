#include "procedural.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "vecdraw/guidance.hpp"

namespace vecdraw::detail {

namespace {

struct Synonym {
    const char* word;
    const char* canonical;
};

constexpr Synonym kSynonyms[] = {{"grey", "gray"}, {"violet", "purple"}, {"gold", "yellow"},
                                 {"teal", "cyan"},  {"magenta", "pink"}, {"navy", "blue"}};

double snap(double v) { return std::round(v); }

}  // namespace

std::vector<std::size_t> color_words(std::string_view text) {
    std::vector<std::size_t> out;
    const auto& palette = mock_palette();
    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        for (const auto& s : kSynonyms) {
            if (word == s.word) word = s.canonical;
        }
        for (std::size_t i = 1; i < palette.size(); ++i) {
            if (word == palette[i].name) out.push_back(i);
        }
        word.clear();
    };
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

SvgPath procedural_shape(SplitMix& rng, const std::vector<std::size_t>& colors, std::size_t index) {
    const auto& palette = mock_palette();
    const int kind = static_cast<int>(rng.range(0, 2));
    const std::size_t color_index =
        colors.empty() ? static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(palette.size()) - 1))
                       : colors[index % colors.size()];
    const double cx = snap(50 + rng.uniform() * 100), cy = snap(50 + rng.uniform() * 100);
    const double size = snap(15 + rng.uniform() * 30);

    SvgPath path;
    const auto& nc = palette[color_index];
    path.style.fill = Color{nc.r, nc.g, nc.b, 1.0};
    auto& c = path.commands;
    if (kind == 0) {
        c.push_back(cmd::Move{{cx + size, cy}});
        c.push_back(cmd::Arc{size, size, 0, false, true, {cx, cy + size}});
        c.push_back(cmd::Arc{size, size, 0, false, true, {cx - size, cy}});
        c.push_back(cmd::Arc{size, size, 0, false, true, {cx, cy - size}});
        c.push_back(cmd::Arc{size, size, 0, false, true, {cx + size, cy}});
    } else if (kind == 1) {
        const double h = snap(size * (0.5 + rng.uniform()));
        c.push_back(cmd::Move{{cx - size, cy - h}});
        c.push_back(cmd::Line{{cx + size, cy - h}});
        c.push_back(cmd::Line{{cx + size, cy + h}});
        c.push_back(cmd::Line{{cx - size, cy + h}});
    } else {
        c.push_back(cmd::Move{{cx, cy - size}});
        c.push_back(cmd::Line{{cx + size, cy + size}});
        c.push_back(cmd::Line{{cx - size, cy + size}});
    }
    c.push_back(cmd::Close{});
    return path;
}

SvgDocument procedural_icon(std::string_view text, std::uint64_t seed, int count) {
    SplitMix rng(seed);
    const auto colors = color_words(text);
    SvgDocument doc;
    for (int i = 0; i < count; ++i) doc.paths.push_back(procedural_shape(rng, colors, static_cast<std::size_t>(i)));
    return doc;
}

}  // namespace vecdraw::detail
