#include <cmath>
#include <set>

#include "vecdraw/error.hpp"
#include "vecdraw/metrics.hpp"
#include "vecdraw/normalize.hpp"

namespace vecdraw {

namespace {

constexpr std::string_view kAllowedLetters = "MLCQAZ";

bool finite_style(const PathStyle& s) { return std::isfinite(s.stroke_width) && s.stroke_width >= 0.0; }

}  // namespace

ValidityReport check_svg(std::string_view code) {
    ValidityReport report;
    auto fail = [&](std::string c, std::string message) { report.diagnostics.push_back({std::move(c), std::move(message)}); };

    RawDocument raw;
    try {
        raw = parse_svg_raw(code, {ParseMode::Strict});
    } catch (const Error& e) {
        fail(std::string(to_string(e.code())), e.what());
        return report;
    }

    for (std::size_t i = 0; i < raw.paths.size(); ++i) {
        std::set<char> bad;
        bool finite = finite_style(raw.paths[i].style);
        for (const auto& c : raw.paths[i].commands) {
            if (kAllowedLetters.find(c.letter) == std::string_view::npos) bad.insert(c.letter);
            for (double v : c.args) finite = finite && std::isfinite(v);
        }
        if (!bad.empty()) {
            fail("DisallowedCommand", "path " + std::to_string(i) + " uses " + std::string(bad.begin(), bad.end()) +
                                          "; only M L C Q A Z are allowed");
        }
        if (!finite) fail("NonFiniteBounds", "path " + std::to_string(i) + " has a non-finite number");
    }
    if (!(raw.viewbox == ViewBox{0, 0, kCanonicalSide, kCanonicalSide})) {
        fail("NonCanonicalViewBox", "viewBox must be \"0 0 200 200\", got \"" + format_number(raw.viewbox.min_x) + " " +
                                        format_number(raw.viewbox.min_y) + " " + format_number(raw.viewbox.width) +
                                        " " + format_number(raw.viewbox.height) + "\"");
    }
    if (!report.diagnostics.empty()) return report;

    SvgDocument doc;
    try {
        doc = lower_document(raw);
    } catch (const Error& e) {
        fail(std::string(to_string(e.code())), e.what());
        return report;
    }
    try {
        report.blank_render = render(doc, kDefaultResolution).all_white();
    } catch (const std::exception& e) {
        fail("RenderFailed", e.what());
        return report;
    }
    report.valid = 1;
    return report;
}

}  // namespace vecdraw
