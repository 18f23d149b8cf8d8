#include <cmath>
#include <cstdio>
#include <string>

#include "vecdraw/svg.hpp"

namespace vecdraw {

std::string format_number(double value) {
    const double hundredths = std::round(value * 100.0);
    if (std::fmod(hundredths, 100.0) == 0.0) {
        char buf[48];
        const double whole = hundredths / 100.0;
        std::snprintf(buf, sizeof buf, "%.0f", whole == 0.0 ? 0.0 : whole);
        return buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", hundredths / 100.0);
    return buf;
}

char command_letter(const PathCommand& c) {
    static constexpr char kLetters[] = {'M', 'L', 'C', 'Q', 'A', 'Z'};
    return kLetters[c.index()];
}

namespace {

void put(std::string& out, double v) {
    out += ' ';
    out += format_number(v);
}

void put(std::string& out, const Point& p) {
    put(out, p.x);
    put(out, p.y);
}

}  // namespace

std::string serialize_path_data(const std::vector<PathCommand>& commands) {
    std::string out;
    for (const auto& c : commands) {
        if (!out.empty()) out += ' ';
        out += command_letter(c);
        std::visit(
            [&out](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, cmd::Move> || std::is_same_v<T, cmd::Line>) {
                    put(out, v.to);
                } else if constexpr (std::is_same_v<T, cmd::Cubic>) {
                    put(out, v.c1);
                    put(out, v.c2);
                    put(out, v.to);
                } else if constexpr (std::is_same_v<T, cmd::Quad>) {
                    put(out, v.c);
                    put(out, v.to);
                } else if constexpr (std::is_same_v<T, cmd::Arc>) {
                    put(out, v.rx);
                    put(out, v.ry);
                    put(out, v.x_rotation_deg);
                    out += v.large_arc ? " 1" : " 0";
                    out += v.sweep ? " 1" : " 0";
                    put(out, v.to);
                }
            },
            c);
    }
    return out;
}

std::string serialize_path_element(const SvgPath& path) {
    std::string out = "<path d=\"" + serialize_path_data(path.commands) + "\"";
    const auto& st = path.style;
    if (st.fill) {
        out += " fill=\"" + format_color(*st.fill) + "\"";
        if (st.fill->alpha != 1.0) out += " fill-opacity=\"" + format_number(st.fill->alpha) + "\"";
    } else {
        out += " fill=\"none\"";
    }
    if (st.fill_rule == FillRule::EvenOdd) out += " fill-rule=\"evenodd\"";
    if (st.stroke) {
        out += " stroke=\"" + format_color(*st.stroke) + "\"";
        if (st.stroke->alpha != 1.0) out += " stroke-opacity=\"" + format_number(st.stroke->alpha) + "\"";
        out += " stroke-width=\"" + format_number(st.stroke_width) + "\"";
    }
    out += "/>";
    return out;
}

std::string serialize_svg(const SvgDocument& doc) {
    const auto& vb = doc.viewbox;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + format_number(vb.min_x) + " " +
                      format_number(vb.min_y) + " " + format_number(vb.width) + " " + format_number(vb.height) +
                      "\">\n";
    for (const auto& p : doc.paths) {
        out += serialize_path_element(p);
        out += '\n';
    }
    out += "</svg>\n";
    return out;
}

}  // namespace vecdraw
