#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "number_scan.hpp"
#include "vecdraw/error.hpp"
#include "vecdraw/normalize.hpp"
#include "vecdraw/svg.hpp"
#include "xml.hpp"

namespace vecdraw {

namespace {

using detail::XmlElement;

// Inherited presentation state while walking the tree.
struct StyleState {
    std::optional<Color> fill = Color{};
    double fill_opacity = 1.0;
    FillRule fill_rule = FillRule::NonZero;
    std::optional<Color> stroke;
    double stroke_opacity = 1.0;
    double stroke_width = 1.0;
    double opacity = 1.0;
};

const std::set<std::string, std::less<>> kPresentation = {
    "fill", "fill-opacity", "fill-rule", "stroke", "stroke-opacity", "stroke-width", "opacity"};

// Accepted everywhere and ignored: they do not change filled geometry.
const std::set<std::string, std::less<>> kIgnored = {
    "id", "class", "stroke-linecap", "stroke-linejoin", "stroke-miterlimit", "xml:space"};

const std::set<std::string, std::less<>> kRootOnly = {
    "xmlns", "version", "width", "height", "viewBox", "x", "y", "preserveAspectRatio", "baseProfile"};

const std::map<std::string, std::set<std::string, std::less<>>, std::less<>> kGeometry = {
    {"path", {"d"}},
    {"rect", {"x", "y", "width", "height", "rx", "ry"}},
    {"circle", {"cx", "cy", "r"}},
    {"ellipse", {"cx", "cy", "rx", "ry"}},
    {"line", {"x1", "y1", "x2", "y2"}},
    {"polygon", {"points"}},
    {"polyline", {"points"}},
};

bool is_gradient(std::string_view name) { return name == "linearGradient" || name == "radialGradient"; }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && detail::is_space(s[b])) ++b;
    while (e > b && detail::is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

class SvgBuilder {
public:
    explicit SvgBuilder(ParseMode mode) : mode_(mode) {}

    RawDocument build(const XmlElement& root) {
        if (root.name != "svg") {
            throw Error(ErrorCode::MalformedMarkup, "root element is <" + root.name + ">, expected <svg>", root.offset);
        }
        collect_gradients(root);
        doc_.viewbox = read_viewbox(root);

        StyleState state;
        for (const auto& [key, value] : root.attributes) {
            if (kRootOnly.count(key) || kIgnored.count(key) || key.rfind("xmlns:", 0) == 0) continue;
            if (kPresentation.count(key)) {
                apply_property(state, key, value, root);
            } else if (key == "style") {
                apply_style_attribute(state, value, root);
            } else {
                unsupported("attribute '" + key + "' on <svg>", root);
            }
        }
        for (const auto& child : root.children) visit(child, state);
        return std::move(doc_);
    }

private:
    bool strict() const { return mode_ == ParseMode::Strict; }

    void warn(const std::string& what, const XmlElement& el) {
        doc_.warnings.push_back(what + " (byte " + std::to_string(el.offset) + ")");
    }

    // Strict: raise. Lenient: record and carry on.
    void unsupported(const std::string& what, const XmlElement& el, ErrorCode code = ErrorCode::UnsupportedConstruct) {
        if (strict()) throw Error(code, what, el.offset);
        warn("skipped " + what, el);
    }

    void collect_gradients(const XmlElement& el) {
        if (is_gradient(el.name)) {
            if (const auto* id = el.attribute("id")) gradients_[*id] = &el;
        }
        for (const auto& c : el.children) collect_gradients(c);
    }

    ViewBox read_viewbox(const XmlElement& root) {
        if (const auto* vb = root.attribute("viewBox")) {
            const std::string_view s = *vb;
            std::size_t pos = 0;
            double v[4];
            detail::skip_space(s, pos);
            for (int i = 0; i < 4; ++i) {
                if (i > 0) detail::skip_comma_space(s, pos);
                auto n = detail::scan_number(s, pos);
                if (!n) throw Error(ErrorCode::MissingViewBox, "unparsable viewBox '" + *vb + "'", root.offset);
                v[i] = *n;
            }
            detail::skip_space(s, pos);
            if (pos != s.size() || v[2] <= 0.0 || v[3] <= 0.0) {
                throw Error(ErrorCode::MissingViewBox, "invalid viewBox '" + *vb + "'", root.offset);
            }
            return ViewBox{v[0], v[1], v[2], v[3]};
        }
        if (!strict()) {
            const auto* w = root.attribute("width");
            const auto* h = root.attribute("height");
            if (w && h) {
                const double width = length(*w, root);
                const double height = length(*h, root);
                if (width > 0.0 && height > 0.0) {
                    warn("viewBox derived from width/height", root);
                    return ViewBox{0.0, 0.0, width, height};
                }
            }
        }
        throw Error(ErrorCode::MissingViewBox, "<svg> has no viewBox", root.offset);
    }

    double length(std::string_view text, const XmlElement& el) {
        const std::string t = trim(text);
        std::size_t pos = 0;
        auto v = detail::scan_number(t, pos);
        if (!v) throw Error(ErrorCode::MalformedMarkup, "expected a length, got '" + t + "'", el.offset);
        const std::string_view unit = std::string_view(t).substr(pos);
        if (!unit.empty() && unit != "px") unsupported("length unit '" + std::string(unit) + "'", el);
        return *v;
    }

    double number_attr(const XmlElement& el, std::string_view key, double fallback = 0.0) {
        const auto* v = el.attribute(key);
        return v ? length(*v, el) : fallback;
    }

    std::optional<Color> paint(const std::string& value, const XmlElement& el) {
        const std::string t = trim(value);
        if (t.rfind("url(", 0) == 0) {
            if (strict()) throw Error(ErrorCode::GradientUnsupported, "paint server '" + t + "'", el.offset);
            return gradient_substitute(t, el);
        }
        try {
            return parse_color(t);
        } catch (const Error&) {
            if (strict()) throw Error(ErrorCode::UnsupportedConstruct, "unrecognized color '" + t + "'", el.offset);
            warn("unrecognized color '" + t + "' replaced by black", el);
            return Color{};
        }
    }

    // Lenient fallback for gradients: the first stop's color.
    std::optional<Color> gradient_substitute(const std::string& url, const XmlElement& el) {
        const auto hash = url.find('#');
        const auto close = url.find(')');
        std::string id = (hash != std::string::npos && close != std::string::npos && close > hash)
                             ? url.substr(hash + 1, close - hash - 1)
                             : std::string();
        const XmlElement* gradient = nullptr;
        for (int hops = 0; hops < 4 && !id.empty(); ++hops) {
            auto it = gradients_.find(id);
            if (it == gradients_.end()) break;
            gradient = it->second;
            const bool has_stops = std::any_of(gradient->children.begin(), gradient->children.end(),
                                               [](const XmlElement& c) { return c.name == "stop"; });
            if (has_stops) break;
            const auto* href = gradient->attribute("xlink:href");
            if (!href) href = gradient->attribute("href");
            id = (href && !href->empty() && (*href)[0] == '#') ? href->substr(1) : std::string();
        }
        if (gradient) {
            for (const auto& stop : gradient->children) {
                if (stop.name != "stop") continue;
                std::string color = "black";
                double stop_opacity = 1.0;
                if (const auto* c = stop.attribute("stop-color")) color = *c;
                if (const auto* o = stop.attribute("stop-opacity")) stop_opacity = opacity_value(*o, stop);
                if (const auto* st = stop.attribute("style")) {
                    for (const auto& [k, v] : declarations(*st)) {
                        if (k == "stop-color") color = v;
                        else if (k == "stop-opacity") stop_opacity = opacity_value(v, stop);
                    }
                }
                auto c = paint(color, stop);
                if (c) c->alpha = std::clamp(c->alpha * stop_opacity, 0.0, 1.0);
                warn("gradient " + url + " replaced by its first stop color", el);
                return c;
            }
        }
        warn("unresolved paint server " + url + " treated as none", el);
        return std::nullopt;
    }

    double opacity_value(const std::string& text, const XmlElement& el) {
        const std::string t = trim(text);
        std::size_t pos = 0;
        auto v = detail::scan_number(t, pos);
        if (!v) throw Error(ErrorCode::MalformedMarkup, "bad opacity '" + t + "'", el.offset);
        double value = *v;
        if (pos < t.size() && t[pos] == '%') {
            value /= 100.0;
            ++pos;
        }
        if (pos != t.size()) throw Error(ErrorCode::MalformedMarkup, "bad opacity '" + t + "'", el.offset);
        return std::clamp(value, 0.0, 1.0);
    }

    static std::vector<std::pair<std::string, std::string>> declarations(std::string_view style) {
        std::vector<std::pair<std::string, std::string>> out;
        std::size_t start = 0;
        while (start <= style.size()) {
            auto end = style.find(';', start);
            if (end == std::string_view::npos) end = style.size();
            const auto decl = style.substr(start, end - start);
            const auto colon = decl.find(':');
            if (colon != std::string_view::npos) {
                out.emplace_back(trim(decl.substr(0, colon)), trim(decl.substr(colon + 1)));
            }
            start = end + 1;
        }
        return out;
    }

    void apply_property(StyleState& st, std::string_view key, const std::string& value, const XmlElement& el) {
        if (key == "fill") {
            st.fill = paint(value, el);
        } else if (key == "stroke") {
            st.stroke = paint(value, el);
        } else if (key == "fill-opacity") {
            st.fill_opacity = opacity_value(value, el);
        } else if (key == "stroke-opacity") {
            st.stroke_opacity = opacity_value(value, el);
        } else if (key == "opacity") {
            st.opacity *= opacity_value(value, el);
        } else if (key == "stroke-width") {
            const double w = length(value, el);
            if (w < 0.0) throw Error(ErrorCode::NegativeDimension, "stroke-width is negative", el.offset);
            st.stroke_width = w;
        } else if (key == "fill-rule") {
            const std::string t = trim(value);
            if (t == "evenodd") st.fill_rule = FillRule::EvenOdd;
            else if (t == "nonzero") st.fill_rule = FillRule::NonZero;
            else unsupported("fill-rule '" + t + "'", el);
        }
    }

    void apply_style_attribute(StyleState& st, std::string_view style, const XmlElement& el) {
        for (const auto& [k, v] : declarations(style)) {
            if (kPresentation.count(k)) apply_property(st, k, v, el);
            else if (kIgnored.count(k)) continue;
            else unsupported("style property '" + k + "'", el);
        }
    }

    static PathStyle resolve(const StyleState& st) {
        PathStyle style;
        style.fill_rule = st.fill_rule;
        if (st.fill) {
            Color c = *st.fill;
            c.alpha = std::clamp(c.alpha * st.fill_opacity * st.opacity, 0.0, 1.0);
            style.fill = c;
        } else {
            style.fill = std::nullopt;
        }
        if (st.stroke && st.stroke_width > 0.0) {
            Color c = *st.stroke;
            c.alpha = std::clamp(c.alpha * st.stroke_opacity * st.opacity, 0.0, 1.0);
            style.stroke = c;
            style.stroke_width = st.stroke_width;
        }
        return style;
    }

    std::vector<Point> points_attr(const XmlElement& el) {
        std::vector<Point> pts;
        const auto* text = el.attribute("points");
        if (!text) return pts;
        const std::string_view s = *text;
        std::size_t pos = 0;
        detail::skip_space(s, pos);
        std::vector<double> nums;
        while (pos < s.size()) {
            auto v = detail::scan_number(s, pos);
            if (!v) throw Error(ErrorCode::MalformedMarkup, "bad points list", el.offset);
            nums.push_back(*v);
            detail::skip_comma_space(s, pos);
        }
        if (nums.size() % 2 != 0) {
            throw Error(ErrorCode::MissingCoordinate, "odd number of coordinates in points", el.offset);
        }
        for (std::size_t i = 0; i < nums.size(); i += 2) pts.push_back({nums[i], nums[i + 1]});
        return pts;
    }

    std::vector<RawCommand> geometry(const XmlElement& el) {
        const std::string& n = el.name;
        if (n == "path") {
            const auto* d = el.attribute("d");
            if (!d) return {};
            try {
                return parse_path_data(*d);
            } catch (const Error& e) {
                throw Error(e.code(), e.detail() + " in <path> at byte " + std::to_string(el.offset), e.offset());
            }
        }
        BasicShape shape;
        if (n == "rect") {
            shape::Rect r{number_attr(el, "x"), number_attr(el, "y"), number_attr(el, "width"),
                          number_attr(el, "height"), number_attr(el, "rx"), number_attr(el, "ry")};
            if ((r.rx > 0.0 || r.ry > 0.0) && !strict()) warn("rounded rect corners dropped", el);
            shape = r;
        } else if (n == "circle") {
            shape = shape::Circle{number_attr(el, "cx"), number_attr(el, "cy"), number_attr(el, "r")};
        } else if (n == "ellipse") {
            shape = shape::Ellipse{number_attr(el, "cx"), number_attr(el, "cy"), number_attr(el, "rx"),
                                   number_attr(el, "ry")};
        } else if (n == "line") {
            shape = shape::Line{number_attr(el, "x1"), number_attr(el, "y1"), number_attr(el, "x2"),
                                number_attr(el, "y2")};
        } else if (n == "polygon") {
            shape = shape::Polygon{points_attr(el)};
        } else {
            shape = shape::Polyline{points_attr(el)};
        }
        try {
            return shape_to_path(shape, mode_);
        } catch (const Error& e) {
            throw Error(e.code(), e.detail(), el.offset);
        }
    }

    void visit(const XmlElement& el, const StyleState& inherited) {
        const std::string& n = el.name;
        if (is_gradient(n)) {
            unsupported("gradient <" + n + ">", el, ErrorCode::GradientUnsupported);
            return;
        }
        if (n == "defs") {
            const bool has_gradient = std::any_of(el.children.begin(), el.children.end(),
                                                  [](const XmlElement& c) { return is_gradient(c.name); });
            unsupported("<defs>", el, has_gradient ? ErrorCode::GradientUnsupported : ErrorCode::UnsupportedConstruct);
            return;
        }
        const auto geom = kGeometry.find(n);
        const bool is_group = n == "g";
        if (geom == kGeometry.end() && !is_group) {
            unsupported("element <" + n + ">", el);
            return;
        }
        if (is_group) {
            if (strict()) throw Error(ErrorCode::UnsupportedConstruct, "element <g>", el.offset);
        }
        if (el.attribute("transform")) {
            unsupported("<" + n + "> with transform", el);
            return;
        }

        StyleState state = inherited;
        state.opacity = inherited.opacity;
        for (const auto& [key, value] : el.attributes) {
            if (kPresentation.count(key) || key == "style" || kIgnored.count(key)) continue;
            if (geom != kGeometry.end() && geom->second.count(key)) continue;
            unsupported("attribute '" + key + "' on <" + n + ">", el);
        }
        for (const auto& [key, value] : el.attributes) {
            if (kPresentation.count(key)) apply_property(state, key, value, el);
        }
        if (const auto* style = el.attribute("style")) apply_style_attribute(state, *style, el);

        if (is_group) {
            warn("group <g> flattened into its children", el);
            for (const auto& child : el.children) visit(child, state);
            return;
        }
        for (const auto& child : el.children) unsupported("child <" + child.name + "> of <" + n + ">", child);

        RawPath path{geometry(el), resolve(state)};
        if (path.commands.empty()) {
            warn("empty <" + n + "> dropped", el);
            return;
        }
        doc_.paths.push_back(std::move(path));
    }

    ParseMode mode_;
    RawDocument doc_;
    std::map<std::string, const XmlElement*, std::less<>> gradients_;
};

}  // namespace

RawDocument parse_svg_raw(std::string_view text, const ParseOptions& options) {
    const auto root = detail::parse_xml(text);
    return SvgBuilder(options.mode).build(root);
}

SvgDocument parse_svg(std::string_view text, const ParseOptions& options) {
    return lower_document(parse_svg_raw(text, options));
}

}  // namespace vecdraw
