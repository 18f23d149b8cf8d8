#include "vecdraw/error.hpp"
#include "vecdraw/svg.hpp"

namespace vecdraw {

namespace {

RawCommand move(double x, double y) { return {'M', {x, y}}; }
RawCommand line(double x, double y) { return {'L', {x, y}}; }
RawCommand close() { return {'Z', {}}; }

RawCommand quarter_arc(double rx, double ry, double x, double y) { return {'A', {rx, ry, 0.0, 0.0, 1.0, x, y}}; }

void require_non_negative(double v, const char* what) {
    if (v < 0.0) throw Error(ErrorCode::NegativeDimension, std::string(what) + " is negative");
}

std::vector<RawCommand> ellipse_path(double cx, double cy, double rx, double ry) {
    if (rx == 0.0 || ry == 0.0) return {};
    return {move(cx + rx, cy),
            quarter_arc(rx, ry, cx, cy + ry),
            quarter_arc(rx, ry, cx - rx, cy),
            quarter_arc(rx, ry, cx, cy - ry),
            quarter_arc(rx, ry, cx + rx, cy),
            close()};
}

std::vector<RawCommand> poly_path(const std::vector<Point>& points, bool closed) {
    std::vector<RawCommand> out;
    if (points.empty()) return out;
    out.push_back(move(points[0].x, points[0].y));
    for (std::size_t i = 1; i < points.size(); ++i) out.push_back(line(points[i].x, points[i].y));
    if (closed) out.push_back(close());
    return out;
}

}  // namespace

std::vector<RawCommand> shape_to_path(const BasicShape& s, ParseMode mode) {
    return std::visit(
        [mode](const auto& sh) -> std::vector<RawCommand> {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, shape::Rect>) {
                require_non_negative(sh.width, "rect width");
                require_non_negative(sh.height, "rect height");
                require_non_negative(sh.rx, "rect rx");
                require_non_negative(sh.ry, "rect ry");
                if ((sh.rx > 0.0 || sh.ry > 0.0) && mode == ParseMode::Strict) {
                    throw Error(ErrorCode::RoundedRectUnsupported, "rect with rounded corners");
                }
                if (sh.width == 0.0 || sh.height == 0.0) return {};
                const double x1 = sh.x + sh.width;
                const double y1 = sh.y + sh.height;
                return {move(sh.x, sh.y), line(x1, sh.y), line(x1, y1), line(sh.x, y1), close()};
            } else if constexpr (std::is_same_v<T, shape::Circle>) {
                require_non_negative(sh.r, "circle r");
                return ellipse_path(sh.cx, sh.cy, sh.r, sh.r);
            } else if constexpr (std::is_same_v<T, shape::Ellipse>) {
                require_non_negative(sh.rx, "ellipse rx");
                require_non_negative(sh.ry, "ellipse ry");
                return ellipse_path(sh.cx, sh.cy, sh.rx, sh.ry);
            } else if constexpr (std::is_same_v<T, shape::Line>) {
                return {move(sh.x1, sh.y1), line(sh.x2, sh.y2)};
            } else if constexpr (std::is_same_v<T, shape::Polygon>) {
                return poly_path(sh.points, true);
            } else {
                return poly_path(sh.points, false);
            }
        },
        s);
}

}  // namespace vecdraw
