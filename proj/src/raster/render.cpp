#include <algorithm>
#include <cmath>
#include <numbers>

#include "vecdraw/error.hpp"
#include "vecdraw/raster.hpp"

namespace vecdraw {

RasterImage::RasterImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width_(width), height_(height) {
    if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    pixels_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = r;
        pixels_[i + 1] = g;
        pixels_[i + 2] = b;
    }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
        throw Error(ErrorCode::InvalidArgument, "pixel buffer size does not match dimensions");
    }
}

bool RasterImage::all_white() const {
    return std::all_of(pixels_.begin(), pixels_.end(), [](std::uint8_t v) { return v == 255; });
}

namespace {

constexpr int kSubsamples = 4;

struct Edge {
    double x0, y0, x1, y1;
    int dir;
};

using Polygon = std::vector<Point>;

class Canvas {
public:
    explicit Canvas(int side) : side_(side), rgb_(static_cast<std::size_t>(side) * side * 3, 255.0),
                                coverage_(static_cast<std::size_t>(side) * side, 0.0) {}

    // Fills the union/winding region of `polygons` (pixel coordinates) and
    // composites `color` over the canvas by the coverage fraction.
    void fill(const std::vector<Polygon>& polygons, FillRule rule, const Color& color) {
        std::vector<Edge> edges;
        double ymin = side_, ymax = 0;
        for (const auto& poly : polygons) {
            const std::size_t n = poly.size();
            if (n < 2) continue;
            for (std::size_t i = 0; i < n; ++i) {
                const Point& a = poly[i];
                const Point& b = poly[(i + 1) % n];
                if (a.y == b.y) continue;
                edges.push_back(a.y < b.y ? Edge{a.x, a.y, b.x, b.y, 1} : Edge{b.x, b.y, a.x, a.y, -1});
                ymin = std::min(ymin, std::min(a.y, b.y));
                ymax = std::max(ymax, std::max(a.y, b.y));
            }
        }
        if (edges.empty()) return;
        std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.y0 < b.y0; });

        const int row_begin = std::max(0, static_cast<int>(std::floor(ymin)));
        const int row_end = std::min(side_, static_cast<int>(std::ceil(ymax)) + 1);
        std::fill(coverage_.begin(), coverage_.end(), 0.0);
        std::vector<std::pair<double, int>> crossings;
        for (int row = row_begin; row < row_end; ++row) {
            for (int s = 0; s < kSubsamples; ++s) {
                const double sy = row + (s + 0.5) / kSubsamples;
                crossings.clear();
                for (const auto& e : edges) {
                    if (e.y0 > sy) break;
                    if (sy >= e.y1) continue;
                    const double x = e.x0 + (sy - e.y0) * (e.x1 - e.x0) / (e.y1 - e.y0);
                    crossings.emplace_back(x, e.dir);
                }
                if (crossings.size() < 2) continue;
                std::sort(crossings.begin(), crossings.end());
                int winding = 0;
                for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
                    winding += crossings[i].second;
                    const bool inside = rule == FillRule::NonZero ? winding != 0 : (winding & 1) != 0;
                    if (inside) add_span(row, crossings[i].first, crossings[i + 1].first);
                }
            }
        }

        const double alpha = color.alpha;
        const double src[3] = {double(color.r), double(color.g), double(color.b)};
        for (int row = row_begin; row < row_end; ++row) {
            for (int x = 0; x < side_; ++x) {
                const std::size_t idx = static_cast<std::size_t>(row) * side_ + x;
                const double cov = std::min(1.0, coverage_[idx]);
                if (cov <= 0.0) continue;
                const double a = alpha * cov;
                for (int ch = 0; ch < 3; ++ch) {
                    double& dst = rgb_[idx * 3 + ch];
                    dst += (src[ch] - dst) * a;
                }
            }
        }
    }

    RasterImage finish() const {
        std::vector<std::uint8_t> px(rgb_.size());
        for (std::size_t i = 0; i < rgb_.size(); ++i) {
            px[i] = static_cast<std::uint8_t>(std::clamp(std::round(rgb_[i]), 0.0, 255.0));
        }
        return RasterImage(side_, side_, std::move(px));
    }

private:
    void add_span(int row, double xa, double xb) {
        xa = std::max(xa, 0.0);
        xb = std::min(xb, static_cast<double>(side_));
        if (xb <= xa) return;
        constexpr double w = 1.0 / kSubsamples;
        double* line = coverage_.data() + static_cast<std::size_t>(row) * side_;
        const int first = static_cast<int>(std::floor(xa));
        const int last = std::min(side_ - 1, static_cast<int>(std::ceil(xb)) - 1);
        if (first == last) {
            line[first] += (xb - xa) * w;
            return;
        }
        line[first] += (first + 1 - xa) * w;
        for (int x = first + 1; x < last; ++x) line[x] += w;
        line[last] += (xb - last) * w;
    }

    int side_;
    std::vector<double> rgb_;
    std::vector<double> coverage_;
};

double signed_area(const Polygon& p) {
    double a = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Point& u = p[i];
        const Point& v = p[(i + 1) % p.size()];
        a += u.x * v.y - v.x * u.y;
    }
    return a / 2;
}

void add_oriented(std::vector<Polygon>& out, Polygon poly) {
    if (signed_area(poly) < 0) std::reverse(poly.begin(), poly.end());
    out.push_back(std::move(poly));
}

// Stroke outline as positively oriented pieces: a quad per segment plus an
// octagon at every join. Filled with the nonzero rule they form the union.
std::vector<Polygon> stroke_pieces(const std::vector<Polyline>& lines, double width) {
    std::vector<Polygon> out;
    const double h = width / 2.0;
    for (const auto& pl : lines) {
        const auto& pts = pl.points;
        const std::size_t n = pts.size();
        if (n < 2) continue;
        const std::size_t segments = pl.closed ? n : n - 1;
        for (std::size_t i = 0; i < segments; ++i) {
            const Point& a = pts[i];
            const Point& b = pts[(i + 1) % n];
            const double dx = b.x - a.x, dy = b.y - a.y;
            const double len = std::hypot(dx, dy);
            if (len == 0.0) continue;
            const double nx = -dy / len * h, ny = dx / len * h;
            add_oriented(out, {{a.x + nx, a.y + ny}, {b.x + nx, b.y + ny}, {b.x - nx, b.y - ny}, {a.x - nx, a.y - ny}});
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!pl.closed && (i == 0 || i == n - 1)) continue;
            Polygon disc;
            for (int k = 0; k < 8; ++k) {
                const double t = k * std::numbers::pi / 4.0;
                disc.push_back({pts[i].x + h * std::cos(t), pts[i].y + h * std::sin(t)});
            }
            add_oriented(out, std::move(disc));
        }
    }
    return out;
}

}  // namespace

RasterImage render(const SvgDocument& doc, int resolution) {
    if (resolution < 1) throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
    const auto& vb = doc.viewbox;
    const double scale = resolution / std::max(vb.width, vb.height);
    const double ox = (resolution - vb.width * scale) / 2.0 - vb.min_x * scale;
    const double oy = (resolution - vb.height * scale) / 2.0 - vb.min_y * scale;
    // Flatten in pixel space so the tolerance is resolution-relative.
    const double tolerance = kDefaultFlatness / 4.0 / scale;

    Canvas canvas(resolution);
    for (const auto& path : doc.paths) {
        auto lines = flatten_path(path.commands, tolerance);
        for (auto& pl : lines) {
            for (auto& p : pl.points) p = {p.x * scale + ox, p.y * scale + oy};
        }
        if (path.style.fill) {
            std::vector<Polygon> polys;
            for (const auto& pl : lines) polys.push_back(pl.points);
            canvas.fill(polys, path.style.fill_rule, *path.style.fill);
        }
        if (path.style.stroke && path.style.stroke_width > 0.0) {
            canvas.fill(stroke_pieces(lines, path.style.stroke_width * scale), FillRule::NonZero, *path.style.stroke);
        }
    }
    return canvas.finish();
}

}  // namespace vecdraw
