#include <cmath>
#include <numbers>

#include "vecdraw/raster.hpp"

namespace vecdraw {

namespace {

constexpr int kMaxDepth = 18;

Point lerp(const Point& a, const Point& b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

double distance_to_line(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
    return std::fabs((p.x - a.x) * dy - (p.y - a.y) * dx) / len;
}

void push_point(std::vector<Point>& pts, const Point& p) {
    if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
}

void flatten_cubic(const CubicBezier& c, double tol, int depth, std::vector<Point>& out) {
    const double flat = std::max(distance_to_line(c.p1, c.p0, c.p3), distance_to_line(c.p2, c.p0, c.p3));
    if (flat <= tol || depth >= kMaxDepth) {
        push_point(out, c.p3);
        return;
    }
    const Point p01 = lerp(c.p0, c.p1, 0.5), p12 = lerp(c.p1, c.p2, 0.5), p23 = lerp(c.p2, c.p3, 0.5);
    const Point a = lerp(p01, p12, 0.5), b = lerp(p12, p23, 0.5);
    const Point mid = lerp(a, b, 0.5);
    flatten_cubic({c.p0, p01, a, mid}, tol, depth + 1, out);
    flatten_cubic({mid, b, p23, c.p3}, tol, depth + 1, out);
}

double vector_angle(double ux, double uy, double vx, double vy) {
    return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
}

}  // namespace

Point evaluate(const CubicBezier& c, double t) {
    const double u = 1.0 - t;
    const double b0 = u * u * u, b1 = 3 * u * u * t, b2 = 3 * u * t * t, b3 = t * t * t;
    return {b0 * c.p0.x + b1 * c.p1.x + b2 * c.p2.x + b3 * c.p3.x,
            b0 * c.p0.y + b1 * c.p1.y + b2 * c.p2.y + b3 * c.p3.y};
}

std::vector<CubicBezier> arc_to_cubics(const Point& from, const cmd::Arc& arc) {
    const Point& to = arc.to;
    if (from == to) return {};
    double rx = std::fabs(arc.rx), ry = std::fabs(arc.ry);
    if (rx == 0.0 || ry == 0.0) return {CubicBezier{from, lerp(from, to, 1.0 / 3.0), lerp(from, to, 2.0 / 3.0), to}};

    // Endpoint to center conversion (SVG implementation notes).
    const double phi = arc.x_rotation_deg * std::numbers::pi / 180.0;
    const double cos_phi = std::cos(phi), sin_phi = std::sin(phi);
    const double dx2 = (from.x - to.x) / 2.0, dy2 = (from.y - to.y) / 2.0;
    const double x1p = cos_phi * dx2 + sin_phi * dy2;
    const double y1p = -sin_phi * dx2 + cos_phi * dy2;

    const double lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
    if (lambda > 1.0) {
        const double s = std::sqrt(lambda);
        rx *= s;
        ry *= s;
    }
    const double rx2 = rx * rx, ry2 = ry * ry;
    const double denom = rx2 * y1p * y1p + ry2 * x1p * x1p;
    double coef = denom > 0.0 ? std::sqrt(std::max(0.0, (rx2 * ry2 - denom) / denom)) : 0.0;
    if (arc.large_arc == arc.sweep) coef = -coef;
    const double cxp = coef * rx * y1p / ry;
    const double cyp = -coef * ry * x1p / rx;
    const double cx = cos_phi * cxp - sin_phi * cyp + (from.x + to.x) / 2.0;
    const double cy = sin_phi * cxp + cos_phi * cyp + (from.y + to.y) / 2.0;

    const double ux = (x1p - cxp) / rx, uy = (y1p - cyp) / ry;
    const double vx = (-x1p - cxp) / rx, vy = (-y1p - cyp) / ry;
    const double theta1 = vector_angle(1.0, 0.0, ux, uy);
    double delta = vector_angle(ux, uy, vx, vy);
    if (!arc.sweep && delta > 0) delta -= 2 * std::numbers::pi;
    if (arc.sweep && delta < 0) delta += 2 * std::numbers::pi;

    const int n = std::max(1, static_cast<int>(std::ceil(std::fabs(delta) / (std::numbers::pi / 2) - 1e-9)));
    const double step = delta / n;
    const double k = 4.0 / 3.0 * std::tan(step / 4.0);
    auto map = [&](double ex, double ey) {
        const double x = rx * ex, y = ry * ey;
        return Point{cos_phi * x - sin_phi * y + cx, sin_phi * x + cos_phi * y + cy};
    };

    std::vector<CubicBezier> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double a = theta1 + step * i;
        const double b = a + step;
        const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
        CubicBezier c{map(ca, sa), map(ca - k * sa, sa + k * ca), map(cb + k * sb, sb - k * cb), map(cb, sb)};
        if (i == 0) c.p0 = from;
        if (i == n - 1) c.p3 = to;
        out.push_back(c);
    }
    return out;
}

std::vector<Polyline> flatten_path(const std::vector<PathCommand>& commands, double tolerance) {
    std::vector<Polyline> out;
    Polyline current;
    Point cur{}, start{};
    auto flush = [&] {
        if (!current.points.empty()) out.push_back(std::move(current));
        current = Polyline{};
    };
    for (const auto& c : commands) {
        if (const auto* m = std::get_if<cmd::Move>(&c)) {
            flush();
            cur = start = m->to;
            current.points.push_back(cur);
        } else if (std::holds_alternative<cmd::Close>(c)) {
            if (current.points.size() > 1 && current.points.back() == start) current.points.pop_back();
            current.closed = true;
            flush();
            cur = start;
        } else {
            if (current.points.empty()) current.points.push_back(cur);
            if (const auto* l = std::get_if<cmd::Line>(&c)) {
                push_point(current.points, l->to);
                cur = l->to;
            } else if (const auto* cu = std::get_if<cmd::Cubic>(&c)) {
                flatten_cubic({cur, cu->c1, cu->c2, cu->to}, tolerance, 0, current.points);
                cur = cu->to;
            } else if (const auto* q = std::get_if<cmd::Quad>(&c)) {
                const CubicBezier elevated{cur, lerp(cur, q->c, 2.0 / 3.0), lerp(q->to, q->c, 2.0 / 3.0), q->to};
                flatten_cubic(elevated, tolerance, 0, current.points);
                cur = q->to;
            } else if (const auto* a = std::get_if<cmd::Arc>(&c)) {
                for (const auto& seg : arc_to_cubics(cur, *a)) flatten_cubic(seg, tolerance, 0, current.points);
                cur = a->to;
            }
        }
    }
    flush();
    return out;
}

}  // namespace vecdraw
