#include <algorithm>
#include <cmath>
#include <string>

#include "vecdraw/error.hpp"
#include "vecdraw/normalize.hpp"
#include "vecdraw/raster.hpp"

namespace vecdraw {

namespace {

template <class F>
PathCommand map_points(const PathCommand& c, F&& f) {
    return std::visit(
        [&f](const auto& v) -> PathCommand {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, cmd::Move>) return cmd::Move{f(v.to)};
            else if constexpr (std::is_same_v<T, cmd::Line>) return cmd::Line{f(v.to)};
            else if constexpr (std::is_same_v<T, cmd::Cubic>) return cmd::Cubic{f(v.c1), f(v.c2), f(v.to)};
            else if constexpr (std::is_same_v<T, cmd::Quad>) return cmd::Quad{f(v.c), f(v.to)};
            else if constexpr (std::is_same_v<T, cmd::Arc>) return v;  // radii handled by caller
            else return v;
        },
        c);
}

double snap2(double v) {
    const double r = std::round(v * 100.0) / 100.0;
    return r == 0.0 ? 0.0 : r;
}

double snap0(double v) {
    const double r = std::round(v);
    return r == 0.0 ? 0.0 : r;
}

Point snap2(const Point& p) { return {snap2(p.x), snap2(p.y)}; }
Point snap0(const Point& p) { return {snap0(p.x), snap0(p.y)}; }

std::vector<PathCommand> snap_commands(const std::vector<PathCommand>& cmds, bool integer) {
    std::vector<PathCommand> out;
    out.reserve(cmds.size());
    for (const auto& c : cmds) {
        if (const auto* arc = std::get_if<cmd::Arc>(&c)) {
            cmd::Arc a = *arc;
            a.x_rotation_deg = snap2(a.x_rotation_deg);
            a.to = integer ? snap0(snap2(a.to)) : snap2(a.to);
            const double rx2 = snap2(a.rx), ry2 = snap2(a.ry);
            a.rx = rx2;
            a.ry = ry2;
            if (integer) {
                a.rx = rx2 >= 0.5 ? std::max(1.0, snap0(rx2)) : snap0(rx2);
                a.ry = ry2 >= 0.5 ? std::max(1.0, snap0(ry2)) : snap0(ry2);
            }
            out.push_back(a);
        } else if (integer) {
            out.push_back(map_points(c, [](const Point& p) { return snap0(snap2(p)); }));
        } else {
            out.push_back(map_points(c, [](const Point& p) { return snap2(p); }));
        }
    }
    return out;
}

// Endpoint and control points of a command.
std::vector<Point> points_of(const PathCommand& c) {
    return std::visit(
        [](const auto& v) -> std::vector<Point> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, cmd::Cubic>) return {v.c1, v.c2, v.to};
            else if constexpr (std::is_same_v<T, cmd::Quad>) return {v.c, v.to};
            else if constexpr (std::is_same_v<T, cmd::Close>) return {};
            else return {v.to};
        },
        c);
}

struct ShapeFacts {
    std::vector<bool> zero_length;      // per command
    std::vector<bool> collapsed_closed;  // per subpath: closed and all points coincide
};

ShapeFacts facts(const std::vector<PathCommand>& cmds) {
    ShapeFacts f;
    f.zero_length.resize(cmds.size(), false);
    Point cur{}, start{};
    std::vector<Point> subpath_points;
    auto finish = [&](bool closed) {
        bool all_same = !subpath_points.empty();
        for (const auto& p : subpath_points) all_same = all_same && p == subpath_points.front();
        f.collapsed_closed.push_back(closed && all_same);
        subpath_points.clear();
    };
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        const auto& c = cmds[i];
        if (const auto* m = std::get_if<cmd::Move>(&c)) {
            if (!subpath_points.empty()) finish(false);
            cur = start = m->to;
            subpath_points.push_back(m->to);
            continue;
        }
        if (std::holds_alternative<cmd::Close>(c)) {
            finish(true);
            cur = start;
            continue;
        }
        const auto pts = points_of(c);
        f.zero_length[i] = std::all_of(pts.begin(), pts.end(), [&](const Point& p) { return p == cur; });
        subpath_points.insert(subpath_points.end(), pts.begin(), pts.end());
        cur = pts.back();
    }
    if (!subpath_points.empty()) finish(false);
    return f;
}

bool rounding_degenerates(const std::vector<PathCommand>& before, const std::vector<PathCommand>& after) {
    const auto b = facts(before);
    const auto a = facts(after);
    for (std::size_t i = 0; i < a.zero_length.size(); ++i) {
        if (a.zero_length[i] && !b.zero_length[i]) return true;
    }
    for (std::size_t i = 0; i < a.collapsed_closed.size() && i < b.collapsed_closed.size(); ++i) {
        if (a.collapsed_closed[i] && !b.collapsed_closed[i]) return true;
    }
    return false;
}

// Max distance an arc may drift when snapped to the 0.01 grid, and when the
// snapped arc is rounded to integers. Lines and Beziers are convex combinations
// of their control points and never move more than sqrt(2)/2.
constexpr double kMaxFineArcDrift = 0.25;
constexpr double kMaxArcDrift = 0.7;

std::vector<Point> sample_arc(const Point& from, const cmd::Arc& arc, int per_cubic) {
    std::vector<Point> pts{from};
    for (const auto& c : arc_to_cubics(from, arc)) {
        for (int k = 1; k <= per_cubic; ++k) pts.push_back(evaluate(c, static_cast<double>(k) / per_cubic));
    }
    return pts;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    const double t = len2 > 0.0 ? std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0) : 0.0;
    return std::hypot(p.x - a.x - t * dx, p.y - a.y - t * dy);
}

// One-sided distance from the samples of `a` to the polyline `b`.
double drift(const std::vector<Point>& a, const std::vector<Point>& b) {
    double worst = 0.0;
    for (const auto& p : a) {
        double best = std::hypot(p.x - b.front().x, p.y - b.front().y);
        for (std::size_t i = 1; i < b.size(); ++i) best = std::min(best, segment_distance(p, b[i - 1], b[i]));
        worst = std::max(worst, best);
    }
    return worst;
}

Point end_point(const PathCommand& c, const Point& start) {
    return std::visit(
        [&](const auto& v) -> Point {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, cmd::Close>) return start;
            else return v.to;
        },
        c);
}

// Start point of every command.
std::vector<Point> start_points(const std::vector<PathCommand>& cmds) {
    std::vector<Point> out;
    out.reserve(cmds.size());
    Point cur{}, start{};
    for (const auto& c : cmds) {
        out.push_back(cur);
        if (const auto* m = std::get_if<cmd::Move>(&c)) start = m->to;
        cur = end_point(c, start);
    }
    return out;
}

// Per command: true for arcs whose two versions are more than `limit` apart.
std::vector<bool> drifting_arcs(const std::vector<PathCommand>& before, const std::vector<PathCommand>& after,
                                double limit) {
    const auto from_b = start_points(before), from_a = start_points(after);
    std::vector<bool> out(before.size(), false);
    for (std::size_t i = 0; i < before.size(); ++i) {
        const auto* arc_b = std::get_if<cmd::Arc>(&before[i]);
        if (!arc_b) continue;
        const auto sb = sample_arc(from_b[i], *arc_b, 32);
        const auto sa = sample_arc(from_a[i], std::get<cmd::Arc>(after[i]), 32);
        out[i] = drift(sb, sa) > limit || drift(sa, sb) > limit;
    }
    return out;
}

// Replaces the flagged arcs by their cubic approximation.
std::vector<PathCommand> arcs_to_cubics(const std::vector<PathCommand>& cmds, const std::vector<bool>& flagged) {
    const auto from = start_points(cmds);
    std::vector<PathCommand> out;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        if (!flagged[i]) {
            out.push_back(cmds[i]);
            continue;
        }
        for (const auto& c : arc_to_cubics(from[i], std::get<cmd::Arc>(cmds[i]))) {
            out.push_back(cmd::Cubic{c.p1, c.p2, c.p3});
        }
    }
    return out;
}

bool any(const std::vector<bool>& v) { return std::find(v.begin(), v.end(), true) != v.end(); }

}  // namespace

SvgDocument rescale_viewbox(const SvgDocument& doc, double target) {
    const auto& vb = doc.viewbox;
    if (!(vb.width > 0.0 && vb.height > 0.0)) throw Error(ErrorCode::InvalidArgument, "viewBox must have a positive size");
    const double s = target / std::max(vb.width, vb.height);
    const double ox = (target - vb.width * s) / 2.0 - vb.min_x * s;
    const double oy = (target - vb.height * s) / 2.0 - vb.min_y * s;
    auto xf = [&](const Point& p) { return Point{p.x * s + ox, p.y * s + oy}; };

    SvgDocument out;
    out.viewbox = ViewBox{0.0, 0.0, target, target};
    out.paths.reserve(doc.paths.size());
    for (const auto& path : doc.paths) {
        SvgPath p;
        p.style = path.style;
        p.style.stroke_width = path.style.stroke_width * s;
        p.commands.reserve(path.commands.size());
        for (const auto& c : path.commands) {
            if (const auto* arc = std::get_if<cmd::Arc>(&c)) {
                cmd::Arc a = *arc;
                a.rx *= s;
                a.ry *= s;
                a.to = xf(a.to);
                p.commands.push_back(a);
            } else {
                p.commands.push_back(map_points(c, xf));
            }
        }
        bool finite = std::isfinite(p.style.stroke_width);
        for (const auto& c : p.commands) {
            map_points(c, [&](const Point& q) {
                finite = finite && std::isfinite(q.x) && std::isfinite(q.y);
                return q;
            });
            if (const auto* arc = std::get_if<cmd::Arc>(&c)) finite = finite && std::isfinite(arc->rx) && std::isfinite(arc->ry);
        }
        if (!finite) {
            throw Error(ErrorCode::NonFiniteNumber, "path " + std::to_string(out.paths.size()) + " overflows when rescaled");
        }
        out.paths.push_back(std::move(p));
    }
    return out;
}

SvgDocument quantize_coords(const SvgDocument& doc) {
    SvgDocument out;
    out.viewbox = doc.viewbox;
    out.paths.reserve(doc.paths.size());
    for (const auto& path : doc.paths) {
        // Decisions are taken on the 0.01 grid so a second pass sees identical input.
        auto fine = snap_commands(path.commands, false);
        // Eccentric or near-critical arcs can move far under even 0.01 snapping.
        const auto unstable = drifting_arcs(path.commands, fine, kMaxFineArcDrift);
        if (any(unstable)) fine = snap_commands(arcs_to_cubics(path.commands, unstable), false);
        auto coarse = snap_commands(fine, true);
        SvgPath p;
        p.commands = rounding_degenerates(fine, coarse) || any(drifting_arcs(fine, coarse, kMaxArcDrift)) ? std::move(fine) : std::move(coarse);
        p.style = path.style;
        if (p.style.fill) p.style.fill->alpha = snap2(p.style.fill->alpha);
        if (p.style.stroke) {
            p.style.stroke->alpha = snap2(p.style.stroke->alpha);
            p.style.stroke_width = std::max(0.01, snap2(p.style.stroke_width));
        } else {
            p.style.stroke_width = 0.0;
        }
        out.paths.push_back(std::move(p));
    }
    return out;
}

SvgDocument normalize(const SvgDocument& doc, double target) { return quantize_coords(rescale_viewbox(doc, target)); }

}  // namespace vecdraw
