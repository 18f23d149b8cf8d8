#include <cmath>

#include "vecdraw/error.hpp"
#include "vecdraw/raster.hpp"

namespace vecdraw {

Trajectory path_to_trajectory(const SvgDocument& doc, double spacing) {
    if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "spacing must be positive");
    Trajectory out;
    for (const auto& path : doc.paths) {
        for (const auto& pl : flatten_path(path.commands)) {
            if (pl.points.size() < 2) continue;
            std::vector<Point> route = pl.points;
            if (pl.closed) route.push_back(route.front());

            TrajectorySegment down{PenState::Down, {route.front()}};
            for (std::size_t i = 1; i < route.size(); ++i) {
                const Point a = route[i - 1], b = route[i];
                const double len = std::hypot(b.x - a.x, b.y - a.y);
                if (len == 0.0) continue;
                const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
                for (int k = 1; k <= pieces; ++k) {
                    const double t = static_cast<double>(k) / pieces;
                    const Point p = k == pieces ? b : Point{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
                    if (!(p == down.points.back())) down.points.push_back(p);
                }
            }
            if (down.points.size() < 2) continue;
            if (!out.segments.empty()) {
                out.segments.push_back({PenState::Up, {out.segments.back().points.back(), down.points.front()}});
            }
            out.segments.push_back(std::move(down));
        }
    }
    return out;
}

std::string format_trajectory(const Trajectory& t) {
    std::string out;
    for (const auto& seg : t.segments) {
        const char tag = seg.pen == PenState::Up ? 'U' : 'D';
        for (const auto& p : seg.points) {
            out += tag;
            out += ' ';
            out += format_number(p.x);
            out += ' ';
            out += format_number(p.y);
            out += '\n';
        }
    }
    return out;
}

}  // namespace vecdraw
