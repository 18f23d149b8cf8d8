#pragma once

// Rendering of canonical documents to RGB rasters, curve flattening, and pen
// trajectory export.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vecdraw/svg.hpp"

namespace vecdraw {

inline constexpr int kDefaultResolution = 224;
inline constexpr double kDefaultFlatness = 0.25;

/// Row-major RGB8 image.
class RasterImage {
public:
    RasterImage(int width, int height, std::uint8_t r = 255, std::uint8_t g = 255, std::uint8_t b = 255);
    RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }
    std::vector<std::uint8_t>& pixels() noexcept { return pixels_; }

    const std::uint8_t* at(int x, int y) const { return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3; }
    std::uint8_t* at(int x, int y) { return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3; }

    bool is_white(int x, int y) const {
        const auto* p = at(x, y);
        return p[0] == 255 && p[1] == 255 && p[2] == 255;
    }

    bool all_white() const;

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

struct Polyline {
    std::vector<Point> points;
    bool closed = false;
};

struct CubicBezier {
    Point p0, p1, p2, p3;
};

/// Converts an endpoint-parameterized arc starting at `from` into cubic
/// segments that each sweep at most 90 degrees. Out-of-range radii are scaled
/// up; a zero radius yields a single straight cubic; coincident endpoints
/// yield nothing.
std::vector<CubicBezier> arc_to_cubics(const Point& from, const cmd::Arc& arc);

Point evaluate(const CubicBezier& c, double t);

/// One polyline per subpath. Consecutive duplicate points are dropped and the
/// closing point of a Z subpath is implicit (closed = true).
std::vector<Polyline> flatten_path(const std::vector<PathCommand>& commands, double tolerance = kDefaultFlatness);

/// Paints the document over opaque white. The viewbox is fit into the square
/// canvas with letterboxing.
RasterImage render(const SvgDocument& doc, int resolution = kDefaultResolution);

enum class PenState { Up, Down };

struct TrajectorySegment {
    PenState pen = PenState::Down;
    std::vector<Point> points;
};

struct Trajectory {
    std::vector<TrajectorySegment> segments;
};

Trajectory path_to_trajectory(const SvgDocument& doc, double spacing);

/// One `U x y` or `D x y` line per point.
std::string format_trajectory(const Trajectory& t);

// ---------------------------------------------------------------------------
// Image I/O and resampling

std::vector<std::uint8_t> encode_png(const RasterImage& img);
RasterImage decode_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_ppm(const RasterImage& img);

void write_image(const std::string& path, const RasterImage& img);  // .png or .ppm by extension
RasterImage read_png_file(const std::string& path);

/// Area-averaging resample into a side x side canvas, aspect preserved and
/// centered on white. Returns an identical copy when no resizing is needed.
RasterImage resample_letterbox(const RasterImage& img, int side);

}  // namespace vecdraw
