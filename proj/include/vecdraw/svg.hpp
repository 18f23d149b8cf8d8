#pragma once

// Typed model of the restricted SVG dialect, plus parsing and canonical
// serialization.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vecdraw {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// One command of the unrestricted path grammar, exactly as written in the
/// source: relative letters and implicit repetitions are kept, so `args` may
/// hold several argument groups of the letter's arity.
struct RawCommand {
    char letter = 'M';
    std::vector<double> args;

    friend bool operator==(const RawCommand&, const RawCommand&) = default;
};

/// Number of arguments consumed by one repetition of a path letter, or -1 for
/// letters outside the path grammar.
int command_arity(char letter);

namespace cmd {

struct Move {
    Point to;
    friend bool operator==(const Move&, const Move&) = default;
};
struct Line {
    Point to;
    friend bool operator==(const Line&, const Line&) = default;
};
struct Cubic {
    Point c1, c2, to;
    friend bool operator==(const Cubic&, const Cubic&) = default;
};
struct Quad {
    Point c, to;
    friend bool operator==(const Quad&, const Quad&) = default;
};
struct Arc {
    double rx = 0.0;
    double ry = 0.0;
    double x_rotation_deg = 0.0;
    bool large_arc = false;
    bool sweep = false;
    Point to;
    friend bool operator==(const Arc&, const Arc&) = default;
};
struct Close {
    friend bool operator==(const Close&, const Close&) = default;
};

}  // namespace cmd

/// Absolute command from the restricted {M, L, C, Q, A, Z} alphabet.
using PathCommand = std::variant<cmd::Move, cmd::Line, cmd::Cubic, cmd::Quad, cmd::Arc, cmd::Close>;

char command_letter(const PathCommand& c);

struct Color {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    double alpha = 1.0;

    friend bool operator==(const Color&, const Color&) = default;
};

enum class FillRule { NonZero, EvenOdd };

struct PathStyle {
    std::optional<Color> fill = Color{};
    FillRule fill_rule = FillRule::NonZero;
    std::optional<Color> stroke;
    double stroke_width = 0.0;  // > 0 whenever stroke is set

    friend bool operator==(const PathStyle&, const PathStyle&) = default;
};

struct SvgPath {
    std::vector<PathCommand> commands;
    PathStyle style;

    friend bool operator==(const SvgPath&, const SvgPath&) = default;
};

struct ViewBox {
    double min_x = 0.0;
    double min_y = 0.0;
    double width = 200.0;
    double height = 200.0;

    friend bool operator==(const ViewBox&, const ViewBox&) = default;
};

struct SvgDocument {
    ViewBox viewbox;
    std::vector<SvgPath> paths;

    friend bool operator==(const SvgDocument&, const SvgDocument&) = default;
};

struct RawPath {
    std::vector<RawCommand> commands;
    PathStyle style;
};

/// Output of markup parsing before command lowering.
struct RawDocument {
    ViewBox viewbox;
    std::vector<RawPath> paths;
    std::vector<std::string> warnings;
};

enum class ParseMode { Strict, Lenient };

struct ParseOptions {
    ParseMode mode = ParseMode::Strict;
};

// ---------------------------------------------------------------------------
// Basic shapes

namespace shape {

struct Rect {
    double x = 0, y = 0, width = 0, height = 0, rx = 0, ry = 0;
};
struct Circle {
    double cx = 0, cy = 0, r = 0;
};
struct Ellipse {
    double cx = 0, cy = 0, rx = 0, ry = 0;
};
struct Line {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};
struct Polygon {
    std::vector<Point> points;
};
struct Polyline {
    std::vector<Point> points;
};

}  // namespace shape

using BasicShape =
    std::variant<shape::Rect, shape::Circle, shape::Ellipse, shape::Line, shape::Polygon, shape::Polyline>;

// ---------------------------------------------------------------------------
// Operations

/// Parses an SVG path `d` attribute. Errors carry the byte offset of the
/// offending token within `text`.
std::vector<RawCommand> parse_path_data(std::string_view text);

/// Converts a basic shape to path commands. Circles and ellipses become a move
/// followed by four quarter arcs and a close. Zero-size shapes yield an empty
/// list (nothing is drawn). In lenient mode rounded rect corners are dropped
/// instead of raising RoundedRectUnsupported.
std::vector<RawCommand> shape_to_path(const BasicShape& s, ParseMode mode = ParseMode::Strict);

/// Parses markup into raw (unlowered) paths. Lenient mode skips or substitutes
/// unsupported constructs and records a warning for each.
RawDocument parse_svg_raw(std::string_view text, const ParseOptions& options = {});

/// parse_svg_raw followed by command lowering of every path.
SvgDocument parse_svg(std::string_view text, const ParseOptions& options = {});

/// Canonical text form: integers without a decimal point, everything else with
/// exactly two decimals. Values are rounded to the 0.01 grid first, so
/// documents whose numbers already lie on that grid round-trip exactly.
std::string serialize_svg(const SvgDocument& doc);

std::string serialize_path_data(const std::vector<PathCommand>& commands);

/// Canonical text of a single path element (no trailing newline).
std::string serialize_path_element(const SvgPath& path);

std::string format_number(double value);

std::string format_color(const Color& c);

/// Parses a CSS/SVG paint value (`#rgb`, `#rrggbb`, `rgb(...)`, named colors,
/// `none`). Returns nullopt for `none`/`transparent`; throws on garbage.
std::optional<Color> parse_color(std::string_view text);

}  // namespace vecdraw
