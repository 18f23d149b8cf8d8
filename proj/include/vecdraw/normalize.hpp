#pragma once

// Lowering of parsed SVGs to the canonical drawing form: absolute commands
// from {M, L, C, Q, A, Z}, a square viewbox of fixed side, and integer
// coordinates wherever rounding keeps the geometry intact.

#include <vector>

#include "vecdraw/svg.hpp"

namespace vecdraw {

inline constexpr double kCanonicalSide = 200.0;

/// Expands relative letters, shorthands (H, V, S, T) and implicit repetitions
/// into absolute restricted commands. A drawing command that directly follows
/// Z gets an explicit M to the subpath start. Arc radii are made non-negative.
std::vector<PathCommand> lower_commands(const std::vector<RawCommand>& raw);

SvgDocument lower_document(const RawDocument& raw);

/// Uniform scale by target / max(width, height), letterboxed so the scaled
/// viewbox is centered in [0, target]^2. Stroke widths scale with the content.
/// Raises NonFiniteNumber when a scaled value overflows.
SvgDocument rescale_viewbox(const SvgDocument& doc, double target = kCanonicalSide);

/// Rounds all coordinates (ties away from zero). A path whose rounding would
/// collapse a segment or a closed subpath, or bend one of its arcs away from
/// the original curve, keeps two-decimal precision instead.
/// Opacity and stroke width are snapped to two decimals.
SvgDocument quantize_coords(const SvgDocument& doc);

/// rescale_viewbox followed by quantize_coords. Idempotent.
SvgDocument normalize(const SvgDocument& doc, double target = kCanonicalSide);

}  // namespace vecdraw
