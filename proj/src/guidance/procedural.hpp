#pragma once

// Seeded shape compositions shared by the mock guidance and generator backends.

#include <cstdint>
#include <string_view>
#include <vector>

#include "vecdraw/encoding.hpp"
#include "vecdraw/svg.hpp"

namespace vecdraw::detail {

/// Palette indices (never white) of the color words in `text`, in order.
std::vector<std::size_t> color_words(std::string_view text);

/// One filled circle, rectangle or triangle inside [20, 180]^2. Colors cycle
/// through `colors` when given, else come from the stream.
SvgPath procedural_shape(SplitMix& rng, const std::vector<std::size_t>& colors, std::size_t index);

/// `count` shapes in the canonical 200 x 200 space.
SvgDocument procedural_icon(std::string_view text, std::uint64_t seed, int count);

}  // namespace vecdraw::detail
