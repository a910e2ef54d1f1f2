#pragma once

#include <cstdint>
#include <string_view>

namespace tutorforge {

// Embedded fixed-metric 5x7 bitmap font for printable ASCII. Pixel tests
// assert geometry and fill colors only, never glyph shapes.
inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
inline constexpr int kGlyphAdvance = 6;  // one column of spacing

/// Seven row bytes, bit 4 = leftmost column. Unknown characters render as a
/// filled box.
const uint8_t* glyph5x7(char c);

/// Compact 3x5 digit glyphs used by mark badges; five row bytes, bit 2 leftmost.
const uint8_t* digit3x5(int digit);

int text_width(std::string_view text, int scale = 1);

}  // namespace tutorforge
