#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tutorforge/geometry.hpp"

namespace tutorforge {

/// 24-bit RGB raster with integer drawing primitives. All operations clip to
/// the raster bounds, so callers can draw with out-of-range coordinates.
class Raster {
public:
    Raster(int width, int height, Rgb background = {255, 255, 255});

    int width() const { return width_; }
    int height() const { return height_; }
    PixelRect bounds() const { return {0, 0, width_, height_}; }

    const std::vector<uint8_t>& pixels() const { return px_; }
    Rgb get(int x, int y) const;
    void set(int x, int y, Rgb color);

    void fill(const PixelRect& rect, Rgb color);
    void outline(const PixelRect& rect, Rgb color, int thickness = 1);
    void hline(int x0, int x1, int y, Rgb color);
    void vline(int x, int y0, int y1, Rgb color);

    /// Draws 5x7 glyphs with top-left at (x, y); bold doubles the horizontal
    /// stroke. Pixels outside `clip` are dropped.
    void draw_text(int x, int y, std::string_view text, Rgb color, int scale = 1,
                   bool bold = false);
    void draw_text_clipped(int x, int y, std::string_view text, Rgb color, const PixelRect& clip,
                           int scale = 1, bool bold = false);

    /// 3x5 digit string (mark badges).
    void draw_digits_small(int x, int y, std::string_view digits, Rgb color);

    friend bool operator==(const Raster& a, const Raster& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.px_ == b.px_;
    }

private:
    int width_;
    int height_;
    std::vector<uint8_t> px_;
};

/// Minimal deterministic PNG encoder (24-bit RGB, no alpha, fixed zlib level).
std::vector<uint8_t> encode_png(const Raster& raster);
void write_png(const std::filesystem::path& file, const Raster& raster);

}  // namespace tutorforge
