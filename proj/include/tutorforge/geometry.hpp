#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>

namespace tutorforge {

// Fixed application geometry. Pixel tests rely on these values; changing them
// invalidates committed screenshots.
inline constexpr int kCanvasWidth = 1280;
inline constexpr int kCanvasHeight = 800;
inline constexpr int kRibbonHeight = 120;   // QAT strip + tab strip + group area
inline constexpr int kQatStripHeight = 28;
inline constexpr int kTabStripHeight = 28;  // y in [28, 56)
inline constexpr int kCellWidth = 96;
inline constexpr int kCellHeight = 24;
inline constexpr int kGridCols = 12;  // columns A..L
inline constexpr int kGridRows = 26;  // rows 1..26
inline constexpr int kGutterWidth = 48;
inline constexpr int kColHeaderHeight = 24;
inline constexpr int kGridOriginX = kGutterWidth;                     // 48
inline constexpr int kGridOriginY = kRibbonHeight + kColHeaderHeight; // 144

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Half-open pixel rectangle: covers x in [left, right), y in [top, bottom).
struct PixelRect {
    int left = 0, top = 0, right = 0, bottom = 0;

    friend bool operator==(const PixelRect&, const PixelRect&) = default;

    int width() const { return right - left; }
    int height() const { return bottom - top; }
    bool empty() const { return right <= left || bottom <= top; }

    bool contains(int x, int y) const {
        return x >= left && x < right && y >= top && y < bottom;
    }

    bool intersects(const PixelRect& o) const {
        return left < o.right && o.left < right && top < o.bottom && o.top < bottom;
    }

    PixelRect clipped(const PixelRect& bounds) const {
        PixelRect r{std::max(left, bounds.left), std::max(top, bounds.top),
                    std::min(right, bounds.right), std::min(bottom, bounds.bottom)};
        if (r.empty()) return PixelRect{};
        return r;
    }

    PixelRect united(const PixelRect& o) const {
        if (empty()) return o;
        if (o.empty()) return *this;
        return PixelRect{std::min(left, o.left), std::min(top, o.top),
                         std::max(right, o.right), std::max(bottom, o.bottom)};
    }
};

inline constexpr PixelRect kCanvasRect{0, 0, kCanvasWidth, kCanvasHeight};

/// Pixel rectangle of a grid cell in the fixed viewport, or an empty rect if
/// the cell lies outside columns A..L / rows 1..26.
inline PixelRect cell_rect(int column, int row) {
    if (column < 0 || column >= kGridCols || row < 0 || row >= kGridRows) return {};
    return PixelRect{kGridOriginX + column * kCellWidth, kGridOriginY + row * kCellHeight,
                     kGridOriginX + (column + 1) * kCellWidth,
                     kGridOriginY + (row + 1) * kCellHeight};
}

}  // namespace tutorforge
