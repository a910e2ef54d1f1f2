#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "tutorforge/geometry.hpp"

namespace tutorforge {

inline constexpr int kMaxColumn = 16383;   // column XFD
inline constexpr int kMaxRow = 1048575;    // row 1048576

/// Zero-based cell coordinates. Ordering is row-major so that map iteration
/// walks the sheet the way it is read.
struct CellAddress {
    int column = 0;
    int row = 0;

    friend bool operator==(const CellAddress&, const CellAddress&) = default;
    friend auto operator<=>(const CellAddress& a, const CellAddress& b) {
        if (auto c = a.row <=> b.row; c != 0) return c;
        return a.column <=> b.column;
    }
};

/// Inclusive rectangle of cells; a single cell is a 1x1 range.
struct RangeRef {
    CellAddress top_left;
    CellAddress bottom_right;

    friend bool operator==(const RangeRef&, const RangeRef&) = default;

    int columns() const { return bottom_right.column - top_left.column + 1; }
    int rows() const { return bottom_right.row - top_left.row + 1; }
    bool single_cell() const { return top_left == bottom_right; }

    bool contains(const CellAddress& a) const {
        return a.column >= top_left.column && a.column <= bottom_right.column &&
               a.row >= top_left.row && a.row <= bottom_right.row;
    }
    bool contains(const RangeRef& r) const {
        return contains(r.top_left) && contains(r.bottom_right);
    }
};

/// Parses a single A1-notation cell reference ("A1", "aa10"). Case-insensitive.
/// Throws MalformedRange.
CellAddress parse_cell(std::string_view text);

/// Parses "A1" or "A1:G3" into the inclusive rectangle, normalising so that
/// top_left <= bottom_right on both axes. Throws MalformedRange.
RangeRef parse_range(std::string_view text);

std::string format_cell(const CellAddress& addr);
std::string format_range(const RangeRef& range);

/// Union pixel bbox of the range's cells that fall inside the fixed viewport;
/// empty rect when no cell of the range is visible.
PixelRect range_bbox(const RangeRef& range);

}  // namespace tutorforge
