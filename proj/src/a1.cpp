#include "tutorforge/a1.hpp"

#include <cctype>

#include "tutorforge/errors.hpp"

namespace tutorforge {

namespace {

// Splits "letters digits" and decodes both parts; bijective base-26 columns.
CellAddress parse_cell_token(std::string_view token, std::string_view whole) {
    size_t i = 0;
    long long column = 0;
    while (i < token.size() && std::isalpha(static_cast<unsigned char>(token[i]))) {
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(token[i])));
        column = column * 26 + (c - 'A' + 1);
        if (column > static_cast<long long>(kMaxColumn) + 1)
            throw MalformedRange("column out of bounds in \"" + std::string(whole) + "\"");
        ++i;
    }
    if (i == 0) throw MalformedRange("missing column letters in \"" + std::string(whole) + "\"");
    if (i == token.size())
        throw MalformedRange("missing row digits in \"" + std::string(whole) + "\"");

    long long row = 0;
    for (; i < token.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(token[i])))
            throw MalformedRange("unexpected character in \"" + std::string(whole) + "\"");
        row = row * 10 + (token[i] - '0');
        if (row > static_cast<long long>(kMaxRow) + 1)
            throw MalformedRange("row out of bounds in \"" + std::string(whole) + "\"");
    }
    if (row == 0) throw MalformedRange("row numbers start at 1 in \"" + std::string(whole) + "\"");
    return CellAddress{static_cast<int>(column - 1), static_cast<int>(row - 1)};
}

}  // namespace

CellAddress parse_cell(std::string_view text) {
    if (text.empty()) throw MalformedRange("empty reference");
    if (text.find(':') != std::string_view::npos)
        throw MalformedRange("expected a single cell, got \"" + std::string(text) + "\"");
    return parse_cell_token(text, text);
}

RangeRef parse_range(std::string_view text) {
    if (text.empty()) throw MalformedRange("empty reference");
    const size_t colon = text.find(':');
    if (colon == std::string_view::npos) {
        CellAddress a = parse_cell_token(text, text);
        return RangeRef{a, a};
    }
    if (text.find(':', colon + 1) != std::string_view::npos)
        throw MalformedRange("multiple ':' in \"" + std::string(text) + "\"");
    CellAddress a = parse_cell_token(text.substr(0, colon), text);
    CellAddress b = parse_cell_token(text.substr(colon + 1), text);
    RangeRef r{{std::min(a.column, b.column), std::min(a.row, b.row)},
               {std::max(a.column, b.column), std::max(a.row, b.row)}};
    return r;
}

std::string format_cell(const CellAddress& addr) {
    std::string letters;
    int n = addr.column + 1;
    while (n > 0) {
        int c = (n - 1) % 26;
        letters.insert(letters.begin(), static_cast<char>('A' + c));
        n = (n - 1) / 26;
    }
    return letters + std::to_string(addr.row + 1);
}

std::string format_range(const RangeRef& range) {
    if (range.single_cell()) return format_cell(range.top_left);
    return format_cell(range.top_left) + ":" + format_cell(range.bottom_right);
}

PixelRect range_bbox(const RangeRef& range) {
    PixelRect out{};
    for (int c = range.top_left.column; c <= range.bottom_right.column && c < kGridCols; ++c) {
        if (c < 0) continue;
        for (int r = range.top_left.row; r <= range.bottom_right.row && r < kGridRows; ++r) {
            if (r < 0) continue;
            out = out.united(cell_rect(c, r));
        }
    }
    return out;
}

}  // namespace tutorforge
