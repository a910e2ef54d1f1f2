#include "tutorforge/raster.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <fstream>

#include <zlib.h>

#include "tutorforge/errors.hpp"
#include "tutorforge/font.hpp"

namespace tutorforge {

Raster::Raster(int width, int height, Rgb background) : width_(width), height_(height) {
    assert(width > 0 && height > 0);
    px_.resize(static_cast<size_t>(width) * height * 3);
    fill(bounds(), background);
}

Rgb Raster::get(int x, int y) const {
    if (x < 0 || x >= width_ || y < 0 || y >= height_) return {};
    const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
    return {px_[i], px_[i + 1], px_[i + 2]};
}

void Raster::set(int x, int y, Rgb color) {
    if (x < 0 || x >= width_ || y < 0 || y >= height_) return;
    const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
    px_[i] = color.r;
    px_[i + 1] = color.g;
    px_[i + 2] = color.b;
}

void Raster::fill(const PixelRect& rect, Rgb color) {
    const PixelRect r = rect.clipped(bounds());
    for (int y = r.top; y < r.bottom; ++y)
        for (int x = r.left; x < r.right; ++x) set(x, y, color);
}

void Raster::outline(const PixelRect& rect, Rgb color, int thickness) {
    fill({rect.left, rect.top, rect.right, rect.top + thickness}, color);
    fill({rect.left, rect.bottom - thickness, rect.right, rect.bottom}, color);
    fill({rect.left, rect.top, rect.left + thickness, rect.bottom}, color);
    fill({rect.right - thickness, rect.top, rect.right, rect.bottom}, color);
}

void Raster::hline(int x0, int x1, int y, Rgb color) { fill({x0, y, x1, y + 1}, color); }

void Raster::vline(int x, int y0, int y1, Rgb color) { fill({x, y0, x + 1, y1}, color); }

void Raster::draw_text(int x, int y, std::string_view text, Rgb color, int scale, bool bold) {
    draw_text_clipped(x, y, text, color, bounds(), scale, bold);
}

void Raster::draw_text_clipped(int x, int y, std::string_view text, Rgb color,
                               const PixelRect& clip, int scale, bool bold) {
    const PixelRect area = clip.clipped(bounds());
    int cx = x;
    for (char ch : text) {
        const uint8_t* rows = glyph5x7(ch);
        for (int gy = 0; gy < kGlyphHeight; ++gy) {
            for (int gx = 0; gx < kGlyphWidth; ++gx) {
                if (!(rows[gy] & (1 << (kGlyphWidth - 1 - gx)))) continue;
                for (int sy = 0; sy < scale; ++sy) {
                    for (int sx = 0; sx < scale + (bold ? 1 : 0); ++sx) {
                        const int px = cx + gx * scale + sx;
                        const int py = y + gy * scale + sy;
                        if (area.contains(px, py)) set(px, py, color);
                    }
                }
            }
        }
        cx += kGlyphAdvance * scale;
    }
}

void Raster::draw_digits_small(int x, int y, std::string_view digits, Rgb color) {
    int cx = x;
    for (char ch : digits) {
        if (ch < '0' || ch > '9') continue;
        const uint8_t* rows = digit3x5(ch - '0');
        for (int gy = 0; gy < 5; ++gy)
            for (int gx = 0; gx < 3; ++gx)
                if (rows[gy] & (1 << (2 - gx))) set(cx + gx, y + gy, color);
        cx += 4;
    }
}

// --- PNG ----------------------------------------------------------------------

namespace {

void push_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void push_chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& data) {
    push_u32(out, static_cast<uint32_t>(data.size()));
    const size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uint32_t crc = static_cast<uint32_t>(
        ::crc32(0, out.data() + start, static_cast<uInt>(out.size() - start)));
    push_u32(out, crc);
}

}  // namespace

std::vector<uint8_t> encode_png(const Raster& raster) {
    // Filter type 0 on every scanline keeps the stream trivially reproducible.
    const int w = raster.width(), h = raster.height();
    std::vector<uint8_t> scanlines;
    scanlines.reserve(static_cast<size_t>(h) * (1 + static_cast<size_t>(w) * 3));
    const auto& px = raster.pixels();
    for (int y = 0; y < h; ++y) {
        scanlines.push_back(0);
        const size_t row = static_cast<size_t>(y) * w * 3;
        scanlines.insert(scanlines.end(), px.begin() + row, px.begin() + row + w * 3);
    }

    uLongf compressed_size = ::compressBound(static_cast<uLong>(scanlines.size()));
    std::vector<uint8_t> compressed(compressed_size);
    if (::compress2(compressed.data(), &compressed_size, scanlines.data(),
                    static_cast<uLong>(scanlines.size()), 6) != Z_OK)
        throw Error("PngEncode", "zlib compression failed");
    compressed.resize(compressed_size);

    std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<uint8_t> ihdr;
    push_u32(ihdr, static_cast<uint32_t>(w));
    push_u32(ihdr, static_cast<uint32_t>(h));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // color type: truecolor
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    push_chunk(out, "IHDR", ihdr);
    push_chunk(out, "IDAT", compressed);
    push_chunk(out, "IEND", {});
    return out;
}

void write_png(const std::filesystem::path& file, const Raster& raster) {
    const std::vector<uint8_t> bytes = encode_png(raster);
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("FileWrite", "cannot open " + file.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace tutorforge
