#include "tutorforge/render.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "layout.hpp"
#include "tutorforge/font.hpp"

namespace tutorforge {

namespace {

constexpr Rgb kRibbonBg{243, 244, 246};
constexpr Rgb kHeaderBg{236, 239, 243};
constexpr Rgb kChromeBorder{198, 203, 211};
constexpr Rgb kButtonBg{252, 252, 253};
constexpr Rgb kText{32, 36, 42};
constexpr Rgb kDim{110, 116, 126};
constexpr Rgb kAccent{46, 92, 160};
constexpr Rgb kMenuBg{255, 255, 255};
constexpr Rgb kDialogBg{248, 249, 250};
constexpr Rgb kDialogTitleBg{58, 90, 140};
constexpr Rgb kListSelected{201, 220, 245};
constexpr Rgb kPanelBg{240, 242, 245};
constexpr Rgb kWhite{255, 255, 255};

constexpr Rgb kChartPalette[6] = {{68, 114, 196},  {237, 125, 49}, {165, 165, 165},
                                  {255, 192, 0},   {91, 155, 213}, {112, 173, 71}};

void draw_line(Raster& r, int x0, int y0, int x1, int y1, Rgb color) {
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        r.set(x0, y0, color);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_centered(Raster& r, const PixelRect& box, std::string_view text, Rgb color,
                   bool bold = false) {
    const int w = text_width(text);
    const int x = box.left + std::max(2, (box.width() - w) / 2);
    const int y = box.top + std::max(1, (box.height() - kGlyphHeight) / 2);
    r.draw_text_clipped(x, y, text, color, box, 1, bold);
}

std::vector<double> chart_values(const Sheet& sheet, const RangeRef& source) {
    std::vector<double> values;
    for (const auto& [addr, content] : sheet.cells) {
        if (!source.contains(addr)) continue;
        if (auto n = parse_number(content.computed)) {
            values.push_back(*n);
            if (values.size() == 8) break;
        }
    }
    return values;
}

void draw_chart(Raster& r, const ChartObject& chart, const Sheet& sheet) {
    const PixelRect& box = chart.anchor_bbox;
    r.fill(box, kWhite);
    r.outline(box, kChromeBorder);
    draw_centered(r, {box.left, box.top + 4, box.right, box.top + 16},
                  chart.title.value_or("Chart"), kText, chart.title.has_value());

    const PixelRect plot{box.left + 14, box.top + 24, box.right - 14, box.bottom - 14};
    const std::vector<double> values = chart_values(sheet, chart.source);
    if (values.empty()) {
        draw_centered(r, plot, "(no numeric data)", kDim);
        return;
    }
    double max_v = 0;
    for (double v : values) max_v = std::max(max_v, std::abs(v));
    if (max_v <= 0) max_v = 1;

    if (chart.chart_type == ChartType::Bar) {
        const int n = static_cast<int>(values.size());
        const int slot = plot.width() / n;
        for (int i = 0; i < n; ++i) {
            const int h = static_cast<int>(std::lround(std::abs(values[i]) / max_v *
                                                       (plot.height() - 4)));
            const int x0 = plot.left + i * slot + slot / 6;
            r.fill({x0, plot.bottom - h, x0 + slot - slot / 3, plot.bottom},
                   kChartPalette[i % 6]);
        }
    } else if (chart.chart_type == ChartType::Line) {
        const int n = static_cast<int>(values.size());
        int prev_x = 0, prev_y = 0;
        for (int i = 0; i < n; ++i) {
            const int x = n == 1 ? (plot.left + plot.right) / 2
                                 : plot.left + i * (plot.width() - 1) / (n - 1);
            const int y = plot.bottom - 2 -
                          static_cast<int>(std::lround(std::abs(values[i]) / max_v *
                                                       (plot.height() - 4)));
            if (i > 0) draw_line(r, prev_x, prev_y, x, y, kChartPalette[0]);
            r.fill({x - 1, y - 1, x + 2, y + 2}, kChartPalette[0]);
            prev_x = x;
            prev_y = y;
        }
    } else {  // pie
        double total = 0;
        for (double v : values) total += std::abs(v);
        if (total <= 0) total = 1;
        const int cx = (plot.left + plot.right) / 2, cy = (plot.top + plot.bottom) / 2;
        const int radius = std::min(plot.width(), plot.height()) / 2 - 2;
        for (int y = cy - radius; y <= cy + radius; ++y) {
            for (int x = cx - radius; x <= cx + radius; ++x) {
                const double dx = x - cx, dy = y - cy;
                if (dx * dx + dy * dy > static_cast<double>(radius) * radius) continue;
                double angle = std::atan2(dy, dx) + 3.14159265358979323846 / 2;
                if (angle < 0) angle += 2 * 3.14159265358979323846;
                const double frac = angle / (2 * 3.14159265358979323846);
                double acc = 0;
                size_t slice = values.size() - 1;
                for (size_t i = 0; i < values.size(); ++i) {
                    acc += std::abs(values[i]) / total;
                    if (frac <= acc + 1e-12) {
                        slice = i;
                        break;
                    }
                }
                r.set(x, y, kChartPalette[slice % 6]);
            }
        }
    }
}

std::optional<RangeRef> merge_at(const Sheet& sheet, const CellAddress& addr) {
    for (const RangeRef& m : sheet.merges)
        if (m.contains(addr)) return m;
    return std::nullopt;
}

void draw_grid(Raster& r, const AppState& state) {
    const Sheet& sheet = state.active();
    const PixelRect grid{kGridOriginX, kGridOriginY, kGridOriginX + kGridCols * kCellWidth,
                         kGridOriginY + kGridRows * kCellHeight};

    // Headers.
    r.fill({0, kRibbonHeight, grid.right, kGridOriginY}, kHeaderBg);
    r.fill({0, kGridOriginY, kGutterWidth, grid.bottom}, kHeaderBg);
    for (int c = 0; c < kGridCols; ++c) {
        const PixelRect box{kGridOriginX + c * kCellWidth, kRibbonHeight,
                            kGridOriginX + (c + 1) * kCellWidth, kGridOriginY};
        draw_centered(r, box, format_cell({c, 0}).substr(0, 1), kDim);
    }
    for (int row = 0; row < kGridRows; ++row) {
        const PixelRect box{0, kGridOriginY + row * kCellHeight, kGutterWidth,
                            kGridOriginY + (row + 1) * kCellHeight};
        const std::string label = std::to_string(row + 1);
        r.draw_text_clipped(box.right - 6 - text_width(label), box.top + 8, label, kDim, box);
    }

    // Cell backgrounds: fills, then the selection tint on top.
    for (int row = 0; row < kGridRows; ++row) {
        for (int c = 0; c < kGridCols; ++c) {
            auto it = sheet.formats.find({c, row});
            if (it != sheet.formats.end() && it->second.fill)
                r.fill(cell_rect(c, row), *it->second.fill);
        }
    }
    if (state.selection) {
        for (int row = state.selection->top_left.row;
             row <= std::min(state.selection->bottom_right.row, kGridRows - 1); ++row)
            for (int c = state.selection->top_left.column;
                 c <= std::min(state.selection->bottom_right.column, kGridCols - 1); ++c)
                if (row >= 0 && c >= 0) r.fill(cell_rect(c, row), kSelectionTint);
    }

    // Grid lines.
    for (int c = 0; c <= kGridCols; ++c)
        r.vline(kGridOriginX + c * kCellWidth, kGridOriginY, grid.bottom, kGridLine);
    for (int row = 0; row <= kGridRows; ++row)
        r.hline(0, grid.right, kGridOriginY + row * kCellHeight, kGridLine);
    r.hline(0, grid.right, kRibbonHeight, kChromeBorder);
    r.vline(kGutterWidth, kRibbonHeight, grid.bottom, kChromeBorder);

    // Merged ranges render as one region (top-left value spans the rect).
    for (const RangeRef& m : sheet.merges) {
        const PixelRect box = range_bbox(m);
        if (box.empty()) continue;
        auto fmt = sheet.formats.find(m.top_left);
        Rgb bg = kWhite;
        if (fmt != sheet.formats.end() && fmt->second.fill) bg = *fmt->second.fill;
        const bool selected = state.selection && state.selection->contains(m.top_left);
        r.fill({box.left + 1, box.top + 1, box.right, box.bottom}, selected ? kSelectionTint : bg);
    }

    // Cell text.
    for (const auto& [addr, content] : sheet.cells) {
        if (addr.column >= kGridCols || addr.row >= kGridRows) continue;
        if (content.computed.empty()) continue;
        if (auto m = merge_at(sheet, addr); m && !(addr == m->top_left)) continue;
        PixelRect box = cell_rect(addr.column, addr.row);
        if (auto m = merge_at(sheet, addr)) box = range_bbox(*m);
        auto fmt = sheet.formats.find(addr);
        const bool bold = fmt != sheet.formats.end() && fmt->second.bold;
        r.draw_text_clipped(box.left + 4, box.top + 8, content.computed, kText,
                            {box.left + 2, box.top, box.right - 2, box.bottom}, 1, bold);
    }

    // Selection border above everything in the grid.
    if (state.selection) {
        const PixelRect box = range_bbox(*state.selection);
        if (!box.empty()) r.outline(box, kSelectionBorder, 2);
    }

    if (state.frozen_panes)
        r.fill({kGutterWidth, kGridOriginY + kCellHeight - 1, grid.right,
                kGridOriginY + kCellHeight + 1},
               kAccent);

    for (const ChartObject& chart : sheet.charts) draw_chart(r, chart, sheet);

    if (state.navigation_pane) {
        const PixelRect pane{grid.right, kGridOriginY, kCanvasWidth, grid.bottom};
        r.fill(pane, kPanelBg);
        r.vline(pane.left, pane.top, pane.bottom, kChromeBorder);
        r.draw_text_clipped(pane.left + 6, pane.top + 8, "Sheets", kDim, pane);
        int y = pane.top + 24;
        for (const Sheet& s : state.workbook) {
            r.draw_text_clipped(pane.left + 6, y, s.name, kText, pane);
            y += 16;
        }
    }
}

void draw_chrome_node(Raster& r, const AppState& state, const detail::VisibleNode& vn) {
    const AccessibilityNode& n = vn.node;
    const Rgb label = n.enabled ? kText : kDim;
    if (n.id.rfind("cell.", 0) == 0) return;  // grid drawn separately

    if (n.control_type == ControlType::Tab ||
        (n.control_type == ControlType::MenuItem && n.bbox.top < kQatStripHeight + kTabStripHeight)) {
        const bool active = state.active_tab == n.id;
        if (active) {
            r.fill(n.bbox, kWhite);
            r.fill({n.bbox.left, n.bbox.bottom - 2, n.bbox.right, n.bbox.bottom}, kAccent);
        }
        draw_centered(r, n.bbox, n.name, active ? kAccent : label);
        return;
    }
    // QAT entries and ribbon buttons.
    r.fill(n.bbox, kButtonBg);
    r.outline(n.bbox, kChromeBorder);
    if (n.bbox.width() <= 28)
        draw_centered(r, n.bbox, n.name.substr(0, 1), label);
    else
        draw_centered(r, n.bbox, n.name, label);
}

void draw_menus(Raster& r, const detail::Layout& layout) {
    for (const PixelRect& panel : layout.menu_panels) {
        r.fill(panel, kMenuBg);
        r.outline(panel, kChromeBorder);
    }
    for (const detail::VisibleNode& vn : layout.nodes) {
        if (vn.z != 1) continue;
        r.draw_text_clipped(vn.node.bbox.left + 8, vn.node.bbox.top + 9, vn.node.name,
                            vn.node.enabled ? kText : kDim, vn.node.bbox);
        if (!vn.node.children.empty())
            r.draw_text_clipped(vn.node.bbox.right - 12, vn.node.bbox.top + 9, ">", kDim,
                                vn.node.bbox);
    }
}

void draw_dialog(Raster& r, const AppState& state, const detail::Layout& layout) {
    if (!layout.dialog_frame) return;
    const PixelRect& frame = *layout.dialog_frame;
    r.fill(frame, kDialogBg);
    r.outline(frame, kChromeBorder);
    r.fill({frame.left, frame.top, frame.right, frame.top + 30}, kDialogTitleBg);
    r.draw_text_clipped(frame.left + 10, frame.top + 11, layout.dialog_title, kWhite, frame);

    for (const detail::VisibleNode& vn : layout.nodes) {
        if (vn.z != 2 || vn.node.control_type == ControlType::Dialog) continue;
        const PixelRect& box = vn.node.bbox;
        switch (vn.node.control_type) {
            case ControlType::Edit: {
                r.fill(box, kWhite);
                r.outline(box, kChromeBorder);
                std::string text;
                if (state.open_dialog) {
                    auto it = state.open_dialog->fields.find("text");
                    if (it != state.open_dialog->fields.end()) text = it->second;
                }
                r.draw_text_clipped(box.left + 6, box.top + 10,
                                    text.empty() ? vn.node.name : text,
                                    text.empty() ? kDim : kText, box);
                break;
            }
            case ControlType::Button:
                r.fill(box, kButtonBg);
                r.outline(box, kChromeBorder);
                draw_centered(r, box, vn.node.name, vn.node.enabled ? kText : kDim);
                break;
            default:  // list items, checkboxes
                if (vn.selected) r.fill(box, kListSelected);
                r.draw_text_clipped(box.left + 6, box.top + (box.height() - kGlyphHeight) / 2,
                                    vn.node.name, kText, box);
                break;
        }
    }
}

}  // namespace

Screenshot render_screenshot(const AppState& state) {
    Screenshot shot;
    Raster& r = shot.raster;
    const detail::Layout layout = detail::compute_layout(state);

    r.fill({0, 0, kCanvasWidth, kRibbonHeight}, kRibbonBg);
    r.hline(0, kCanvasWidth, kQatStripHeight, kChromeBorder);
    r.hline(0, kCanvasWidth, kQatStripHeight + kTabStripHeight, kChromeBorder);

    for (const detail::VisibleNode& vn : layout.nodes)
        if (vn.z == 0) draw_chrome_node(r, state, vn);

    draw_grid(r, state);

    // Status bar.
    r.fill({0, kGridOriginY + kGridRows * kCellHeight, kCanvasWidth, kCanvasHeight}, kHeaderBg);
    r.draw_text(8, kGridOriginY + kGridRows * kCellHeight + 12,
                state.active().name + "  |  Ready", kDim);

    draw_menus(r, layout);
    draw_dialog(r, state, layout);

    for (const detail::VisibleNode& vn : layout.nodes)
        shot.region_index[vn.node.id] = vn.node.bbox;
    return shot;
}

}  // namespace tutorforge
