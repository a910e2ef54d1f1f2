#include "tutorforge/sheet.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tutorforge/errors.hpp"

namespace tutorforge {

using nlohmann::json;

std::string to_string(ChartType t) {
    switch (t) {
        case ChartType::Bar: return "bar";
        case ChartType::Line: return "line";
        case ChartType::Pie: return "pie";
    }
    return "bar";
}

ChartType chart_type_from_string(const std::string& s) {
    if (s == "bar") return ChartType::Bar;
    if (s == "line") return ChartType::Line;
    if (s == "pie") return ChartType::Pie;
    throw InvalidTemplate("unknown chart type \"" + s + "\"");
}

std::optional<RangeRef> Sheet::used_bounds() const {
    std::optional<RangeRef> bounds;
    for (const auto& [addr, content] : cells) {
        if (content.kind == CellKind::Empty) continue;
        if (!bounds) {
            bounds = RangeRef{addr, addr};
        } else {
            bounds->top_left.column = std::min(bounds->top_left.column, addr.column);
            bounds->top_left.row = std::min(bounds->top_left.row, addr.row);
            bounds->bottom_right.column = std::max(bounds->bottom_right.column, addr.column);
            bounds->bottom_right.row = std::max(bounds->bottom_right.row, addr.row);
        }
    }
    return bounds;
}

int Sheet::column_count_used() const {
    auto b = used_bounds();
    return b ? b->bottom_right.column + 1 : 0;
}

int Sheet::row_count_used() const {
    auto b = used_bounds();
    return b ? b->bottom_right.row + 1 : 0;
}

const CellContent* Sheet::cell(const CellAddress& a) const {
    auto it = cells.find(a);
    return it == cells.end() ? nullptr : &it->second;
}

std::string Sheet::display(const CellAddress& a) const {
    const CellContent* c = cell(a);
    return c ? c->computed : "";
}

namespace {

void check_addressable(const RangeRef& r) {
    if (r.top_left.column < 0 || r.top_left.row < 0 || r.bottom_right.column > kMaxColumn ||
        r.bottom_right.row > kMaxRow)
        throw OutOfBounds(format_range(r) + " exceeds the addressable space");
}

void store_cell(Sheet& sheet, const CellAddress& addr, const std::string& raw) {
    CellContent c = classify_cell(raw);
    if (c.kind == CellKind::Empty)
        sheet.cells.erase(addr);
    else
        sheet.cells[addr] = std::move(c);
}

}  // namespace

// --- The six spreadsheet APIs -------------------------------------------

std::string table2markdown(const AppState& state, const RangeRef& range) {
    check_addressable(range);
    const Sheet& sheet = state.active();

    bool any = false;
    for (const auto& [addr, content] : sheet.cells)
        if (range.contains(addr) && content.kind != CellKind::Empty) any = true;
    if (!any) throw EmptyRange("no content in " + format_range(range));

    std::ostringstream out;
    auto emit_row = [&](int row) {
        out << "|";
        for (int c = range.top_left.column; c <= range.bottom_right.column; ++c)
            out << " " << sheet.display({c, row}) << " |";
    };
    emit_row(range.top_left.row);
    out << "\n|";
    for (int c = range.top_left.column; c <= range.bottom_right.column; ++c) out << " --- |";
    for (int r = range.top_left.row + 1; r <= range.bottom_right.row; ++r) {
        out << "\n";
        emit_row(r);
    }
    return out.str();
}

RangeRef insert_excel_table(AppState& state, const std::vector<std::vector<std::string>>& data,
                            const CellAddress& anchor) {
    if (data.empty() || data.front().empty()) throw NonRectangularData("data grid is empty");
    const size_t cols = data.front().size();
    for (const auto& row : data)
        if (row.size() != cols)
            throw NonRectangularData("row width " + std::to_string(row.size()) +
                                     " differs from " + std::to_string(cols));

    RangeRef covered{anchor,
                     {anchor.column + static_cast<int>(cols) - 1,
                      anchor.row + static_cast<int>(data.size()) - 1}};
    check_addressable(covered);

    Sheet& sheet = state.active();
    for (size_t r = 0; r < data.size(); ++r)
        for (size_t c = 0; c < cols; ++c)
            store_cell(sheet, {anchor.column + static_cast<int>(c),
                               anchor.row + static_cast<int>(r)},
                       data[r][c]);
    recompute_formulas(state);
    return covered;
}

void select_table_range(AppState& state, const RangeRef& range) {
    check_addressable(range);
    state.selection = range;
}

void set_cell_value(AppState& state, const CellAddress& addr, const std::string& value) {
    check_addressable(RangeRef{addr, addr});
    store_cell(state.active(), addr, value);
    recompute_formulas(state);
}

void auto_fill(AppState& state, const RangeRef& source, const RangeRef& target) {
    check_addressable(source);
    check_addressable(target);

    const bool row_wise = source.rows() == 1 && target.rows() == 1 &&
                          source.top_left.row == target.top_left.row;
    const bool col_wise = source.columns() == 1 && target.columns() == 1 &&
                          source.top_left.column == target.top_left.column;
    if (!row_wise && !col_wise)
        throw IncompatibleRanges("source and target must be collinear single rows or columns");

    // Cells to fill: the part of the target past the source's end.
    std::vector<CellAddress> fill;
    if (row_wise) {
        if (target.bottom_right.column <= source.bottom_right.column)
            throw IncompatibleRanges("target does not extend the source");
        for (int c = std::max(target.top_left.column, source.bottom_right.column + 1);
             c <= target.bottom_right.column; ++c)
            fill.push_back({c, source.top_left.row});
    } else {
        if (target.bottom_right.row <= source.bottom_right.row)
            throw IncompatibleRanges("target does not extend the source");
        for (int r = std::max(target.top_left.row, source.bottom_right.row + 1);
             r <= target.bottom_right.row; ++r)
            fill.push_back({source.top_left.column, r});
    }

    Sheet& sheet = state.active();
    std::vector<std::string> values;
    if (row_wise)
        for (int c = source.top_left.column; c <= source.bottom_right.column; ++c)
            values.push_back(sheet.display({c, source.top_left.row}));
    else
        for (int r = source.top_left.row; r <= source.bottom_right.row; ++r)
            values.push_back(sheet.display({source.top_left.column, r}));

    // Pattern rules, in priority order: numeric progression, trailing-integer
    // increment, cyclic repeat.
    std::vector<double> nums;
    bool all_numeric = !values.empty();
    for (const auto& v : values) {
        auto n = parse_number(v);
        if (!n) {
            all_numeric = false;
            break;
        }
        nums.push_back(*n);
    }

    auto trailing_int = [](const std::string& s) -> std::optional<std::pair<std::string, long long>> {
        size_t i = s.size();
        while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
        if (i == s.size() || s.size() - i > 17) return std::nullopt;
        return std::pair{s.substr(0, i), std::stoll(s.substr(i))};
    };

    std::vector<std::string> out;
    if (all_numeric) {
        double last = nums.back();
        double step = nums.size() >= 2 ? nums.back() - nums[nums.size() - 2] : 0.0;
        for (size_t i = 0; i < fill.size(); ++i) out.push_back(format_number(last + step * (i + 1)));
    } else if (auto t = trailing_int(values.back())) {
        for (size_t i = 0; i < fill.size(); ++i)
            out.push_back(t->first + std::to_string(t->second + static_cast<long long>(i) + 1));
    } else {
        for (size_t i = 0; i < fill.size(); ++i) out.push_back(values[i % values.size()]);
    }

    for (size_t i = 0; i < fill.size(); ++i) store_cell(sheet, fill[i], out[i]);
    recompute_formulas(state);
}

void reorder_columns(AppState& state, const std::vector<int>& order) {
    Sheet& sheet = state.active();
    const int used = sheet.column_count_used();
    if (static_cast<int>(order.size()) != used)
        throw InvalidPermutation("expected " + std::to_string(used) + " indices, got " +
                                 std::to_string(order.size()));
    std::vector<bool> seen(order.size(), false);
    for (int idx : order) {
        if (idx < 0 || idx >= used || seen[static_cast<size_t>(idx)])
            throw InvalidPermutation("index " + std::to_string(idx) + " duplicated or out of range");
        seen[static_cast<size_t>(idx)] = true;
    }

    std::map<CellAddress, CellContent> cells;
    for (auto& [addr, content] : sheet.cells) {
        CellAddress moved = addr.column < used ? CellAddress{order[static_cast<size_t>(addr.column)], addr.row} : addr;
        cells[moved] = std::move(content);
    }
    std::map<CellAddress, CellFormat> formats;
    for (auto& [addr, fmt] : sheet.formats) {
        CellAddress moved = addr.column < used ? CellAddress{order[static_cast<size_t>(addr.column)], addr.row} : addr;
        formats[moved] = fmt;
    }
    sheet.cells = std::move(cells);
    sheet.formats = std::move(formats);
    recompute_formulas(state);
}

PixelRect chart_anchor(int index) {
    return PixelRect{560 + 24 * index, 280 + 24 * index, 880 + 24 * index, 500 + 24 * index};
}

// --- State construction ----------------------------------------------------

AppState make_blank_state(UiTreePtr tree) {
    AppState state;
    state.ui_tree = std::move(tree);
    Sheet sheet;
    sheet.name = "Sheet1";
    state.workbook.push_back(std::move(sheet));
    return state;
}

AppState parse_workbook(const std::string& json_text, UiTreePtr tree) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidTemplate(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("sheets") || !doc["sheets"].is_array() ||
        doc["sheets"].empty())
        throw InvalidTemplate("expected an object with a non-empty \"sheets\" array");
    if (doc.contains("ui_tree_version") && tree &&
        doc["ui_tree_version"].get<std::string>() != tree->version)
        throw InvalidTemplate("template requires ui_tree version " +
                              doc["ui_tree_version"].get<std::string>() + ", loaded " +
                              tree->version);

    AppState state;
    state.ui_tree = std::move(tree);
    for (const auto& js : doc["sheets"]) {
        Sheet sheet;
        sheet.name = js.value("name", "Sheet1");
        if (sheet.name.empty()) throw InvalidTemplate("sheet name must be non-empty");
        for (const Sheet& existing : state.workbook)
            if (existing.name == sheet.name)
                throw InvalidTemplate("duplicate sheet name \"" + sheet.name + "\"");
        if (js.contains("cells")) {
            for (const auto& [key, value] : js["cells"].items()) {
                CellAddress addr = parse_cell(key);
                store_cell(sheet, addr, value.get<std::string>());
            }
        }
        int chart_seq = 0;
        if (js.contains("charts")) {
            for (const auto& jc : js["charts"]) {
                ChartObject chart;
                chart.id = jc.value("id", "chart" + std::to_string(++chart_seq));
                chart.chart_type = chart_type_from_string(jc.value("chart_type", "bar"));
                chart.source = parse_range(jc.at("source").get<std::string>());
                if (jc.contains("title")) chart.title = jc["title"].get<std::string>();
                chart.anchor_bbox = chart_anchor(static_cast<int>(sheet.charts.size()));
                auto bounds = sheet.used_bounds();
                if (!bounds || !bounds->contains(chart.source))
                    throw InvalidTemplate("chart \"" + chart.id + "\" source " +
                                          format_range(chart.source) + " outside used bounds");
                sheet.charts.push_back(std::move(chart));
            }
        }
        state.workbook.push_back(std::move(sheet));
    }
    recompute_formulas(state);
    return state;
}

AppState load_workbook(const std::filesystem::path& file, UiTreePtr tree) {
    std::ifstream in(file);
    if (!in) throw InvalidTemplate("cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_workbook(buf.str(), std::move(tree));
}

// --- Fingerprint -------------------------------------------------------------

namespace {

class Fnv64 {
public:
    void bytes(const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 1099511628211ull;
        }
    }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void u64(uint64_t v) { bytes(&v, sizeof v); }
    void i32(int v) { u64(static_cast<uint64_t>(static_cast<int64_t>(v))); }
    uint64_t value() const { return hash_; }

private:
    uint64_t hash_ = 14695981039346656037ull;
};

}  // namespace

uint64_t state_fingerprint(const AppState& state) {
    Fnv64 h;
    h.u64(state.workbook.size());
    for (const Sheet& sheet : state.workbook) {
        h.str(sheet.name);
        h.u64(sheet.cells.size());
        for (const auto& [addr, content] : sheet.cells) {
            h.i32(addr.column);
            h.i32(addr.row);
            h.str(content.raw);
        }
        uint64_t live_formats = 0;
        for (const auto& [addr, fmt] : sheet.formats)
            if (!fmt.is_default()) ++live_formats;
        h.u64(live_formats);
        for (const auto& [addr, fmt] : sheet.formats) {
            if (fmt.is_default()) continue;
            h.i32(addr.column);
            h.i32(addr.row);
            h.i32(fmt.bold ? 1 : 0);
            h.i32(fmt.fill ? (fmt.fill->r << 16 | fmt.fill->g << 8 | fmt.fill->b) : -1);
        }
        h.u64(sheet.merges.size());
        for (const RangeRef& m : sheet.merges) h.str(format_range(m));
        h.u64(sheet.charts.size());
        for (const ChartObject& c : sheet.charts) {
            h.str(c.id);
            h.str(to_string(c.chart_type));
            h.str(format_range(c.source));
            h.str(c.title.value_or("\x01"));
            h.i32(c.anchor_bbox.left);
            h.i32(c.anchor_bbox.top);
        }
    }
    h.i32(state.active_sheet);
    h.str(state.selection ? format_range(*state.selection) : "\x01");
    h.str(state.active_tab);
    h.u64(state.open_menu_path.size());
    for (const auto& id : state.open_menu_path) h.str(id);
    if (state.open_dialog) {
        h.str(state.open_dialog->id);
        h.u64(state.open_dialog->fields.size());
        for (const auto& [k, v] : state.open_dialog->fields) {
            h.str(k);
            h.str(v);
        }
    } else {
        h.str("\x01");
    }
    h.u64(state.quick_access_items.size());
    for (const auto& id : state.quick_access_items) h.str(id);
    h.i32(state.frozen_panes ? 1 : 0);
    h.i32(state.navigation_pane ? 1 : 0);
    return h.value();
}

}  // namespace tutorforge
