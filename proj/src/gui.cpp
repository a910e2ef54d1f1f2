#include <algorithm>
#include <functional>
#include <map>

#include "layout.hpp"
#include "tutorforge/errors.hpp"
#include "tutorforge/sheet.hpp"

namespace tutorforge {

namespace detail {

std::string find_command_name(const UiCommandTree& tree, const std::string& command_id) {
    for (const UiDialog& dlg : tree.dialogs)
        for (const DialogCategory& cat : dlg.categories)
            for (const DialogCommand& cmd : cat.commands)
                if (cmd.id == command_id) return cmd.name;
    return command_id;
}

namespace {

bool path_search(const UiControl& control, const std::string& id, std::vector<std::string>& path) {
    path.push_back(control.id);
    if (control.id == id) return true;
    for (const UiControl& sub : control.submenu)
        if (path_search(sub, id, path)) return true;
    path.pop_back();
    return false;
}

}  // namespace

std::vector<std::string> find_menu_path(const UiCommandTree& tree, const std::string& id) {
    std::vector<std::string> path;
    if (path_search(tree.qat_dropdown, id, path)) return path;
    for (const UiTab& tab : tree.tabs) {
        for (const UiControl& item : tab.menu) {
            path.assign(1, tab.id);
            if (path_search(item, id, path)) return path;
        }
    }
    return {};
}

namespace {

bool predicate_holds(const AppState& state, const std::string& name) {
    if (name.empty()) return true;
    if (name == "has_charts") return !state.active().charts.empty();
    if (name == "has_selection") return state.selection.has_value();
    return true;  // unknown predicates validated at load time
}

void add_node(Layout& out, std::string id, std::string name, ControlType type, PixelRect bbox,
              bool enabled, int z, std::vector<std::string> children = {}) {
    VisibleNode vn;
    vn.node.id = std::move(id);
    vn.node.name = std::move(name);
    vn.node.control_type = type;
    vn.node.bbox = bbox;
    vn.node.enabled = enabled;
    vn.node.children = std::move(children);
    vn.z = z;
    out.nodes.push_back(std::move(vn));
}

void layout_menu_column(Layout& out, const std::vector<UiControl>& items, int left, int top,
                        bool modal_blocked) {
    constexpr int kItemW = 220, kItemH = 26;
    PixelRect panel{left, top, left + kItemW, top + static_cast<int>(items.size()) * kItemH};
    out.menu_panels.push_back(panel);
    int y = top;
    for (const UiControl& item : items) {
        std::vector<std::string> children;
        for (const UiControl& sub : item.submenu) children.push_back(sub.id);
        add_node(out, item.id, item.name, item.type, {left, y, left + kItemW, y + kItemH},
                 !modal_blocked && item.enabled, 1, std::move(children));
        y += kItemH;
    }
}

void layout_dialog(Layout& out, const AppState& state, const UiDialog& dlg) {
    constexpr int kW = 560, kH = 380;
    const PixelRect frame{(kCanvasWidth - kW) / 2, (kCanvasHeight - kH) / 2,
                          (kCanvasWidth + kW) / 2, (kCanvasHeight + kH) / 2};
    out.dialog_frame = frame;
    out.dialog_title = dlg.title;

    const auto& fields = state.open_dialog->fields;
    std::vector<std::string> children;

    int y = frame.top + 44;
    if (!dlg.categories.empty()) {
        const std::string active_cat = fields.count("category") ? fields.at("category")
                                                                : dlg.categories.front().id;
        int x = frame.left + 20;
        for (const DialogCategory& cat : dlg.categories) {
            add_node(out, cat.id, cat.name, ControlType::ListItem, {x, y, x + 220, y + 26}, true, 2);
            out.nodes.back().selected = cat.id == active_cat;
            children.push_back(cat.id);
            x += 230;
        }
        y += 36;
        for (const DialogCategory& cat : dlg.categories) {
            if (cat.id != active_cat) continue;
            const std::string selected = fields.count("selected") ? fields.at("selected") : "";
            for (const DialogCommand& cmd : cat.commands) {
                add_node(out, cmd.id, cmd.name, ControlType::ListItem,
                         {frame.left + 20, y, frame.left + 300, y + 24}, true, 2);
                out.nodes.back().selected = cmd.id == selected;
                children.push_back(cmd.id);
                y += 26;
            }
        }
        y += 8;
    }

    std::vector<const UiControl*> buttons;
    for (const UiControl& c : dlg.controls) {
        if (c.type == ControlType::Button) {
            buttons.push_back(&c);
            continue;
        }
        const int h = c.type == ControlType::Edit ? 28 : 24;
        const int w = c.type == ControlType::Edit ? 400 : 240;
        add_node(out, c.id, c.name, c.type, {frame.left + 20, y, frame.left + 20 + w, y + h},
                 c.enabled && predicate_holds(state, c.enabled_when), 2);
        children.push_back(c.id);
        y += h + 12;
    }

    const int total = static_cast<int>(buttons.size()) * 100 +
                      (static_cast<int>(buttons.size()) - 1) * 10;
    int bx = frame.right - 20 - total;
    for (const UiControl* c : buttons) {
        add_node(out, c->id, c->name, c->type, {bx, frame.bottom - 48, bx + 100, frame.bottom - 18},
                 c->enabled && predicate_holds(state, c->enabled_when), 2);
        children.push_back(c->id);
        bx += 110;
    }

    add_node(out, dlg.id, dlg.title, ControlType::Dialog, frame, true, 2, std::move(children));
}

}  // namespace

Layout compute_layout(const AppState& state) {
    Layout out;
    const UiCommandTree& tree = *state.ui_tree;
    const bool modal = state.open_dialog.has_value();

    // Quick-access strip.
    int x = 8;
    for (const std::string& cmd : state.quick_access_items) {
        add_node(out, "qat.item." + cmd, find_command_name(tree, cmd), ControlType::Button,
                 {x, 2, x + 24, 26}, !modal, 0);
        x += 28;
    }
    {
        std::vector<std::string> children;
        for (const UiControl& sub : tree.qat_dropdown.submenu) children.push_back(sub.id);
        add_node(out, tree.qat_dropdown.id, tree.qat_dropdown.name, tree.qat_dropdown.type,
                 {x, 2, x + 24, 26}, !modal, 0, std::move(children));
    }

    // Tab strip.
    x = 8;
    for (const UiTab& tab : tree.tabs) {
        std::vector<std::string> children;
        for (const UiControl& item : tab.menu) children.push_back(item.id);
        for (const UiGroup& group : tab.groups)
            for (const UiControl& c : group.controls) children.push_back(c.id);
        add_node(out, tab.id, tab.name, tab.type, {x, 30, x + 88, 54}, !modal, 0,
                 std::move(children));
        x += 92;
    }

    // Group area of the active tab.
    if (const UiTab* active = tree.find_tab(state.active_tab)) {
        x = 8;
        for (const UiGroup& group : active->groups) {
            for (const UiControl& c : group.controls) {
                const bool enabled = !modal && c.enabled && predicate_holds(state, c.enabled_when);
                add_node(out, c.id, c.name, c.type, {x, 60, x + 100, 112}, enabled, 0);
                x += 106;
            }
            x += 14;
        }
    }

    // Open menu chain (cascading columns).
    if (!state.open_menu_path.empty() && !modal) {
        const std::string& root_id = state.open_menu_path.front();
        PixelRect anchor{};
        for (const VisibleNode& vn : out.nodes)
            if (vn.node.id == root_id) anchor = vn.node.bbox;

        const std::vector<UiControl>* items = nullptr;
        if (root_id == tree.qat_dropdown.id) items = &tree.qat_dropdown.submenu;
        else if (const UiTab* tab = tree.find_tab(root_id)) items = &tab->menu;

        int left = anchor.left, top = anchor.bottom + 2;
        for (size_t depth = 0; items != nullptr; ++depth) {
            layout_menu_column(out, *items, left, top, false);
            if (depth + 1 >= state.open_menu_path.size()) break;
            const std::string& next_id = state.open_menu_path[depth + 1];
            const UiControl* next = nullptr;
            int index = 0;
            for (size_t i = 0; i < items->size(); ++i) {
                if ((*items)[i].id == next_id) {
                    next = &(*items)[i];
                    index = static_cast<int>(i);
                }
            }
            if (!next || next->submenu.empty()) break;
            left += 220;
            top += index * 26;
            items = &next->submenu;
        }
    }

    // Dialog, topmost.
    if (modal) {
        if (const UiDialog* dlg = tree.find_dialog(state.open_dialog->id))
            layout_dialog(out, state, *dlg);
    }

    // Grid cells of the fixed viewport.
    for (int r = 0; r < kGridRows; ++r)
        for (int c = 0; c < kGridCols; ++c)
            add_node(out, "cell." + format_cell({c, r}), format_cell({c, r}), ControlType::Cell,
                     cell_rect(c, r), !modal, 0);

    return out;
}

}  // namespace detail

std::vector<AccessibilityNode> accessibility_snapshot(const AppState& state) {
    detail::Layout layout = detail::compute_layout(state);
    std::vector<AccessibilityNode> nodes;
    nodes.reserve(layout.nodes.size());
    for (detail::VisibleNode& vn : layout.nodes) nodes.push_back(std::move(vn.node));
    return nodes;
}

// --- Effects registry --------------------------------------------------------

namespace {

using Effect = std::function<ActionResult(AppState&)>;

// Formatting applies to the selection clipped to the used bounds and the fixed
// viewport; unbounded selections (select-all style) stay tractable that way.
std::vector<CellAddress> format_targets(const AppState& state) {
    if (!state.selection) return {};
    const Sheet& sheet = state.active();
    auto bounds = sheet.used_bounds();
    int max_col = kGridCols - 1, max_row = kGridRows - 1;
    if (bounds) {
        max_col = std::max(max_col, bounds->bottom_right.column);
        max_row = std::max(max_row, bounds->bottom_right.row);
    }
    std::vector<CellAddress> out;
    const RangeRef& sel = *state.selection;
    for (int r = sel.top_left.row; r <= std::min(sel.bottom_right.row, max_row); ++r)
        for (int c = sel.top_left.column; c <= std::min(sel.bottom_right.column, max_col); ++c)
            out.push_back({c, r});
    return out;
}

ActionResult fail(std::string msg) { return {false, std::move(msg)}; }

ActionResult effect_toggle_bold(AppState& state) {
    auto targets = format_targets(state);
    if (targets.empty()) return fail("select a range first");
    Sheet& sheet = state.active();
    bool all_bold = true;
    for (const CellAddress& a : targets) {
        auto it = sheet.formats.find(a);
        if (it == sheet.formats.end() || !it->second.bold) all_bold = false;
    }
    for (const CellAddress& a : targets) {
        CellFormat& fmt = sheet.formats[a];
        fmt.bold = !all_bold;
        if (fmt.is_default()) sheet.formats.erase(a);
    }
    return {true, std::string(all_bold ? "removed bold from " : "applied bold to ") +
                      format_range(*state.selection)};
}

ActionResult effect_fill_color(AppState& state) {
    auto targets = format_targets(state);
    if (targets.empty()) return fail("select a range first");
    Sheet& sheet = state.active();
    for (const CellAddress& a : targets) sheet.formats[a].fill = Rgb{255, 230, 130};
    return {true, "filled " + format_range(*state.selection)};
}

ActionResult effect_merge_cells(AppState& state) {
    if (!state.selection) return fail("select a range first");
    if (state.selection->single_cell()) return fail("select more than one cell to merge");
    Sheet& sheet = state.active();
    for (const RangeRef& m : sheet.merges)
        if (m == *state.selection) return fail(format_range(m) + " is already merged");
    sheet.merges.push_back(*state.selection);
    return {true, "merged " + format_range(*state.selection)};
}

ActionResult insert_chart(AppState& state, ChartType type) {
    if (!state.selection) return fail("select the chart source range first");
    Sheet& sheet = state.active();
    auto bounds = sheet.used_bounds();
    if (!bounds || !bounds->contains(*state.selection))
        return fail("chart source must lie within the used cells");
    ChartObject chart;
    chart.id = "chart" + std::to_string(sheet.charts.size() + 1);
    chart.chart_type = type;
    chart.source = *state.selection;
    chart.anchor_bbox = chart_anchor(static_cast<int>(sheet.charts.size()));
    sheet.charts.push_back(chart);
    return {true, "inserted " + to_string(type) + " chart from " + format_range(chart.source)};
}

ActionResult effect_apply_chart_title(AppState& state) {
    if (!state.open_dialog) return fail("no dialog open");
    Sheet& sheet = state.active();
    if (sheet.charts.empty()) return fail("no chart to title");
    auto it = state.open_dialog->fields.find("text");
    const std::string title = it == state.open_dialog->fields.end() ? "" : it->second;
    if (title.empty()) return fail("enter a title first");
    sheet.charts.back().title = title;
    state.open_dialog.reset();
    return {true, "chart title set to \"" + title + "\""};
}

ActionResult effect_close_dialog(AppState& state) {
    if (!state.open_dialog) return fail("no dialog open");
    state.open_dialog.reset();
    return {true, "dialog closed"};
}

ActionResult effect_freeze_panes(AppState& state) {
    state.frozen_panes = !state.frozen_panes;
    return {true, state.frozen_panes ? "froze the top row" : "unfroze panes"};
}

ActionResult effect_toggle_navigation_pane(AppState& state) {
    state.navigation_pane = !state.navigation_pane;
    return {true, state.navigation_pane ? "navigation pane shown" : "navigation pane hidden"};
}

ActionResult sort_rows(AppState& state, bool ascending) {
    Sheet& sheet = state.active();
    auto bounds = sheet.used_bounds();
    if (!bounds || bounds->rows() < 2) return fail("nothing to sort");
    int key_col = state.selection ? state.selection->top_left.column : bounds->top_left.column;
    key_col = std::clamp(key_col, bounds->top_left.column, bounds->bottom_right.column);

    struct Row {
        std::vector<std::string> raws;
        std::string key_display;
    };
    std::vector<Row> rows;
    for (int r = bounds->top_left.row + 1; r <= bounds->bottom_right.row; ++r) {
        Row row;
        for (int c = bounds->top_left.column; c <= bounds->bottom_right.column; ++c) {
            const CellContent* cell = sheet.cell({c, r});
            row.raws.push_back(cell ? cell->raw : "");
            if (c == key_col) row.key_display = cell ? cell->computed : "";
        }
        rows.push_back(std::move(row));
    }

    auto less = [](const Row& a, const Row& b) {
        auto na = parse_number(a.key_display), nb = parse_number(b.key_display);
        if (na && nb) return *na < *nb;
        if (na != std::nullopt || nb != std::nullopt) return na != std::nullopt;  // numbers first
        return a.key_display < b.key_display;
    };
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        return ascending ? less(a, b) : less(b, a);
    });

    for (size_t i = 0; i < rows.size(); ++i) {
        const int r = bounds->top_left.row + 1 + static_cast<int>(i);
        for (size_t j = 0; j < rows[i].raws.size(); ++j) {
            const CellAddress addr{bounds->top_left.column + static_cast<int>(j), r};
            CellContent c = classify_cell(rows[i].raws[j]);
            if (c.kind == CellKind::Empty)
                sheet.cells.erase(addr);
            else
                sheet.cells[addr] = std::move(c);
        }
    }
    recompute_formulas(state);
    state.open_dialog.reset();
    return {true, std::string("sorted by column ") + format_cell({key_col, 0}).substr(0, 1) +
                      (ascending ? " ascending" : " descending")};
}

ActionResult effect_qat_add_selected(AppState& state) {
    if (!state.open_dialog) return fail("no dialog open");
    auto it = state.open_dialog->fields.find("selected");
    if (it == state.open_dialog->fields.end() || it->second.empty())
        return fail("select a command first");
    const std::string& cmd = it->second;
    for (const std::string& existing : state.quick_access_items)
        if (existing == cmd)
            return {true, detail::find_command_name(*state.ui_tree, cmd) +
                              " is already on the quick access toolbar"};
    state.quick_access_items.push_back(cmd);
    return {true, "added " + detail::find_command_name(*state.ui_tree, cmd) +
                      " to the quick access toolbar"};
}

const std::map<std::string, Effect>& effect_registry() {
    static const std::map<std::string, Effect> registry = {
        {"noop", [](AppState&) { return ActionResult{true, "no effect"}; }},
        {"toggle_bold", effect_toggle_bold},
        {"fill_color", effect_fill_color},
        {"merge_cells", effect_merge_cells},
        {"insert_chart_bar", [](AppState& s) { return insert_chart(s, ChartType::Bar); }},
        {"insert_chart_line", [](AppState& s) { return insert_chart(s, ChartType::Line); }},
        {"insert_chart_pie", [](AppState& s) { return insert_chart(s, ChartType::Pie); }},
        {"apply_chart_title", effect_apply_chart_title},
        {"close_dialog", effect_close_dialog},
        {"freeze_panes", effect_freeze_panes},
        {"toggle_navigation_pane", effect_toggle_navigation_pane},
        {"sort_ascending", [](AppState& s) { return sort_rows(s, true); }},
        {"sort_descending", [](AppState& s) { return sort_rows(s, false); }},
        {"qat_add_selected", effect_qat_add_selected},
    };
    return registry;
}

}  // namespace

bool effect_registered(const std::string& name) { return effect_registry().count(name) > 0; }

// --- apply_gui_action --------------------------------------------------------

namespace {

void open_dialog_instance(AppState& state, const std::string& dialog_id) {
    DialogInstance inst;
    inst.id = dialog_id;
    if (const UiDialog* dlg = state.ui_tree->find_dialog(dialog_id))
        if (!dlg->categories.empty()) inst.fields["category"] = dlg->categories.front().id;
    state.open_dialog = std::move(inst);
    state.open_menu_path.clear();
}

ActionResult click_node(AppState& state, const std::string& id) {
    const detail::Layout layout = detail::compute_layout(state);
    const detail::VisibleNode* hit = nullptr;
    for (const detail::VisibleNode& vn : layout.nodes)
        if (vn.node.id == id) hit = &vn;
    if (!hit) throw UnknownNode("\"" + id + "\" is not visible in the current state");
    if (!hit->node.enabled) throw DisabledTarget("\"" + id + "\" is disabled");

    const UiCommandTree& tree = *state.ui_tree;

    // Grid cells: click selects the single cell and dismisses menus.
    if (id.rfind("cell.", 0) == 0) {
        const CellAddress addr = parse_cell(id.substr(5));
        state.selection = RangeRef{addr, addr};
        state.open_menu_path.clear();
        return {true, "selected " + format_cell(addr)};
    }

    // Quick-access strip shortcuts: activating them has no simulated meaning.
    if (id.rfind("qat.item.", 0) == 0) return {true, "activated " + hit->node.name};

    // Ribbon tabs and menu roots.
    if (const UiTab* tab = tree.find_tab(id)) {
        if (!tab->menu.empty()) {
            if (!state.open_menu_path.empty() && state.open_menu_path.front() == id)
                state.open_menu_path.clear();
            else
                state.open_menu_path = {id};
            return {true, state.open_menu_path.empty() ? "closed " + tab->name
                                                       : "opened " + tab->name};
        }
        state.active_tab = id;
        state.open_menu_path.clear();
        return {true, "switched to the " + tab->name + " tab"};
    }
    if (id == tree.qat_dropdown.id) {
        if (!state.open_menu_path.empty() && state.open_menu_path.front() == id)
            state.open_menu_path.clear();
        else
            state.open_menu_path = {id};
        return {true, state.open_menu_path.empty() ? "closed " + tree.qat_dropdown.name
                                                   : "opened " + tree.qat_dropdown.name};
    }

    // Dialog-synthesized nodes: categories and command list entries.
    if (state.open_dialog) {
        if (const UiDialog* dlg = tree.find_dialog(state.open_dialog->id)) {
            for (const DialogCategory& cat : dlg->categories) {
                if (cat.id == id) {
                    state.open_dialog->fields["category"] = id;
                    state.open_dialog->fields.erase("selected");
                    return {true, "showing " + cat.name};
                }
                for (const DialogCommand& cmd : cat.commands) {
                    if (cmd.id == id) {
                        state.open_dialog->fields["selected"] = id;
                        return {true, "selected " + cmd.name};
                    }
                }
            }
        }
    }

    const UiControl* control = tree.find_control(id);
    if (!control) throw UnknownNode("\"" + id + "\" has no control definition");

    if (!control->submenu.empty()) {
        state.open_menu_path = detail::find_menu_path(tree, id);
        return {true, "opened " + control->name};
    }
    if (!control->opens_dialog.empty()) {
        open_dialog_instance(state, control->opens_dialog);
        return {true, "opened the " + tree.find_dialog(control->opens_dialog)->title + " dialog"};
    }
    if (control->type == ControlType::Edit) {
        if (state.open_dialog) state.open_dialog->fields["focus"] = id;
        return {true, "focused " + control->name};
    }
    if (!control->effect.empty()) {
        ActionResult result = effect_registry().at(control->effect)(state);
        if (result.ok) state.open_menu_path.clear();
        return result;
    }
    return {true, "clicked " + control->name};
}

ActionResult type_text(AppState& state, const std::string& text) {
    if (state.open_dialog) {
        const UiDialog* dlg = state.ui_tree->find_dialog(state.open_dialog->id);
        if (dlg) {
            for (const UiControl& c : dlg->controls) {
                if (c.type == ControlType::Edit) {
                    state.open_dialog->fields["text"] = text;
                    return {true, "typed \"" + text + "\" into " + c.name};
                }
            }
        }
        throw NoFocusForTyping("the open dialog has no edit field");
    }
    if (state.selection) {
        const CellAddress addr = state.selection->top_left;
        set_cell_value(state, addr, text);
        return {true, "entered \"" + text + "\" into " + format_cell(addr)};
    }
    throw NoFocusForTyping("no edit field focused and no cell selected");
}

ActionResult press_keys(AppState& state, const std::string& chord_raw) {
    std::string chord = chord_raw;
    std::transform(chord.begin(), chord.end(), chord.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    if (chord == "ctrl+a") {
        auto bounds = state.active().used_bounds();
        state.selection = bounds ? *bounds : RangeRef{{0, 0}, {0, 0}};
        return {true, "selected " + format_range(*state.selection)};
    }
    if (chord == "ctrl+c") {
        if (!state.selection) return {false, "nothing selected to copy"};
        const Sheet& sheet = state.active();
        Clipboard clip;
        for (int r = state.selection->top_left.row; r <= state.selection->bottom_right.row; ++r) {
            std::vector<std::string> row;
            for (int c = state.selection->top_left.column; c <= state.selection->bottom_right.column;
                 ++c) {
                const CellContent* cell = sheet.cell({c, r});
                row.push_back(cell ? cell->raw : "");
            }
            clip.raws.push_back(std::move(row));
        }
        state.clipboard = std::move(clip);
        return {true, "copied " + format_range(*state.selection)};
    }
    if (chord == "ctrl+v") {
        if (state.clipboard.empty()) return {false, "clipboard is empty"};
        if (!state.selection) return {false, "select a paste target first"};
        const CellAddress anchor = state.selection->top_left;
        const RangeRef covered{
            anchor,
            {anchor.column + static_cast<int>(state.clipboard.raws.front().size()) - 1,
             anchor.row + static_cast<int>(state.clipboard.raws.size()) - 1}};
        if (covered.bottom_right.column > kMaxColumn || covered.bottom_right.row > kMaxRow)
            return {false, "paste would exceed the sheet bounds"};
        for (size_t r = 0; r < state.clipboard.raws.size(); ++r)
            for (size_t c = 0; c < state.clipboard.raws[r].size(); ++c)
                set_cell_value(state,
                               {anchor.column + static_cast<int>(c),
                                anchor.row + static_cast<int>(r)},
                               state.clipboard.raws[r][c]);
        return {true, "pasted at " + format_cell(anchor)};
    }
    return {false, "unbound chord: " + chord_raw};
}

}  // namespace

ActionResult apply_gui_action(AppState& state, const GuiAction& action) {
    switch (action.kind) {
        case GuiAction::Kind::Click: return click_node(state, action.node_id);
        case GuiAction::Kind::Type: return type_text(state, action.text);
        case GuiAction::Kind::PressKeys: return press_keys(state, action.chord);
    }
    return {false, "unknown action"};
}

}  // namespace tutorforge
