#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tutorforge/a1.hpp"
#include "tutorforge/geometry.hpp"
#include "tutorforge/ui_tree.hpp"

namespace tutorforge {

enum class CellKind { Empty, Number, Text, Formula };

/// Raw entry plus its display value. kind=Formula iff raw starts with "=";
/// kind=Number iff raw parses fully as a decimal.
struct CellContent {
    std::string raw;
    CellKind kind = CellKind::Empty;
    std::string computed;  // display text; "#ERROR" for failed formulas

    friend bool operator==(const CellContent&, const CellContent&) = default;
};

/// Classifies raw text and computes the non-formula display value.
/// Formula cells are left for recompute_formulas().
CellContent classify_cell(const std::string& raw);

/// Canonical display form: integers without a decimal point, otherwise
/// shortest stable decimal ("7.5", not "7.500000").
std::string format_number(double value);

/// Full-string decimal parse; nullopt when `text` is not exactly a number.
std::optional<double> parse_number(const std::string& text);

struct CellFormat {
    bool bold = false;
    std::optional<Rgb> fill;

    friend bool operator==(const CellFormat&, const CellFormat&) = default;
    bool is_default() const { return !bold && !fill; }
};

enum class ChartType { Bar, Line, Pie };
std::string to_string(ChartType t);
ChartType chart_type_from_string(const std::string& s);

struct ChartObject {
    std::string id;
    ChartType chart_type = ChartType::Bar;
    RangeRef source;
    std::optional<std::string> title;
    PixelRect anchor_bbox;

    friend bool operator==(const ChartObject&, const ChartObject&) = default;
};

/// Deterministic cascade position for the index-th chart on a sheet.
PixelRect chart_anchor(int index);

struct Sheet {
    std::string name;
    std::map<CellAddress, CellContent> cells;   // sparse; empty cells absent
    std::map<CellAddress, CellFormat> formats;  // sparse; default formats absent
    std::vector<RangeRef> merges;
    std::vector<ChartObject> charts;

    /// Tight bounding box of non-empty cells; nullopt for an empty sheet.
    std::optional<RangeRef> used_bounds() const;
    int column_count_used() const;
    int row_count_used() const;

    const CellContent* cell(const CellAddress& a) const;
    std::string display(const CellAddress& a) const;  // "" for empty cells
};

struct DialogInstance {
    std::string id;
    std::map<std::string, std::string> fields;  // edit text, selected items, active category

    friend bool operator==(const DialogInstance&, const DialogInstance&) = default;
};

struct Clipboard {
    // Rectangular block of raw values captured by the copy chord.
    std::vector<std::vector<std::string>> raws;
    bool empty() const { return raws.empty(); }
};

/// Full simulated application snapshot. Mutated only through the six
/// spreadsheet APIs, apply_gui_action, and template loading.
struct AppState {
    std::vector<Sheet> workbook;
    int active_sheet = 0;
    std::optional<RangeRef> selection;
    std::string active_tab = "ribbon.home";
    std::vector<std::string> open_menu_path;  // root-to-node ids of the open menu chain
    std::optional<DialogInstance> open_dialog;
    std::vector<std::string> quick_access_items;  // ordered command ids
    bool frozen_panes = false;
    bool navigation_pane = false;
    Clipboard clipboard;  // transient; excluded from the fingerprint
    UiTreePtr ui_tree;

    Sheet& active() { return workbook.at(static_cast<size_t>(active_sheet)); }
    const Sheet& active() const { return workbook.at(static_cast<size_t>(active_sheet)); }
};

/// Fresh single-sheet state with the given UI tree.
AppState make_blank_state(UiTreePtr tree);

/// Loads the on-disk template format:
/// {sheets:[{name, cells:{"A1": raw, ...}, charts:[...]}], ui_tree_version}.
/// Throws InvalidTemplate on schema or version mismatch.
AppState load_workbook(const std::filesystem::path& file, UiTreePtr tree);
AppState parse_workbook(const std::string& json_text, UiTreePtr tree);

/// Re-evaluates every formula of every sheet from raw text until stable;
/// cells that never settle (reference cycles) compute to "#ERROR".
void recompute_formulas(AppState& state);

// --- The six spreadsheet APIs -------------------------------------------

std::string table2markdown(const AppState& state, const RangeRef& range);
RangeRef insert_excel_table(AppState& state, const std::vector<std::vector<std::string>>& data,
                            const CellAddress& anchor);
void select_table_range(AppState& state, const RangeRef& range);
void set_cell_value(AppState& state, const CellAddress& addr, const std::string& value);
void auto_fill(AppState& state, const RangeRef& source, const RangeRef& target);
void reorder_columns(AppState& state, const std::vector<int>& order);

// --- GUI actions ----------------------------------------------------------

struct ActionResult {
    bool ok = true;
    std::string message;
};

struct GuiAction {
    enum class Kind { Click, Type, PressKeys } kind = Kind::Click;
    std::string node_id;  // Click target
    std::string text;     // Type payload
    std::string chord;    // PressKeys chord: "ctrl+a", "ctrl+c", "ctrl+v"
};

/// Applies a click / type / key chord to the state. Throws UnknownNode,
/// DisabledTarget, NoFocusForTyping; effect-level failures come back as
/// ActionResult{ok=false} without mutating the state.
ActionResult apply_gui_action(AppState& state, const GuiAction& action);

// --- Accessibility & fingerprint -------------------------------------------

struct AccessibilityNode {
    std::string id;
    std::string name;
    ControlType control_type = ControlType::Button;
    PixelRect bbox;
    bool enabled = true;
    std::vector<std::string> children;
};

/// Actionable GUI elements visible in this state: ribbon chrome, open menus
/// and dialogs, quick-access items, and one Cell node per viewport cell.
/// Ids are stable across snapshots of identical state.
std::vector<AccessibilityNode> accessibility_snapshot(const AppState& state);

/// 64-bit digest over cells, formats, merges, charts, selection, quick-access
/// items, and menu/dialog state. Equal states yield equal digests.
uint64_t state_fingerprint(const AppState& state);

}  // namespace tutorforge
