#pragma once

// Internal: visible-node layout shared by the accessibility snapshot, the
// renderer, and click hit-testing. Not part of the public API.

#include <optional>
#include <string>
#include <vector>

#include "tutorforge/sheet.hpp"

namespace tutorforge::detail {

struct VisibleNode {
    AccessibilityNode node;
    int z = 0;             // 0 chrome/grid, 1 menus, 2 dialog
    bool selected = false; // list items highlighted in dialogs
};

struct Layout {
    std::vector<VisibleNode> nodes;              // canonical order, grid cells last
    std::vector<PixelRect> menu_panels;          // backdrop boxes behind open menus
    std::optional<PixelRect> dialog_frame;
    std::string dialog_title;
};

Layout compute_layout(const AppState& state);

/// Display name for a quick-access command id, searched in the tree's
/// command-browser dialogs; falls back to the id itself.
std::string find_command_name(const UiCommandTree& tree, const std::string& command_id);

/// Root-to-node chain of menu ids ending at `id`, or empty when `id` is not a
/// menu entry.
std::vector<std::string> find_menu_path(const UiCommandTree& tree, const std::string& id);

}  // namespace tutorforge::detail
