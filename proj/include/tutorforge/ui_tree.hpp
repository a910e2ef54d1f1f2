#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tutorforge/geometry.hpp"

namespace tutorforge {

enum class ControlType { MenuItem, Button, Tab, Cell, Edit, CheckBox, ListItem, Dialog };

std::string to_string(ControlType t);
ControlType control_type_from_string(const std::string& s);

/// One leaf or submenu-bearing control of the declarative GUI surface.
/// A control either fires a named Effect, opens a dialog, or carries a submenu.
struct UiControl {
    std::string id;
    std::string name;
    ControlType type = ControlType::Button;
    std::string effect;         // registered mutation name; empty for pure containers
    std::string opens_dialog;   // dialog id to open on click; empty otherwise
    std::vector<UiControl> submenu;
    bool enabled = true;
    std::string enabled_when;   // predicate name evaluated against AppState; empty = always
};

struct UiGroup {
    std::string name;
    std::vector<UiControl> controls;
};

struct UiTab {
    std::string id;
    std::string name;
    ControlType type = ControlType::Tab;   // the File entry is a MenuItem
    std::vector<UiGroup> groups;           // shown in the group area when active
    std::vector<UiControl> menu;           // dropdown items (File-style menus)
};

struct DialogCommand {
    std::string id;
    std::string name;
};

struct DialogCategory {
    std::string id;
    std::string name;
    std::vector<DialogCommand> commands;
};

struct UiDialog {
    std::string id;
    std::string title;
    std::vector<UiControl> controls;
    std::vector<DialogCategory> categories;  // command browser dialogs only
};

struct UiCommandTree {
    std::string version;
    std::vector<UiTab> tabs;
    UiControl qat_dropdown;            // quick-access customization entry point
    std::vector<UiDialog> dialogs;

    const UiTab* find_tab(const std::string& id) const;
    const UiDialog* find_dialog(const std::string& id) const;
    /// Looks a control up anywhere in the ribbon, menus, or dialogs.
    const UiControl* find_control(const std::string& id) const;
};

using UiTreePtr = std::shared_ptr<const UiCommandTree>;

/// Loads and validates a tree config: unique ids, every effect name registered,
/// acyclic by construction (JSON nesting). Throws ConfigError on violations.
UiTreePtr load_ui_tree(const std::filesystem::path& file);
UiTreePtr parse_ui_tree(const std::string& json_text);

/// True if `name` resolves in the effect registry (see sheet.cpp).
bool effect_registered(const std::string& name);

}  // namespace tutorforge
