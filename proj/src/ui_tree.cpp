#include "tutorforge/ui_tree.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tutorforge/errors.hpp"

namespace tutorforge {

using nlohmann::json;

std::string to_string(ControlType t) {
    switch (t) {
        case ControlType::MenuItem: return "MenuItem";
        case ControlType::Button: return "Button";
        case ControlType::Tab: return "Tab";
        case ControlType::Cell: return "Cell";
        case ControlType::Edit: return "Edit";
        case ControlType::CheckBox: return "CheckBox";
        case ControlType::ListItem: return "ListItem";
        case ControlType::Dialog: return "Dialog";
    }
    return "Button";
}

ControlType control_type_from_string(const std::string& s) {
    if (s == "MenuItem") return ControlType::MenuItem;
    if (s == "Button") return ControlType::Button;
    if (s == "Tab") return ControlType::Tab;
    if (s == "Cell") return ControlType::Cell;
    if (s == "Edit") return ControlType::Edit;
    if (s == "CheckBox") return ControlType::CheckBox;
    if (s == "ListItem") return ControlType::ListItem;
    if (s == "Dialog") return ControlType::Dialog;
    throw ConfigError("unknown control type \"" + s + "\"");
}

const UiTab* UiCommandTree::find_tab(const std::string& id) const {
    for (const UiTab& tab : tabs)
        if (tab.id == id) return &tab;
    return nullptr;
}

const UiDialog* UiCommandTree::find_dialog(const std::string& id) const {
    for (const UiDialog& dlg : dialogs)
        if (dlg.id == id) return &dlg;
    return nullptr;
}

namespace {

const UiControl* find_in(const std::vector<UiControl>& controls, const std::string& id) {
    for (const UiControl& c : controls) {
        if (c.id == id) return &c;
        if (const UiControl* nested = find_in(c.submenu, id)) return nested;
    }
    return nullptr;
}

}  // namespace

const UiControl* UiCommandTree::find_control(const std::string& id) const {
    if (qat_dropdown.id == id) return &qat_dropdown;
    if (const UiControl* c = find_in(qat_dropdown.submenu, id)) return c;
    for (const UiTab& tab : tabs) {
        if (const UiControl* c = find_in(tab.menu, id)) return c;
        for (const UiGroup& group : tab.groups)
            if (const UiControl* c = find_in(group.controls, id)) return c;
    }
    for (const UiDialog& dlg : dialogs)
        if (const UiControl* c = find_in(dlg.controls, id)) return c;
    return nullptr;
}

namespace {

UiControl parse_control(const json& j) {
    UiControl c;
    c.id = j.at("id").get<std::string>();
    c.name = j.at("name").get<std::string>();
    c.type = control_type_from_string(j.value("control_type", "Button"));
    c.effect = j.value("effect", "");
    c.opens_dialog = j.value("opens_dialog", "");
    c.enabled_when = j.value("enabled_when", "");
    if (j.contains("submenu"))
        for (const auto& sub : j["submenu"]) c.submenu.push_back(parse_control(sub));
    return c;
}

void collect_controls(const UiControl& c, std::vector<const UiControl*>& out) {
    out.push_back(&c);
    for (const UiControl& sub : c.submenu) collect_controls(sub, out);
}

void validate(const UiCommandTree& tree) {
    std::vector<const UiControl*> all;
    collect_controls(tree.qat_dropdown, all);
    for (const UiTab& tab : tree.tabs) {
        for (const UiControl& c : tab.menu) collect_controls(c, all);
        for (const UiGroup& g : tab.groups)
            for (const UiControl& c : g.controls) collect_controls(c, all);
    }
    for (const UiDialog& d : tree.dialogs)
        for (const UiControl& c : d.controls) collect_controls(c, all);

    std::set<std::string> ids;
    for (const UiTab& tab : tree.tabs)
        if (!ids.insert(tab.id).second) throw ConfigError("duplicate id \"" + tab.id + "\"");
    for (const UiControl* c : all) {
        if (c->id.empty()) throw ConfigError("control with empty id");
        if (!ids.insert(c->id).second) throw ConfigError("duplicate id \"" + c->id + "\"");
        if (!c->effect.empty() && !effect_registered(c->effect))
            throw ConfigError("effect \"" + c->effect + "\" of \"" + c->id +
                              "\" is not a registered mutation");
        if (!c->opens_dialog.empty() && !tree.find_dialog(c->opens_dialog))
            throw ConfigError("control \"" + c->id + "\" opens unknown dialog \"" +
                              c->opens_dialog + "\"");
    }
}

}  // namespace

UiTreePtr parse_ui_tree(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("ui tree is not valid JSON: ") + e.what());
    }

    auto tree = std::make_shared<UiCommandTree>();
    tree->version = doc.at("version").get<std::string>();

    for (const auto& jt : doc.at("tabs")) {
        UiTab tab;
        tab.id = jt.at("id").get<std::string>();
        tab.name = jt.at("name").get<std::string>();
        tab.type = control_type_from_string(jt.value("control_type", "Tab"));
        if (jt.contains("menu"))
            for (const auto& item : jt["menu"]) tab.menu.push_back(parse_control(item));
        if (jt.contains("groups")) {
            for (const auto& jg : jt["groups"]) {
                UiGroup group;
                group.name = jg.value("name", "");
                for (const auto& jc : jg.at("controls")) group.controls.push_back(parse_control(jc));
                tab.groups.push_back(std::move(group));
            }
        }
        tree->tabs.push_back(std::move(tab));
    }

    tree->qat_dropdown = parse_control(doc.at("qat_dropdown"));

    if (doc.contains("dialogs")) {
        for (const auto& jd : doc["dialogs"]) {
            UiDialog dlg;
            dlg.id = jd.at("id").get<std::string>();
            dlg.title = jd.at("title").get<std::string>();
            if (jd.contains("controls"))
                for (const auto& jc : jd["controls"]) dlg.controls.push_back(parse_control(jc));
            if (jd.contains("categories")) {
                for (const auto& jcat : jd["categories"]) {
                    DialogCategory cat;
                    cat.id = jcat.at("id").get<std::string>();
                    cat.name = jcat.at("name").get<std::string>();
                    for (const auto& jcmd : jcat.at("commands"))
                        cat.commands.push_back(
                            {jcmd.at("id").get<std::string>(), jcmd.at("name").get<std::string>()});
                    dlg.categories.push_back(std::move(cat));
                }
            }
            tree->dialogs.push_back(std::move(dlg));
        }
    }

    validate(*tree);
    return tree;
}

UiTreePtr load_ui_tree(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open ui tree config " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_ui_tree(buf.str());
}

}  // namespace tutorforge
