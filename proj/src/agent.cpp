#include "tutorforge/agent.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tutorforge/errors.hpp"
#include "tutorforge/font.hpp"

namespace tutorforge {

using nlohmann::json;

const std::vector<std::string>& api_whitelist() {
    static const std::vector<std::string> names = {
        "table2markdown", "insert_excel_table", "select_table_range",
        "set_cell_value", "auto_fill",          "reorder_columns",
    };
    return names;
}

bool operator==(const AgentAction& a, const AgentAction& b) {
    return a.kind == b.kind && a.node_id == b.node_id && a.text == b.text && a.chord == b.chord &&
           a.api_name == b.api_name && a.api_args == b.api_args &&
           a.finish_reason == b.finish_reason;
}

std::string action_summary(const AgentAction& action) {
    switch (action.kind) {
        case AgentAction::Kind::GuiClick: return "click " + action.node_id;
        case AgentAction::Kind::GuiType: return "type \"" + action.text + "\"";
        case AgentAction::Kind::GuiKeys: return "press " + action.chord;
        case AgentAction::Kind::ApiCall: return action.api_name + " " + action.api_args.dump();
        case AgentAction::Kind::Finish: return "finish";
    }
    return "?";
}

json action_to_json(const AgentAction& action) {
    switch (action.kind) {
        case AgentAction::Kind::GuiClick:
            return {{"action", "click"}, {"node", action.node_id}};
        case AgentAction::Kind::GuiType:
            return {{"action", "type"}, {"text", action.text}};
        case AgentAction::Kind::GuiKeys:
            return {{"action", "keys"}, {"chord", action.chord}};
        case AgentAction::Kind::ApiCall:
            return {{"action", "api"}, {"name", action.api_name}, {"args", action.api_args}};
        case AgentAction::Kind::Finish:
            return {{"action", "finish"}, {"reason", action.finish_reason}};
    }
    return {};
}

AgentAction action_from_json(const json& doc) {
    const std::string kind = doc.at("action").get<std::string>();
    AgentAction action;
    if (kind == "click") {
        action.kind = AgentAction::Kind::GuiClick;
        action.node_id = doc.at("node").get<std::string>();
    } else if (kind == "type") {
        action.kind = AgentAction::Kind::GuiType;
        action.text = doc.at("text").get<std::string>();
    } else if (kind == "keys") {
        action.kind = AgentAction::Kind::GuiKeys;
        action.chord = doc.at("chord").get<std::string>();
    } else if (kind == "api") {
        action.kind = AgentAction::Kind::ApiCall;
        action.api_name = doc.at("name").get<std::string>();
        action.api_args = doc.value("args", json::object());
    } else if (kind == "finish") {
        action.kind = AgentAction::Kind::Finish;
        action.finish_reason = doc.value("reason", "");
    } else {
        throw UnparseableAction("unknown action \"" + kind + "\"");
    }
    return action;
}

// --- Perception ------------------------------------------------------------------

namespace {

constexpr Rgb kBadgeFill{30, 64, 120};
constexpr Rgb kBadgeText{255, 255, 255};
constexpr int kBadgeSize = 16;

void draw_badge(Raster& r, int number, int x, int y) {
    x = std::clamp(x, 0, r.width() - kBadgeSize);
    y = std::clamp(y, 0, r.height() - kBadgeSize);
    r.fill({x, y, x + kBadgeSize, y + kBadgeSize}, kBadgeFill);
    const std::string digits = std::to_string(number);
    const int w = static_cast<int>(digits.size()) * 4 - 1;
    r.draw_digits_small(x + std::max(1, (kBadgeSize - w) / 2), y + 5, digits, kBadgeText);
}

}  // namespace

Observation perceive(const AppState& state) {
    Observation obs;
    obs.screenshot = render_screenshot(state);
    obs.nodes = accessibility_snapshot(state);
    obs.som_overlay = obs.screenshot.raster;

    // Marks go to enabled nodes in row-major bbox order, numbered from 1.
    std::vector<const AccessibilityNode*> markable;
    for (const AccessibilityNode& n : obs.nodes)
        if (n.enabled) markable.push_back(&n);
    std::stable_sort(markable.begin(), markable.end(),
                     [](const AccessibilityNode* a, const AccessibilityNode* b) {
                         if (a->bbox.top != b->bbox.top) return a->bbox.top < b->bbox.top;
                         if (a->bbox.left != b->bbox.left) return a->bbox.left < b->bbox.left;
                         return a->id < b->id;
                     });
    int mark = 1;
    for (const AccessibilityNode* n : markable) {
        obs.mark_index[mark] = n->id;
        draw_badge(obs.som_overlay, mark, n->bbox.left, n->bbox.top);
        ++mark;
    }
    return obs;
}

// --- Planning ---------------------------------------------------------------------

namespace {

std::string truncate(const std::string& text, size_t limit) {
    if (text.size() <= limit) return text;
    return text.substr(0, limit) + "...";
}

std::string build_planner_prompt(const Observation& obs, const InstantiatedTask& task,
                                 std::span<const StepRecord> history) {
    std::ostringstream p;
    p << "You are operating a spreadsheet application to complete a task.\n"
      << "Task: " << task.instruction << "\n\n"
      << "Programmatic APIs (preferred for precise operations):\n"
      << "- table2markdown(range)\n- insert_excel_table(data, anchor)\n"
      << "- select_table_range(range)\n- set_cell_value(cell, value)\n"
      << "- auto_fill(source, target)\n- reorder_columns(order)\n\n"
      << "Interface elements carry numbered marks:\n";

    // Cells are summarized in one line; everything else is listed explicitly.
    int first_cell_mark = 0, last_cell_mark = 0;
    for (const auto& [mark, id] : obs.mark_index) {
        if (id.rfind("cell.", 0) == 0) {
            if (first_cell_mark == 0) first_cell_mark = mark;
            last_cell_mark = mark;
        }
    }
    for (const auto& [mark, id] : obs.mark_index) {
        if (id.rfind("cell.", 0) == 0) continue;
        const AccessibilityNode* node = nullptr;
        for (const AccessibilityNode& n : obs.nodes)
            if (n.id == id) node = &n;
        p << mark << ": " << to_string(node->control_type) << " \"" << node->name << "\" (" << id
          << ")\n";
    }
    if (first_cell_mark > 0)
        p << first_cell_mark << "-" << last_cell_mark
          << ": grid cells (row-major); prefer the APIs for cell work\n";

    if (!history.empty()) {
        p << "\nHistory:\n";
        for (const StepRecord& step : history) {
            p << step.index << ". " << action_summary(step.action) << " -> "
              << (step.result_ok ? "" : "FAILED: ") << truncate(step.result, 120);
            if (!step.reasoning.empty()) p << " (" << truncate(step.reasoning, 200) << ")";
            p << "\n";
        }
    }

    p << "\nRespond with one JSON object:\n"
      << "{\"reasoning\": ..., \"action\": \"api\", \"name\": ..., \"args\": {...}}\n"
      << "{\"reasoning\": ..., \"action\": \"click\", \"mark\": N}\n"
      << "{\"reasoning\": ..., \"action\": \"type\", \"text\": ...}\n"
      << "{\"reasoning\": ..., \"action\": \"keys\", \"chord\": ...}\n"
      << "{\"reasoning\": ..., \"action\": \"finish\"}\n";
    return p.str();
}

AgentAction parse_planner_action(const json& doc, const Observation& obs) {
    const std::string kind = doc.at("action").get<std::string>();
    AgentAction action;
    if (kind == "api") {
        action.kind = AgentAction::Kind::ApiCall;
        if (!doc.contains("name") || !doc["name"].is_string())
            throw UnparseableAction("api action needs a name");
        action.api_name = doc["name"].get<std::string>();
        const auto& wl = api_whitelist();
        if (std::find(wl.begin(), wl.end(), action.api_name) == wl.end())
            throw UnparseableAction("\"" + action.api_name + "\" is not a whitelisted API");
        action.api_args = doc.value("args", json::object());
    } else if (kind == "click") {
        action.kind = AgentAction::Kind::GuiClick;
        if (doc.contains("mark")) {
            const int mark = doc["mark"].get<int>();
            auto it = obs.mark_index.find(mark);
            // Unknown marks resolve to a synthetic id so execution reports
            // UnknownNode instead of aborting the run.
            action.node_id = it == obs.mark_index.end() ? "mark:" + std::to_string(mark)
                                                        : it->second;
        } else if (doc.contains("node")) {
            action.node_id = doc["node"].get<std::string>();
        } else {
            throw UnparseableAction("click action needs a mark or node");
        }
    } else if (kind == "type") {
        action.kind = AgentAction::Kind::GuiType;
        if (!doc.contains("text")) throw UnparseableAction("type action needs text");
        action.text = doc["text"].get<std::string>();
    } else if (kind == "keys") {
        action.kind = AgentAction::Kind::GuiKeys;
        if (!doc.contains("chord")) throw UnparseableAction("keys action needs a chord");
        action.chord = doc["chord"].get<std::string>();
    } else if (kind == "finish") {
        action.kind = AgentAction::Kind::Finish;
        action.finish_reason = doc.value("reason", "");
    } else {
        throw UnparseableAction("unknown action \"" + kind + "\"");
    }
    return action;
}

}  // namespace

std::pair<std::string, AgentAction> decide(ProviderGateway& gateway, const Observation& obs,
                                           const InstantiatedTask& task,
                                           std::span<const StepRecord> history) {
    ProviderRequest req;
    req.role_tag = RoleTag::Planner;
    req.prompt = build_planner_prompt(obs, task, history);
    if (!obs.som_path.empty()) req.images = {obs.som_path};

    std::string failure;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1)
            req.prompt += "\nYour previous reply was not a valid action (" + failure +
                          "). Respond with exactly one JSON object in the documented shape.\n";
        const ProviderResponse resp = gateway.complete(req);
        try {
            const json doc = parse_structured(resp.text, "agent_action");
            AgentAction action = parse_planner_action(doc, obs);
            return {doc.value("reasoning", ""), action};
        } catch (const Error& e) {
            failure = e.what();
        }
    }
    throw UnparseableAction(failure);
}

// --- Execution ---------------------------------------------------------------------

namespace {

std::optional<PixelRect> nonempty(const PixelRect& r) {
    if (r.empty()) return std::nullopt;
    return r;
}

ExecOutcome run_api(AppState& state, const AgentAction& action) {
    const json& args = action.api_args;
    ExecOutcome out;
    out.target_name = action.api_name;

    if (action.api_name == "select_table_range") {
        const RangeRef range = parse_range(args.at("range").get<std::string>());
        select_table_range(state, range);
        out.result = {true, "selected " + format_range(range)};
        out.target_bbox = nonempty(range_bbox(range));
    } else if (action.api_name == "set_cell_value") {
        const CellAddress addr = parse_cell(args.at("cell").get<std::string>());
        const std::string value = args.at("value").get<std::string>();
        set_cell_value(state, addr, value);
        out.result = {true, "set " + format_cell(addr) + " to \"" + value + "\""};
        out.target_bbox = nonempty(range_bbox({addr, addr}));
    } else if (action.api_name == "insert_excel_table") {
        std::vector<std::vector<std::string>> data;
        for (const auto& row : args.at("data")) {
            std::vector<std::string> cells;
            for (const auto& cell : row)
                cells.push_back(cell.is_string() ? cell.get<std::string>() : cell.dump());
            data.push_back(std::move(cells));
        }
        const CellAddress anchor = parse_cell(args.at("anchor").get<std::string>());
        const RangeRef covered = insert_excel_table(state, data, anchor);
        out.result = {true, "inserted a " + std::to_string(covered.rows()) + "x" +
                                std::to_string(covered.columns()) + " table at " +
                                format_range(covered)};
        out.target_bbox = nonempty(range_bbox(covered));
    } else if (action.api_name == "auto_fill") {
        const RangeRef source = parse_range(args.at("source").get<std::string>());
        const RangeRef target = parse_range(args.at("target").get<std::string>());
        auto_fill(state, source, target);
        out.result = {true, "filled " + format_range(target) + " from " + format_range(source)};
        out.target_bbox = nonempty(range_bbox(target));
    } else if (action.api_name == "reorder_columns") {
        std::vector<int> order;
        for (const auto& v : args.at("order")) order.push_back(v.get<int>());
        reorder_columns(state, order);
        const auto bounds = state.active().used_bounds();
        out.result = {true, "reordered columns"};
        if (bounds) out.target_bbox = nonempty(range_bbox(*bounds));
    } else if (action.api_name == "table2markdown") {
        const RangeRef range = parse_range(args.at("range").get<std::string>());
        out.result = {true, table2markdown(state, range)};
        out.target_bbox = nonempty(range_bbox(range));
    } else {
        out.result = {false, "unknown api " + action.api_name};
    }
    return out;
}

}  // namespace

ExecOutcome execute(AppState& state, const AgentAction& action) {
    // Failed operations must leave the state untouched; run against a copy and
    // commit only on success.
    AppState scratch = state;
    ExecOutcome out;
    try {
        switch (action.kind) {
            case AgentAction::Kind::ApiCall:
                out = run_api(scratch, action);
                break;
            case AgentAction::Kind::GuiClick: {
                PixelRect bbox{};
                std::string name;
                for (const AccessibilityNode& n : accessibility_snapshot(scratch)) {
                    if (n.id == action.node_id) {
                        bbox = n.bbox;
                        name = n.name;
                    }
                }
                out.result = apply_gui_action(scratch, {GuiAction::Kind::Click, action.node_id,
                                                        "", ""});
                out.target_bbox = nonempty(bbox);
                if (!name.empty()) out.target_name = name;
                break;
            }
            case AgentAction::Kind::GuiType:
                out.result = apply_gui_action(scratch,
                                              {GuiAction::Kind::Type, "", action.text, ""});
                if (scratch.open_dialog) {
                    for (const AccessibilityNode& n : accessibility_snapshot(scratch))
                        if (n.control_type == ControlType::Edit) out.target_bbox = nonempty(n.bbox);
                } else if (scratch.selection) {
                    out.target_bbox = nonempty(range_bbox(
                        RangeRef{scratch.selection->top_left, scratch.selection->top_left}));
                }
                break;
            case AgentAction::Kind::GuiKeys:
                out.result = apply_gui_action(scratch,
                                              {GuiAction::Kind::PressKeys, "", "", action.chord});
                break;
            case AgentAction::Kind::Finish:
                out.result = {true, action.finish_reason.empty() ? "finished"
                                                                 : action.finish_reason};
                break;
        }
    } catch (const json::exception& e) {
        out.result = {false, std::string("bad arguments: ") + e.what()};
        return out;
    } catch (const Error& e) {
        out.result = {false, e.what()};
        return out;
    }
    if (out.result.ok) state = std::move(scratch);
    return out;
}

// --- The loop -----------------------------------------------------------------------

namespace {

std::string step_stem(int index) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%03d", index);
    return buf;
}

}  // namespace

Trajectory run_task(ProviderGateway& gateway, const InstantiatedTask& task,
                    const AppState& template_state, const RunPaths& paths, int max_steps) {
    namespace fs = std::filesystem;
    fs::create_directories(paths.run_dir / "steps");
    fs::create_directories(paths.run_dir / "som");

    Trajectory traj;
    traj.task = task;

    AppState state = template_state;
    traj.initial_digest = state_fingerprint(state);
    write_png(paths.run_dir / "initial.png", render_screenshot(state).raster);

    for (int index = 1; index <= max_steps; ++index) {
        Observation obs = perceive(state);
        const std::string shot_rel = "steps/" + step_stem(index) + "_before.png";
        const std::string som_rel = "som/" + step_stem(index) + ".png";
        write_png(paths.run_dir / shot_rel, obs.screenshot.raster);
        write_png(paths.run_dir / som_rel, obs.som_overlay);
        obs.som_path = (paths.run_dir / som_rel).string();

        StepRecord step;
        step.index = index;
        step.screenshot_before = shot_rel;

        try {
            auto [reasoning, action] = decide(gateway, obs, task, traj.steps);
            step.reasoning = reasoning;
            step.action = action;
        } catch (const UnparseableAction& e) {
            step.action.kind = AgentAction::Kind::Finish;
            step.action.finish_reason = "aborted";
            step.result_ok = false;
            step.result = e.what();
            step.state_digest_after = state_fingerprint(state);
            traj.steps.push_back(std::move(step));
            traj.status = TrajectoryStatus::Error;
            traj.final_digest = state_fingerprint(state);
            write_png(paths.run_dir / "final.png", render_screenshot(state).raster);
            return traj;
        }

        const ExecOutcome outcome = execute(state, step.action);
        step.result_ok = outcome.result.ok;
        step.result = outcome.result.message;
        step.target_bbox = outcome.target_bbox;
        step.target_name = outcome.target_name;
        step.state_digest_after = state_fingerprint(state);
        const bool finished = step.action.kind == AgentAction::Kind::Finish;
        traj.steps.push_back(std::move(step));

        if (finished) {
            traj.status = TrajectoryStatus::Finished;
            break;
        }
    }
    if (traj.steps.empty() || traj.steps.back().action.kind != AgentAction::Kind::Finish)
        traj.status = TrajectoryStatus::StepLimit;

    traj.final_digest = state_fingerprint(state);
    write_png(paths.run_dir / "final.png", render_screenshot(state).raster);
    return traj;
}

int replay_mismatch(const Trajectory& traj, AppState state) {
    for (const StepRecord& step : traj.steps) {
        execute(state, step.action);
        if (state_fingerprint(state) != step.state_digest_after) return step.index;
    }
    return 0;
}

// --- Serialization -------------------------------------------------------------------

std::string to_string(TrajectoryStatus s) {
    switch (s) {
        case TrajectoryStatus::Finished: return "Finished";
        case TrajectoryStatus::StepLimit: return "StepLimit";
        case TrajectoryStatus::Error: return "Error";
    }
    return "Error";
}

TrajectoryStatus trajectory_status_from_string(const std::string& s) {
    if (s == "Finished") return TrajectoryStatus::Finished;
    if (s == "StepLimit") return TrajectoryStatus::StepLimit;
    if (s == "Error") return TrajectoryStatus::Error;
    throw ConfigError("unknown trajectory status \"" + s + "\"");
}

namespace {

json bbox_to_json(const PixelRect& r) {
    return json::array({r.left, r.top, r.right, r.bottom});
}

PixelRect bbox_from_json(const json& j) {
    return PixelRect{j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(),
                     j.at(3).get<int>()};
}

}  // namespace

json trajectory_to_json(const Trajectory& traj) {
    json steps = json::array();
    for (const StepRecord& s : traj.steps) {
        json step = {{"index", s.index},
                     {"screenshot_before", s.screenshot_before},
                     {"reasoning", s.reasoning},
                     {"action", action_to_json(s.action)},
                     {"result_ok", s.result_ok},
                     {"result", s.result},
                     {"state_digest_after", s.state_digest_after}};
        if (s.target_bbox) step["target_bbox"] = bbox_to_json(*s.target_bbox);
        if (s.target_name) step["target_name"] = *s.target_name;
        steps.push_back(std::move(step));
    }
    return json{{"task",
                 {{"id", traj.task.raw.id},
                  {"text", traj.task.raw.text},
                  {"source", to_string(traj.task.raw.source)},
                  {"template_id", traj.task.template_id},
                  {"instruction", traj.task.instruction}}},
                {"steps", steps},
                {"status", to_string(traj.status)},
                {"initial_digest", traj.initial_digest},
                {"final_digest", traj.final_digest}};
}

Trajectory trajectory_from_json(const json& doc) {
    Trajectory traj;
    traj.task.raw.id = doc.at("task").at("id").get<std::string>();
    traj.task.raw.text = doc.at("task").at("text").get<std::string>();
    traj.task.raw.source = task_source_from_string(doc.at("task").at("source").get<std::string>());
    traj.task.template_id = doc.at("task").at("template_id").get<std::string>();
    traj.task.instruction = doc.at("task").at("instruction").get<std::string>();
    for (const auto& js : doc.at("steps")) {
        StepRecord s;
        s.index = js.at("index").get<int>();
        s.screenshot_before = js.at("screenshot_before").get<std::string>();
        s.reasoning = js.at("reasoning").get<std::string>();
        s.action = action_from_json(js.at("action"));
        s.result_ok = js.at("result_ok").get<bool>();
        s.result = js.at("result").get<std::string>();
        s.state_digest_after = js.at("state_digest_after").get<uint64_t>();
        if (js.contains("target_bbox")) s.target_bbox = bbox_from_json(js["target_bbox"]);
        if (js.contains("target_name")) s.target_name = js["target_name"].get<std::string>();
        traj.steps.push_back(std::move(s));
    }
    traj.status = trajectory_status_from_string(doc.at("status").get<std::string>());
    traj.initial_digest = doc.at("initial_digest").get<uint64_t>();
    traj.final_digest = doc.at("final_digest").get<uint64_t>();
    return traj;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& file) {
    std::ofstream out(file);
    out << trajectory_to_json(traj).dump(2) << "\n";
}

Trajectory load_trajectory(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open trajectory " + file.string());
    json doc;
    in >> doc;
    return trajectory_from_json(doc);
}

}  // namespace tutorforge
