#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tutorforge/instantiate.hpp"
#include "tutorforge/provider.hpp"
#include "tutorforge/render.hpp"
#include "tutorforge/sheet.hpp"

namespace tutorforge {

/// One perception: plain screenshot, numbered Set-of-Marks overlay, the
/// accessibility nodes, and the mark-number -> node-id index.
struct Observation {
    Screenshot screenshot;
    Raster som_overlay{kCanvasWidth, kCanvasHeight};
    std::vector<AccessibilityNode> nodes;
    std::map<int, std::string> mark_index;
    std::string som_path;  // set once the overlay is persisted; attached to planner prompts
};

/// The closed whitelist of programmatic spreadsheet operations.
const std::vector<std::string>& api_whitelist();

struct AgentAction {
    enum class Kind { GuiClick, GuiType, GuiKeys, ApiCall, Finish } kind = Kind::Finish;
    std::string node_id;           // GuiClick
    std::string text;              // GuiType
    std::string chord;             // GuiKeys
    std::string api_name;          // ApiCall
    nlohmann::json api_args;       // ApiCall arguments
    std::string finish_reason;     // Finish

    friend bool operator==(const AgentAction& a, const AgentAction& b);
};

std::string action_summary(const AgentAction& action);
nlohmann::json action_to_json(const AgentAction& action);
AgentAction action_from_json(const nlohmann::json& doc);

struct StepRecord {
    int index = 0;  // 1-based
    std::string screenshot_before;  // path relative to the run directory
    std::string reasoning;
    AgentAction action;
    bool result_ok = true;
    std::string result;
    std::optional<PixelRect> target_bbox;
    std::optional<std::string> target_name;
    uint64_t state_digest_after = 0;
};

enum class TrajectoryStatus { Finished, StepLimit, Error };
std::string to_string(TrajectoryStatus s);
TrajectoryStatus trajectory_status_from_string(const std::string& s);

struct Trajectory {
    InstantiatedTask task;
    std::vector<StepRecord> steps;
    TrajectoryStatus status = TrajectoryStatus::Error;
    uint64_t initial_digest = 0;
    uint64_t final_digest = 0;
};

nlohmann::json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& doc);
void save_trajectory(const Trajectory& traj, const std::filesystem::path& file);
Trajectory load_trajectory(const std::filesystem::path& file);

/// Renders, snapshots the accessibility tree, and assigns marks in row-major
/// bbox order (enabled nodes only), drawing a numbered badge at each node's
/// top-left corner.
Observation perceive(const AppState& state);

/// Builds the planner prompt (instruction, API signatures, mark legend,
/// condensed history), calls the provider, and parses the structured action.
/// Throws UnparseableAction after one failed reprompt.
std::pair<std::string, AgentAction> decide(ProviderGateway& gateway, const Observation& obs,
                                           const InstantiatedTask& task,
                                           std::span<const StepRecord> history);

struct ExecOutcome {
    ActionResult result;
    std::optional<PixelRect> target_bbox;
    std::optional<std::string> target_name;
};

/// Dispatches an action against the state. Simulator errors surface as failed
/// ActionResults without mutating the state; the loop continues.
ExecOutcome execute(AppState& state, const AgentAction& action);

struct RunPaths {
    std::filesystem::path run_dir;  // steps/, som/, initial.png, final.png live here
};

/// The reactive perceive-reason-act loop. Writes per-step PNGs under
/// `paths.run_dir` and returns the recorded trajectory.
Trajectory run_task(ProviderGateway& gateway, const InstantiatedTask& task,
                    const AppState& template_state, const RunPaths& paths, int max_steps = 15);

/// Re-executes a trajectory's actions from a fresh template state, checking
/// every per-step digest. Returns the index (1-based) of the first mismatch,
/// or 0 when the replay is faithful.
int replay_mismatch(const Trajectory& traj, AppState state);

}  // namespace tutorforge
