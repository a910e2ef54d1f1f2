#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tutorforge/agent.hpp"
#include "tutorforge/provider.hpp"
#include "tutorforge/raster.hpp"

namespace tutorforge {

struct FilteredStep {
    int original_index = 0;
    std::string screenshot;        // relative path of the step's screenshot
    std::string annotated_image;   // relative path of the enhanced copy
    std::string action_text;       // summary used in authoring prompts
    std::optional<PixelRect> target_bbox;
    uint64_t state_digest_after = 0;
    AgentAction action;            // retained so filtered replays stay possible
};

/// Drops steps that do not involve actual operations (digest-unchanged
/// observations and failures) and immediate repeats whose re-execution changed
/// nothing. Throws EmptyAfterFilter when nothing survives.
std::vector<FilteredStep> filter_steps(const Trajectory& traj);

/// Visual enhancement: 3 px pure-red box at `bbox` plus a cursor glyph whose
/// hotspot sits at the bbox's clamped bottom-right corner. Throws
/// BboxOutOfCanvas when the bbox does not fit the canvas.
void annotate_screenshot(Raster& image, const PixelRect& bbox);

inline constexpr int kCursorSize = 24;

/// Where the cursor hotspot lands for a given box: the bottom-right corner,
/// clamped so the glyph stays inside the canvas.
std::pair<int, int> cursor_hotspot(const PixelRect& bbox, int canvas_w = kCanvasWidth,
                                   int canvas_h = kCanvasHeight);

struct StepContent {
    std::string step_title;
    std::string written_description;  // formal register, document tutorial
    std::string spoken_narration;     // conversational register, video tutorial

    friend bool operator==(const StepContent&, const StepContent&) = default;
};

struct TutorialContent {
    std::string task_title;
    std::string task_description;
    std::vector<StepContent> steps;

    friend bool operator==(const TutorialContent&, const TutorialContent&) = default;
};

/// Two provider calls (document style, then video narration), validated
/// against the filtered step count.
TutorialContent author_content(ProviderGateway& gateway, const InstantiatedTask& task,
                               const std::vector<FilteredStep>& steps);

struct Boilerplate {
    std::string introduction;   // {title} / {description} placeholders
    std::string conclusion;
    std::string video_initial;
    std::string video_final;
    std::string video_thanks;

    static Boilerplate load(const std::filesystem::path& file);
};

struct TutorialPackage {
    std::string task_id;
    TutorialContent content;
    std::vector<std::string> step_images;  // annotated, relative to the task dir
    std::string initial_screenshot;
    std::string final_screenshot;
    std::string introduction;
    std::string conclusion;
    std::string background_image;

    friend bool operator==(const TutorialPackage&, const TutorialPackage&) = default;
};

/// Verifies every referenced asset exists under `task_dir` (MissingAsset
/// otherwise) and writes tutorial.json.
TutorialPackage assemble_package(const std::string& task_id, const TutorialContent& content,
                                 const std::vector<FilteredStep>& steps,
                                 const Boilerplate& boilerplate,
                                 const std::string& background_image,
                                 const std::filesystem::path& task_dir);

nlohmann::json package_to_json(const TutorialPackage& package);
TutorialPackage package_from_json(const nlohmann::json& doc);
TutorialPackage load_package(const std::filesystem::path& file);

/// Validates a tutorial.json document against the shipped schema subset
/// (type / required / items). Returns the violations, empty when valid.
std::vector<std::string> validate_against_schema(const nlohmann::json& document,
                                                 const nlohmann::json& schema);

/// tutorial.html + tutorial.md: centered title, introduction, one block per
/// step (title, image, description), then the result presentation.
void synthesize_document(const TutorialPackage& package, const std::filesystem::path& task_dir);

enum class SegmentKind { Intro, InitialState, Step, FinalState, Ending };
std::string to_string(SegmentKind k);

struct VideoSegment {
    SegmentKind kind = SegmentKind::Intro;
    int step_index = 0;  // 1-based for Step segments
    std::string frame_image;
    std::string subtitle;
    std::string narration;
    double duration_seconds = 0;
};

struct VideoPlan {
    std::vector<VideoSegment> segments;
    double total_seconds = 0;
};

struct VideoConfig {
    double words_per_minute = 150.0;
    double min_segment_seconds = 2.0;
    int frames_per_second = 1;
    std::string encoder_command;  // templated: {frames} {fps} {output}; empty = skip encoding
    std::string tts_command;      // templated: {text} {seconds} {output}; empty = silence
};

/// Frames, subtitles.srt, plan.json (and optionally an encoded file) under
/// `task_dir`. Segment order is fixed: Intro, InitialState, Step(1..n),
/// FinalState, Ending.
VideoPlan synthesize_video(const TutorialPackage& package, const std::filesystem::path& task_dir,
                           const VideoConfig& config = {});

nlohmann::json video_plan_to_json(const VideoPlan& plan);

/// "HH:MM:SS,mmm" from a millisecond timestamp.
std::string srt_timestamp(long long milliseconds);
std::string render_srt(const VideoPlan& plan);

/// Greedy word wrap at `limit` characters, then the last two lines are
/// rebalanced to minimize their length difference.
std::vector<std::string> wrap_title(const std::string& title, size_t limit = 36);

}  // namespace tutorforge
