#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tutorforge/provider.hpp"
#include "tutorforge/sheet.hpp"

namespace tutorforge {

enum class TaskSource { Search, Websites, InApp };
enum class TaskLevel { SpreadsheetLevel, ExcelLevel };

std::string to_string(TaskSource s);
TaskSource task_source_from_string(const std::string& s);
std::string to_string(TaskLevel l);
TaskLevel task_level_from_string(const std::string& s);

struct TaskLabels {
    std::string operation_category;  // lower snake case
    std::string object_category;
    TaskLevel level = TaskLevel::SpreadsheetLevel;

    friend bool operator==(const TaskLabels&, const TaskLabels&) = default;
};

struct RawTask {
    std::string id;
    std::string text;
    TaskSource source = TaskSource::Search;
    std::optional<TaskLabels> expected_labels;  // seed corpus annotation
};

struct Template {
    std::string id;
    std::filesystem::path workbook_file;
    std::vector<std::filesystem::path> screenshots;
    std::string description;
};

struct RequiredObject {
    std::string kind;  // "range" | "chart" | "command"
    std::string ref;

    friend bool operator==(const RequiredObject&, const RequiredObject&) = default;
};

struct InstantiatedTask {
    RawTask raw;
    std::string template_id;
    std::string instruction;
    std::vector<RequiredObject> required_objects;
};

/// Corpus file: JSONL, one RawTask per line.
std::vector<RawTask> load_corpus(const std::filesystem::path& file);

/// Near-duplicate filter over normalized-token Jaccard similarity; keeps the
/// first of each duplicate group.
std::vector<RawTask> dedupe_tasks(const std::vector<RawTask>& tasks, double threshold = 0.9);

/// Templates live one per directory: template.json + description.txt + *.png.
std::vector<Template> load_templates(const std::filesystem::path& dir);
AppState load_template_state(const Template& tmpl, UiTreePtr tree);

/// Provider-backed extraction of operation, object, and level, normalized to
/// lower snake case.
TaskLabels classify_task(ProviderGateway& gateway, const RawTask& task);

/// Scores every template for compatibility (integer 0-10); the highest wins,
/// ties broken by lowest template id. Throws NoCompatibleTemplate when the
/// best score is below `threshold`.
const Template& match_template(ProviderGateway& gateway, const RawTask& task,
                               const std::vector<Template>& templates, int threshold = 6);

/// Rewrites the raw text into a concrete instruction naming objects from the
/// matched template.
InstantiatedTask rewrite_task(ProviderGateway& gateway, const RawTask& task,
                              const Template& tmpl);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> findings;  // unresolved objects, e.g. "chart: pie"
};

/// True iff every required object resolves against the template state: ranges
/// parse and lie within used bounds, chart refs match, command ids exist.
ValidationReport validate_instantiated(const InstantiatedTask& task, const AppState& state);

}  // namespace tutorforge
