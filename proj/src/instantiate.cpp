#include "tutorforge/instantiate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "tutorforge/errors.hpp"

namespace tutorforge {

using nlohmann::json;

std::string to_string(TaskSource s) {
    switch (s) {
        case TaskSource::Search: return "Search";
        case TaskSource::Websites: return "Websites";
        case TaskSource::InApp: return "In-App";
    }
    return "Search";
}

TaskSource task_source_from_string(const std::string& s) {
    if (s == "Search") return TaskSource::Search;
    if (s == "Websites") return TaskSource::Websites;
    if (s == "In-App" || s == "InApp") return TaskSource::InApp;
    throw ConfigError("unknown task source \"" + s + "\"");
}

std::string to_string(TaskLevel l) {
    return l == TaskLevel::SpreadsheetLevel ? "spreadsheet_level" : "excel_level";
}

TaskLevel task_level_from_string(const std::string& s) {
    std::string norm;
    for (char c : s)
        norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (norm == "spreadsheet_level" || norm == "spreadsheet") return TaskLevel::SpreadsheetLevel;
    if (norm == "excel_level" || norm == "excel") return TaskLevel::ExcelLevel;
    throw SchemaViolation("unknown task level \"" + s + "\"");
}

std::vector<RawTask> load_corpus(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open corpus " + file.string());
    std::vector<RawTask> tasks;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw ConfigError("corpus line " + std::to_string(line_no) + ": " + e.what());
        }
        RawTask task;
        task.id = doc.at("id").get<std::string>();
        task.text = doc.at("text").get<std::string>();
        if (task.text.empty())
            throw ConfigError("corpus line " + std::to_string(line_no) + ": empty text");
        task.source = task_source_from_string(doc.at("source").get<std::string>());
        if (doc.contains("expected")) {
            TaskLabels labels;
            labels.operation_category = doc["expected"].at("operation").get<std::string>();
            labels.object_category = doc["expected"].at("object").get<std::string>();
            labels.level = task_level_from_string(doc["expected"].at("level").get<std::string>());
            task.expected_labels = labels;
        }
        tasks.push_back(std::move(task));
    }
    return tasks;
}

namespace {

std::set<std::string> normalized_tokens(const std::string& text) {
    std::set<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.insert(current);
            current.clear();
        }
    }
    if (!current.empty()) tokens.insert(current);
    return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    size_t inter = 0;
    for (const std::string& t : a) inter += b.count(t);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

std::string snake_case(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else if (!out.empty() && out.back() != '_')
            out.push_back('_');
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

}  // namespace

std::vector<RawTask> dedupe_tasks(const std::vector<RawTask>& tasks, double threshold) {
    std::vector<RawTask> kept;
    std::vector<std::set<std::string>> kept_tokens;
    for (const RawTask& task : tasks) {
        const auto tokens = normalized_tokens(task.text);
        bool duplicate = false;
        for (const auto& existing : kept_tokens) {
            if (jaccard(tokens, existing) >= threshold) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            kept.push_back(task);
            kept_tokens.push_back(tokens);
        }
    }
    return kept;
}

std::vector<Template> load_templates(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("template directory " + dir.string() + " does not exist");
    std::vector<Template> templates;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        Template tmpl;
        tmpl.id = entry.path().filename().string();
        tmpl.workbook_file = entry.path() / "template.json";
        if (!std::filesystem::exists(tmpl.workbook_file))
            throw ConfigError("template " + tmpl.id + " has no template.json");
        const auto desc_file = entry.path() / "description.txt";
        if (std::filesystem::exists(desc_file)) {
            std::ifstream in(desc_file);
            std::stringstream buf;
            buf << in.rdbuf();
            tmpl.description = buf.str();
            while (!tmpl.description.empty() &&
                   (tmpl.description.back() == '\n' || tmpl.description.back() == '\r'))
                tmpl.description.pop_back();
        }
        for (const auto& file : std::filesystem::directory_iterator(entry.path()))
            if (file.path().extension() == ".png") tmpl.screenshots.push_back(file.path());
        std::sort(tmpl.screenshots.begin(), tmpl.screenshots.end());
        templates.push_back(std::move(tmpl));
    }
    std::sort(templates.begin(), templates.end(),
              [](const Template& a, const Template& b) { return a.id < b.id; });
    return templates;
}

AppState load_template_state(const Template& tmpl, UiTreePtr tree) {
    return load_workbook(tmpl.workbook_file, std::move(tree));
}

TaskLabels classify_task(ProviderGateway& gateway, const RawTask& task) {
    ProviderRequest req;
    req.role_tag = RoleTag::Classifier;
    req.prompt =
        "Extract the operation, the target object, and the level of this spreadsheet task.\n"
        "Level is \"excel_level\" when the operation targets the application itself (toolbars, "
        "panes, application options) and \"spreadsheet_level\" when it targets workbook "
        "content.\nRespond with JSON {\"operation\": ..., \"object\": ..., \"level\": ...}.\n"
        "Task: " + task.text;
    const json doc = parse_structured(gateway.complete(req).text, "task_labels");
    TaskLabels labels;
    labels.operation_category = snake_case(doc.at("operation").get<std::string>());
    labels.object_category = snake_case(doc.at("object").get<std::string>());
    labels.level = task_level_from_string(doc.at("level").get<std::string>());
    return labels;
}

const Template& match_template(ProviderGateway& gateway, const RawTask& task,
                               const std::vector<Template>& templates, int threshold) {
    if (templates.empty()) throw NoCompatibleTemplate("no templates available");

    // Single call scoring all candidates keeps the choice order-independent:
    // ties break on template id, never on list position.
    std::ostringstream prompt;
    prompt << "Rate how suitable each workbook template is for executing the task below.\n"
              "Respond with JSON {\"scores\": [{\"template_id\": ..., \"score\": 0-10}, ...]}.\n"
              "Task: "
           << task.text << "\nTemplates:\n";
    for (const Template& t : templates) prompt << "- " << t.id << ": " << t.description << "\n";

    ProviderRequest req;
    req.role_tag = RoleTag::Instantiator;
    req.prompt = prompt.str();
    const json doc = parse_structured(gateway.complete(req).text, "template_scores");

    std::map<std::string, int> scores;
    for (const auto& entry : doc.at("scores")) {
        if (!entry.contains("template_id") || !entry.contains("score"))
            throw SchemaViolation("scores entries need template_id and score");
        scores[entry.at("template_id").get<std::string>()] = entry.at("score").get<int>();
    }

    const Template* best = nullptr;
    int best_score = -1;
    for (const Template& t : templates) {
        auto it = scores.find(t.id);
        const int score = it == scores.end() ? 0 : it->second;
        if (score > best_score || (score == best_score && best && t.id < best->id)) {
            best = &t;
            best_score = score;
        }
    }
    if (!best || best_score < threshold)
        throw NoCompatibleTemplate("best score " + std::to_string(best_score) + " below threshold " +
                                   std::to_string(threshold));
    return *best;
}

InstantiatedTask rewrite_task(ProviderGateway& gateway, const RawTask& task, const Template& tmpl) {
    ProviderRequest req;
    req.role_tag = RoleTag::Instantiator;
    req.prompt =
        "Rewrite this task into one clear, executable instruction against the template, naming "
        "the concrete ranges, charts, or commands it touches.\n"
        "Respond with JSON {\"instruction\": ..., \"required_objects\": [{\"kind\": "
        "\"range\"|\"chart\"|\"command\", \"ref\": ...}, ...]}.\n"
        "Task: " + task.text + "\nTemplate " + tmpl.id + ": " + tmpl.description;
    const json doc = parse_structured(gateway.complete(req).text, "task_rewrite");

    InstantiatedTask out;
    out.raw = task;
    out.template_id = tmpl.id;
    out.instruction = doc.at("instruction").get<std::string>();
    for (const auto& obj : doc.at("required_objects")) {
        if (!obj.contains("kind") || !obj.contains("ref"))
            throw SchemaViolation("required_objects entries need kind and ref");
        out.required_objects.push_back(
            {obj.at("kind").get<std::string>(), obj.at("ref").get<std::string>()});
    }
    return out;
}

ValidationReport validate_instantiated(const InstantiatedTask& task, const AppState& state) {
    ValidationReport report;
    const Sheet& sheet = state.active();
    for (const RequiredObject& obj : task.required_objects) {
        if (obj.kind == "range") {
            try {
                const RangeRef range = parse_range(obj.ref);
                const auto bounds = sheet.used_bounds();
                if (!bounds || !bounds->contains(range)) {
                    report.ok = false;
                    report.findings.push_back("range: " + obj.ref + " outside used bounds");
                }
            } catch (const MalformedRange&) {
                report.ok = false;
                report.findings.push_back("range: " + obj.ref + " does not parse");
            }
        } else if (obj.kind == "chart") {
            bool found = false;
            for (const ChartObject& chart : sheet.charts)
                if (chart.id == obj.ref || to_string(chart.chart_type) == obj.ref) found = true;
            if (!found) {
                report.ok = false;
                report.findings.push_back("chart: " + obj.ref);
            }
        } else if (obj.kind == "command") {
            const UiCommandTree& tree = *state.ui_tree;
            bool found = tree.find_control(obj.ref) != nullptr || tree.find_tab(obj.ref) != nullptr;
            if (!found) {
                for (const UiDialog& dlg : tree.dialogs) {
                    if (dlg.id == obj.ref) found = true;
                    for (const DialogCategory& cat : dlg.categories) {
                        if (cat.id == obj.ref) found = true;
                        for (const DialogCommand& cmd : cat.commands)
                            if (cmd.id == obj.ref) found = true;
                    }
                }
            }
            if (!found) {
                report.ok = false;
                report.findings.push_back("command: " + obj.ref);
            }
        } else {
            report.ok = false;
            report.findings.push_back("unknown object kind: " + obj.kind);
        }
    }
    return report;
}

}  // namespace tutorforge
