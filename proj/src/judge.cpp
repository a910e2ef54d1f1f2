#include "tutorforge/judge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tutorforge/errors.hpp"

namespace tutorforge {

using nlohmann::json;

Verdict judge_trajectory(ProviderGateway& gateway, const Trajectory& traj,
                         const std::filesystem::path& run_dir) {
    if (traj.status != TrajectoryStatus::Finished) {
        return {false, "auto-fail: trajectory status is " + to_string(traj.status)};
    }

    std::ostringstream prompt;
    prompt << "Decide whether this spreadsheet task was completed successfully.\n"
           << "Task: " << traj.task.instruction << "\n\nExecution log:\n";
    for (const StepRecord& step : traj.steps) {
        prompt << step.index << ". " << action_summary(step.action) << " -> "
               << (step.result_ok ? "ok: " : "FAILED: ") << step.result << "\n";
        if (!step.reasoning.empty()) prompt << "   reasoning: " << step.reasoning << "\n";
    }
    prompt << "\nThe attached screenshots show the run in order.\n"
           << "Respond with JSON {\"success\": true|false, \"rationale\": ...}.\n";

    // First, last, and evenly sampled screenshots, at most 8.
    std::vector<std::string> shots;
    for (const StepRecord& step : traj.steps) shots.push_back(step.screenshot_before);
    shots.push_back("final.png");
    std::vector<std::string> attached;
    if (shots.size() <= 8) {
        attached = shots;
    } else {
        attached.push_back(shots.front());
        for (int i = 1; i <= 6; ++i)
            attached.push_back(shots[i * (shots.size() - 1) / 7]);
        attached.push_back(shots.back());
    }

    ProviderRequest req;
    req.role_tag = RoleTag::Judge;
    req.prompt = prompt.str();
    for (const std::string& shot : attached) req.images.push_back((run_dir / shot).string());

    const json doc = parse_structured(gateway.complete(req).text, "verdict");
    Verdict verdict;
    verdict.success = doc.at("success").get<bool>();
    verdict.rationale = doc.at("rationale").get<std::string>();
    if (verdict.rationale.empty()) throw SchemaViolation("rationale must be non-empty");
    return verdict;
}

// --- Rubrics -----------------------------------------------------------------------

const std::vector<RubricMetric>& document_metrics() {
    static const std::vector<RubricMetric> metrics = {
        {"clarity", "Each step is described explicitly and unambiguously."},
        {"conciseness", "Redundant, repetitive, or irrelevant steps are avoided."},
        {"correctness", "All necessary steps are performed accurately and correctly."},
        {"completeness", "All essential operations are covered."},
        {"sequential_order", "Steps are presented in a logical and coherent sequence."},
        {"text_image_mapping", "Text and images are accurately aligned."},
        {"understandability", "The content is clear, intuitive, and easy to follow."},
        {"efficiency", "The format enables faster task completion compared to alternatives."},
        {"task_completion", "Users can complete the intended tasks smoothly."},
        {"satisfaction", "Users are satisfied with the tutorial."},
        {"preference", "Users prefer this type of tutorial over other formats."},
    };
    return metrics;
}

const std::vector<RubricMetric>& video_metrics() {
    static const std::vector<RubricMetric> metrics = {
        {"usability", "The operation process is clear, enabling users to follow it easily."},
        {"correctness", "All necessary steps are performed completely and accurately."},
        {"interactivity", "Key operations are highlighted, allowing users to easily notice them."},
        {"design_quality", "The video is well-structured and user-friendly."},
        {"transferability", "The methods can be effectively applied to similar tasks."},
        {"completion_satisfaction",
         "Users can complete the task smoothly, and their overall satisfaction is high."},
        {"efficiency_preference",
         "The tutorial improves efficiency and is the preferred format for future learning."},
    };
    return metrics;
}

std::vector<RubricScore> score_tutorial(ProviderGateway& gateway, const TutorialPackage& package,
                                        RubricKind kind) {
    const auto& metrics = kind == RubricKind::Document ? document_metrics() : video_metrics();

    std::ostringstream prompt;
    prompt << "You are rating a generated spreadsheet tutorial "
           << (kind == RubricKind::Document ? "document" : "video")
           << " on a 5-point Likert scale (1 = very poor, 5 = excellent).\n"
           << "Metrics:\n";
    for (const RubricMetric& m : metrics) prompt << "- " << m.id << ": " << m.description << "\n";
    prompt << "\nWorked examples:\n"
           << "- A tutorial whose steps each pair an accurate red-boxed screenshot with a precise "
              "instruction earns clarity 5.\n"
           << "- A tutorial that repeats the same selection step three times earns conciseness "
              "2.\n"
           << "\nTutorial title: " << package.content.task_title << "\n"
           << "Description: " << package.content.task_description << "\nSteps:\n";
    for (size_t i = 0; i < package.content.steps.size(); ++i) {
        const StepContent& s = package.content.steps[i];
        prompt << i + 1 << ". " << s.step_title << " - "
               << (kind == RubricKind::Document ? s.written_description : s.spoken_narration)
               << "\n";
    }
    prompt << "\nRespond with JSON {\"scores\": [{\"metric_id\": ..., \"score\": 1-5, "
              "\"justification\": ...}, ...]} covering every metric exactly once.\n";

    ProviderRequest req;
    req.role_tag = RoleTag::Judge;
    req.prompt = prompt.str();
    const json doc = parse_structured(gateway.complete(req).text, "rubric_scores");

    std::map<std::string, RubricScore> by_id;
    for (const auto& entry : doc.at("scores")) {
        RubricScore score;
        score.metric_id = entry.at("metric_id").get<std::string>();
        score.score = entry.at("score").get<int>();
        score.justification = entry.value("justification", "");
        if (score.score < 1 || score.score > 5)
            throw SchemaViolation("score " + std::to_string(score.score) + " for " +
                                  score.metric_id + " outside [1,5]");
        by_id[score.metric_id] = std::move(score);
    }

    std::vector<RubricScore> out;
    for (const RubricMetric& m : metrics) {
        auto it = by_id.find(m.id);
        if (it == by_id.end()) throw MissingMetric(m.id);
        out.push_back(it->second);
    }
    return out;
}

// --- Ratings & aggregation ------------------------------------------------------------

std::vector<Rating> load_ratings_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open ratings file " + file.string());
    std::vector<Rating> ratings;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        Rating r;
        std::string score;
        if (!std::getline(ss, r.case_id, ',') || !std::getline(ss, r.rater_id, ',') ||
            !std::getline(ss, r.metric_id, ',') || !std::getline(ss, score, ','))
            throw ConfigError("malformed ratings row: " + line);
        r.score = std::stod(score);
        ratings.push_back(std::move(r));
    }
    return ratings;
}

std::vector<MetricAggregate> aggregate_report(const std::vector<Rating>& ratings,
                                              const std::vector<RubricMetric>& metrics) {
    // Rater scores collapse to one value per (case, metric) first.
    std::map<std::pair<std::string, std::string>, std::pair<double, int>> sums;
    for (const Rating& r : ratings) {
        auto& slot = sums[{r.case_id, r.metric_id}];
        slot.first += r.score;
        slot.second += 1;
    }
    std::map<std::string, std::vector<double>> per_metric;
    std::vector<double> pooled;
    for (const auto& [key, sum] : sums) {
        const double value = sum.first / sum.second;
        per_metric[key.second].push_back(value);
        pooled.push_back(value);
    }

    auto mean_var = [](const std::vector<double>& v) {
        double mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        return std::pair{mean, var};
    };

    std::vector<MetricAggregate> out;
    for (const RubricMetric& m : metrics) {
        auto it = per_metric.find(m.id);
        if (it == per_metric.end()) continue;
        auto [mean, var] = mean_var(it->second);
        out.push_back({m.id, mean, var, static_cast<int>(it->second.size())});
    }
    if (!pooled.empty()) {
        auto [mean, var] = mean_var(pooled);
        out.push_back({"average", mean, var, static_cast<int>(pooled.size())});
    }
    return out;
}

std::string render_aggregate_markdown(const std::vector<MetricAggregate>& aggregates) {
    std::ostringstream out;
    out << "| Metric | Mean (Variance) | Cases |\n| --- | --- | --- |\n";
    out.setf(std::ios::fixed);
    out.precision(2);
    for (const MetricAggregate& a : aggregates) {
        if (a.metric_id == "average")
            out << "| **Average** | " << a.mean << " (" << a.variance << ") | " << a.cases
                << " |\n";
        else
            out << "| " << a.metric_id << " | " << a.mean << " (" << a.variance << ") | " << a.cases
                << " |\n";
    }
    return out.str();
}

std::pair<std::vector<double>, std::vector<double>> paired_case_means(
    const std::vector<Rating>& ratings, const std::string& rater_a, const std::string& rater_b) {
    std::map<std::string, std::pair<double, int>> a_sums, b_sums;
    for (const Rating& r : ratings) {
        if (r.rater_id == rater_a) {
            a_sums[r.case_id].first += r.score;
            a_sums[r.case_id].second += 1;
        } else if (r.rater_id == rater_b) {
            b_sums[r.case_id].first += r.score;
            b_sums[r.case_id].second += 1;
        }
    }
    std::vector<double> a, b;
    for (const auto& [case_id, sum] : a_sums) {
        auto it = b_sums.find(case_id);
        if (it == b_sums.end()) continue;
        a.push_back(sum.first / sum.second);
        b.push_back(it->second.first / it->second.second);
    }
    return {a, b};
}

}  // namespace tutorforge
