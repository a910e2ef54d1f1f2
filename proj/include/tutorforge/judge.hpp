#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tutorforge/agent.hpp"
#include "tutorforge/provider.hpp"
#include "tutorforge/tutorial.hpp"

namespace tutorforge {

struct Verdict {
    bool success = false;
    std::string rationale;
};

/// LLM-as-judge over the multi-modal trajectory. StepLimit/Error trajectories
/// auto-fail without a provider call. At most 8 screenshots (first, last,
/// evenly sampled) are attached; `run_dir` resolves their relative paths.
Verdict judge_trajectory(ProviderGateway& gateway, const Trajectory& traj,
                         const std::filesystem::path& run_dir);

struct RubricMetric {
    std::string id;
    std::string description;
};

enum class RubricKind { Document, Video };

/// The fixed metric sets: 11 for documents, 7 for videos.
const std::vector<RubricMetric>& document_metrics();
const std::vector<RubricMetric>& video_metrics();

struct RubricScore {
    std::string metric_id;
    int score = 0;  // 1..5
    std::string justification;
};

/// One score per metric of the chosen rubric; the prompt embeds each metric's
/// description plus two worked scoring examples. Throws MissingMetric when the
/// parsed output lacks a rubric entry.
std::vector<RubricScore> score_tutorial(ProviderGateway& gateway, const TutorialPackage& package,
                                        RubricKind kind);

struct Rating {
    std::string case_id;
    std::string rater_id;
    std::string metric_id;
    double score = 0;
};

/// Ratings CSV: header case_id,rater_id,metric_id,score.
std::vector<Rating> load_ratings_csv(const std::filesystem::path& file);

struct MetricAggregate {
    std::string metric_id;
    double mean = 0;
    double variance = 0;  // population variance
    int cases = 0;
};

/// Per-metric mean and population variance. Multiple raters of one case are
/// averaged per case before aggregation; the trailing "Average" row pools
/// every (case, metric) value.
std::vector<MetricAggregate> aggregate_report(const std::vector<Rating>& ratings,
                                              const std::vector<RubricMetric>& metrics);

/// Markdown table in the mean (variance) layout.
std::string render_aggregate_markdown(const std::vector<MetricAggregate>& aggregates);

/// Per-case overall means for two raters over a shared case list, for
/// correlation between rating sources.
std::pair<std::vector<double>, std::vector<double>> paired_case_means(
    const std::vector<Rating>& ratings, const std::string& rater_a, const std::string& rater_b);

}  // namespace tutorforge
