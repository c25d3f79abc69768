#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "atacom/errors.hpp"

namespace atacom {

/// Per-episode results in the fixed CSV column order.
struct EpisodeMetrics {
    int episode = 0;
    int steps = 0;
    double return_undiscounted = 0.0;
    double return_discounted = 0.0;
    double final_goal_distance = 0.0;
    double min_margin = 0.0;            ///< most negative constraint margin seen
    int margin_violation_steps = 0;     ///< steps with margin < -tolerance
    bool hard_collision = false;
    bool early_termination = false;     ///< ended before the horizon (goal or collision)
    int saturation_steps = 0;
};

inline constexpr const char* kMetricsSchema = "atacom-metrics-1";
inline constexpr const char* kTrainSchema = "atacom-train-1";

namespace detail {

/// Shortest round-trippable decimal form, stable across runs.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline std::string metrics_csv_header() {
    return "episode,steps,return_undiscounted,return_discounted,final_goal_distance,"
           "min_margin,margin_violation_steps,hard_collision,early_termination,"
           "saturation_steps";
}

inline std::string metrics_csv_row(const EpisodeMetrics& m) {
    std::string row = std::to_string(m.episode);
    row += "," + std::to_string(m.steps);
    row += "," + detail::fmt(m.return_undiscounted);
    row += "," + detail::fmt(m.return_discounted);
    row += "," + detail::fmt(m.final_goal_distance);
    row += "," + detail::fmt(m.min_margin);
    row += "," + std::to_string(m.margin_violation_steps);
    row += "," + std::to_string(m.hard_collision ? 1 : 0);
    row += "," + std::to_string(m.early_termination ? 1 : 0);
    row += "," + std::to_string(m.saturation_steps);
    return row;
}

/// Aggregate row appended after the per-episode rows: means for the step and
/// return columns, worst-case margin, totals for the counters.
inline std::string metrics_summary_row(const std::vector<EpisodeMetrics>& rows) {
    double steps = 0.0, undisc = 0.0, disc = 0.0, dist = 0.0;
    double min_margin = 0.0;
    long violations = 0, collisions = 0, early = 0, saturated = 0;
    const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const EpisodeMetrics& m = rows[i];
        steps += m.steps;
        undisc += m.return_undiscounted;
        disc += m.return_discounted;
        dist += m.final_goal_distance;
        min_margin = i == 0 ? m.min_margin : std::min(min_margin, m.min_margin);
        violations += m.margin_violation_steps;
        collisions += m.hard_collision ? 1 : 0;
        early += m.early_termination ? 1 : 0;
        saturated += m.saturation_steps;
    }
    std::string row = "summary," + detail::fmt(steps / n);
    row += "," + detail::fmt(undisc / n);
    row += "," + detail::fmt(disc / n);
    row += "," + detail::fmt(dist / n);
    row += "," + detail::fmt(min_margin);
    row += "," + std::to_string(violations);
    row += "," + std::to_string(collisions);
    row += "," + std::to_string(early);
    row += "," + std::to_string(saturated);
    return row;
}

inline void write_metrics_csv(const std::string& path,
                              const std::vector<EpisodeMetrics>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("metrics: cannot write '" + path + "'");
    out << "# schema: " << kMetricsSchema << "\n";
    out << metrics_csv_header() << "\n";
    for (const auto& m : rows) out << metrics_csv_row(m) << "\n";
    out << metrics_summary_row(rows) << "\n";
}

/// One line of the training log CSV.
struct TrainLogRow {
    int iteration = 0;
    double best_return = 0.0;  ///< best candidate mean return so far
    double mean_return = 0.0;  ///< population mean this iteration
    long cumulative_collisions = 0;
};

inline void write_train_csv(const std::string& path, const std::vector<TrainLogRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("metrics: cannot write '" + path + "'");
    out << "# schema: " << kTrainSchema << "\n";
    out << "iteration,best_return,mean_return,cumulative_collisions\n";
    for (const auto& r : rows) {
        out << r.iteration << "," << detail::fmt(r.best_return) << ","
            << detail::fmt(r.mean_return) << "," << r.cumulative_collisions << "\n";
    }
}

}  // namespace atacom
