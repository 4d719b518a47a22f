#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <string>

#include "raster/pipeline.hpp"

namespace raster {

inline nlohmann::json report_json(const RunReport& r) {
    nlohmann::json j{
        {"variant", std::string(to_string(r.variant))},
        {"precision", r.params.precision},
        {"threshold", r.params.threshold},
        {"delta", r.params.distance},
        {"metric", std::string(to_string(r.params.metric))},
        {"min_size", r.params.min_cluster_size},
        {"mode", r.params.mode == Mode::retain_points ? "retain" : "count"},
        {"window_fix", r.window_fix},
        {"workers", r.workers},
        {"slices", r.slices},
        {"strategy", std::string(to_string(r.strategy))},
        {"n_points", r.stats.n_points},
        {"n_skipped", r.stats.n_skipped},
        {"n_significant_tiles", r.stats.n_significant},
        {"n_clusters", r.n_clusters},
        {"peak_accumulator_entries", r.stats.peak_accumulator_entries},
        {"t_total", r.stats.t_total},
        {"t_projection", r.stats.t_projection},
        {"t_clustering", r.stats.t_clustering},
    };
    if (r.detection) {
        j["detection_rate"] = r.detection->rate;
        j["detected_centers"] = r.detection->detected_centers;
        j["covering_clusters"] = r.detection->covering_clusters;
        j["merged_count"] = r.detection->merged_count;
    }
    if (r.silhouette_value) j["silhouette"] = *r.silhouette_value;
    return j;
}

inline nlohmann::json reports_json(std::span<const RunReport> reports) {
    nlohmann::json runs = nlohmann::json::array();
    for (const RunReport& r : reports) runs.push_back(report_json(r));
    nlohmann::json j{{"runs", std::move(runs)}};
    if (reports.size() > 1) {
        const TimingAggregate a = aggregate_timings(reports);
        j["aggregate"] = {
            {"t_total", {{"mean", a.mean_total}, {"stddev", a.sd_total}}},
            {"t_projection", {{"mean", a.mean_projection}, {"stddev", a.sd_projection}}},
            {"t_clustering", {{"mean", a.mean_clustering}, {"stddev", a.sd_clustering}}},
        };
    }
    return j;
}

} // namespace raster
