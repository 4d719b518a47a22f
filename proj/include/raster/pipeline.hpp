#pragma once

#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "raster/agglomerate.hpp"
#include "raster/core.hpp"
#include "raster/io.hpp"
#include "raster/metrics.hpp"
#include "raster/parallel.hpp"
#include "raster/slicing.hpp"

namespace raster {

/// The four pipeline variants: sequential or sliced-parallel execution,
/// count-only or point-retaining accumulation.
enum class Variant { raster, raster_prime, p_raster, p_raster_prime };

constexpr bool is_prime(Variant v) noexcept {
    return v == Variant::raster_prime || v == Variant::p_raster_prime;
}
constexpr bool is_parallel(Variant v) noexcept {
    return v == Variant::p_raster || v == Variant::p_raster_prime;
}

constexpr std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::raster: return "raster";
        case Variant::raster_prime: return "raster-prime";
        case Variant::p_raster: return "p-raster";
        case Variant::p_raster_prime: return "p-raster-prime";
    }
    return "raster";
}

inline Variant parse_variant(std::string_view s) {
    if (s == "raster") return Variant::raster;
    if (s == "raster-prime") return Variant::raster_prime;
    if (s == "p-raster") return Variant::p_raster;
    if (s == "p-raster-prime") return Variant::p_raster_prime;
    throw ConfigError("unknown variant '" + std::string(s) +
                      "' (expected raster|raster-prime|p-raster|p-raster-prime)");
}

constexpr std::string_view to_string(Metric m) noexcept {
    return m == Metric::chebyshev ? "chebyshev" : "manhattan";
}
constexpr std::string_view to_string(SliceStrategy s) noexcept {
    return s == SliceStrategy::even ? "even" : "balanced";
}

/// Phase timings and size counters collected while a pipeline runs.
/// Projection covers ingest, accumulator merging, and pruning; clustering
/// covers slicing, agglomeration, and border joining.
struct PipelineStats {
    double t_total = 0.0;
    double t_projection = 0.0;
    double t_clustering = 0.0;
    std::uint64_t n_points = 0;   // points read from the input
    std::uint64_t n_skipped = 0;  // out-of-bounds points dropped
    std::size_t peak_accumulator_entries = 0;
    std::size_t n_significant = 0;
};

struct ParallelConfig {
    unsigned workers = 1;
    unsigned slices = 0;  // 0: one slice per worker
    SliceStrategy strategy = SliceStrategy::even;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace detail

/// Complete sequential pipeline: single-pass contraction, pruning (or the 2x2
/// window fix), then agglomeration.
inline ClusterSet cluster_sequential(PointSource& src, const GridParams& params,
                                     bool use_window_fix = false,
                                     PipelineStats* stats = nullptr) {
    params.validate();
    const auto t0 = detail::Clock::now();

    TileAccumulator acc(params);
    ingest_all(acc, src);
    const std::size_t peak = acc.entry_count();
    const std::uint64_t ingested = acc.total_ingested();
    const std::uint64_t skipped = acc.skipped();
    SignificantTiles sig = use_window_fix ? window_fix(acc, params) : acc.prune();
    const double t_projection = detail::seconds_since(t0);

    const auto t1 = detail::Clock::now();
    const std::size_t n_significant = sig.size();
    ClusterSet cs = agglomerate(std::move(sig), params);
    if (stats) {
        stats->t_projection = t_projection;
        stats->t_clustering = detail::seconds_since(t1);
        stats->t_total = detail::seconds_since(t0);
        stats->n_points = ingested + skipped;
        stats->n_skipped = skipped;
        stats->peak_accumulator_entries = peak;
        stats->n_significant = n_significant;
    }
    return cs;
}

inline ClusterSet cluster_sequential(std::span<const Point> pts, const GridParams& params,
                                     bool use_window_fix = false,
                                     PipelineStats* stats = nullptr) {
    VectorSource src(pts);
    return cluster_sequential(src, params, use_window_fix, stats);
}

/// Complete parallel pipeline: parallel projection with accumulator merging,
/// pruning, vertical slicing, concurrent per-slice agglomeration, and
/// sequential right-to-left border joining. Produces exactly the clusters of
/// the sequential pipeline for any worker count, slice count, and slicing
/// strategy.
inline ClusterSet cluster_parallel(PointSource& src, const GridParams& params,
                                   const ParallelConfig& pc, bool use_window_fix = false,
                                   PipelineStats* stats = nullptr) {
    params.validate();
    if (pc.workers < 1) throw ConfigError("worker count must be >= 1");
    const unsigned n_slices = pc.slices ? pc.slices : pc.workers;

    const auto t0 = detail::Clock::now();
    TileAccumulator acc = parallel_ingest(src, params, pc.workers);
    const std::size_t peak = acc.entry_count();
    const std::uint64_t ingested = acc.total_ingested();
    const std::uint64_t skipped = acc.skipped();
    SignificantTiles sig = use_window_fix ? window_fix(acc, params) : acc.prune();
    const double t_projection = detail::seconds_since(t0);

    const auto t1 = detail::Clock::now();
    const std::size_t n_significant = sig.size();

    SliceSet ss = slice(std::move(sig), params, n_slices, pc.strategy);
    const std::vector<std::int64_t> borders = ss.borders;
    SliceClustering sc = cluster_slices(std::move(ss), params, pc.workers);
    ClusterSet cs = finalize_clusters(resolve_borders(std::move(sc), borders, params));
    if (stats) {
        stats->t_projection = t_projection;
        stats->t_clustering = detail::seconds_since(t1);
        stats->t_total = detail::seconds_since(t0);
        stats->n_points = ingested + skipped;
        stats->n_skipped = skipped;
        stats->peak_accumulator_entries = peak;
        stats->n_significant = n_significant;
    }
    return cs;
}

inline ClusterSet cluster_parallel(std::span<const Point> pts, const GridParams& params,
                                   const ParallelConfig& pc, bool use_window_fix = false,
                                   PipelineStats* stats = nullptr) {
    VectorSource src(pts);
    return cluster_parallel(src, params, pc, use_window_fix, stats);
}

/// One benchmark/evaluation run of a selected variant.
struct RunConfig {
    Variant variant = Variant::raster;
    GridParams grid;  // mode is overridden to match the variant
    unsigned workers = 1;
    unsigned slices = 0;
    SliceStrategy strategy = SliceStrategy::even;
    bool use_window_fix = false;
    std::size_t silhouette_cap = 10000;  // 0 disables the silhouette
    std::uint64_t silhouette_seed = 0x5117e77e;
};

/// Everything a run reports: echoed configuration, sizes, quality metrics
/// when ground truth or retained points allow them, and phase timings.
struct RunReport {
    Variant variant = Variant::raster;
    GridParams params;
    unsigned workers = 1;
    unsigned slices = 0;
    SliceStrategy strategy = SliceStrategy::even;
    bool window_fix = false;
    PipelineStats stats;
    std::size_t n_clusters = 0;
    std::optional<DetectionResult> detection;
    std::optional<double> silhouette_value;
};

/// Executes the configured variant over the source. When ground-truth centers
/// are supplied the detection rate is evaluated; prime variants with at least
/// two clusters also get a sampled silhouette. The cluster set is written to
/// *out_clusters when given.
inline RunReport run_once(PointSource& src, const RunConfig& cfg,
                          std::span<const Point> centers = {},
                          ClusterSet* out_clusters = nullptr) {
    GridParams grid = cfg.grid;
    grid.mode = is_prime(cfg.variant) ? Mode::retain_points : Mode::count_only;

    RunReport report;
    report.variant = cfg.variant;
    report.params = grid;
    report.workers = is_parallel(cfg.variant) ? cfg.workers : 1;
    report.slices = is_parallel(cfg.variant) ? (cfg.slices ? cfg.slices : cfg.workers) : 1;
    report.strategy = cfg.strategy;
    report.window_fix = cfg.use_window_fix;

    ClusterSet cs;
    if (is_parallel(cfg.variant)) {
        cs = cluster_parallel(src, grid, ParallelConfig{cfg.workers, cfg.slices, cfg.strategy},
                              cfg.use_window_fix, &report.stats);
    } else {
        cs = cluster_sequential(src, grid, cfg.use_window_fix, &report.stats);
    }
    report.n_clusters = cs.clusters.size();

    if (!centers.empty()) report.detection = detection_rate(cs, centers, grid);
    if (is_prime(cfg.variant) && cfg.silhouette_cap > 0 && cs.clusters.size() >= 2) {
        const std::vector<LabeledPoint> labeled = labeled_points(cs);
        try {
            report.silhouette_value =
                silhouette(labeled, cfg.silhouette_cap, cfg.silhouette_seed);
        } catch (const UndefinedMetricError&) {
            // A degenerate sample can collapse to one cluster; leave it unset.
        }
    }

    if (out_clusters) *out_clusters = std::move(cs);
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization

namespace detail {

inline void append_number(std::string& s, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    s.append(buf, ptr);
}

} // namespace detail

inline std::string report_csv_header() {
    return "run,variant,precision,threshold,delta,metric,min_size,mode,window_fix,workers,"
           "slices,strategy,n_points,n_skipped,n_significant_tiles,n_clusters,"
           "peak_accumulator_entries,detection_rate,detected_centers,covering_clusters,"
           "merged_count,silhouette,t_total,t_projection,t_clustering";
}

/// One CSV row; `run` labels the repetition ("0", "1", ..., "mean", "stddev").
inline std::string report_csv_row(const RunReport& r, const std::string& run) {
    std::string s;
    s += run;
    s += ',';
    s += to_string(r.variant);
    s += ',';
    detail::append_number(s, r.params.precision);
    s += ',';
    s += std::to_string(r.params.threshold);
    s += ',';
    s += std::to_string(r.params.distance);
    s += ',';
    s += to_string(r.params.metric);
    s += ',';
    s += std::to_string(r.params.min_cluster_size);
    s += ',';
    s += r.params.mode == Mode::retain_points ? "retain" : "count";
    s += ',';
    s += r.window_fix ? "1" : "0";
    s += ',';
    s += std::to_string(r.workers);
    s += ',';
    s += std::to_string(r.slices);
    s += ',';
    s += to_string(r.strategy);
    s += ',';
    s += std::to_string(r.stats.n_points);
    s += ',';
    s += std::to_string(r.stats.n_skipped);
    s += ',';
    s += std::to_string(r.stats.n_significant);
    s += ',';
    s += std::to_string(r.n_clusters);
    s += ',';
    s += std::to_string(r.stats.peak_accumulator_entries);
    s += ',';
    if (r.detection) detail::append_number(s, r.detection->rate);
    s += ',';
    if (r.detection) s += std::to_string(r.detection->detected_centers);
    s += ',';
    if (r.detection) s += std::to_string(r.detection->covering_clusters);
    s += ',';
    if (r.detection) s += std::to_string(r.detection->merged_count);
    s += ',';
    if (r.silhouette_value) detail::append_number(s, *r.silhouette_value);
    s += ',';
    detail::append_number(s, r.stats.t_total);
    s += ',';
    detail::append_number(s, r.stats.t_projection);
    s += ',';
    detail::append_number(s, r.stats.t_clustering);
    return s;
}

/// Mean and sample standard deviation of the phase timings across repeats.
struct TimingAggregate {
    double mean_total = 0, mean_projection = 0, mean_clustering = 0;
    double sd_total = 0, sd_projection = 0, sd_clustering = 0;
};

inline TimingAggregate aggregate_timings(std::span<const RunReport> reports) {
    TimingAggregate a;
    const auto n = static_cast<double>(reports.size());
    if (reports.empty()) return a;
    for (const RunReport& r : reports) {
        a.mean_total += r.stats.t_total;
        a.mean_projection += r.stats.t_projection;
        a.mean_clustering += r.stats.t_clustering;
    }
    a.mean_total /= n;
    a.mean_projection /= n;
    a.mean_clustering /= n;
    if (reports.size() > 1) {
        double st = 0, sp = 0, sc = 0;
        for (const RunReport& r : reports) {
            st += (r.stats.t_total - a.mean_total) * (r.stats.t_total - a.mean_total);
            sp += (r.stats.t_projection - a.mean_projection) *
                  (r.stats.t_projection - a.mean_projection);
            sc += (r.stats.t_clustering - a.mean_clustering) *
                  (r.stats.t_clustering - a.mean_clustering);
        }
        a.sd_total = std::sqrt(st / (n - 1));
        a.sd_projection = std::sqrt(sp / (n - 1));
        a.sd_clustering = std::sqrt(sc / (n - 1));
    }
    return a;
}

/// Writes reports as CSV: one row per run, plus mean and stddev rows (timing
/// columns aggregated, other columns from the first run) when there is more
/// than one.
inline void write_reports_csv(std::ostream& out, std::span<const RunReport> reports) {
    out << report_csv_header() << '\n';
    for (std::size_t i = 0; i < reports.size(); ++i)
        out << report_csv_row(reports[i], std::to_string(i)) << '\n';
    if (reports.size() > 1) {
        const TimingAggregate a = aggregate_timings(reports);
        RunReport mean = reports[0];
        mean.stats.t_total = a.mean_total;
        mean.stats.t_projection = a.mean_projection;
        mean.stats.t_clustering = a.mean_clustering;
        out << report_csv_row(mean, "mean") << '\n';
        RunReport sd = reports[0];
        sd.stats.t_total = a.sd_total;
        sd.stats.t_projection = a.sd_projection;
        sd.stats.t_clustering = a.sd_clustering;
        out << report_csv_row(sd, "stddev") << '\n';
    }
}

} // namespace raster
