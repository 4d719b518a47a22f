#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "raster/core.hpp"
#include "raster/errors.hpp"

namespace raster {

/// How cluster centers are placed on the canvas.
enum class PlacementStrategy {
    rejection_sampling,   // uniform proposals, re-drawn until the distance holds
    rectangle_partition,  // one center per cell of a ceil(sqrt(K))^2 grid
};

namespace detail {

// All randomness below is derived from std::mt19937_64 output words only, so
// a seed produces identical data on every platform regardless of how the
// standard library implements its distributions.

inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + uniform_unit(rng) * (hi - lo);
}

// Lemire's multiply-shift bounded integer (slightly biased for huge bounds,
// irrelevant here).
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[bounded(rng, i)]);
}

} // namespace detail

/// Synthetic hub-data generator configuration. Each of the K clusters gets
/// points_per_cluster points spread uniformly over an axis-aligned square of
/// half-side r, with r drawn per cluster from radius_range, so densities vary.
/// Centers keep at least min_center_distance (Euclidean) between each other
/// and stay r_max away from the canvas edge so every point lands in bounds.
///
/// Defaults express distances in tile sides of a precision-3.5 grid
/// (10^-3.5 ~ 3.162e-4 input units): centers 20 tile sides apart, cluster
/// half-sides of 2..3 tile sides. At threshold 5 and minimum cluster size 4
/// this makes every generated cluster detectable and none mergeable, for any
/// seed: the worst-case per-tile point density stays far above the threshold
/// and the worst-case footprint gap stays above the adjacency distance.
struct GenConfig {
    std::size_t cluster_count = 100;                       // K
    std::size_t points_per_cluster = 500;
    double min_center_distance = 20.0 * 3.1622776601683794e-4;
    double radius_min = 2.0 * 3.1622776601683794e-4;
    double radius_max = 3.0 * 3.1622776601683794e-4;
    double noise_fraction = 0.0;                           // in [0, 1)
    std::uint64_t seed = 0;
    PlacementStrategy strategy = PlacementStrategy::rejection_sampling;
    Bounds bounds = Bounds::gps();

    void validate() const {
        if (!(radius_min >= 0.0) || radius_min > radius_max)
            throw ConfigError("radius range must satisfy 0 <= radius_min <= radius_max");
        if (!(min_center_distance > 0.0))
            throw ConfigError("min_center_distance must be positive");
        if (radius_max >= min_center_distance / 2.0)
            throw ConfigError("radius_max must be below min_center_distance / 2 "
                              "(clusters could merge by construction)");
        if (noise_fraction < 0.0 || noise_fraction >= 1.0)
            throw ConfigError("noise_fraction must be in [0, 1)");
        if (bounds.x_min >= bounds.x_max || bounds.y_min >= bounds.y_max)
            throw ConfigError("generator canvas is empty");
    }
};

/// Generated data plus its ground truth.
struct GeneratedData {
    std::vector<Point> points;   // shuffled: clusters and noise interleaved
    std::vector<Point> centers;  // one per cluster, in generation order
};

namespace detail {

struct CenterGrid {
    // Spatial hash with cell size = min distance; only the 3x3 neighborhood
    // of a proposal can contain a conflicting center.
    double cell;
    std::unordered_map<Tile, std::vector<Point>, TileHash> cells;

    explicit CenterGrid(double min_distance) : cell(min_distance) {}

    Tile key(const Point& p) const {
        return Tile{static_cast<std::int64_t>(std::floor(p.x / cell)),
                    static_cast<std::int64_t>(std::floor(p.y / cell))};
    }

    bool too_close(const Point& p, double min_distance) const {
        const Tile k = key(p);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = cells.find(Tile{k.x + dx, k.y + dy});
                if (it == cells.end()) continue;
                for (const Point& c : it->second) {
                    const double ddx = c.x - p.x;
                    const double ddy = c.y - p.y;
                    if (ddx * ddx + ddy * ddy < min_distance * min_distance) return true;
                }
            }
        }
        return false;
    }

    void insert(const Point& p) { cells[key(p)].push_back(p); }
};

inline std::vector<Point> place_rejection(const GenConfig& cfg, std::mt19937_64& rng) {
    const double margin = cfg.radius_max;
    const double x_lo = cfg.bounds.x_min + margin, x_hi = cfg.bounds.x_max - margin;
    const double y_lo = cfg.bounds.y_min + margin, y_hi = cfg.bounds.y_max - margin;
    if (x_lo >= x_hi || y_lo >= y_hi)
        throw ConfigError("canvas too small for radius_max margin");

    constexpr std::size_t max_attempts_per_center = 10000;
    CenterGrid grid(cfg.min_center_distance);
    std::vector<Point> centers;
    centers.reserve(cfg.cluster_count);
    for (std::size_t k = 0; k < cfg.cluster_count; ++k) {
        std::size_t attempts = 0;
        while (true) {
            if (++attempts > max_attempts_per_center)
                throw ConfigError(
                    "could not place cluster center " + std::to_string(k) +
                    ": min_center_distance unsatisfiable on this canvas");
            const Point c{uniform_range(rng, x_lo, x_hi), uniform_range(rng, y_lo, y_hi)};
            if (grid.too_close(c, cfg.min_center_distance)) continue;
            grid.insert(c);
            centers.push_back(c);
            break;
        }
    }
    return centers;
}

inline std::vector<Point> place_rectangles(const GenConfig& cfg, std::mt19937_64& rng) {
    // One center per cell of a near-square grid, each cell shrunk by half the
    // minimum distance: centers in different cells are then separated by at
    // least the full distance along some axis.
    const auto grid_dim = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(cfg.cluster_count))));
    if (grid_dim == 0) return {};
    const double cell_w = cfg.bounds.width() / static_cast<double>(grid_dim);
    const double cell_h = cfg.bounds.height() / static_cast<double>(grid_dim);
    const double pad = cfg.min_center_distance / 2.0;

    std::vector<Point> centers;
    centers.reserve(cfg.cluster_count);
    for (std::size_t i = 0; i < grid_dim && centers.size() < cfg.cluster_count; ++i) {
        for (std::size_t j = 0; j < grid_dim && centers.size() < cfg.cluster_count; ++j) {
            double x_lo = cfg.bounds.x_min + static_cast<double>(j) * cell_w + pad;
            double x_hi = x_lo + cell_w - 2.0 * pad;
            double y_lo = cfg.bounds.y_min + static_cast<double>(i) * cell_h + pad;
            double y_hi = y_lo + cell_h - 2.0 * pad;
            // Keep full point footprints inside the canvas.
            x_lo = std::max(x_lo, cfg.bounds.x_min + cfg.radius_max);
            x_hi = std::min(x_hi, cfg.bounds.x_max - cfg.radius_max);
            y_lo = std::max(y_lo, cfg.bounds.y_min + cfg.radius_max);
            y_hi = std::min(y_hi, cfg.bounds.y_max - cfg.radius_max);
            if (x_lo >= x_hi || y_lo >= y_hi)
                throw ConfigError("rectangle cells too small for min_center_distance; "
                                  "reduce cluster_count or the distance");
            centers.push_back(Point{uniform_range(rng, x_lo, x_hi),
                                    uniform_range(rng, y_lo, y_hi)});
        }
    }
    return centers;
}

} // namespace detail

/// Generates shuffled synthetic hub data with ground-truth centers. The seed
/// fully determines the output.
inline GeneratedData generate(const GenConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);

    GeneratedData out;
    if (cfg.cluster_count == 0) return out;

    out.centers = cfg.strategy == PlacementStrategy::rejection_sampling
                      ? detail::place_rejection(cfg, rng)
                      : detail::place_rectangles(cfg, rng);

    const std::size_t cluster_points = cfg.cluster_count * cfg.points_per_cluster;
    const auto noise_points = static_cast<std::size_t>(
        cfg.noise_fraction * static_cast<double>(cluster_points));
    out.points.reserve(cluster_points + noise_points);

    for (const Point& c : out.centers) {
        const double r = detail::uniform_range(rng, cfg.radius_min, cfg.radius_max);
        for (std::size_t i = 0; i < cfg.points_per_cluster; ++i) {
            out.points.push_back(Point{detail::uniform_range(rng, c.x - r, c.x + r),
                                       detail::uniform_range(rng, c.y - r, c.y + r)});
        }
    }
    for (std::size_t i = 0; i < noise_points; ++i) {
        out.points.push_back(
            Point{detail::uniform_range(rng, cfg.bounds.x_min, cfg.bounds.x_max),
                  detail::uniform_range(rng, cfg.bounds.y_min, cfg.bounds.y_max)});
    }

    // Cluster points are produced in sequence; shuffle so that ordering gives
    // nothing away downstream.
    detail::shuffle(out.points, rng);
    return out;
}

} // namespace raster
