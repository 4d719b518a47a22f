#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "raster/agglomerate.hpp"
#include "raster/core.hpp"
#include "raster/errors.hpp"

namespace raster {

/// Ground-truth evaluation of a clustering against generated centers.
///
/// A center is covered when some emitted cluster owns its tile or a tile
/// within the adjacency distance of it. The rate scores identified clusters
/// against generated ones: a single cluster that swallows several centers
/// counts once, so merged neighbors pull the rate below 1. merged_count
/// reports how many covered centers were lost to such merges.
struct DetectionResult {
    double rate = 0.0;                   // min(detected, covering) / K
    std::size_t detected_centers = 0;    // centers covered by any cluster
    std::size_t covering_clusters = 0;   // distinct clusters covering a center
    std::size_t merged_count = 0;        // detected - covering, when positive
};

inline DetectionResult detection_rate(const ClusterSet& cs, std::span<const Point> centers,
                                      const GridParams& params) {
    if (centers.empty()) throw ConfigError("detection rate needs at least one center");

    std::unordered_map<Tile, std::size_t, TileHash> owner;
    for (std::size_t i = 0; i < cs.clusters.size(); ++i)
        for (const Tile& t : cs.clusters[i].tiles) owner.emplace(t, i);

    const double scale = params.scale();
    const int d = params.distance;
    std::unordered_set<std::size_t> covering;
    std::size_t detected = 0;

    for (const Point& c : centers) {
        const Tile center_tile = project_unchecked(c, scale);
        bool hit = false;
        for (int dx = -d; dx <= d; ++dx) {
            for (int dy = -d; dy <= d; ++dy) {
                if (params.metric == Metric::manhattan && std::abs(dx) + std::abs(dy) > d)
                    continue;
                auto it = owner.find(Tile{center_tile.x + dx, center_tile.y + dy});
                if (it == owner.end()) continue;
                hit = true;
                covering.insert(it->second);
            }
        }
        if (hit) ++detected;
    }

    DetectionResult r;
    r.detected_centers = detected;
    r.covering_clusters = covering.size();
    r.merged_count = detected > covering.size() ? detected - covering.size() : 0;
    r.rate = static_cast<double>(std::min(detected, covering.size())) /
             static_cast<double>(centers.size());
    return r;
}

/// A point together with the id of the cluster it was assigned to.
struct LabeledPoint {
    Point p;
    std::int64_t label = 0;
};

/// Flattens prime-mode clustering output into labeled points.
inline std::vector<LabeledPoint> labeled_points(const ClusterSet& cs) {
    std::vector<LabeledPoint> out;
    for (const Cluster& c : cs.clusters)
        for (const Point& p : c.points) out.push_back(LabeledPoint{p, c.id});
    return out;
}

/// Mean silhouette coefficient over a uniform sample of at most sample_cap
/// points (the full computation is quadratic in the input). Distances are
/// Euclidean; cohesion and separation are both measured within the sample.
/// Points whose cluster contributes only themselves to the sample score 0.
/// Throws UndefinedMetricError with fewer than two clusters.
inline double silhouette(std::span<const LabeledPoint> pts, std::size_t sample_cap = 10000,
                         std::uint64_t seed = 0x5117e77e) {
    if (sample_cap < 2) throw ConfigError("silhouette sample cap must be >= 2");

    std::vector<std::size_t> index(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) index[i] = i;
    if (pts.size() > sample_cap) {
        // Partial Fisher-Yates: the first sample_cap entries become the sample.
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < sample_cap; ++i) {
            const auto j = i + static_cast<std::size_t>(
                                   (static_cast<unsigned __int128>(rng()) *
                                    (index.size() - i)) >> 64);
            std::swap(index[i], index[j]);
        }
        index.resize(sample_cap);
    }

    // Compact labels to 0..L-1.
    std::unordered_map<std::int64_t, std::size_t> label_of;
    std::vector<std::size_t> labels(index.size());
    std::vector<std::size_t> cluster_size;
    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto [it, inserted] =
            label_of.emplace(pts[index[i]].label, label_of.size());
        if (inserted) cluster_size.push_back(0);
        labels[i] = it->second;
        ++cluster_size[it->second];
    }
    const std::size_t n_labels = cluster_size.size();
    if (n_labels < 2)
        throw UndefinedMetricError("silhouette is undefined with fewer than 2 clusters");

    std::vector<Point> sample(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) sample[i] = pts[index[i]].p;

    double total = 0.0;
    std::vector<double> dist_sum(n_labels);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < sample.size(); ++j) {
            const double dx = sample[i].x - sample[j].x;
            const double dy = sample[i].y - sample[j].y;
            dist_sum[labels[j]] += std::sqrt(dx * dx + dy * dy);
        }
        const std::size_t own = labels[i];
        double s = 0.0;
        if (cluster_size[own] > 1) {
            const double a = dist_sum[own] / static_cast<double>(cluster_size[own] - 1);
            double b = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < n_labels; ++l) {
                if (l == own || cluster_size[l] == 0) continue;
                b = std::min(b, dist_sum[l] / static_cast<double>(cluster_size[l]));
            }
            const double m = std::max(a, b);
            s = m > 0.0 ? (b - a) / m : 0.0;
        }
        total += s;
    }
    return total / static_cast<double>(sample.size());
}

} // namespace raster
