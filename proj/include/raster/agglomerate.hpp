#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <unordered_set>
#include <utility>
#include <vector>

#include "raster/accumulator.hpp"
#include "raster/core.hpp"

namespace raster {

/// A delta-connected group of significant tiles. Tiles are sorted
/// lexicographically; in retain-points mode, points holds the union of the
/// member tiles' retained points sorted by (x, y).
struct Cluster {
    std::int64_t id = 0;
    std::vector<Tile> tiles;
    std::vector<Point> points;

    friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Deterministically ordered clustering result: clusters sorted by their
/// lexicographically smallest member tile and numbered from 0.
struct ClusterSet {
    std::vector<Cluster> clusters;

    friend bool operator==(const ClusterSet&, const ClusterSet&) = default;
};

/// Relative tile offsets within the delta-ball of the configured metric,
/// excluding the center. Chebyshev yields (2d+1)^2 - 1 offsets, Manhattan
/// 2d(d+1). With Manhattan and delta > 1 a cluster may contain tiles that are
/// not direct neighbors; ball membership is what defines adjacency.
inline std::vector<Tile> neighbor_offsets(const GridParams& params) {
    const int d = params.distance;
    std::vector<Tile> offsets;
    offsets.reserve(static_cast<std::size_t>(2 * d + 1) * (2 * d + 1) - 1);
    for (int dx = -d; dx <= d; ++dx) {
        for (int dy = -d; dy <= d; ++dy) {
            if (dx == 0 && dy == 0) continue;
            if (params.metric == Metric::manhattan && std::abs(dx) + std::abs(dy) > d) continue;
            offsets.push_back(Tile{dx, dy});
        }
    }
    return offsets;
}

/// Candidate neighbor coordinates of a tile (delta-ball minus the tile
/// itself). Callers intersect the candidates with the significant-tile map;
/// each membership probe is expected constant time.
inline std::vector<Tile> neighbors(const Tile& t, const GridParams& params) {
    std::vector<Tile> result = neighbor_offsets(params);
    for (Tile& o : result) {
        o.x += t.x;
        o.y += t.y;
    }
    return result;
}

/// One connected component before ordering and the size filter are applied.
struct TileGroup {
    std::vector<Tile> tiles;
    std::vector<Point> points;
};

inline void take_points(TileGroup& group, TileStats& stats) {
    if (stats.points.empty()) return;
    if (group.points.empty())
        group.points = std::move(stats.points);
    else
        group.points.insert(group.points.end(), stats.points.begin(), stats.points.end());
}

namespace detail {

/// Flat open-addressing map from tile to a dense index (linear probing,
/// power-of-two capacity, no deletion). Built once per traversal so the
/// depth-first sweep touches compact arrays instead of chasing map nodes.
class TileIndexMap {
public:
    explicit TileIndexMap(std::size_t n) {
        std::size_t cap = 16;
        while (cap * 7 < n * 10) cap *= 2;  // keep load factor under 70%
        slots_.assign(cap, Slot{});
        mask_ = cap - 1;
    }

    void insert(const Tile& t, std::uint32_t index) {
        std::size_t i = TileHash{}(t) & mask_;
        while (slots_[i].index != kEmpty) i = (i + 1) & mask_;
        slots_[i] = Slot{t, index};
    }

    static constexpr std::uint32_t kEmpty = 0xffffffffu;

    std::uint32_t find(const Tile& t) const {
        std::size_t i = TileHash{}(t) & mask_;
        while (true) {
            const Slot& s = slots_[i];
            if (s.index == kEmpty || s.tile == t) return s.index;
            i = (i + 1) & mask_;
        }
    }

private:
    struct Slot {
        Tile tile;
        std::uint32_t index = kEmpty;
    };
    std::vector<Slot> slots_;
    std::size_t mask_ = 0;
};

} // namespace detail

/// Partitions the significant tiles into delta-connected components using an
/// explicit-stack depth-first traversal (recursion would overflow on long
/// snake-shaped clusters). Consumes the input map. No size filter is applied.
/// The resulting partition does not depend on iteration order.
inline std::vector<TileGroup> connected_components(SignificantTiles sig,
                                                   const GridParams& params) {
    const std::vector<Tile> offsets = neighbor_offsets(params);

    // Flatten once: tiles and stats in dense arrays plus a flat tile index.
    const std::size_t n = sig.size();
    std::vector<Tile> tiles;
    std::vector<TileStats> stats;
    tiles.reserve(n);
    stats.reserve(n);
    detail::TileIndexMap index(n);
    for (auto& [tile, st] : sig) {
        index.insert(tile, static_cast<std::uint32_t>(tiles.size()));
        tiles.push_back(tile);
        stats.push_back(std::move(st));
    }
    sig.clear();

    std::vector<TileGroup> groups;
    std::vector<std::uint32_t> stack;
    std::vector<bool> visited(n, false);

    for (std::uint32_t seed = 0; seed < n; ++seed) {
        if (visited[seed]) continue;
        visited[seed] = true;

        TileGroup group;
        stack.assign(1, seed);
        group.tiles.push_back(tiles[seed]);
        take_points(group, stats[seed]);

        while (!stack.empty()) {
            const Tile u = tiles[stack.back()];
            stack.pop_back();
            for (const Tile& o : offsets) {
                const std::uint32_t j = index.find(Tile{u.x + o.x, u.y + o.y});
                if (j == detail::TileIndexMap::kEmpty || visited[j]) continue;
                visited[j] = true;
                group.tiles.push_back(tiles[j]);
                take_points(group, stats[j]);
                stack.push_back(j);
            }
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

/// Sorts tiles and points within each group, orders groups by smallest member
/// tile, and assigns ids from 0. The ordering makes cluster output byte-stable
/// across input permutations, chunkings, and worker counts.
inline ClusterSet finalize_clusters(std::vector<TileGroup> groups) {
    ClusterSet out;
    out.clusters.reserve(groups.size());
    for (TileGroup& g : groups) {
        Cluster c;
        c.tiles = std::move(g.tiles);
        c.points = std::move(g.points);
        std::sort(c.tiles.begin(), c.tiles.end());
        std::sort(c.points.begin(), c.points.end(), point_less);
        out.clusters.push_back(std::move(c));
    }
    std::sort(out.clusters.begin(), out.clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.tiles.front() < b.tiles.front(); });
    for (std::size_t i = 0; i < out.clusters.size(); ++i)
        out.clusters[i].id = static_cast<std::int64_t>(i);
    return out;
}

/// Agglomeration step: groups the pruned significant tiles into
/// delta-connected clusters and drops components smaller than
/// min_cluster_size as noise.
inline ClusterSet agglomerate(SignificantTiles sig, const GridParams& params) {
    std::vector<TileGroup> groups = connected_components(std::move(sig), params);
    std::erase_if(groups,
                  [&](const TileGroup& g) { return g.tiles.size() < params.min_cluster_size; });
    return finalize_clusters(std::move(groups));
}

/// Alternative to plain pruning for grids that split a dense spot across tile
/// boundaries: a tile is kept if any 2x2 window containing it holds at least
/// threshold points in total. Every tile that is significant on its own is
/// kept as well (its own window already meets the threshold), so the result
/// is always a superset of prune().
///
/// Runs on the unpruned accumulator. Each occupied tile contributes four
/// candidate windows (one per corner position), so the scan stays linear in
/// the number of occupied tiles.
inline SignificantTiles window_fix(const TileAccumulator& acc, const GridParams& params) {
    std::unordered_set<Tile, TileHash> keep;
    std::unordered_set<Tile, TileHash> anchors_seen;
    acc.for_each_count([&](const Tile& tile, std::uint64_t) {
        for (int ax = -1; ax <= 0; ++ax) {
            for (int ay = -1; ay <= 0; ++ay) {
                const Tile anchor{tile.x + ax, tile.y + ay};
                if (!anchors_seen.insert(anchor).second) continue;
                const Tile window[4] = {anchor,
                                        {anchor.x + 1, anchor.y},
                                        {anchor.x, anchor.y + 1},
                                        {anchor.x + 1, anchor.y + 1}};
                std::uint64_t total = 0;
                for (const Tile& w : window) total += acc.count_of(w);
                if (total < params.threshold) continue;
                for (const Tile& w : window) {
                    if (acc.count_of(w) != 0) keep.insert(w);
                }
            }
        }
    });

    SignificantTiles out;
    out.reserve(keep.size());
    for (const Tile& t : keep) {
        TileStats stats;
        stats.count = acc.count_of(t);
        if (const std::vector<Point>* pts = acc.points_of(t)) {
            stats.points = *pts;
            if (params.dedupe_points) TileAccumulator::dedupe(stats);
        }
        out.emplace(t, std::move(stats));
    }
    return out;
}

} // namespace raster
