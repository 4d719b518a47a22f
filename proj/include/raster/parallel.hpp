#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "raster/agglomerate.hpp"
#include "raster/core.hpp"
#include "raster/io.hpp"
#include "raster/slicing.hpp"

namespace raster {

/// Projects the input with several workers, each building a private
/// accumulator over a contiguous share of the span, then folds the
/// accumulators together. The result is entry-for-entry equal to a sequential
/// ingest of the same points.
inline TileAccumulator parallel_ingest(std::span<const Point> pts, const GridParams& params,
                                       unsigned workers) {
    if (workers < 1) throw ConfigError("worker count must be >= 1");
    TileAccumulator acc(params);
    if (workers == 1 || pts.size() < 2 * workers) {
        acc.ingest(pts);
        return acc;
    }

    std::vector<TileAccumulator> locals(workers, TileAccumulator(params));
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const std::size_t share = pts.size() / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * share;
        const std::size_t end = (w + 1 == workers) ? pts.size() : begin + share;
        threads.emplace_back([&, w, begin, end] {
            try {
                locals[w].ingest(pts.subspan(begin, end - begin));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);

    for (auto& local : locals) acc.merge(std::move(local));
    return acc;
}

/// Streaming variant: the caller thread reads fixed-size chunks (the single
/// pass over the source) and deals them round-robin to worker-owned queues;
/// workers ingest into private accumulators which are merged at the end.
/// Queues are bounded so a fast reader cannot run ahead of slow workers
/// without limit.
inline TileAccumulator parallel_ingest(PointSource& src, const GridParams& params,
                                       unsigned workers, std::size_t chunk = std::size_t{1} << 20) {
    if (workers < 1) throw ConfigError("worker count must be >= 1");
    if (auto span = src.take_full_span()) return parallel_ingest(*span, params, workers);

    TileAccumulator acc(params);
    if (workers == 1) {
        ingest_all(acc, src);
        return acc;
    }

    struct WorkerQueue {
        std::mutex mutex;
        std::condition_variable cv;
        std::deque<std::vector<Point>> chunks;
        bool done = false;
    };
    constexpr std::size_t queue_limit = 2;

    std::vector<TileAccumulator> locals(workers, TileAccumulator(params));
    std::vector<WorkerQueue> queues(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            WorkerQueue& q = queues[w];
            try {
                while (true) {
                    std::vector<Point> batch;
                    {
                        std::unique_lock lock(q.mutex);
                        q.cv.wait(lock, [&] { return q.done || !q.chunks.empty(); });
                        if (q.chunks.empty()) break;
                        batch = std::move(q.chunks.front());
                        q.chunks.pop_front();
                    }
                    q.cv.notify_all();
                    locals[w].ingest(batch);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }

    unsigned next = 0;
    while (true) {
        std::vector<Point> batch(chunk);
        const std::size_t n = src.read(batch);
        if (n == 0) break;
        batch.resize(n);
        WorkerQueue& q = queues[next];
        {
            std::unique_lock lock(q.mutex);
            q.cv.wait(lock, [&] { return q.chunks.size() < queue_limit; });
            q.chunks.push_back(std::move(batch));
        }
        q.cv.notify_all();
        next = (next + 1) % workers;
    }
    for (auto& q : queues) {
        {
            std::lock_guard lock(q.mutex);
            q.done = true;
        }
        q.cv.notify_all();
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);

    for (auto& local : locals) acc.merge(std::move(local));
    return acc;
}

/// A per-slice cluster that sits close enough to one or more slice borders to
/// possibly continue on the other side. `touched` holds the indices (into the
/// SliceSet border array) of every border within reach: border b is touched
/// iff some member tile has b - delta <= tx <= b + delta - 1, which is exactly
/// the condition under which a tile across b can be adjacent. Deferred to the
/// joining phase regardless of size so that undersized fragments are never
/// discarded prematurely.
struct BorderCluster {
    std::vector<Tile> tiles;
    std::vector<Point> points;
    std::vector<std::int32_t> touched;  // ascending border indices

    bool touches(std::int32_t border_index) const {
        return std::binary_search(touched.begin(), touched.end(), border_index);
    }
};

/// Border indices within delta columns of any of the given tiles.
inline std::vector<std::int32_t> touched_borders(std::span<const Tile> tiles,
                                                 std::span<const std::int64_t> borders,
                                                 int delta) {
    std::vector<std::int32_t> touched;
    for (const Tile& t : tiles) {
        // Border value b is reachable from tile column tx iff
        // tx - delta + 1 <= b <= tx + delta.
        auto lo = std::lower_bound(borders.begin(), borders.end(), t.x - delta + 1);
        auto hi = std::upper_bound(borders.begin(), borders.end(), t.x + delta);
        for (auto it = lo; it != hi; ++it)
            touched.push_back(static_cast<std::int32_t>(it - borders.begin()));
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    return touched;
}

/// Result of clustering the slices independently: interior clusters are final
/// (already size-filtered); border clusters await joining.
struct SliceClustering {
    std::vector<TileGroup> interior;
    std::vector<BorderCluster> border;
};

/// Agglomerates every slice concurrently. Interior clusters meeting the size
/// minimum are emitted; interior clusters below it are noise; anything
/// touching a border is deferred.
inline SliceClustering cluster_slices(SliceSet ss, const GridParams& params,
                                      unsigned workers = 0) {
    const std::size_t n = ss.slice_count();
    if (workers == 0) workers = static_cast<unsigned>(n);
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    if (workers < 1) workers = 1;

    std::vector<SliceClustering> per_slice(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        try {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                std::vector<TileGroup> groups =
                    connected_components(std::move(ss.slices[i]), params);
                SliceClustering& out = per_slice[i];
                for (TileGroup& g : groups) {
                    std::vector<std::int32_t> touched =
                        touched_borders(g.tiles, ss.borders, params.distance);
                    if (touched.empty()) {
                        if (g.tiles.size() >= params.min_cluster_size)
                            out.interior.push_back(std::move(g));
                    } else {
                        out.border.push_back(BorderCluster{std::move(g.tiles),
                                                           std::move(g.points),
                                                           std::move(touched)});
                    }
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    SliceClustering result;
    for (SliceClustering& s : per_slice) {
        std::move(s.interior.begin(), s.interior.end(), std::back_inserter(result.interior));
        std::move(s.border.begin(), s.border.end(), std::back_inserter(result.border));
    }
    return result;
}

/// Outcome of dissolving one border: completed clusters (size-filtered) and
/// inter-slice clusters that still reach an unprocessed border and must be
/// carried forward.
struct JoinOutcome {
    std::vector<TileGroup> completed;
    std::vector<BorderCluster> inter;
};

/// Joins the clusters adjacent to one border. Two candidates belong together
/// iff some pair of their tiles is within the adjacency metric; components of
/// that relation are found by depth-first search seeded from each unvisited
/// candidate. Only tiles within delta columns of the border can form cross
/// edges, so the search indexes just those. A joined cluster that still
/// touches any border in `remaining` (the unprocessed borders to the left)
/// becomes an inter-slice cluster; otherwise it is complete and the size
/// minimum decides whether it is emitted or noise.
inline JoinOutcome join_border(std::vector<BorderCluster> candidates, const GridParams& params,
                               std::int64_t border, std::span<const std::int64_t> remaining) {
    const int delta = params.distance;
    const std::vector<Tile> offsets = neighbor_offsets(params);

    // Tiles near the border, keyed to their owning candidate.
    std::unordered_map<Tile, std::size_t, TileHash> near_tile_owner;
    std::vector<std::vector<Tile>> near_tiles(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (const Tile& t : candidates[i].tiles) {
            if (t.x >= border - delta && t.x <= border + delta - 1) {
                near_tile_owner.emplace(t, i);
                near_tiles[i].push_back(t);
            }
        }
    }

    JoinOutcome out;
    std::vector<bool> visited(candidates.size(), false);
    std::vector<std::size_t> stack;
    std::vector<std::size_t> component;

    for (std::size_t seed = 0; seed < candidates.size(); ++seed) {
        if (visited[seed]) continue;
        visited[seed] = true;
        stack.assign(1, seed);
        component.assign(1, seed);
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            for (const Tile& t : near_tiles[c]) {
                for (const Tile& o : offsets) {
                    auto it = near_tile_owner.find(Tile{t.x + o.x, t.y + o.y});
                    if (it == near_tile_owner.end() || visited[it->second]) continue;
                    visited[it->second] = true;
                    stack.push_back(it->second);
                    component.push_back(it->second);
                }
            }
        }

        TileGroup joined;
        for (const std::size_t c : component) {
            BorderCluster& bc = candidates[c];
            joined.tiles.insert(joined.tiles.end(), bc.tiles.begin(), bc.tiles.end());
            if (!bc.points.empty()) {
                if (joined.points.empty())
                    joined.points = std::move(bc.points);
                else
                    joined.points.insert(joined.points.end(), bc.points.begin(),
                                         bc.points.end());
            }
        }

        std::vector<std::int32_t> still = touched_borders(joined.tiles, remaining, delta);
        if (!still.empty()) {
            out.inter.push_back(
                BorderCluster{std::move(joined.tiles), std::move(joined.points), std::move(still)});
        } else if (joined.tiles.size() >= params.min_cluster_size) {
            out.completed.push_back(std::move(joined));
        }
    }
    return out;
}

/// Dissolves the borders iteratively from rightmost to leftmost. At each
/// border, the pending clusters that reach it are joined; results that still
/// reach an unprocessed border re-enter the pending set, everything else is
/// final. Returns all completed clusters, interior ones included.
inline std::vector<TileGroup> resolve_borders(SliceClustering sc,
                                              std::span<const std::int64_t> borders,
                                              const GridParams& params) {
    std::vector<TileGroup> groups = std::move(sc.interior);
    std::vector<BorderCluster> pending = std::move(sc.border);
    for (auto i = static_cast<std::int32_t>(borders.size()) - 1; i >= 0; --i) {
        std::vector<BorderCluster> candidates;
        std::vector<BorderCluster> rest;
        for (BorderCluster& bc : pending)
            (bc.touches(i) ? candidates : rest).push_back(std::move(bc));
        JoinOutcome jo =
            join_border(std::move(candidates), params, borders[static_cast<std::size_t>(i)],
                        borders.first(static_cast<std::size_t>(i)));
        std::move(jo.completed.begin(), jo.completed.end(), std::back_inserter(groups));
        pending = std::move(rest);
        std::move(jo.inter.begin(), jo.inter.end(), std::back_inserter(pending));
    }
    assert(pending.empty());  // every border cluster resolves at some border
    return groups;
}

} // namespace raster
