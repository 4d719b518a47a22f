#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "raster/core.hpp"

namespace raster {

/// Per-tile statistics for a significant tile.
struct TileStats {
    std::uint64_t count = 0;
    std::vector<Point> points;  // populated only in retain-points mode
};

/// Tiles that survived pruning, with their statistics.
using SignificantTiles = std::unordered_map<Tile, TileStats, TileHash>;

/// Open-addressing hash table of per-tile point counts: linear probing over a
/// power-of-two slot array, growing at 70% load. A zero count marks an empty
/// slot, which works because an occupied tile always holds at least one
/// point. Flat storage keeps the projection loop at about one cache line per
/// operation, which is where this pipeline spends most of its time. Slots are
/// never deleted; the table is consumed wholesale by pruning.
class TileCounts {
public:
    TileCounts() : slots_(kInitialCapacity), mask_(kInitialCapacity - 1) {}

    void add(const Tile& t, std::uint64_t by = 1) {
        if ((used_ + 1) * 10 >= slots_.size() * 7) grow();
        std::size_t i = TileHash{}(t) & mask_;
        while (true) {
            Slot& s = slots_[i];
            if (s.count == 0) {
                s.tile = t;
                s.count = by;
                ++used_;
                return;
            }
            if (s.tile == t) {
                s.count += by;
                return;
            }
            i = (i + 1) & mask_;
        }
    }

    /// Zero when the tile was never seen.
    std::uint64_t count_of(const Tile& t) const {
        std::size_t i = TileHash{}(t) & mask_;
        while (true) {
            const Slot& s = slots_[i];
            if (s.count == 0) return 0;
            if (s.tile == t) return s.count;
            i = (i + 1) & mask_;
        }
    }

    std::size_t size() const noexcept { return used_; }

    template <typename F>
    void for_each(F&& fn) const {
        for (const Slot& s : slots_)
            if (s.count != 0) fn(s.tile, s.count);
    }

    void clear() {
        slots_.assign(kInitialCapacity, Slot{});
        mask_ = kInitialCapacity - 1;
        used_ = 0;
    }

private:
    struct Slot {
        Tile tile;
        std::uint64_t count = 0;
    };
    static constexpr std::size_t kInitialCapacity = 1024;

    void grow() {
        std::vector<Slot> old = std::move(slots_);
        slots_.assign(old.size() * 2, Slot{});
        mask_ = slots_.size() - 1;
        for (const Slot& s : old) {
            if (s.count == 0) continue;
            std::size_t i = TileHash{}(s.tile) & mask_;
            while (slots_[i].count != 0) i = (i + 1) & mask_;
            slots_[i] = s;
        }
    }

    std::vector<Slot> slots_;
    std::size_t mask_ = 0;
    std::size_t used_ = 0;
};

/// Single-pass accumulator for the contraction step: projects points to tiles
/// and keeps a count (and, in retain-points mode, the raw points) per
/// occupied tile. Memory is bounded by the number of representable tiles, not
/// by the input size, in count-only mode.
///
/// A single accumulator is single-writer. Build several on disjoint input
/// chunks concurrently and combine them with merge(); merging is associative
/// and commutative (counts add, point multisets concatenate).
class TileAccumulator {
public:
    explicit TileAccumulator(GridParams params) : params_(std::move(params)) {
        params_.validate();
        scale_ = params_.scale();
        retain_ = params_.mode == Mode::retain_points;
    }

    /// Ingests one chunk of the input. Chunks may arrive in any order and any
    /// partition; each point is consumed exactly once. Out-of-bounds points
    /// are skipped and counted, or abort the run, per the configured policy.
    void ingest(std::span<const Point> pts) {
        for (const Point& p : pts) {
            if (!params_.bounds.contains(p)) {
                if (params_.oob_policy == OobPolicy::strict)
                    throw OutOfBoundsError("point (" + std::to_string(p.x) + ", " +
                                           std::to_string(p.y) + ") outside canvas bounds");
                ++skipped_;
                continue;
            }
            const Tile t = project_unchecked(p, scale_);
            counts_.add(t);
            if (retain_) points_[t].push_back(p);
            ++ingested_;
        }
    }

    /// Folds another accumulator (built with equal params) into this one.
    void merge(TileAccumulator&& other) {
        other.counts_.for_each([&](const Tile& t, std::uint64_t c) { counts_.add(t, c); });
        if (retain_) {
            for (auto& [tile, pts] : other.points_) {
                std::vector<Point>& mine = points_[tile];
                if (mine.empty())
                    mine = std::move(pts);
                else
                    mine.insert(mine.end(), pts.begin(), pts.end());
            }
        }
        ingested_ += other.ingested_;
        skipped_ += other.skipped_;
        other.counts_.clear();
        other.points_.clear();
        other.ingested_ = 0;
        other.skipped_ = 0;
    }

    /// Keeps exactly the tiles with count >= threshold and discards the rest,
    /// consuming the accumulator. With dedupe_points set, per-tile points are
    /// reduced to unique coordinates first and the threshold applies to the
    /// deduplicated count.
    SignificantTiles prune() {
        SignificantTiles kept;
        counts_.for_each([&](const Tile& t, std::uint64_t c) {
            TileStats stats;
            stats.count = c;
            if (retain_) {
                stats.points = std::move(points_[t]);
                if (params_.dedupe_points) dedupe(stats);
            }
            if (stats.count >= params_.threshold) kept.emplace(t, std::move(stats));
        });
        counts_.clear();
        points_.clear();
        return kept;
    }

    const GridParams& params() const noexcept { return params_; }
    std::size_t entry_count() const noexcept { return counts_.size(); }

    std::uint64_t count_of(const Tile& t) const { return counts_.count_of(t); }

    /// Retained points of a tile; nullptr in count-only mode or when unseen.
    const std::vector<Point>* points_of(const Tile& t) const {
        auto it = points_.find(t);
        return it == points_.end() ? nullptr : &it->second;
    }

    /// Visits every occupied tile as fn(const Tile&, std::uint64_t count).
    template <typename F>
    void for_each_count(F&& fn) const {
        counts_.for_each(fn);
    }

    /// In-bounds points ingested so far (equals the sum of counts before prune).
    std::uint64_t total_ingested() const noexcept { return ingested_; }

    /// Out-of-bounds points dropped under the skip policy.
    std::uint64_t skipped() const noexcept { return skipped_; }

    static void dedupe(TileStats& stats) {
        std::sort(stats.points.begin(), stats.points.end(), point_less);
        stats.points.erase(std::unique(stats.points.begin(), stats.points.end()),
                           stats.points.end());
        stats.count = stats.points.size();
    }

private:
    GridParams params_;
    double scale_ = 1.0;
    bool retain_ = false;
    TileCounts counts_;
    std::unordered_map<Tile, std::vector<Point>, TileHash> points_;
    std::uint64_t ingested_ = 0;
    std::uint64_t skipped_ = 0;
};

} // namespace raster
