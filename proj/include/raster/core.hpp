#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>

#include "raster/errors.hpp"

namespace raster {

/// Raw 2-D input coordinate (longitude-like x, latitude-like y).
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Point&, const Point&) = default;
};

/// Lexicographic (x, then y) order, used to make point output deterministic.
constexpr bool point_less(const Point& a, const Point& b) noexcept {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
}

/// Closed rectangular canvas the input coordinates must lie in.
struct Bounds {
    double x_min = -180.0;
    double x_max = 180.0;
    double y_min = -90.0;
    double y_max = 90.0;

    constexpr bool contains(const Point& p) const noexcept {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }

    constexpr double width() const noexcept { return x_max - x_min; }
    constexpr double height() const noexcept { return y_max - y_min; }

    /// The GPS coordinate plane: longitude in [-180, 180], latitude in [-90, 90].
    static constexpr Bounds gps() noexcept { return Bounds{-180.0, 180.0, -90.0, 90.0}; }
};

/// Integer grid cell identifier. The grid is implicit: cell (tx, ty) covers the
/// half-open square [tx*side, (tx+1)*side) x [ty*side, (ty+1)*side) where
/// side = 10^(-precision). Points exactly on a grid line belong to the cell
/// above/right of the line (floor semantics, lower-closed intervals).
struct Tile {
    std::int64_t x = 0;
    std::int64_t y = 0;

    // Lexicographic (x, then y): the total order used for deterministic output.
    friend constexpr auto operator<=>(const Tile&, const Tile&) = default;
};

struct TileHash {
    static constexpr std::uint64_t mix(std::uint64_t v) noexcept {
        v += 0x9e3779b97f4a7c15ull;
        v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
        v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
        return v ^ (v >> 31);
    }

    std::size_t operator()(const Tile& t) const noexcept {
        return static_cast<std::size_t>(
            mix(mix(static_cast<std::uint64_t>(t.x)) ^ static_cast<std::uint64_t>(t.y)));
    }
};

/// Adjacency metric for tile neighborhoods.
enum class Metric { chebyshev, manhattan };

/// Whether raw points are kept per tile (prime mode) or only counted.
enum class Mode { count_only, retain_points };

/// What to do with points outside the canvas: drop and count them, or abort the run.
enum class OobPolicy { skip, strict };

/// Full parameter set for the contraction and agglomeration steps.
///
/// precision is a real exponent: the tile side length is 10^(-precision) input
/// units, i.e. coordinates are scaled by 10^precision and floored. A precision
/// of 3.5 means a scale factor of about 3162.28.
struct GridParams {
    double precision = 3.5;
    Bounds bounds = Bounds::gps();
    std::uint64_t threshold = 5;        // tau: min points per significant tile
    int distance = 1;                   // delta: adjacency radius in tiles
    Metric metric = Metric::chebyshev;
    std::size_t min_cluster_size = 4;   // mu: min tiles per emitted cluster
    Mode mode = Mode::count_only;
    OobPolicy oob_policy = OobPolicy::skip;
    bool dedupe_points = false;         // retain mode: keep unique points per tile

    double scale() const noexcept { return std::pow(10.0, precision); }

    /// Throws ConfigError unless the parameters describe a usable grid.
    void validate() const {
        const double s = scale();
        if (!std::isfinite(s) || s <= 0.0)
            throw ConfigError("precision yields a non-finite or zero scale factor");
        if (!std::isfinite(bounds.x_min) || !std::isfinite(bounds.x_max) ||
            !std::isfinite(bounds.y_min) || !std::isfinite(bounds.y_max))
            throw ConfigError("canvas bounds must be finite");
        if (bounds.x_min >= bounds.x_max || bounds.y_min >= bounds.y_max)
            throw ConfigError("canvas bounds must satisfy x_min < x_max and y_min < y_max");
        // Scaled coordinates must stay well inside int64 range.
        constexpr double limit = 4.6e18;
        if (std::abs(bounds.x_min) * s > limit || std::abs(bounds.x_max) * s > limit ||
            std::abs(bounds.y_min) * s > limit || std::abs(bounds.y_max) * s > limit)
            throw ConfigError("precision too high for the canvas extent (tile index overflow)");
        if (threshold < 1) throw ConfigError("threshold must be >= 1");
        if (distance < 1) throw ConfigError("distance must be >= 1");
        if (min_cluster_size < 1) throw ConfigError("min cluster size must be >= 1");
    }

    std::int64_t min_column() const noexcept {
        return static_cast<std::int64_t>(std::floor(bounds.x_min * scale()));
    }
    std::int64_t max_column() const noexcept {
        return static_cast<std::int64_t>(std::floor(bounds.x_max * scale()));
    }

    /// Exact number of representable tiles on the canvas. The closed upper
    /// bounds contribute one extra row/column versus the open-interval count.
    double tile_bound() const noexcept {
        const double s = scale();
        const double cols = std::floor(bounds.x_max * s) - std::floor(bounds.x_min * s) + 1.0;
        const double rows = std::floor(bounds.y_max * s) - std::floor(bounds.y_min * s) + 1.0;
        return cols * rows;
    }
};

/// Contraction projection without a bounds check: floor of the scaled coordinate.
/// Floor (not truncation toward zero) keeps tile widths uniform across zero.
inline Tile project_unchecked(const Point& p, double scale) noexcept {
    return Tile{static_cast<std::int64_t>(std::floor(p.x * scale)),
                static_cast<std::int64_t>(std::floor(p.y * scale))};
}

/// Projects a point onto its tile. Throws OutOfBoundsError if the point lies
/// outside the canvas.
inline Tile project(const Point& p, const GridParams& params) {
    if (!params.bounds.contains(p))
        throw OutOfBoundsError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                               ") outside canvas bounds");
    return project_unchecked(p, params.scale());
}

} // namespace raster
