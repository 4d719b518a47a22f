#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "raster/accumulator.hpp"
#include "raster/core.hpp"

namespace raster {

/// How slice borders are placed along the tile-column axis.
enum class SliceStrategy {
    even,      // equal-width cuts of the canvas column range
    balanced,  // cuts at significant-tile count quantiles
};

/// Vertical partition of the significant-tile space. A border with value b
/// separates tiles with tx < b (left) from tiles with tx >= b (right); slice i
/// holds the tiles between border i-1 and border i, with implicit sentinels at
/// the canvas edges. Borders are strictly increasing; slices may be empty.
struct SliceSet {
    std::vector<std::int64_t> borders;     // size N-1, ascending
    std::vector<SignificantTiles> slices;  // size N

    std::size_t slice_count() const noexcept { return slices.size(); }

    /// Index of the slice a tile column falls into.
    std::size_t slice_of(std::int64_t tx) const noexcept {
        return static_cast<std::size_t>(
            std::upper_bound(borders.begin(), borders.end(), tx) - borders.begin());
    }
};

/// Distributes significant tiles over the slices defined by explicit border
/// positions (must be strictly increasing). Consumes the input map.
inline SliceSet slice_with_borders(SignificantTiles sig, std::vector<std::int64_t> borders) {
    SliceSet ss;
    ss.borders = std::move(borders);
    ss.slices.resize(ss.borders.size() + 1);
    for (auto it = sig.begin(); it != sig.end();) {
        auto node = sig.extract(it++);
        ss.slices[ss.slice_of(node.key().x)].insert(std::move(node));
    }
    return ss;
}

namespace detail {

inline std::vector<std::int64_t> even_borders(const GridParams& params, std::size_t n_slices) {
    // Treat the column range as [min_column, max_column + 1) and cut it into
    // n equal parts; integer positions keep the cuts exact for GPS-style
    // canvases.
    const std::int64_t lo = params.min_column();
    const std::int64_t hi = params.max_column() + 1;
    const std::int64_t width = hi - lo;
    std::vector<std::int64_t> borders;
    borders.reserve(n_slices - 1);
    for (std::size_t i = 1; i < n_slices; ++i) {
        const std::int64_t b =
            lo + static_cast<std::int64_t>(static_cast<__int128>(width) * static_cast<std::int64_t>(i) /
                                           static_cast<std::int64_t>(n_slices));
        if (borders.empty() || b > borders.back()) borders.push_back(b);
    }
    return borders;
}

inline std::vector<std::int64_t> balanced_borders(const SignificantTiles& sig,
                                                  const GridParams& params,
                                                  std::size_t n_slices) {
    if (sig.empty()) return even_borders(params, n_slices);
    std::vector<std::int64_t> columns;
    columns.reserve(sig.size());
    for (const auto& [tile, stats] : sig) columns.push_back(tile.x);
    std::sort(columns.begin(), columns.end());

    std::vector<std::int64_t> borders;
    borders.reserve(n_slices - 1);
    for (std::size_t i = 1; i < n_slices; ++i) {
        const std::size_t idx = i * columns.size() / n_slices;
        std::int64_t b = columns[idx];
        if (!borders.empty() && b <= borders.back()) b = borders.back() + 1;
        borders.push_back(b);
    }
    return borders;
}

} // namespace detail

/// Sorts the significant tiles into n vertical slices. The even strategy cuts
/// the canvas column range into equal-width intervals; the balanced strategy
/// places borders at tile-count quantiles so each slice carries roughly the
/// same load on skewed data. With more slices than distinct columns some
/// slices end up empty, which is fine.
inline SliceSet slice(SignificantTiles sig, const GridParams& params, std::size_t n_slices,
                      SliceStrategy strategy = SliceStrategy::even) {
    if (n_slices < 1) throw ConfigError("slice count must be >= 1");
    std::vector<std::int64_t> borders =
        strategy == SliceStrategy::even ? detail::even_borders(params, n_slices)
                                        : detail::balanced_borders(sig, params, n_slices);
    return slice_with_borders(std::move(sig), std::move(borders));
}

} // namespace raster
