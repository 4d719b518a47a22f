#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "raster/datagen.hpp"
#include "raster/slicing.hpp"
#include "support/oracles.hpp"

using namespace raster;

namespace {

SignificantTiles make_sig(const std::vector<Tile>& tiles) {
    SignificantTiles sig;
    for (const Tile& t : tiles) sig[t].count = 5;
    return sig;
}

std::size_t total_tiles(const SliceSet& ss) {
    std::size_t n = 0;
    for (const auto& s : ss.slices) n += s.size();
    return n;
}

} // namespace

TEST_CASE("one slice means no borders and everything together") {
    GridParams params;
    const std::vector<Tile> tiles{{-100, 0}, {0, 0}, {100, 0}};
    const SliceSet ss = slice(make_sig(tiles), params, 1);
    CHECK(ss.borders.empty());
    REQUIRE(ss.slices.size() == 1);
    CHECK(ss.slices[0].size() == 3);
}

TEST_CASE("even slicing of the GPS canvas puts borders at the quarter columns") {
    GridParams params;
    params.precision = 2;  // columns [-18000, 18000]
    const SliceSet ss = slice(make_sig({{0, 0}}), params, 4);
    CHECK(ss.borders == std::vector<std::int64_t>{-9000, 0, 9000});
}

TEST_CASE("tiles land in the slice their column belongs to") {
    GridParams params;
    params.precision = 2;
    const std::vector<Tile> tiles{{-17999, 0}, {-9000, 1}, {-1, 2}, {0, 3}, {8999, 4}, {9000, 5}};
    const SliceSet ss = slice(make_sig(tiles), params, 4);
    REQUIRE(ss.slices.size() == 4);
    CHECK(ss.slices[0].contains(Tile{-17999, 0}));
    CHECK(ss.slices[1].contains(Tile{-9000, 1}));  // tx >= border goes right
    CHECK(ss.slices[1].contains(Tile{-1, 2}));
    CHECK(ss.slices[2].contains(Tile{0, 3}));
    CHECK(ss.slices[2].contains(Tile{8999, 4}));
    CHECK(ss.slices[3].contains(Tile{9000, 5}));
    CHECK(total_tiles(ss) == tiles.size());
}

TEST_CASE("every tile belongs to exactly one slice and borders ascend strictly") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<std::int64_t> coord(-5000, 5000);
    std::vector<Tile> tiles;
    std::set<Tile> unique;
    while (unique.size() < 400) unique.insert(Tile{coord(rng), coord(rng)});
    tiles.assign(unique.begin(), unique.end());

    GridParams params;
    params.precision = 1.5;
    for (const SliceStrategy strategy : {SliceStrategy::even, SliceStrategy::balanced}) {
        for (const std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{9}}) {
            const SliceSet ss = slice(make_sig(tiles), params, n, strategy);
            CAPTURE(static_cast<int>(strategy), n);
            REQUIRE(ss.slices.size() == n);
            REQUIRE(ss.borders.size() <= n - 1);
            for (std::size_t i = 1; i < ss.borders.size(); ++i)
                CHECK(ss.borders[i - 1] < ss.borders[i]);
            CHECK(total_tiles(ss) == tiles.size());
            for (std::size_t i = 0; i < ss.slices.size(); ++i)
                for (const auto& [tile, stats] : ss.slices[i]) CHECK(ss.slice_of(tile.x) == i);
        }
    }
}

TEST_CASE("balanced slicing keeps the load near the mean on skewed data") {
    // Clusters crowd into a narrow band of the canvas, so even slicing would
    // put nearly everything into one slice.
    GenConfig gen;
    gen.cluster_count = 150;
    gen.points_per_cluster = 200;
    gen.seed = 31;
    gen.bounds = Bounds{-180.0, -150.0, -90.0, 90.0};
    const GeneratedData data = generate(gen);

    GridParams params;
    params.precision = 3.5;
    params.threshold = 5;
    TileAccumulator acc(params);
    acc.ingest(data.points);
    SignificantTiles sig = acc.prune();
    const std::size_t m = sig.size();
    REQUIRE(m > 500);

    const std::size_t n_slices = 8;
    const SliceSet even_ss = slice(SignificantTiles(sig), params, n_slices, SliceStrategy::even);
    const SliceSet bal_ss = slice(std::move(sig), params, n_slices, SliceStrategy::balanced);

    const double mean = static_cast<double>(m) / static_cast<double>(n_slices);
    std::size_t even_max = 0, bal_max = 0;
    for (const auto& s : even_ss.slices) even_max = std::max(even_max, s.size());
    for (const auto& s : bal_ss.slices) bal_max = std::max(bal_max, s.size());

    CHECK(static_cast<double>(bal_max) <= 2.0 * mean);
    CHECK(bal_max < even_max);  // the balanced strategy is the point here
}

TEST_CASE("more slices than distinct columns degenerates to empty slices") {
    GridParams params;
    params.precision = 2;
    const std::vector<Tile> tiles{{5, 0}, {5, 1}, {5, 2}};
    const SliceSet ss = slice(make_sig(tiles), params, 6, SliceStrategy::balanced);
    REQUIRE(ss.slices.size() == 6);
    CHECK(total_tiles(ss) == 3);
    std::size_t empty = 0;
    for (const auto& s : ss.slices) empty += s.empty() ? 1 : 0;
    CHECK(empty >= 4);
}

TEST_CASE("explicit borders distribute tiles by column") {
    const std::vector<Tile> tiles{{-5, 0}, {0, 0}, {4, 0}, {5, 0}, {9, 0}};
    SliceSet ss = slice_with_borders(make_sig(tiles), {0, 5});
    REQUIRE(ss.slices.size() == 3);
    CHECK(ss.slices[0].size() == 1);
    CHECK(ss.slices[1].size() == 2);
    CHECK(ss.slices[2].size() == 2);
}
