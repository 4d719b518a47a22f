#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "raster/core.hpp"
#include "support/oracles.hpp"

using namespace raster;

TEST_CASE("nearby coordinates contract to the same corner tile") {
    GridParams params;
    params.precision = 2;
    CHECK(project({1.005, 1.000}, params) == Tile{100, 100});
    CHECK(project({1.009, 1.002}, params) == Tile{100, 100});
    CHECK(project({1.008, 1.006}, params) == Tile{100, 100});
}

TEST_CASE("origin maps to the origin tile") {
    GridParams params;
    params.precision = 3;
    CHECK(project({0.0, 0.0}, params) == Tile{0, 0});
}

TEST_CASE("negative coordinates floor downward, not toward zero") {
    GridParams params;
    params.precision = 1;
    const Tile expected = oracle::project({-0.15, 0.25}, params.precision);
    CHECK(expected == Tile{-2, 2});
    CHECK(project({-0.15, 0.25}, params) == Tile{-2, 2});
}

TEST_CASE("projection matches the interval-containment oracle on random points") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> coord(-179.0, 179.0);
    for (const double precision : {1.0, 2.0, 3.0, 3.5}) {
        GridParams params;
        params.precision = precision;
        for (int i = 0; i < 2000; ++i) {
            const Point p{coord(rng), coord(rng) / 2.0};
            CAPTURE(precision, p.x, p.y);
            CHECK(project(p, params) == oracle::project(p, precision));
        }
    }
}

TEST_CASE("projection is a pure function of the grid square") {
    GridParams params;
    params.precision = 2;
    const Point p{3.14159, 2.71828};
    CHECK(project(p, params) == project(p, params));

    // Points inside the same half-open square share a tile; crossing a grid
    // line moves to the next tile.
    CHECK(project({3.140, 2.710}, params) == project({3.1499, 2.7199}, params));
    CHECK(project({3.140, 2.710}, params) != project({3.150, 2.710}, params));
    // A point exactly on a grid line belongs to the upper (lower-closed) tile.
    CHECK(project({3.0, 0.0}, params) == Tile{300, 0});
}

TEST_CASE("out-of-bounds points are rejected by project") {
    GridParams params;
    CHECK_THROWS_AS(project({200.0, 0.0}, params), OutOfBoundsError);
    CHECK_THROWS_AS(project({0.0, -91.0}, params), OutOfBoundsError);
    CHECK_NOTHROW(project({180.0, 90.0}, params));
}

TEST_CASE("grid parameter validation") {
    GridParams params;
    CHECK_NOTHROW(params.validate());

    SECTION("threshold, distance, and min size must be at least 1") {
        GridParams bad = params;
        bad.threshold = 0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = params;
        bad.distance = 0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = params;
        bad.min_cluster_size = 0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
    SECTION("canvas must be finite and non-empty") {
        GridParams bad = params;
        bad.bounds.x_min = 5.0;
        bad.bounds.x_max = 5.0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = params;
        bad.bounds.y_max = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
    SECTION("precision must keep the scale finite and positive") {
        GridParams bad = params;
        bad.precision = 400.0;  // 10^400 overflows
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
}

TEST_CASE("fractional precision acts as a plain scale factor") {
    GridParams params;
    params.precision = 3.5;  // scale ~ 3162.28
    const double scale = params.scale();
    CHECK(scale == Catch::Approx(3162.2776601683795));
    CHECK(project({1.0, 0.0}, params) == Tile{static_cast<std::int64_t>(scale), 0});
}

TEST_CASE("tile ordering is lexicographic by column then row") {
    CHECK(Tile{0, 5} < Tile{1, -10});
    CHECK(Tile{2, 3} < Tile{2, 4});
    CHECK(Tile{2, 3} == Tile{2, 3});
}

TEST_CASE("tile bound counts closed-canvas rows and columns exactly") {
    GridParams params;
    params.precision = 1.0;
    params.bounds = {0.0, 1.0, 0.0, 1.0};
    // Columns 0..10 inclusive on each axis.
    CHECK(params.tile_bound() == 121.0);
}
