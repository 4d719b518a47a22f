#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "raster/metrics.hpp"
#include "raster/pipeline.hpp"
#include "support/oracles.hpp"

using namespace raster;

namespace {

ClusterSet clusters_from(const std::vector<std::vector<Tile>>& groups) {
    std::vector<TileGroup> tg;
    for (const auto& g : groups) tg.push_back(TileGroup{g, {}});
    return finalize_clusters(std::move(tg));
}

} // namespace

TEST_CASE("every center inside a distinct cluster scores a perfect rate") {
    GridParams params;
    params.precision = 2;
    const ClusterSet cs = clusters_from({{{0, 0}, {0, 1}}, {{50, 50}, {50, 51}}});
    const std::vector<Point> centers{{0.005, 0.005}, {0.505, 0.505}};

    const DetectionResult r = detection_rate(cs, centers, params);
    CHECK(r.rate == 1.0);
    CHECK(r.detected_centers == 2);
    CHECK(r.covering_clusters == 2);
    CHECK(r.merged_count == 0);
}

TEST_CASE("no clusters means nothing is detected") {
    GridParams params;
    const DetectionResult r = detection_rate(ClusterSet{}, std::vector<Point>{{0.0, 0.0}}, params);
    CHECK(r.rate == 0.0);
    CHECK(r.detected_centers == 0);
}

TEST_CASE("a center is matched through the adjacency distance") {
    GridParams params;
    params.precision = 2;
    // Cluster tile (1,0) is one step from the center's tile (0,0).
    const ClusterSet cs = clusters_from({{{1, 0}}});
    const DetectionResult r = detection_rate(cs, std::vector<Point>{{0.005, 0.005}}, params);
    CHECK(r.rate == 1.0);

    GridParams manhattan = params;
    manhattan.metric = Metric::manhattan;
    // Diagonal contact does not count under Manhattan distance 1.
    const ClusterSet diag = clusters_from({{{1, 1}}});
    CHECK(detection_rate(diag, std::vector<Point>{{0.005, 0.005}}, manhattan).rate == 0.0);
    CHECK(detection_rate(diag, std::vector<Point>{{0.005, 0.005}}, params).rate == 1.0);
}

TEST_CASE("two centers one tile apart merge into one cluster and halve the rate") {
    GridParams params;
    params.precision = 3;
    params.threshold = 1;
    params.min_cluster_size = 1;

    // Centers in adjacent tiles; their points form a single delta-connected
    // cluster, verified against the brute-force component oracle.
    const std::vector<Point> centers{{0.0015, 0.0015}, {0.0025, 0.0015}};
    std::vector<Point> pts;
    oracle::add_tile_points(pts, Tile{1, 1}, 3, 3);
    oracle::add_tile_points(pts, Tile{2, 1}, 3, 3);

    const ClusterSet cs = cluster_sequential(pts, params);
    REQUIRE(cs.clusters.size() == 1);
    CHECK(oracle::canonical(oracle::cluster_tiles(cs)) ==
          oracle::components({{1, 1}, {2, 1}}, params));

    const DetectionResult r = detection_rate(cs, centers, params);
    CHECK(r.detected_centers == 2);
    CHECK(r.covering_clusters == 1);
    CHECK(r.merged_count == 1);
    CHECK(r.rate == 0.5);
}

TEST_CASE("detection requires at least one center") {
    GridParams params;
    CHECK_THROWS_AS(detection_rate(ClusterSet{}, {}, params), ConfigError);
}

TEST_CASE("silhouette of two tight, distant clusters is near one") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> jitter(-0.01, 0.01);
    std::vector<LabeledPoint> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({{jitter(rng), jitter(rng)}, 0});
    for (int i = 0; i < 40; ++i) pts.push_back({{10.0 + jitter(rng), jitter(rng)}, 1});
    CHECK(silhouette(pts) >= 0.95);
}

TEST_CASE("silhouette is undefined for fewer than two clusters") {
    std::vector<LabeledPoint> pts{{{0.0, 0.0}, 0}, {{1.0, 1.0}, 0}};
    CHECK_THROWS_AS(silhouette(pts), UndefinedMetricError);
    CHECK_THROWS_AS(silhouette(std::vector<LabeledPoint>{}, 10), UndefinedMetricError);
    CHECK_THROWS_AS(silhouette(pts, 1), ConfigError);  // cap below the minimum
}

TEST_CASE("small fixture matches the exact full-pairwise computation") {
    // 10 points, 2 clusters, no sampling: must equal the quadratic oracle.
    const std::vector<LabeledPoint> pts{
        {{0.0, 0.0}, 0}, {{0.1, 0.0}, 0},  {{0.0, 0.2}, 0},  {{0.3, 0.1}, 0}, {{0.1, 0.1}, 0},
        {{5.0, 5.0}, 1}, {{5.2, 5.1}, 1},  {{4.9, 5.3}, 1},  {{5.1, 4.8}, 1}, {{5.05, 5.0}, 1}};
    const double exact = oracle::silhouette(pts);
    CHECK(silhouette(pts, 100) == Catch::Approx(exact).epsilon(1e-12));
    CHECK(exact > 0.9);
}

TEST_CASE("sampling keeps the estimate close on larger inputs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::vector<LabeledPoint> pts;
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < 500; ++i)
            pts.push_back({{c * 20.0 + jitter(rng), c * 5.0 + jitter(rng)}, c});

    const double sampled = silhouette(pts, 300, 99);
    const double exact = oracle::silhouette(pts);
    CHECK(std::abs(sampled - exact) < 0.02);
    CHECK(sampled >= -1.0);
    CHECK(sampled <= 1.0);
}

TEST_CASE("singleton clusters contribute a zero score") {
    const std::vector<LabeledPoint> pts{
        {{0.0, 0.0}, 0}, {{0.1, 0.0}, 0}, {{9.0, 9.0}, 1}};
    // Cluster 1 has one member: its silhouette term is 0 by convention.
    const double s = silhouette(pts, 10);
    CHECK(s == Catch::Approx(oracle::silhouette(pts)).epsilon(1e-12));
}

TEST_CASE("labeled_points flattens prime clusters with their ids") {
    std::vector<TileGroup> groups;
    groups.push_back(TileGroup{{{0, 0}}, {{0.1, 0.1}, {0.2, 0.2}}});
    groups.push_back(TileGroup{{{9, 9}}, {{5.0, 5.0}}});
    const ClusterSet cs = finalize_clusters(std::move(groups));
    const auto pts = labeled_points(cs);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].label == 0);
    CHECK(pts[2].label == 1);
    CHECK(pts[2].p == Point{5.0, 5.0});
}
