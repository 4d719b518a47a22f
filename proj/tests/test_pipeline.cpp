#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "raster/datagen.hpp"
#include "raster/pipeline.hpp"
#include "raster/report_json.hpp"
#include "support/oracles.hpp"

using namespace raster;

namespace {

GeneratedData small_dataset(std::uint64_t seed = 404, std::size_t clusters = 25) {
    GenConfig gen;
    gen.cluster_count = clusters;
    gen.seed = seed;
    return generate(gen);
}

std::string clusters_csv(const ClusterSet& cs) {
    std::ostringstream out;
    write_clusters_csv(out, cs);
    return out.str();
}

} // namespace

TEST_CASE("p-raster with one worker writes the same cluster file as raster") {
    const GeneratedData data = small_dataset();
    RunConfig cfg;
    cfg.grid.precision = 3.5;

    ClusterSet seq, par;
    cfg.variant = Variant::raster;
    VectorSource s1(data.points);
    run_once(s1, cfg, {}, &seq);

    cfg.variant = Variant::p_raster;
    cfg.workers = 1;
    VectorSource s2(data.points);
    run_once(s2, cfg, {}, &par);

    CHECK(clusters_csv(par) == clusters_csv(seq));
}

TEST_CASE("fixed seed and params give byte-identical output across worker counts") {
    const GeneratedData data = small_dataset(0xa07, 20);
    RunConfig cfg;
    cfg.variant = Variant::p_raster;

    std::vector<std::string> outputs;
    for (const unsigned workers : {1u, 2u, 4u}) {
        cfg.workers = workers;
        for (int repeat = 0; repeat < 2; ++repeat) {
            ClusterSet cs;
            VectorSource src(data.points);
            run_once(src, cfg, {}, &cs);
            outputs.push_back(clusters_csv(cs));
        }
    }
    for (const std::string& o : outputs) CHECK(o == outputs.front());
    CHECK_FALSE(outputs.front().empty());
}

TEST_CASE("every variant reads the input exactly once") {
    const GeneratedData data = small_dataset(88, 10);
    for (const Variant v : {Variant::raster, Variant::raster_prime, Variant::p_raster,
                            Variant::p_raster_prime}) {
        RunConfig cfg;
        cfg.variant = v;
        cfg.workers = 3;
        VectorSource inner(data.points);
        CountingSource counted(inner);
        const RunReport report = run_once(counted, cfg);
        CAPTURE(to_string(v));
        CHECK(counted.points_read() == data.points.size());
        CHECK(report.stats.n_points == data.points.size());
    }
}

TEST_CASE("report fields reflect the run") {
    const GeneratedData data = small_dataset(13, 15);
    RunConfig cfg;
    cfg.variant = Variant::raster_prime;

    SECTION("detection present only with centers") {
        VectorSource a(data.points);
        const RunReport with = run_once(a, cfg, data.centers);
        REQUIRE(with.detection.has_value());
        CHECK(with.detection->rate == 1.0);
        CHECK(with.n_clusters == 15);

        VectorSource b(data.points);
        const RunReport without = run_once(b, cfg);
        CHECK_FALSE(without.detection.has_value());
    }

    SECTION("silhouette present for prime variants with enough clusters") {
        VectorSource a(data.points);
        const RunReport prime = run_once(a, cfg);
        REQUIRE(prime.silhouette_value.has_value());
        CHECK(*prime.silhouette_value >= 0.95);

        RunConfig count_cfg = cfg;
        count_cfg.variant = Variant::raster;
        VectorSource b(data.points);
        CHECK_FALSE(run_once(b, count_cfg).silhouette_value.has_value());
    }

    SECTION("phase times decompose into the total") {
        VectorSource src(data.points);
        const RunReport r = run_once(src, cfg);
        CHECK(r.stats.t_projection + r.stats.t_clustering <= r.stats.t_total + 1e-6);
        CHECK(r.stats.t_total > 0.0);
        CHECK(r.stats.peak_accumulator_entries >= r.stats.n_significant);
    }
}

TEST_CASE("skipped points are counted, not clustered") {
    RunConfig cfg;
    cfg.grid.precision = 2;
    cfg.grid.bounds = Bounds{0.0, 1.0, 0.0, 1.0};
    cfg.grid.threshold = 1;
    cfg.grid.min_cluster_size = 1;

    const std::vector<Point> pts{{0.5, 0.5}, {2.0, 2.0}, {0.55, 0.55}};
    VectorSource src(pts);
    const RunReport r = run_once(src, cfg);
    CHECK(r.stats.n_points == 3);
    CHECK(r.stats.n_skipped == 1);
}

TEST_CASE("csv report emits one row per run plus aggregates") {
    const GeneratedData data = small_dataset(3, 8);
    RunConfig cfg;
    std::vector<RunReport> reports;
    for (int i = 0; i < 3; ++i) {
        VectorSource src(data.points);
        reports.push_back(run_once(src, cfg, data.centers));
    }

    std::ostringstream out;
    write_reports_csv(out, reports);
    const std::string text = out.str();

    std::size_t lines = 0;
    for (const char c : text) lines += c == '\n';
    CHECK(lines == 1 + 3 + 2);  // header, runs, mean, stddev

    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header == report_csv_header());
    std::size_t header_cols = 1;
    for (const char c : header) header_cols += c == ',';
    const std::string first_row = text.substr(text.find('\n') + 1);
    std::size_t row_cols = 1;
    for (std::size_t i = 0; i < first_row.find('\n'); ++i) row_cols += first_row[i] == ',';
    CHECK(header_cols == row_cols);
    CHECK_THAT(text, Catch::Matchers::ContainsSubstring("\nmean,"));
    CHECK_THAT(text, Catch::Matchers::ContainsSubstring("\nstddev,"));
}

TEST_CASE("json report carries runs and aggregate timing") {
    const GeneratedData data = small_dataset(5, 6);
    RunConfig cfg;
    cfg.variant = Variant::p_raster;
    cfg.workers = 2;
    std::vector<RunReport> reports;
    for (int i = 0; i < 2; ++i) {
        VectorSource src(data.points);
        reports.push_back(run_once(src, cfg, data.centers));
    }

    const nlohmann::json j = reports_json(reports);
    REQUIRE(j.contains("runs"));
    REQUIRE(j["runs"].size() == 2);
    CHECK(j["runs"][0]["variant"] == "p-raster");
    CHECK(j["runs"][0]["n_points"] == data.points.size());
    CHECK(j["runs"][0]["detection_rate"] == 1.0);
    REQUIRE(j.contains("aggregate"));
    CHECK(j["aggregate"]["t_total"].contains("mean"));
}

TEST_CASE("window fix flows through both pipelines identically") {
    // Pairs of sub-threshold tiles around shared corners.
    std::vector<Point> pts;
    for (const Tile t : {Tile{0, 0}, Tile{1, 0}, Tile{0, 1}, Tile{1, 1},
                         Tile{30, 30}, Tile{31, 30}, Tile{30, 31}, Tile{31, 31}})
        oracle::add_tile_points(pts, t, 2, 1);

    GridParams params;
    params.precision = 2;
    params.threshold = 4;
    params.min_cluster_size = 1;

    const ClusterSet plain = cluster_sequential(pts, params, false);
    CHECK(plain.clusters.empty());

    const ClusterSet seq = cluster_sequential(pts, params, true);
    REQUIRE(seq.clusters.size() == 2);
    const ClusterSet par = cluster_parallel(pts, params, ParallelConfig{2, 4}, true);
    CHECK(par == seq);
}

TEST_CASE("variant names round-trip") {
    for (const Variant v : {Variant::raster, Variant::raster_prime, Variant::p_raster,
                            Variant::p_raster_prime})
        CHECK(parse_variant(to_string(v)) == v);
    CHECK_THROWS_AS(parse_variant("dbscan"), ConfigError);
}
