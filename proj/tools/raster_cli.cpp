// Command-line front end: run any pipeline variant on a point file or on
// generated data, write cluster output, and emit a machine-readable report.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raster/raster.hpp"
#include "raster/report_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;    // malformed input / out-of-bounds in strict mode
constexpr int kExitConfig = 3;  // bad parameter combination
constexpr int kExitIo = 4;      // missing or unwritable files

unsigned default_workers() {
    if (const char* env = std::getenv("RASTER_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw raster::IoError("cannot open output file '" + path + "'");
    return out;
}

struct CliOptions {
    std::string variant = "raster";
    raster::GridParams grid;
    std::string metric = "chebyshev";
    unsigned workers = default_workers();
    unsigned slices = 0;
    std::string slice_strategy = "even";
    bool window_fix = false;
    bool strict_bounds = false;
    bool dedupe = false;
    std::vector<double> canvas;

    std::string input;
    std::size_t generate_k = 0;
    raster::GenConfig gen;
    std::string gen_strategy = "rejection";

    std::string centers_file;
    std::string save_data;
    std::string save_centers;

    unsigned repeat = 1;
    std::string out_file;
    std::string points_out_file;
    std::string report_file = "-";
    std::string format = "csv";
    std::size_t silhouette_cap = 10000;
};

int run(const CliOptions& opt, bool have_generate) {
    raster::RunConfig cfg;
    cfg.variant = raster::parse_variant(opt.variant);
    cfg.grid = opt.grid;
    if (!opt.canvas.empty())
        cfg.grid.bounds = raster::Bounds{opt.canvas[0], opt.canvas[1], opt.canvas[2], opt.canvas[3]};
    cfg.grid.metric =
        opt.metric == "manhattan" ? raster::Metric::manhattan : raster::Metric::chebyshev;
    cfg.grid.oob_policy = opt.strict_bounds ? raster::OobPolicy::strict : raster::OobPolicy::skip;
    cfg.grid.dedupe_points = opt.dedupe;
    cfg.workers = opt.workers;
    cfg.slices = opt.slices;
    cfg.strategy = opt.slice_strategy == "balanced" ? raster::SliceStrategy::balanced
                                                    : raster::SliceStrategy::even;
    cfg.use_window_fix = opt.window_fix;
    cfg.silhouette_cap = opt.silhouette_cap;
    cfg.grid.validate();

    // Input: generated in memory, or a CSV file (re-read on every repeat so
    // each run remains a genuine single pass over the same data).
    std::vector<raster::Point> generated_points;
    std::vector<raster::Point> centers;
    if (have_generate) {
        raster::GenConfig gen = opt.gen;
        gen.cluster_count = opt.generate_k;
        gen.bounds = cfg.grid.bounds;
        gen.strategy = opt.gen_strategy == "rectangle"
                           ? raster::PlacementStrategy::rectangle_partition
                           : raster::PlacementStrategy::rejection_sampling;
        raster::GeneratedData data = raster::generate(gen);
        generated_points = std::move(data.points);
        centers = std::move(data.centers);
        if (!opt.save_data.empty()) {
            auto out = open_out(opt.save_data);
            raster::write_points_csv(out, generated_points);
        }
        if (!opt.save_centers.empty()) {
            auto out = open_out(opt.save_centers);
            raster::write_centers_csv(out, centers);
        }
    }
    if (!opt.centers_file.empty()) centers = raster::read_points_file(opt.centers_file);

    std::vector<raster::RunReport> reports;
    raster::ClusterSet clusters;
    for (unsigned r = 0; r < opt.repeat; ++r) {
        raster::ClusterSet* sink = (r + 1 == opt.repeat) ? &clusters : nullptr;
        if (have_generate) {
            raster::VectorSource src(generated_points);
            reports.push_back(raster::run_once(src, cfg, centers, sink));
        } else {
            std::ifstream in(opt.input);
            if (!in) throw raster::IoError("cannot open input file '" + opt.input + "'");
            raster::CsvPointSource src(in);
            reports.push_back(raster::run_once(src, cfg, centers, sink));
        }
    }

    if (!opt.out_file.empty()) {
        auto out = open_out(opt.out_file);
        raster::write_clusters_csv(out, clusters);
    }
    if (!opt.points_out_file.empty()) {
        auto out = open_out(opt.points_out_file);
        raster::write_cluster_points_csv(out, clusters);
    }

    auto emit_report = [&](std::ostream& out) {
        if (opt.format == "json")
            out << raster::reports_json(reports).dump(2) << '\n';
        else
            raster::write_reports_csv(out, reports);
    };
    if (opt.report_file == "-") {
        emit_report(std::cout);
    } else {
        auto out = open_out(opt.report_file);
        emit_report(out);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid-based density clustering: single-pass contraction to tiles, "
                 "agglomeration of significant tiles, sequential and parallel variants."};
    CliOptions opt;

    app.add_option("--variant", opt.variant, "Pipeline variant")
        ->check(CLI::IsMember({"raster", "raster-prime", "p-raster", "p-raster-prime"}))
        ->capture_default_str();
    app.add_option("-p,--precision", opt.grid.precision,
                   "Grid precision exponent; tile side is 10^-precision")
        ->capture_default_str();
    app.add_option("-t,--threshold", opt.grid.threshold, "Min points per significant tile (tau)")
        ->capture_default_str();
    app.add_option("-m,--min-size", opt.grid.min_cluster_size,
                   "Min tiles per emitted cluster (mu)")
        ->capture_default_str();
    app.add_option("--delta", opt.grid.distance, "Adjacency radius in tiles")
        ->capture_default_str();
    app.add_option("--metric", opt.metric, "Adjacency metric")
        ->check(CLI::IsMember({"chebyshev", "manhattan"}))
        ->capture_default_str();
    app.add_option("-w,--workers", opt.workers,
                   "Worker threads for p-raster variants (env RASTER_WORKERS)")
        ->capture_default_str();
    app.add_option("--slices", opt.slices, "Vertical slices (default: one per worker)");
    app.add_option("--slice-strategy", opt.slice_strategy, "Border placement")
        ->check(CLI::IsMember({"even", "balanced"}))
        ->capture_default_str();
    app.add_flag("--window-fix", opt.window_fix,
                 "Keep tiles of any 2x2 window holding >= threshold points");
    app.add_flag("--strict-bounds", opt.strict_bounds,
                 "Fail on out-of-bounds points instead of skipping them");
    app.add_flag("--dedupe", opt.dedupe, "Prime modes: keep unique points per tile");
    app.add_option("--canvas", opt.canvas, "Canvas bounds: x_min x_max y_min y_max")
        ->expected(4);

    auto* input = app.add_option("-i,--input", opt.input, "Point CSV file (x,y per line)");
    auto* generate =
        app.add_option("--generate", opt.generate_k, "Generate K synthetic clusters instead");
    input->excludes(generate);
    generate->excludes(input);

    app.add_option("--seed", opt.gen.seed, "Generator seed")->capture_default_str();
    app.add_option("--points-per-cluster", opt.gen.points_per_cluster, "Points per cluster")
        ->capture_default_str();
    app.add_option("--min-center-distance", opt.gen.min_center_distance,
                   "Min distance between cluster centers (canvas units)");
    app.add_option("--radius-min", opt.gen.radius_min, "Min cluster half-side (canvas units)");
    app.add_option("--radius-max", opt.gen.radius_max, "Max cluster half-side (canvas units)");
    app.add_option("--noise", opt.gen.noise_fraction, "Background noise fraction in [0,1)")
        ->capture_default_str();
    app.add_option("--gen-strategy", opt.gen_strategy, "Center placement strategy")
        ->check(CLI::IsMember({"rejection", "rectangle"}))
        ->capture_default_str();

    app.add_option("--centers", opt.centers_file,
                   "Ground-truth centers CSV for the detection rate");
    app.add_option("--save-data", opt.save_data, "Write generated points to this CSV");
    app.add_option("--save-centers", opt.save_centers, "Write generated centers to this CSV");

    app.add_option("-r,--repeat", opt.repeat, "Repeat the run and aggregate timings")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("-o,--out", opt.out_file, "Cluster tile CSV output (cluster_id,tile_x,tile_y)");
    app.add_option("--points-out", opt.points_out_file,
                   "Prime modes: cluster point CSV output (cluster_id,x,y)");
    app.add_option("--report", opt.report_file, "Report destination ('-' for stdout)")
        ->capture_default_str();
    app.add_option("--format", opt.format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--silhouette-cap", opt.silhouette_cap,
                   "Sample cap for the silhouette (0 disables)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (opt.input.empty() && generate->count() == 0) {
        std::cerr << "error: either --input or --generate is required\n";
        return kExitConfig;
    }

    try {
        return run(opt, generate->count() > 0);
    } catch (const raster::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitData;
    } catch (const raster::OutOfBoundsError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const raster::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const raster::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
