// Copyright 2026 The cvcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "cvcluster/cluster.h"
#include "cvcluster/surface_code.h"
#include "cvcluster/tomography.h"
#include "cvcluster/witnesses.h"
#include "report_io.h"

#ifndef CVCLUSTER_VERSION
#define CVCLUSTER_VERSION "0.0.0"
#endif

using namespace cvcluster;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double DEFAULT_DB = 6.0;
constexpr double DEFAULT_DETECT_DB = 13.0;

struct Options {
    std::string graph = "chain:20";
    std::vector<double> r;
    std::vector<double> db;
    std::optional<double> eta;
    uint64_t seed = 0;
    bool seed_given = false;
    std::vector<int> workers{1};
    std::string out;
    size_t samples = 10000;
    size_t shots = 1000;
    size_t top = 0;
    int max_iter = 5000;
    std::string cov_path;
    std::string kind = "Z";
    std::vector<double> magnitudes{-2, -1, 0, 1, 2};
    std::vector<std::string> syndromes;
    int layers = 2;
    int width = 2;
    int height = 2;
    std::vector<int> site;
    uint64_t limit = 20000;
};

/// Times named stages and records the files written.
class Recorder {
   public:
    Recorder(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir)) {
        start_ = std::chrono::steady_clock::now();
        started_at_ = std::time(nullptr);
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw Error(ErrorCode::IOError, "cannot create output directory " + dir_.string());
        }
    }

    template <typename F>
    auto stage(const std::string &name, F &&fn) {
        auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            stages_.push_back({{"name", name}, {"seconds", seconds_since(t0)}});
        } else {
            auto value = fn();
            stages_.push_back({{"name", name}, {"seconds", seconds_since(t0)}});
            return value;
        }
    }

    fs::path path(const std::string &file) {
        files_.push_back(file);
        return dir_ / file;
    }

    void finish(const json &config) {
        json outputs = json::array();
        for (const auto &f : files_) {
            std::string bytes = read_text_file(dir_ / f);
            outputs.push_back({{"file", f}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
        }
        char stamp[32];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started_at_));
        json manifest = {
            {"tool", "cvcluster"},
            {"version", CVCLUSTER_VERSION},
            {"command", command_},
            {"config", config},
            {"started_at", stamp},
            {"wall_seconds", seconds_since(start_)},
            {"stages", stages_},
            {"outputs", outputs},
        };
        write_json(dir_ / "manifest.json", manifest);
    }

   private:
    static double seconds_since(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    std::string command_;
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    std::time_t started_at_;
    json stages_ = json::array();
    std::vector<std::string> files_;
};

fs::path output_dir(const Options &o) {
    if (!o.out.empty()) {
        return o.out;
    }
    if (const char *env = std::getenv(OUTPUT_DIR_ENV); env != nullptr && *env != '\0') {
        return env;
    }
    return "cvcluster_out";
}

double resolve_eta(const Options &o, double fallback) {
    double eta = o.eta.value_or(fallback);
    if (!(eta >= 0 && eta <= 1)) {
        throw Error(ErrorCode::InvalidConfig, "--eta must lie in [0, 1]");
    }
    return eta;
}

int resolve_workers(const Options &o) {
    if (o.workers.size() != 1 || o.workers[0] < 1) {
        throw Error(ErrorCode::InvalidConfig, "--workers takes one positive count here");
    }
    return o.workers[0];
}

/// Per-mode squeezing in natural units.
std::vector<double> resolve_r(const Options &o, int modes, double default_db) {
    if (!o.r.empty() && !o.db.empty()) {
        throw Error(ErrorCode::InvalidConfig, "give squeezing as --r or --db, not both");
    }
    std::vector<double> rs;
    if (!o.r.empty()) {
        rs = o.r;
    } else if (!o.db.empty()) {
        for (double d : o.db) {
            rs.push_back(squeezing_r_from_db(d));
        }
    } else {
        rs.push_back(squeezing_r_from_db(default_db));
    }
    for (double r : rs) {
        if (!std::isfinite(r)) {
            throw Error(ErrorCode::InvalidConfig, "squeezing must be finite");
        }
    }
    if (rs.size() == 1) {
        rs.assign(modes, rs[0]);
    }
    if ((int)rs.size() != modes) {
        throw Error(ErrorCode::InvalidConfig, "need one squeezing value or one per mode");
    }
    return rs;
}

void require_seed(const Options &o) {
    if (!o.seed_given) {
        throw Error(ErrorCode::InvalidConfig, "--seed is required for sampling commands");
    }
}

bool is_epr_spec(const std::string &spec) {
    return spec.rfind("epr:", 0) == 0;
}

ClusterGraph load_graph(const std::string &spec) {
    if (spec.find(':') == std::string::npos && fs::exists(spec)) {
        return graph_from_json(read_text_file(spec));
    }
    return parse_graph_spec(spec);
}

/// Ideal state named by --graph: a cluster, or "epr:M" for M/2 two-mode squeezed pairs.
GaussianState load_state(const Options &o, double default_db) {
    if (is_epr_spec(o.graph)) {
        int m = 0;
        try {
            m = std::stoi(o.graph.substr(4));
        } catch (const std::exception &) {
            throw Error(ErrorCode::InvalidConfig, "bad EPR spec '" + o.graph + "'");
        }
        if (m < 2 || m % 2 != 0) {
            throw Error(ErrorCode::InvalidConfig, "EPR spec needs a positive even mode count");
        }
        auto rs = resolve_r(o, 1, default_db);
        return epr_pairs_state(m, rs[0]);
    }
    ClusterGraph g = load_graph(o.graph);
    auto rs = resolve_r(o, g.vertex_count(), default_db);
    return build_cluster(g, rs, Matrix::Identity(g.vertex_count(), g.vertex_count()));
}

Matrix measured_covariance(const Matrix &v, double eta) {
    return eta * v + (1 - eta) * Matrix::Identity(v.rows(), v.cols());
}

json squeezing_echo(const Options &o) {
    return {{"r", o.r}, {"db", o.db}};
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string hex_mask(uint64_t mask) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%llx", (unsigned long long)mask);
    return buf;
}

int cmd_build(const Options &o, std::ostream &out) {
    fs::path dir = output_dir(o);
    Recorder rec("build", dir);
    ClusterGraph g = load_graph(o.graph);
    double eta = resolve_eta(o, 1.0);
    auto rs = resolve_r(o, g.vertex_count(), DEFAULT_DB);
    GaussianState state = rec.stage("construct", [&] {
        return build_cluster(g, rs, Matrix::Identity(g.vertex_count(), g.vertex_count()));
    });
    auto report = rec.stage("nullifiers", [&] { return nullifier_report(state, g, eta); });
    rec.stage("write", [&] {
        write_matrix_csv(rec.path("covariance.csv"), state.cov());
        CsvRows rows;
        for (const auto &n : report) {
            rows.push_back(
                {std::to_string(n.vertex), format_double(n.variance), format_double(n.vacuum_variance),
                 format_double(n.ratio), n.squeezed ? "1" : "0"});
        }
        write_csv(rec.path("nullifiers.csv"), {"vertex", "variance", "vacuum_variance", "ratio", "squeezed"}, rows);
        write_text_file(rec.path("graph.json"), graph_to_json(g) + "\n");
    });
    rec.finish({{"graph", o.graph}, {"squeezing", squeezing_echo(o)}, {"eta", eta}});
    out << "build: " << g.vertex_count() << " modes, " << g.edges().size() << " edges -> " << dir.string() << "\n";
    return EXIT_OK;
}

int cmd_verify(const Options &o, std::ostream &out) {
    fs::path dir = output_dir(o);
    Recorder rec("verify", dir);
    int workers = resolve_workers(o);
    double eta = resolve_eta(o, 1.0);
    Matrix v = rec.stage("load", [&] {
        if (!o.cov_path.empty()) {
            Matrix m = read_matrix_csv(o.cov_path);
            if (m.rows() != m.cols() || m.rows() % 2 != 0 || !is_symmetric(m, 1e-10)) {
                throw Error(ErrorCode::BadMatrix, "covariance file must hold a symmetric matrix of even size");
            }
            return m;
        }
        return measured_covariance(load_state(o, DEFAULT_DB).cov(), eta);
    });
    WitnessReport report = rec.stage("sweep", [&] { return full_sweep(v, workers); });
    rec.stage("write", [&] {
        CsvRows rows;
        size_t n = o.top == 0 ? report.records.size() : std::min(o.top, report.records.size());
        for (size_t k = 0; k < n; k++) {
            const auto &r = report.records[k];
            rows.push_back({hex_mask(r.set_a), format_double(r.npt), format_double(r.steer_ab), format_double(r.steer_ba)});
        }
        write_csv(rec.path("witnesses.csv"), {"set_a", "npt", "steer_ab", "steer_ba"}, rows);
        size_t positive = 0;
        for (const auto &r : report.records) {
            positive += r.npt > 0;
        }
        json summary = {
            {"mode_count", report.mode_count},
            {"bipartitions", report.records.size()},
            {"rows_written", n},
            {"min_npt", report.min_npt},
            {"max_npt", report.records.empty() ? 0.0 : report.records.back().npt},
            {"npt_positive", positive},
            {"zero_steer_ab", report.zero_steer_ab},
            {"zero_steer_ba", report.zero_steer_ba},
            {"zero_steering_threshold", ZERO_STEERING_THRESHOLD},
        };
        write_json(rec.path("witness_summary.json"), summary);
    });
    json config = {{"workers", workers}, {"top", o.top}};
    if (o.cov_path.empty()) {
        config["graph"] = o.graph;
        config["squeezing"] = squeezing_echo(o);
        config["eta"] = eta;
    } else {
        config["cov"] = o.cov_path;
    }
    rec.finish(config);
    out << "verify: " << report.records.size() << " bipartitions, min npt " << format_double(report.min_npt)
        << ", zero steering a->b " << report.zero_steer_ab << ", b->a " << report.zero_steer_ba << "\n";
    return EXIT_OK;
}

int cmd_tomo(const Options &o, std::ostream &out) {
    require_seed(o);
    fs::path dir = output_dir(o);
    Recorder rec("tomo", dir);
    int workers = resolve_workers(o);
    double eta = resolve_eta(o, DEFAULT_EFFICIENCY);
    if (o.samples < 2) {
        throw Error(ErrorCode::InvalidConfig, "--samples must be at least 2");
    }
    GaussianState state = load_state(o, DEFAULT_DB);
    Matrix target = measured_covariance(state.cov(), eta);
    auto settings = informationally_complete_settings(state.mode_count());
    TomographyDataset data =
        rec.stage("acquire", [&] { return acquire(state, settings, o.samples, eta, o.seed, workers); });
    Matrix linear = rec.stage("linear_inversion", [&] { return linear_inversion(data); });
    MleOptions mle_options;
    mle_options.max_iter = o.max_iter;
    ReconstructionResult mle = rec.stage("mle", [&] { return mle_reconstruct(data, mle_options); });
    rec.stage("write", [&] {
        json js = json::array();
        for (size_t k = 0; k < settings.size(); k++) {
            json u = json::array();
            for (Eigen::Index j = 0; j < settings[k].mode_vector.size(); j++) {
                u.push_back({settings[k].mode_vector[j].real(), settings[k].mode_vector[j].imag()});
            }
            js.push_back({{"id", k}, {"mode_vector", u}, {"phase", settings[k].phase}});
        }
        write_json(rec.path("settings.json"), {{"mode_count", state.mode_count()}, {"settings", js}});
        CsvRows rows;
        for (size_t k = 0; k < data.records.size(); k++) {
            const auto &r = data.records[k];
            rows.push_back({std::to_string(k), std::to_string(r.samples), format_double(r.variance), format_double(r.mean)});
        }
        write_csv(rec.path("dataset.csv"), {"setting_id", "samples", "variance", "mean"}, rows);
        write_matrix_csv(rec.path("covariance_target.csv"), target);
        write_matrix_csv(rec.path("covariance_linear.csv"), linear);
        write_matrix_csv(rec.path("covariance_mle.csv"), mle.covariance);
        double linear_nu = 0;
        bool linear_pd = true;
        try {
            linear_nu = symplectic_eigenvalues(linear).min();
        } catch (const Error &) {
            linear_pd = false;
        }
        json meta = {
            {"iterations", mle.iterations},
            {"objective", mle.objective},
            {"min_symplectic_eigenvalue", mle.min_symplectic_eigenvalue},
            {"physicality_residual", mle.physicality_residual},
            {"converged", mle.converged},
            {"relative_error_mle", (mle.covariance - target).norm() / target.norm()},
            {"relative_error_linear", (linear - target).norm() / target.norm()},
            {"linear_positive_definite", linear_pd},
            {"linear_min_symplectic_eigenvalue", linear_pd ? json(linear_nu) : json(nullptr)},
            {"linear_physical", linear_pd && linear_nu >= 1 - 1e-6},
        };
        write_json(rec.path("reconstruction.json"), meta);
    });
    rec.finish(
        {{"graph", o.graph},
         {"squeezing", squeezing_echo(o)},
         {"eta", eta},
         {"samples", o.samples},
         {"seed", o.seed},
         {"workers", workers},
         {"max_iter", o.max_iter}});
    out << "tomo: " << settings.size() << " settings, MLE relative error "
        << format_double((mle.covariance - target).norm() / target.norm()) << ", nu_min "
        << format_double(mle.min_symplectic_eigenvalue) << "\n";
    return EXIT_OK;
}

int cmd_detect(const Options &o, std::ostream &out) {
    require_seed(o);
    fs::path dir = output_dir(o);
    Recorder rec("detect", dir);
    DetectionConfig cfg;
    if (o.kind == "Z" || o.kind == "z") {
        cfg.kind = ErrorKind::Z;
    } else if (o.kind == "X" || o.kind == "x") {
        cfg.kind = ErrorKind::X;
    } else {
        throw Error(ErrorCode::InvalidConfig, "--kind must be Z or X");
    }
    cfg.magnitudes = o.magnitudes;
    cfg.syndromes = o.syndromes;
    cfg.layers = o.layers;
    cfg.width = o.width;
    cfg.height = o.height;
    cfg.r = resolve_r(o, 1, DEFAULT_DETECT_DB)[0];
    cfg.efficiency = resolve_eta(o, DEFAULT_EFFICIENCY);
    cfg.shots = o.shots;
    cfg.seed = o.seed;
    cfg.workers = resolve_workers(o);
    LayeredLattice lattice = layered_lattice(cfg.layers, cfg.width, cfg.height);
    if (!o.site.empty()) {
        if (o.site.size() != 3) {
            throw Error(ErrorCode::InvalidConfig, "--site takes x,y,z");
        }
        int idx = lattice.index_of({o.site[0], o.site[1], o.site[2]});
        if (idx < 0) {
            throw Error(ErrorCode::InvalidConfig, "--site is not a lattice site");
        }
        cfg.error_site = idx;
    }
    DetectionRun run = rec.stage("sweep", [&] { return detection_sweep(cfg); });
    bool success = true;
    size_t adjacent = 0;
    rec.stage("write", [&] {
        CsvRows rows;
        for (const auto &p : run.points) {
            rows.push_back(
                {format_double(p.magnitude), p.label, format_double(p.sample_mean), format_double(p.stderr_mean),
                 format_double(p.exact_mean)});
        }
        write_csv(rec.path("detection.csv"), {"magnitude", "syndrome", "mean", "stderr", "exact_mean"}, rows);
        json fits = json::array();
        for (const auto &f : run.fits) {
            fits.push_back({
                {"syndrome", f.label},
                {"role", f.role},
                {"slope", f.slope},
                {"stderr", finite_or_null(f.slope_stderr)},
                {"intercept", f.intercept},
                {"intercept_stderr", finite_or_null(f.intercept_stderr)},
                {"exact_slope", f.exact_slope},
                {"exact_residual", f.exact_residual},
                {"detected", f.detected},
            });
            if (f.role == "adjacent") {
                adjacent++;
                success = success && f.detected;
            } else if (f.role == "far") {
                success = success && !f.detected;
            }
        }
        success = success && adjacent > 0;
        json summary = {
            {"kind", o.kind == "x" || o.kind == "X" ? "X" : "Z"},
            {"error_site", {run.error_point.x, run.error_point.y, run.error_point.z}},
            {"r", cfg.r},
            {"eta", cfg.efficiency},
            {"shots", cfg.shots},
            {"fits", fits},
            {"detection_success", success},
        };
        write_json(rec.path("detection_fit.json"), summary);
    });
    rec.finish(
        {{"kind", o.kind},
         {"magnitudes", o.magnitudes},
         {"syndromes", o.syndromes},
         {"layers", o.layers},
         {"width", o.width},
         {"height", o.height},
         {"squeezing", squeezing_echo(o)},
         {"eta", cfg.efficiency},
         {"shots", o.shots},
         {"seed", o.seed},
         {"site", o.site},
         {"workers", cfg.workers}});
    out << "detect: " << run.fits.size() << " syndromes, detection " << (success ? "succeeded" : "failed") << "\n";
    return EXIT_OK;
}

int cmd_bench(const Options &o, std::ostream &out) {
    fs::path dir = output_dir(o);
    Recorder rec("bench", dir);
    Matrix v = load_state(o, DEFAULT_DB).cov();
    json rows = json::array();
    double base = 0;
    for (int w : o.workers) {
        if (w < 1) {
            throw Error(ErrorCode::InvalidConfig, "worker counts must be positive");
        }
        auto t0 = std::chrono::steady_clock::now();
        WitnessReport report = full_sweep(v, w, o.limit);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double rate = (double)report.records.size() / secs;
        if (base == 0) {
            base = rate;
        }
        rows.push_back(
            {{"workers", w}, {"bipartitions", report.records.size()}, {"seconds", secs}, {"per_second", rate},
             {"speedup", rate / base}});
        out << "bench: workers=" << w << " bipartitions=" << report.records.size() << " seconds=" << secs
            << " per_second=" << rate << " speedup=" << rate / base << "\n";
    }
    write_json(
        rec.path("bench.json"),
        {{"graph", o.graph}, {"hardware_threads", std::thread::hardware_concurrency()}, {"runs", rows}});
    rec.finish({{"graph", o.graph}, {"squeezing", squeezing_echo(o)}, {"workers", o.workers}, {"limit", o.limit}});
    return EXIT_OK;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::IOError:
        case ErrorCode::BadMatrix:
            return EXIT_IO;
        case ErrorCode::NonSymmetric:
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::ConvergenceFailure:
        case ErrorCode::SingularBlock:
        case ErrorCode::DegenerateVariance:
        case ErrorCode::RankDeficient:
            return EXIT_NUMERICAL;
        default:
            return EXIT_INVALID_CONFIG;
    }
}

void add_common(CLI::App *cmd, Options &o, bool squeezing, bool sampling) {
    cmd->add_option("--out", o.out, "Output directory (default: $CVCLUSTER_OUT or ./cvcluster_out)");
    if (squeezing) {
        auto *r = cmd->add_option("--r", o.r, "Squeezing in natural units, one value or one per mode")->delimiter(',');
        auto *db = cmd->add_option("--db", o.db, "Squeezing in dB, one value or one per mode")->delimiter(',');
        r->excludes(db);
    }
    cmd->add_option("--eta", o.eta, "Detection efficiency in [0, 1]");
    if (sampling) {
        cmd->add_option("--seed", o.seed, "Random seed")->each([&o](const std::string &) { o.seed_given = true; });
    }
}

}  // namespace

std::vector<std::string> cvcluster::data_files_for(const std::string &command) {
    if (command == "build") {
        return {"covariance.csv", "nullifiers.csv", "graph.json"};
    }
    if (command == "verify") {
        return {"witnesses.csv", "witness_summary.json"};
    }
    if (command == "tomo") {
        return {"settings.json",          "dataset.csv",         "covariance_target.csv",
                "covariance_linear.csv", "covariance_mle.csv", "reconstruction.json"};
    }
    if (command == "detect") {
        return {"detection.csv", "detection_fit.json"};
    }
    return {};
}

int cvcluster::run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    Options o;
    CLI::App app{"Simulate, verify and reconstruct Gaussian cluster states"};
    app.require_subcommand(1);

    auto *build = app.add_subcommand("build", "Construct a cluster covariance and its nullifier report");
    build->add_option("--graph", o.graph, "chain:N, grid:RxC, rhg:unit, or a graph JSON file");
    add_common(build, o, true, false);

    auto *verify = app.add_subcommand("verify", "Evaluate NPT and steering over every bipartition");
    verify->add_option("--cov", o.cov_path, "Covariance CSV to verify");
    verify->add_option("--graph", o.graph, "Ideal state to verify when no --cov is given (also epr:M)");
    verify->add_option("--workers", o.workers, "Worker threads")->expected(1);
    verify->add_option("--top", o.top, "Only write the K smallest-NPT rows");
    add_common(verify, o, true, false);

    auto *tomo = app.add_subcommand("tomo", "Simulate homodyne tomography and reconstruct the covariance");
    tomo->add_option("--graph", o.graph, "State to measure: chain:N, grid:RxC, rhg:unit, epr:M, or a graph file");
    tomo->add_option("--samples", o.samples, "Samples per setting");
    tomo->add_option("--workers", o.workers, "Worker threads for acquisition")->expected(1);
    tomo->add_option("--max-iter", o.max_iter, "Iteration cap for the likelihood maximization");
    add_common(tomo, o, true, true);

    auto *detect = app.add_subcommand("detect", "Sweep an injected error and fit syndrome responses");
    detect->add_option("--kind", o.kind, "Z or X");
    detect->add_option("--magnitudes", o.magnitudes, "Error magnitudes")->delimiter(',');
    detect->add_option("--syndromes", o.syndromes, "Readout syndrome labels (default: all)")->delimiter(',');
    detect->add_option("--layers", o.layers, "Stacked cells");
    detect->add_option("--width", o.width, "Footprint width in cells");
    detect->add_option("--height", o.height, "Footprint height in cells");
    detect->add_option("--site", o.site, "Error site as x,y,z")->delimiter(',');
    detect->add_option("--shots", o.shots, "Shots per sweep point");
    detect->add_option("--workers", o.workers, "Worker threads")->expected(1);
    add_common(detect, o, true, true);

    auto *bench = app.add_subcommand("bench", "Time the bipartition sweep");
    bench->add_option("--graph", o.graph, "State to sweep");
    bench->add_option("--workers", o.workers, "Worker counts to compare")->delimiter(',');
    bench->add_option("--limit", o.limit, "Bipartitions per run (0 = all)");
    add_common(bench, o, true, false);

    std::vector<const char *> argv{"cvcluster"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse((int)argv.size(), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return EXIT_OK;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return EXIT_OK;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_INVALID_CONFIG;
    }

    try {
        if (build->parsed()) {
            return cmd_build(o, out);
        }
        if (verify->parsed()) {
            return cmd_verify(o, out);
        }
        if (tomo->parsed()) {
            return cmd_tomo(o, out);
        }
        if (detect->parsed()) {
            return cmd_detect(o, out);
        }
        if (bench->parsed()) {
            return cmd_bench(o, out);
        }
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_IO;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return EXIT_NUMERICAL;
    }
    return EXIT_INVALID_CONFIG;
}
