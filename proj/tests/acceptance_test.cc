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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "cvcluster/cluster.h"
#include "cvcluster/surface_code.h"
#include "cvcluster/tomography.h"
#include "cvcluster/witnesses.h"
#include "report_io.h"

using namespace cvcluster;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::vector<std::pair<std::string, ClusterGraph>> paper_graphs() {
    return {{"chain:20", chain_graph(20)}, {"grid:4x5", grid_graph(4, 5)}, {"rhg:unit", rhg_unit_cell()}};
}

std::string fmt(const char *format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, value);
    return buf;
}

Outcome nullifier_ratios() {
    bool ok = true;
    double worst_err = 0;
    double worst_time = 0;
    for (const auto &[name, g] : paper_graphs()) {
        auto start = Clock::now();
        for (double r : {0.3, 0.7, 1.2}) {
            auto report = nullifier_report(build_cluster(g, r), g);
            for (const auto &rec : report) {
                worst_err = std::max(worst_err, std::abs(rec.ratio - std::exp(-2 * r)));
            }
        }
        double t = seconds_since(start) / 3;
        worst_time = std::max(worst_time, t);
    }
    ok = worst_err < 1e-10 && worst_time < 1;
    return {ok, "max |ratio - e^{-2r}| = " + fmt("%.2e", worst_err) + ", slowest graph " + fmt("%.3f", worst_time) + " s"};
}

Outcome adjacency_visibility() {
    const double r = 0.7;
    const double tol = 1e-10;
    bool all = true;
    std::string detail;
    for (const auto &[name, g] : paper_graphs()) {
        int m = g.vertex_count();
        Matrix a = g.adjacency();
        Matrix xp = build_cluster(g, r).cov().topRightCorner(m, m);
        int mismatched = 0;
        int positive_off_graph = 0;
        for (int i = 0; i < m; i++) {
            for (int j = 0; j < m; j++) {
                bool positive = xp(i, j) > tol;
                bool edge = a(i, j) == 1;
                if (positive != edge) {
                    mismatched++;
                    positive_off_graph += positive && !edge;
                }
            }
        }
        // Structural identity that holds regardless: X (I + G^2) = 2 sinh(2r) G.
        double identity = (xp * (Matrix::Identity(m, m) + a * a) - 2 * std::sinh(2 * r) * a).norm();
        bool ok = mismatched == 0;
        all = all && ok;
        detail += name + (ok ? " exact" : " " + std::to_string(mismatched) + " mismatched entries (" +
                                              std::to_string(positive_off_graph) + " positive off-graph)") +
                  ", identity residual " + fmt("%.1e", identity) + "; ";
    }
    return {all, detail};
}

Outcome witness_sweep() {
    int workers = 8;
    auto start = Clock::now();
    auto chain = full_sweep(build_cluster(chain_graph(20), 1.0).cov(), workers);
    double chain_time = seconds_since(start);
    size_t npt_positive = 0;
    size_t steer_positive = 0;
    for (const auto &rec : chain.records) {
        npt_positive += rec.npt > 0;
        steer_positive += rec.steer_ab > 0;
    }
    auto rhg = full_sweep(build_cluster(rhg_unit_cell(), 1.0).cov(), workers);
    bool ok = chain.records.size() == 524287 && npt_positive == chain.records.size() &&
              steer_positive == chain.records.size() && chain_time < 600 && rhg.records.size() == 131071;
    std::ostringstream d;
    d << "chain:20 " << chain.records.size() << " bipartitions, npt>0 " << npt_positive << ", steer A->B>0 "
      << steer_positive << ", " << fmt("%.1f", chain_time) << " s on " << workers << " workers; rhg:unit "
      << rhg.records.size() << " bipartitions";
    return {ok, d.str()};
}

Outcome epr_criteria() {
    double worst = 0;
    for (double r : {0.1, 0.3, 0.5, 1.0, 1.5}) {
        Matrix v = epr_pairs_state(2, r).cov();
        worst = std::max(worst, std::abs(duan_value(v, 0, 1) - std::exp(-2 * r)));
        worst = std::max(worst, std::abs(epr_product(v, 0, 1) - 1 / std::pow(std::cosh(2 * r), 2)));
    }
    const double eta = 0.8935;
    double max_lossy = 0;
    for (double r : {0.35, 0.5, 0.75, 1.0, 1.5, 2.0}) {
        Matrix v = epr_pairs_state(2, r).cov();
        Matrix lossy = eta * v + (1 - eta) * Matrix::Identity(4, 4);
        max_lossy = std::max({max_lossy, duan_value(lossy, 0, 1), epr_product(lossy, 0, 1)});
    }
    bool ok = worst < 1e-10 && max_lossy < 1;
    return {ok, "max oracle deviation " + fmt("%.1e", worst) + ", largest lossy criterion value for r >= 0.35 " +
                    fmt("%.4f", max_lossy)};
}

Outcome tomography_consistency() {
    auto state = build_cluster(chain_graph(4), 0.5);
    Matrix v = state.cov();
    auto settings = informationally_complete_settings(4);
    std::vector<double> errors;
    double worst_nu = INFINITY;
    for (uint64_t seed = 0; seed < 10; seed++) {
        auto result = mle_reconstruct(acquire(state, settings, 10000, 1.0, seed));
        errors.push_back((result.covariance - v).norm());
        worst_nu = std::min(worst_nu, result.min_symplectic_eigenvalue);
    }
    std::sort(errors.begin(), errors.end());
    double median = 0.5 * (errors[4] + errors[5]);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0, 1);
    auto data = acquire(state, settings, 10000, 1.0, 100);
    double worst_rel = 0;
    for (int point = 0; point < 20; point++) {
        Matrix e(8, 8);
        for (int i = 0; i < 8; i++) {
            for (int j = 0; j < 8; j++) {
                e(i, j) = gauss(rng);
            }
        }
        Matrix at = v + 0.2 * (e + e.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(at);
        at += std::max(0.0, 0.5 - es.eigenvalues().minCoeff()) * Matrix::Identity(8, 8);
        Matrix dir(8, 8);
        for (int i = 0; i < 8; i++) {
            for (int j = 0; j < 8; j++) {
                dir(i, j) = gauss(rng);
            }
        }
        dir = 0.5 * (dir + dir.transpose());
        double h = 1e-5;
        double fd = (neg_log_likelihood(data, at + h * dir) - neg_log_likelihood(data, at - h * dir)) / (2 * h);
        double analytic = (neg_log_likelihood_gradient(data, at).array() * dir.array()).sum();
        worst_rel = std::max(worst_rel, std::abs(analytic - fd) / std::abs(fd));
    }
    bool ok = median < 0.1 * v.norm() && worst_nu >= 1 - 1e-6 && worst_rel < 1e-5;
    return {ok, "median error " + fmt("%.4f", median) + " vs bound " + fmt("%.4f", 0.1 * v.norm()) + ", min nu " +
                    fmt("%.8f", worst_nu) + ", worst gradient relative error " + fmt("%.1e", worst_rel)};
}

Outcome error_detection() {
    DetectionConfig z;
    z.kind = ErrorKind::Z;
    z.seed = 20260101;
    auto zrun = detection_sweep(z);
    DetectionConfig x;
    x.kind = ErrorKind::X;
    x.seed = 20260102;
    auto xrun = detection_sweep(x);

    bool ok = true;
    int adjacent_ok = 0;
    int adjacent = 0;
    double worst_residual = 0;
    std::string far_detail;
    for (const auto &fit : zrun.fits) {
        worst_residual = std::max(worst_residual, fit.exact_residual);
        if (fit.role == "adjacent") {
            adjacent++;
            bool match = std::abs(fit.slope - fit.exact_slope) < 3 * fit.slope_stderr && fit.detected;
            adjacent_ok += match;
            ok = ok && match;
        } else if (fit.role == "far") {
            ok = ok && !fit.detected;
            far_detail = fit.label + " slope " + fmt("%.4f", fit.slope) + " +- " + fmt("%.4f", fit.slope_stderr);
        }
    }
    int plaquettes_quiet = 0;
    int plaquettes = 0;
    for (const auto &fit : xrun.fits) {
        worst_residual = std::max(worst_residual, fit.exact_residual);
        if (fit.label[0] == 'f') {
            plaquettes++;
            plaquettes_quiet += !fit.detected;
        }
    }
    ok = ok && adjacent >= 1 && plaquettes_quiet == plaquettes && worst_residual < 1e-10;
    std::ostringstream d;
    d << "adjacent plaquettes matching oracle " << adjacent_ok << "/" << adjacent << ", far " << far_detail
      << ", X-sweep plaquettes quiet " << plaquettes_quiet << "/" << plaquettes << ", analytic fit residual "
      << fmt("%.1e", worst_residual);
    return {ok, d.str()};
}

double worst_commutator(const std::vector<Vector> &forms, int modes) {
    Matrix omega = symplectic_form(modes);
    double worst = 0;
    for (const auto &a : forms) {
        Vector wa = omega.transpose() * a;
        for (const auto &b : forms) {
            worst = std::max(worst, std::abs(wa.dot(b)));
        }
    }
    return worst;
}

Outcome commutation_suite() {
    double worst = 0;
    size_t pairs = 0;
    for (auto lattice : {layered_lattice(1, 1, 1), layered_lattice(2)}) {
        std::vector<Vector> syndromes;
        for (int z = 0; z <= lattice.readout_layer(); z += 2) {
            for (const auto &s : layer_syndromes(lattice, z)) {
                syndromes.push_back(s.full_form(lattice));
            }
        }
        std::vector<Vector> nulls;
        for (const auto &f : nullifiers(lattice.graph)) {
            nulls.push_back(f.coeffs);
        }
        worst = std::max(worst, worst_commutator(syndromes, lattice.site_count()));
        worst = std::max(worst, worst_commutator(nulls, lattice.site_count()));
        pairs += syndromes.size() * syndromes.size() + nulls.size() * nulls.size();
    }
    std::vector<Vector> rhg;
    for (const auto &f : nullifiers(rhg_unit_cell())) {
        rhg.push_back(f.coeffs);
    }
    worst = std::max(worst, worst_commutator(rhg, 18));
    pairs += rhg.size() * rhg.size();
    return {worst < 1e-12, std::to_string(pairs) + " ordered pairs, max |v^T Omega w| = " + fmt("%.1e", worst)};
}

Outcome determinism() {
    fs::path root = fs::temp_directory_path() / "cvcluster_acceptance_determinism";
    fs::remove_all(root);
    std::vector<std::vector<std::string>> commands{
        {"build", "--graph", "rhg:unit", "--db", "6"},
        {"verify", "--graph", "grid:3x4", "--workers", "4"},
        {"tomo", "--graph", "epr:2", "--seed", "17", "--samples", "5000"},
        {"detect", "--kind", "Z", "--seed", "17", "--shots", "500", "--workers", "2"},
    };
    bool ok = true;
    std::string detail;
    for (const auto &cmd : commands) {
        std::ostringstream out, err;
        std::vector<std::string> a = cmd, b = cmd;
        a.insert(a.end(), {"--out", (root / (cmd[0] + "_a")).string()});
        b.insert(b.end(), {"--out", (root / (cmd[0] + "_b")).string()});
        int ca = run_cli(a, out, err);
        int cb = run_cli(b, out, err);
        bool same = ca == EXIT_OK && cb == EXIT_OK;
        size_t files = 0;
        for (const auto &file : data_files_for(cmd[0])) {
            if (!same) {
                break;
            }
            same = read_text_file(root / (cmd[0] + "_a") / file) == read_text_file(root / (cmd[0] + "_b") / file);
            files++;
        }
        ok = ok && same;
        detail += cmd[0] + (same ? " identical (" + std::to_string(files) + " files); " : " DIFFERS; ");
    }
    fs::remove_all(root);
    return {ok, detail};
}

}  // namespace

int main() {
    struct Criterion {
        const char *name;
        Outcome (*check)();
    };
    const Criterion criteria[] = {
        {"1 cluster nullifier ratios", nullifier_ratios},
        {"2 adjacency sign support", adjacency_visibility},
        {"3 witness sweep scale", witness_sweep},
        {"4 EPR criteria", epr_criteria},
        {"5 tomography consistency", tomography_consistency},
        {"6 error detection", error_detection},
        {"7 commutation suite", commutation_suite},
        {"8 determinism", determinism},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        Outcome o;
        auto start = Clock::now();
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf(
            "[%s] criterion %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", (int)std::size(criteria) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
