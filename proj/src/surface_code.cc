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

#include "cvcluster/surface_code.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>

using namespace cvcluster;

const char *cvcluster::role_name(ModeRole role) {
    switch (role) {
        case ModeRole::Data:
            return "data";
        case ModeRole::Grey:
            return "grey";
        case ModeRole::Ancilla:
            return "ancilla";
        case ModeRole::Bridge:
            return "bridge";
        case ModeRole::Column:
            return "column";
    }
    return "unknown";
}

int LayeredLattice::index_of(const LatticePoint &p) const {
    // Sites are sorted by (z, y, x).
    auto key = [](const LatticePoint &a) { return std::tuple(a.z, a.y, a.x); };
    auto it = std::lower_bound(
        sites.begin(), sites.end(), p, [&](const LatticePoint &a, const LatticePoint &b) { return key(a) < key(b); });
    if (it != sites.end() && *it == p) {
        return (int)(it - sites.begin());
    }
    return -1;
}

static ModeRole classify(const LatticePoint &p) {
    int odd_xy = (p.x & 1) + (p.y & 1);
    if (p.z % 2 == 0) {
        if (odd_xy == 2) {
            return p.z == 0 ? ModeRole::Grey : ModeRole::Ancilla;
        }
        return ModeRole::Data;
    }
    return odd_xy == 1 ? ModeRole::Bridge : ModeRole::Column;
}

LayeredLattice cvcluster::layered_lattice(int layers, int width, int height) {
    if (layers < 1 || width < 1 || height < 1) {
        throw Error(ErrorCode::TooSmall, "lattice needs at least one cell in every direction");
    }
    std::vector<LatticePoint> sites;
    for (int z = 0; z <= 2 * layers; z++) {
        for (int y = 0; y <= 2 * height; y++) {
            for (int x = 0; x <= 2 * width; x++) {
                int odd = (x & 1) + (y & 1) + (z & 1);
                if (odd == 1 || odd == 2) {
                    sites.push_back({x, y, z});
                }
            }
        }
    }
    ClusterGraph graph = lattice_graph(sites);
    LayeredLattice out{width, height, layers, std::move(sites), {}, std::move(graph)};
    for (const auto &p : out.sites) {
        out.roles.push_back(classify(p));
    }
    return out;
}

int LayeredState::mode_of(int site) const {
    auto it = std::find(sites.begin(), sites.end(), site);
    return it == sites.end() ? -1 : (int)(it - sites.begin());
}

LayeredState cvcluster::build_layered_state(const LayeredLattice &lattice, double r, double efficiency) {
    if (lattice.layers < 2) {
        throw Error(ErrorCode::TooSmall, "layered state needs at least two cells");
    }
    if (!(efficiency >= 0 && efficiency <= 1)) {
        throw Error(ErrorCode::InvalidConfig, "efficiency must lie in [0, 1]");
    }
    std::vector<int> sites(lattice.site_count());
    for (int k = 0; k < lattice.site_count(); k++) {
        sites[k] = k;
    }
    return {build_cluster(lattice.graph, r), std::move(sites), efficiency};
}

Vector SyndromeOperator::full_form(const LayeredLattice &lattice) const {
    int n = lattice.site_count();
    Vector v = Vector::Zero(2 * n);
    int offset = kind == SyndromeKind::Plaquette ? n : 0;
    for (auto [site, sign] : terms) {
        v[site + offset] = sign;
    }
    return v;
}

QuadratureForm SyndromeOperator::form_on(const LayeredState &state) const {
    int n = state.state.mode_count();
    Vector v = Vector::Zero(2 * n);
    int offset = kind == SyndromeKind::Plaquette ? n : 0;
    for (auto [site, sign] : terms) {
        int m = state.mode_of(site);
        if (m < 0) {
            throw Error(ErrorCode::UnknownSyndrome, "syndrome " + label + " touches a measured mode");
        }
        v[m + offset] = sign;
    }
    return QuadratureForm(v);
}

std::vector<SyndromeOperator> cvcluster::layer_syndromes(const LayeredLattice &lattice, int z) {
    if (z < 0 || z > 2 * lattice.layers || z % 2 != 0) {
        throw Error(ErrorCode::IndexOutOfRange, "syndromes live on even layers");
    }
    std::vector<SyndromeOperator> plaquettes;
    std::vector<SyndromeOperator> stars;
    for (int y = 0; y <= 2 * lattice.height; y++) {
        for (int x = 0; x <= 2 * lattice.width; x++) {
            if (x % 2 == 0 && y % 2 == 0) {
                SyndromeOperator f{"f" + std::to_string(plaquettes.size() + 1), SyndromeKind::Plaquette, {x, y, z}, {}};
                const std::pair<LatticePoint, double> nbrs[] = {
                    {{x, y - 1, z}, -1}, {{x - 1, y, z}, 1}, {{x + 1, y, z}, 1}, {{x, y + 1, z}, -1}};
                for (const auto &[p, sign] : nbrs) {
                    int k = lattice.index_of(p);
                    if (k >= 0) {
                        f.terms.emplace_back(k, sign);
                    }
                }
                plaquettes.push_back(std::move(f));
            } else if (x % 2 == 1 && y % 2 == 1) {
                SyndromeOperator s{"s" + std::to_string(stars.size() + 1), SyndromeKind::Star, {x, y, z}, {}};
                const LatticePoint nbrs[] = {{x, y - 1, z}, {x - 1, y, z}, {x + 1, y, z}, {x, y + 1, z}};
                for (const auto &p : nbrs) {
                    s.terms.emplace_back(lattice.index_of(p), 1.0);
                }
                stars.push_back(std::move(s));
            }
        }
    }
    plaquettes.insert(plaquettes.end(), stars.begin(), stars.end());
    return plaquettes;
}

const SyndromeOperator &cvcluster::find_syndrome(
    const std::vector<SyndromeOperator> &syndromes, const std::string &label) {
    for (const auto &s : syndromes) {
        if (s.label == label) {
            return s;
        }
    }
    throw Error(ErrorCode::UnknownSyndrome, "no syndrome labeled '" + label + "'");
}

LayeredState cvcluster::teleport_layer(const LayeredState &state, const std::vector<int> &sites) {
    LayeredState out = state;
    for (int site : sites) {
        int m = out.mode_of(site);
        if (m < 0) {
            throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(site) + " is not present");
        }
        out.state = homodyne_condition(out.state, QuadratureForm::p(out.state.mode_count(), m), 0.0);
        out.sites.erase(out.sites.begin() + m);
    }
    return out;
}

static std::vector<int> sites_where(const LayeredLattice &lattice, int z, bool (*pred)(ModeRole)) {
    // Site order is already (z, y, x).
    std::vector<int> out;
    for (int k = 0; k < lattice.site_count(); k++) {
        if (lattice.sites[k].z == z && pred(lattice.roles[k])) {
            out.push_back(k);
        }
    }
    return out;
}

LayeredState cvcluster::prepare_ground(const LayeredState &state, const LayeredLattice &lattice) {
    return teleport_layer(state, sites_where(lattice, 0, [](ModeRole r) { return r == ModeRole::Grey; }));
}

LayeredState cvcluster::inject_error(const LayeredState &state, const ErrorEvent &event) {
    if (!std::isfinite(event.magnitude)) {
        throw Error(ErrorCode::InvalidConfig, "error magnitude must be finite");
    }
    int m = state.mode_of(event.site);
    if (m < 0) {
        throw Error(ErrorCode::IndexOutOfRange, "error site " + std::to_string(event.site) + " is not present");
    }
    LayeredState out = state;
    if (event.kind == ErrorKind::Z) {
        out.state = displace(state.state, m, 0, event.magnitude);
    } else {
        out.state = displace(state.state, m, event.magnitude, 0);
    }
    return out;
}

std::vector<std::vector<int>> cvcluster::teleport_schedule(const LayeredLattice &lattice) {
    std::vector<std::vector<int>> out;
    int bottom = lattice.readout_layer();
    out.push_back(sites_where(lattice, 0, [](ModeRole r) { return r == ModeRole::Data; }));
    for (int z = 1; z < bottom; z++) {
        if (z % 2 == 1) {
            out.push_back(sites_where(lattice, z, [](ModeRole r) { return r == ModeRole::Bridge; }));
        } else {
            out.push_back(sites_where(
                lattice, z, [](ModeRole r) { return r == ModeRole::Ancilla || r == ModeRole::Data; }));
        }
    }
    out.push_back(sites_where(lattice, bottom, [](ModeRole r) { return r == ModeRole::Ancilla; }));
    return out;
}

LayeredState cvcluster::run_pipeline(
    const LayeredLattice &lattice, double r, double efficiency, const std::optional<ErrorEvent> &error) {
    LayeredState s = prepare_ground(build_layered_state(lattice, r, efficiency), lattice);
    if (error.has_value()) {
        s = inject_error(s, *error);
    }
    for (const auto &step : teleport_schedule(lattice)) {
        s = teleport_layer(s, step);
    }
    return s;
}

static void check_data_site(const LayeredLattice &lattice, int site) {
    if (site < 0 || site >= lattice.site_count()) {
        throw Error(ErrorCode::IndexOutOfRange, "error site out of range");
    }
    if (lattice.roles[site] != ModeRole::Data) {
        throw Error(ErrorCode::InvalidConfig, "errors are injected on data modes");
    }
}

int cvcluster::default_error_site(const LayeredLattice &lattice, ErrorKind kind) {
    int z = kind == ErrorKind::Z ? 0 : lattice.readout_layer();
    return lattice.index_of({2, 1, z});
}

/// Readout-layer syndrome centers next to the error's edge.
static std::vector<LatticePoint> adjacent_centers(const LayeredLattice &lattice, ErrorKind kind, int site) {
    check_data_site(lattice, site);
    const LatticePoint &e = lattice.sites[site];
    int z = lattice.readout_layer();
    // An x displacement on a mode that is later measured in p never reaches the readout.
    if (kind == ErrorKind::X && e.z != z) {
        return {};
    }
    bool along_x = e.x % 2 == 1;
    bool endpoints = kind == ErrorKind::Z;
    std::vector<LatticePoint> out;
    if (along_x == endpoints) {
        out = {{e.x - 1, e.y, z}, {e.x + 1, e.y, z}};
    } else {
        out = {{e.x, e.y - 1, z}, {e.x, e.y + 1, z}};
    }
    std::erase_if(out, [&](const LatticePoint &p) {
        return p.x < 0 || p.y < 0 || p.x > 2 * lattice.width || p.y > 2 * lattice.height;
    });
    return out;
}

std::vector<std::string> cvcluster::adjacent_syndromes(const LayeredLattice &lattice, ErrorKind kind, int site) {
    auto centers = adjacent_centers(lattice, kind, site);
    std::vector<std::string> out;
    for (const auto &s : layer_syndromes(lattice, lattice.readout_layer())) {
        if (std::find(centers.begin(), centers.end(), s.center) != centers.end()) {
            out.push_back(s.label);
        }
    }
    return out;
}

std::string cvcluster::far_syndrome(const LayeredLattice &lattice, ErrorKind kind, int site) {
    check_data_site(lattice, site);
    const LatticePoint &e = lattice.sites[site];
    SyndromeKind want = kind == ErrorKind::Z ? SyndromeKind::Plaquette : SyndromeKind::Star;
    std::string best;
    int best_d = -1;
    for (const auto &s : layer_syndromes(lattice, lattice.readout_layer())) {
        if (s.kind != want) {
            continue;
        }
        int d = (s.center.x - e.x) * (s.center.x - e.x) + (s.center.y - e.y) * (s.center.y - e.y);
        if (d > best_d) {
            best_d = d;
            best = s.label;
        }
    }
    return best;
}

namespace {

struct LineFit {
    double slope;
    double slope_stderr;
    double intercept;
    double intercept_stderr;
};

/// Weighted least squares y = a + b x with weights w.
LineFit weighted_fit(const std::vector<double> &x, const std::vector<double> &y, const std::vector<double> &w) {
    double sw = 0, sx = 0, sy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    double xbar = sx / sw;
    double ybar = sy / sw;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (!(sxx > 0)) {
        return {0, std::numeric_limits<double>::infinity(), ybar, 1 / std::sqrt(sw)};
    }
    double b = sxy / sxx;
    return {b, 1 / std::sqrt(sxx), ybar - b * xbar, std::sqrt(1 / sw + xbar * xbar / sxx)};
}

}  // namespace

DetectionRun cvcluster::detection_sweep(const DetectionConfig &config) {
    if (config.magnitudes.empty()) {
        throw Error(ErrorCode::InvalidConfig, "need at least one magnitude");
    }
    if (config.shots < 2) {
        throw Error(ErrorCode::InvalidConfig, "need at least two shots per point");
    }
    if (!std::isfinite(config.r)) {
        throw Error(ErrorCode::InvalidConfig, "squeezing must be finite");
    }
    LayeredLattice lattice = layered_lattice(config.layers, config.width, config.height);
    int site = config.error_site.value_or(default_error_site(lattice, config.kind));
    check_data_site(lattice, site);

    auto readout = layer_syndromes(lattice, lattice.readout_layer());
    std::vector<const SyndromeOperator *> chosen;
    if (config.syndromes.empty()) {
        for (const auto &s : readout) {
            chosen.push_back(&s);
        }
    } else {
        for (const auto &label : config.syndromes) {
            chosen.push_back(&find_syndrome(readout, label));
        }
    }
    auto adjacent = adjacent_syndromes(lattice, config.kind, site);
    std::string far = far_syndrome(lattice, config.kind, site);

    DetectionRun run;
    run.config = config;
    run.error_site = site;
    run.error_point = lattice.sites[site];
    size_t n_mag = config.magnitudes.size();
    size_t n_syn = chosen.size();
    run.points.resize(n_mag * n_syn);

    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        try {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= n_mag) {
                    break;
                }
                double mag = config.magnitudes[i];
                LayeredState s = run_pipeline(lattice, config.r, config.efficiency, ErrorEvent{config.kind, mag, site});
                for (size_t j = 0; j < n_syn; j++) {
                    QuadratureForm form = chosen[j]->form_on(s);
                    Moments exact = measured_moments(s.state, form, config.efficiency);
                    auto xs = sample_quadratures(
                        s.state, form, config.shots, config.efficiency, derive_seed(config.seed, i * n_syn + j));
                    double mean = 0;
                    for (double x : xs) {
                        mean += x;
                    }
                    mean /= (double)xs.size();
                    double ss = 0;
                    for (double x : xs) {
                        ss += (x - mean) * (x - mean);
                    }
                    double sd = std::sqrt(ss / (double)(xs.size() - 1));
                    run.points[i * n_syn + j] = {mag, chosen[j]->label, exact.mean, mean, sd / std::sqrt((double)xs.size())};
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(n_mag);
        }
    };
    std::vector<std::thread> threads;
    for (int t = 1; t < config.workers; t++) {
        threads.emplace_back(work);
    }
    work();
    for (auto &t : threads) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (size_t j = 0; j < n_syn; j++) {
        std::vector<double> x, y, w, exact, ones;
        for (size_t i = 0; i < n_mag; i++) {
            const auto &p = run.points[i * n_syn + j];
            x.push_back(p.magnitude);
            y.push_back(p.sample_mean);
            w.push_back(1 / (p.stderr_mean * p.stderr_mean));
            exact.push_back(p.exact_mean);
            ones.push_back(1);
        }
        LineFit fit = weighted_fit(x, y, w);
        LineFit efit = weighted_fit(x, exact, ones);
        double residual = 0;
        for (size_t i = 0; i < n_mag; i++) {
            residual = std::max(residual, std::abs(exact[i] - (efit.intercept + efit.slope * x[i])));
        }
        const std::string &label = chosen[j]->label;
        std::string role = "other";
        if (std::find(adjacent.begin(), adjacent.end(), label) != adjacent.end()) {
            role = "adjacent";
        } else if (label == far) {
            role = "far";
        }
        bool detected = std::isfinite(fit.slope_stderr) && std::abs(fit.slope) > 3 * fit.slope_stderr;
        run.fits.push_back(
            {label, role, fit.slope, fit.slope_stderr, fit.intercept, fit.intercept_stderr, efit.slope, residual, detected});
    }
    return run;
}
