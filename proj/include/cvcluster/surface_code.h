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

#ifndef CVCLUSTER_SURFACE_CODE_H
#define CVCLUSTER_SURFACE_CODE_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvcluster/cluster.h"

namespace cvcluster {

enum class ModeRole {
    Data,     // in-plane edge of an even layer
    Grey,     // face center of the top layer, measured to prepare the code
    Ancilla,  // face center of a lower even layer
    Bridge,   // odd-layer site above an edge
    Column,   // odd-layer site above a corner
};

const char *role_name(ModeRole role);

/// Stack of RHG cells with a width x height footprint. Cells share boundary planes, so
/// coordinates run over [0, 2w] x [0, 2h] x [0, 2*layers]. Layer z = 0 is the top.
struct LayeredLattice {
    int width = 0;
    int height = 0;
    int layers = 0;
    std::vector<LatticePoint> sites;
    std::vector<ModeRole> roles;
    ClusterGraph graph;

    int site_count() const {
        return (int)sites.size();
    }
    /// Site index at a coordinate, or -1.
    int index_of(const LatticePoint &p) const;
    int readout_layer() const {
        return 2 * layers;
    }
};

LayeredLattice layered_lattice(int layers, int width = 2, int height = 2);

/// A cluster over the lattice with some sites already measured away.
struct LayeredState {
    GaussianState state;
    /// Site index of each remaining mode.
    std::vector<int> sites;
    double efficiency = 1.0;

    /// Current mode index of a site, or -1 when measured.
    int mode_of(int site) const;
};

/// Requires at least two cells.
LayeredState build_layered_state(const LayeredLattice &lattice, double r, double efficiency = 1.0);

enum class SyndromeKind { Plaquette, Star };

/// Plaquette at corner c: sum of p over incident edges, + for x-directed and - for y-directed edges.
/// Star at face c: sum of x over the four surrounding edges.
struct SyndromeOperator {
    std::string label;
    SyndromeKind kind;
    LatticePoint center;
    std::vector<std::pair<int, double>> terms;

    /// Coefficients over all lattice sites (2 x site_count).
    Vector full_form(const LayeredLattice &lattice) const;
    /// Form on the remaining modes. Throws UnknownSyndrome if a term was measured.
    QuadratureForm form_on(const LayeredState &state) const;
};

/// Plaquettes f1.. then stars s1.. of an even layer, each numbered in (y, x) order.
std::vector<SyndromeOperator> layer_syndromes(const LayeredLattice &lattice, int z);
const SyndromeOperator &find_syndrome(const std::vector<SyndromeOperator> &syndromes, const std::string &label);

LayeredState prepare_ground(const LayeredState &state, const LayeredLattice &lattice);

enum class ErrorKind { Z, X };

struct ErrorEvent {
    ErrorKind kind;
    double magnitude;
    int site;
};

/// Z(zeta) shifts <p> of the error site by zeta; X(xi) shifts <x> by xi.
LayeredState inject_error(const LayeredState &state, const ErrorEvent &event);

/// Homodyne p measurement at outcome 0 of each listed site, in order.
LayeredState teleport_layer(const LayeredState &state, const std::vector<int> &sites);

/// Sites measured per layer when moving the code from the top to the readout layer: the top
/// layer's data, every odd layer's bridges, every intermediate even layer's faces and data,
/// then the readout layer's faces. Lexicographic (y, x) within each step.
std::vector<std::vector<int>> teleport_schedule(const LayeredLattice &lattice);

/// prepare -> inject -> teleport -> readout-face measurement.
LayeredState run_pipeline(
    const LayeredLattice &lattice, double r, double efficiency, const std::optional<ErrorEvent> &error);

/// Default error sites: Z on the top-layer edge (2,1,0); X on the readout-layer edge (2,1,2L).
int default_error_site(const LayeredLattice &lattice, ErrorKind kind);

/// Readout syndromes whose limiting response to a unit error is nonzero.
std::vector<std::string> adjacent_syndromes(const LayeredLattice &lattice, ErrorKind kind, int error_site);
/// Same-kind readout syndrome farthest from the error, lowest label on ties.
std::string far_syndrome(const LayeredLattice &lattice, ErrorKind kind, int error_site);

struct DetectionConfig {
    ErrorKind kind = ErrorKind::Z;
    std::vector<double> magnitudes{-2, -1, 0, 1, 2};
    /// Empty means every readout-layer syndrome.
    std::vector<std::string> syndromes;
    int layers = 2;
    int width = 2;
    int height = 2;
    double r = 1.5;
    double efficiency = DEFAULT_EFFICIENCY;
    size_t shots = 1000;
    uint64_t seed = 0;
    /// Defaults to default_error_site.
    std::optional<int> error_site;
    int workers = 1;
};

struct DetectionPoint {
    double magnitude;
    std::string label;
    /// Noiseless readout mean, including the sqrt(eta) detector scaling.
    double exact_mean;
    double sample_mean;
    double stderr_mean;
};

struct SyndromeFit {
    std::string label;
    /// "adjacent", "far" or "other".
    std::string role;
    double slope;
    double slope_stderr;
    double intercept;
    double intercept_stderr;
    /// Slope of the exact means.
    double exact_slope;
    /// Largest deviation of the exact means from their own linear fit.
    double exact_residual;
    bool detected;
};

struct DetectionRun {
    DetectionConfig config;
    int error_site;
    LatticePoint error_point;
    std::vector<DetectionPoint> points;
    std::vector<SyndromeFit> fits;
};

DetectionRun detection_sweep(const DetectionConfig &config);

}  // namespace cvcluster

#endif
