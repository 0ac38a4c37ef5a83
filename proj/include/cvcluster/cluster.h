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

#ifndef CVCLUSTER_CLUSTER_H
#define CVCLUSTER_CLUSTER_H

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvcluster/gaussian_state.h"
#include "cvcluster/mode_basis.h"

namespace cvcluster {

/// Simple undirected graph with unit edge weights.
class ClusterGraph {
   public:
    ClusterGraph(int vertex_count, std::vector<std::pair<int, int>> edges);

    static ClusterGraph from_adjacency(const Matrix &adjacency);

    int vertex_count() const {
        return vertex_count_;
    }
    /// Edges as (i, j) with i < j, sorted.
    const std::vector<std::pair<int, int>> &edges() const {
        return edges_;
    }
    int degree(int vertex) const;
    Matrix adjacency() const;
    bool is_bipartite() const;
    bool is_connected() const;

    bool operator==(const ClusterGraph &other) const = default;

   private:
    int vertex_count_;
    std::vector<std::pair<int, int>> edges_;
};

struct LatticePoint {
    int x;
    int y;
    int z;

    bool operator==(const LatticePoint &other) const = default;
};

ClusterGraph chain_graph(int vertex_count);
ClusterGraph grid_graph(int rows, int cols);

/// Sites of {0,1,2}^3 with one or two odd coordinates, sorted by (z, y, x).
std::vector<LatticePoint> rhg_unit_cell_sites();
ClusterGraph rhg_unit_cell();

/// Graph with edges between lattice points at unit distance.
ClusterGraph lattice_graph(const std::vector<LatticePoint> &sites);

/// Accepts "chain:N", "grid:RxC" and "rhg:unit".
ClusterGraph parse_graph_spec(std::string_view spec);

std::string graph_to_json(const ClusterGraph &graph);
ClusterGraph graph_from_json(const std::string &text);

/// U = (I + iG)(I + G^2)^{-1/2} O.
CMatrix cluster_unitary(const ClusterGraph &graph, const Matrix &orthogonal);
CMatrix cluster_unitary(const ClusterGraph &graph);

/// p-squeezed inputs sent through the cluster unitary.
GaussianState build_cluster(const ClusterGraph &graph, std::span<const double> r, const Matrix &orthogonal);
GaussianState build_cluster(const ClusterGraph &graph, double r);

/// Two-mode squeezed pairs (m, M+1-m) made from p- and x-squeezed inputs on a beam splitter.
GaussianState epr_pairs_state(int mode_count, double r);

/// Row m: p_m - sum_n G_{mn} x_n.
std::vector<QuadratureForm> nullifiers(const ClusterGraph &graph);

struct NullifierRecord {
    int vertex;
    double variance;
    double vacuum_variance;
    double ratio;
    bool squeezed;
};

std::vector<NullifierRecord> nullifier_report(
    const GaussianState &state, const ClusterGraph &graph, double efficiency = 1.0);

}  // namespace cvcluster

#endif
