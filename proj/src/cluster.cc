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

#include "cvcluster/cluster.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <queue>

#include "json.hpp"

using namespace cvcluster;

ClusterGraph::ClusterGraph(int vertex_count, std::vector<std::pair<int, int>> edges) : vertex_count_(vertex_count) {
    if (vertex_count < 1) {
        throw Error(ErrorCode::TooSmall, "graph needs at least one vertex");
    }
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count) {
            throw Error(ErrorCode::IndexOutOfRange, "edge endpoint out of range");
        }
        if (a == b) {
            throw Error(ErrorCode::BadMatrix, "self loops are not allowed");
        }
        edges_.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw Error(ErrorCode::BadMatrix, "duplicate edge");
    }
}

ClusterGraph ClusterGraph::from_adjacency(const Matrix &g) {
    if (g.rows() != g.cols() || g.rows() < 1) {
        throw Error(ErrorCode::BadMatrix, "adjacency must be a non-empty square matrix");
    }
    std::vector<std::pair<int, int>> edges;
    for (Eigen::Index i = 0; i < g.rows(); i++) {
        if (g(i, i) != 0) {
            throw Error(ErrorCode::BadMatrix, "adjacency diagonal must be zero");
        }
        for (Eigen::Index j = 0; j < g.cols(); j++) {
            if (g(i, j) != g(j, i) || (g(i, j) != 0 && g(i, j) != 1)) {
                throw Error(ErrorCode::BadMatrix, "adjacency must be symmetric with 0/1 entries");
            }
            if (j > i && g(i, j) == 1) {
                edges.emplace_back((int)i, (int)j);
            }
        }
    }
    return ClusterGraph((int)g.rows(), std::move(edges));
}

int ClusterGraph::degree(int vertex) const {
    if (vertex < 0 || vertex >= vertex_count_) {
        throw Error(ErrorCode::IndexOutOfRange, "vertex out of range");
    }
    int d = 0;
    for (auto [a, b] : edges_) {
        d += (a == vertex) + (b == vertex);
    }
    return d;
}

Matrix ClusterGraph::adjacency() const {
    Matrix g = Matrix::Zero(vertex_count_, vertex_count_);
    for (auto [a, b] : edges_) {
        g(a, b) = 1;
        g(b, a) = 1;
    }
    return g;
}

static std::vector<std::vector<int>> neighbor_lists(const ClusterGraph &graph) {
    std::vector<std::vector<int>> adj(graph.vertex_count());
    for (auto [a, b] : graph.edges()) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

bool ClusterGraph::is_bipartite() const {
    auto adj = neighbor_lists(*this);
    std::vector<int> color(vertex_count_, -1);
    for (int s = 0; s < vertex_count_; s++) {
        if (color[s] >= 0) {
            continue;
        }
        color[s] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int w : adj[u]) {
                if (color[w] < 0) {
                    color[w] = 1 - color[u];
                    q.push(w);
                } else if (color[w] == color[u]) {
                    return false;
                }
            }
        }
    }
    return true;
}

bool ClusterGraph::is_connected() const {
    auto adj = neighbor_lists(*this);
    std::vector<bool> seen(vertex_count_, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : adj[u]) {
            if (!seen[w]) {
                seen[w] = true;
                count++;
                stack.push_back(w);
            }
        }
    }
    return count == vertex_count_;
}

ClusterGraph cvcluster::chain_graph(int vertex_count) {
    if (vertex_count < 2) {
        throw Error(ErrorCode::TooSmall, "chain needs at least two vertices");
    }
    std::vector<std::pair<int, int>> edges;
    for (int k = 0; k + 1 < vertex_count; k++) {
        edges.emplace_back(k, k + 1);
    }
    return ClusterGraph(vertex_count, std::move(edges));
}

ClusterGraph cvcluster::grid_graph(int rows, int cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2) {
        throw Error(ErrorCode::TooSmall, "grid needs at least two vertices");
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < rows; i++) {
        for (int j = 0; j < cols; j++) {
            int v = i * cols + j;
            if (j + 1 < cols) {
                edges.emplace_back(v, v + 1);
            }
            if (i + 1 < rows) {
                edges.emplace_back(v, v + cols);
            }
        }
    }
    return ClusterGraph(rows * cols, std::move(edges));
}

std::vector<LatticePoint> cvcluster::rhg_unit_cell_sites() {
    std::vector<LatticePoint> sites;
    for (int z = 0; z <= 2; z++) {
        for (int y = 0; y <= 2; y++) {
            for (int x = 0; x <= 2; x++) {
                int odd = (x & 1) + (y & 1) + (z & 1);
                if (odd == 1 || odd == 2) {
                    sites.push_back({x, y, z});
                }
            }
        }
    }
    return sites;
}

ClusterGraph cvcluster::lattice_graph(const std::vector<LatticePoint> &sites) {
    std::vector<std::pair<int, int>> edges;
    for (size_t i = 0; i < sites.size(); i++) {
        for (size_t j = i + 1; j < sites.size(); j++) {
            int d = std::abs(sites[i].x - sites[j].x) + std::abs(sites[i].y - sites[j].y) +
                    std::abs(sites[i].z - sites[j].z);
            if (d == 1) {
                edges.emplace_back((int)i, (int)j);
            }
        }
    }
    return ClusterGraph((int)sites.size(), std::move(edges));
}

ClusterGraph cvcluster::rhg_unit_cell() {
    return lattice_graph(rhg_unit_cell_sites());
}

static int parse_positive(std::string_view text, std::string_view spec) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
        throw Error(ErrorCode::InvalidConfig, "bad graph spec '" + std::string(spec) + "'");
    }
    return value;
}

ClusterGraph cvcluster::parse_graph_spec(std::string_view spec) {
    auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::InvalidConfig, "graph spec must look like kind:args, got '" + std::string(spec) + "'");
    }
    std::string_view kind = spec.substr(0, colon);
    std::string_view args = spec.substr(colon + 1);
    if (kind == "chain") {
        return chain_graph(parse_positive(args, spec));
    }
    if (kind == "grid") {
        auto x = args.find('x');
        if (x == std::string_view::npos) {
            throw Error(ErrorCode::InvalidConfig, "grid spec must look like grid:RxC");
        }
        return grid_graph(parse_positive(args.substr(0, x), spec), parse_positive(args.substr(x + 1), spec));
    }
    if (kind == "rhg" && args == "unit") {
        return rhg_unit_cell();
    }
    throw Error(ErrorCode::InvalidConfig, "unknown graph spec '" + std::string(spec) + "'");
}

std::string cvcluster::graph_to_json(const ClusterGraph &graph) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : graph.edges()) {
        edges.push_back({a, b});
    }
    nlohmann::json doc = {{"vertex_count", graph.vertex_count()}, {"edges", edges}};
    return doc.dump(2);
}

ClusterGraph cvcluster::graph_from_json(const std::string &text) {
    try {
        auto doc = nlohmann::json::parse(text);
        std::vector<std::pair<int, int>> edges;
        for (const auto &e : doc.at("edges")) {
            if (e.size() != 2) {
                throw Error(ErrorCode::BadMatrix, "edge must have two endpoints");
            }
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        return ClusterGraph(doc.at("vertex_count").get<int>(), std::move(edges));
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed graph JSON: ") + e.what());
    }
}

CMatrix cvcluster::cluster_unitary(const ClusterGraph &graph, const Matrix &orthogonal) {
    int m = graph.vertex_count();
    if (orthogonal.rows() != m || orthogonal.cols() != m) {
        throw Error(ErrorCode::SizeMismatch, "orthogonal factor size does not match graph");
    }
    if ((orthogonal.transpose() * orthogonal - Matrix::Identity(m, m)).norm() >= 1e-8) {
        throw Error(ErrorCode::NotOrthogonal, "free factor is not orthogonal");
    }
    Matrix g = graph.adjacency();
    Matrix q = matrix_inverse_sqrt(Matrix::Identity(m, m) + g * g);
    CMatrix lhs(m, m);
    lhs.real() = Matrix::Identity(m, m);
    lhs.imag() = g;
    return lhs * (q * orthogonal).cast<std::complex<double>>();
}

CMatrix cvcluster::cluster_unitary(const ClusterGraph &graph) {
    int m = graph.vertex_count();
    return cluster_unitary(graph, Matrix::Identity(m, m));
}

GaussianState cvcluster::build_cluster(const ClusterGraph &graph, std::span<const double> r, const Matrix &orthogonal) {
    if ((int)r.size() != graph.vertex_count()) {
        throw Error(ErrorCode::SizeMismatch, "need one squeezing value per vertex");
    }
    std::vector<double> theta(r.size(), std::numbers::pi / 2);
    return apply_passive(squeezed_vacuum(r, theta), cluster_unitary(graph, orthogonal));
}

GaussianState cvcluster::build_cluster(const ClusterGraph &graph, double r) {
    int m = graph.vertex_count();
    std::vector<double> rs(m, r);
    return build_cluster(graph, rs, Matrix::Identity(m, m));
}

GaussianState cvcluster::epr_pairs_state(int mode_count, double r) {
    ModeBasis pairing = epr_pairing_basis(mode_count);
    int h = mode_count / 2;
    std::vector<double> rs(mode_count, r);
    std::vector<double> theta(mode_count, 0.0);
    for (int k = h; k < mode_count; k++) {
        theta[k] = std::numbers::pi / 2;
    }
    return apply_passive(squeezed_vacuum(rs, theta), pairing.coefficients().adjoint());
}

std::vector<QuadratureForm> cvcluster::nullifiers(const ClusterGraph &graph) {
    int m = graph.vertex_count();
    Matrix g = graph.adjacency();
    std::vector<QuadratureForm> out;
    out.reserve(m);
    for (int k = 0; k < m; k++) {
        Vector v = Vector::Zero(2 * m);
        v.head(m) = -g.row(k).transpose();
        v[k + m] = 1;
        out.emplace_back(v);
    }
    return out;
}

std::vector<NullifierRecord> cvcluster::nullifier_report(
    const GaussianState &state, const ClusterGraph &graph, double efficiency) {
    if (state.mode_count() != graph.vertex_count()) {
        throw Error(ErrorCode::SizeMismatch, "state and graph differ in mode count");
    }
    GaussianState vac = vacuum(graph.vertex_count());
    std::vector<NullifierRecord> out;
    auto forms = nullifiers(graph);
    for (size_t k = 0; k < forms.size(); k++) {
        double var = measured_moments(state, forms[k], efficiency).variance;
        double ref = expectation_and_variance(vac, forms[k]).variance;
        out.push_back({(int)k, var, ref, var / ref, var < ref});
    }
    return out;
}
