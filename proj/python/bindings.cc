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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvcluster/cluster.h"
#include "cvcluster/surface_code.h"
#include "cvcluster/tomography.h"
#include "cvcluster/witnesses.h"

namespace py = pybind11;
using namespace cvcluster;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Gaussian cluster-state simulation core";

    static py::exception<Error> error(m, "CvclusterError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error &e) {
            py::set_error(error, e.what());
        }
    });

    m.def("symplectic_form", &symplectic_form, py::arg("mode_count"));
    m.def(
        "symplectic_eigenvalues",
        [](const Matrix &v) { return symplectic_eigenvalues(v).values; },
        py::arg("cov"));
    m.def(
        "williamson",
        [](const Matrix &v) {
            auto w = williamson(v);
            return py::make_tuple(w.symplectic, w.spectrum.values);
        },
        py::arg("cov"),
        "Returns (S, nu) with cov = S diag(nu, nu) S^T.");
    m.def(
        "schur_complement",
        [](const Matrix &v, const std::vector<int> &keep) { return schur_complement(v, keep); },
        py::arg("cov"),
        py::arg("keep"));
    m.def("matrix_inverse_sqrt", &matrix_inverse_sqrt, py::arg("p"));
    m.def("squeezing_db", &squeezing_db, py::arg("r"));
    m.def("squeezing_r_from_db", &squeezing_r_from_db, py::arg("db"));

    py::class_<ClusterGraph>(m, "ClusterGraph")
        .def(py::init<int, std::vector<std::pair<int, int>>>(), py::arg("vertex_count"), py::arg("edges"))
        .def_property_readonly("vertex_count", &ClusterGraph::vertex_count)
        .def_property_readonly("edges", &ClusterGraph::edges)
        .def("adjacency", &ClusterGraph::adjacency)
        .def("degree", &ClusterGraph::degree)
        .def("__eq__", [](const ClusterGraph &a, const ClusterGraph &b) { return a == b; });
    m.def("chain_graph", &chain_graph, py::arg("vertex_count"));
    m.def("grid_graph", &grid_graph, py::arg("rows"), py::arg("cols"));
    m.def("rhg_unit_cell", &rhg_unit_cell);
    m.def("parse_graph_spec", [](const std::string &spec) { return parse_graph_spec(spec); }, py::arg("spec"));

    m.def(
        "cluster_covariance",
        [](const ClusterGraph &g, double r) { return build_cluster(g, r).cov(); },
        py::arg("graph"),
        py::arg("r"));
    m.def(
        "epr_pairs_covariance",
        [](int modes, double r) { return epr_pairs_state(modes, r).cov(); },
        py::arg("mode_count"),
        py::arg("r"));
    m.def(
        "nullifier_ratios",
        [](const Matrix &cov, const ClusterGraph &g, double eta) {
            std::vector<double> out;
            GaussianState s(Vector::Zero(cov.rows()), cov);
            for (const auto &rec : nullifier_report(s, g, eta)) {
                out.push_back(rec.ratio);
            }
            return out;
        },
        py::arg("cov"),
        py::arg("graph"),
        py::arg("eta") = 1.0);

    m.def("duan_value", &duan_value, py::arg("cov"), py::arg("m"), py::arg("n"));
    m.def("epr_product", &epr_product, py::arg("cov"), py::arg("m"), py::arg("n"));
    m.def(
        "npt_value",
        [](const Matrix &v, uint64_t set_a) { return npt_value(v, Bipartition::canonical((int)v.rows() / 2, set_a)); },
        py::arg("cov"),
        py::arg("set_a"),
        "set_a is a bitmask of modes; it is reoriented canonically.");
    m.def(
        "steerability",
        [](const Matrix &v, const std::vector<int> &from, const std::vector<int> &to) {
            return steerability(v, from, to);
        },
        py::arg("cov"),
        py::arg("source"),
        py::arg("target"));
    m.def(
        "full_sweep",
        [](const Matrix &v, int workers) {
            WitnessReport report;
            {
                py::gil_scoped_release release;
                report = full_sweep(v, workers);
            }
            py::dict out;
            std::vector<uint64_t> sets;
            std::vector<double> npt, ab, ba;
            for (const auto &r : report.records) {
                sets.push_back(r.set_a);
                npt.push_back(r.npt);
                ab.push_back(r.steer_ab);
                ba.push_back(r.steer_ba);
            }
            out["set_a"] = sets;
            out["npt"] = npt;
            out["steer_ab"] = ab;
            out["steer_ba"] = ba;
            out["min_npt"] = report.min_npt;
            return out;
        },
        py::arg("cov"),
        py::arg("workers") = 1);

    m.def(
        "simulate_tomography",
        [](const Matrix &cov, size_t samples, double eta, uint64_t seed) {
            GaussianState s(Vector::Zero(cov.rows()), cov);
            auto settings = informationally_complete_settings(s.mode_count());
            auto data = acquire(s, settings, samples, eta, seed);
            auto result = mle_reconstruct(data);
            return py::make_tuple(linear_inversion(data), result.covariance, result.min_symplectic_eigenvalue);
        },
        py::arg("cov"),
        py::arg("samples"),
        py::arg("eta"),
        py::arg("seed"),
        "Returns (linear inversion, MLE covariance, MLE minimum symplectic eigenvalue).");

    m.def(
        "detection_sweep",
        [](const std::string &kind, const std::vector<double> &magnitudes, double r, size_t shots, uint64_t seed) {
            DetectionConfig config;
            if (kind == "Z") {
                config.kind = ErrorKind::Z;
            } else if (kind == "X") {
                config.kind = ErrorKind::X;
            } else {
                throw Error(ErrorCode::InvalidConfig, "kind must be Z or X");
            }
            config.magnitudes = magnitudes;
            config.r = r;
            config.shots = shots;
            config.seed = seed;
            auto run = detection_sweep(config);
            py::list fits;
            for (const auto &f : run.fits) {
                py::dict d;
                d["label"] = f.label;
                d["role"] = f.role;
                d["slope"] = f.slope;
                d["stderr"] = f.slope_stderr;
                d["exact_slope"] = f.exact_slope;
                d["detected"] = f.detected;
                fits.append(d);
            }
            return fits;
        },
        py::arg("kind"),
        py::arg("magnitudes"),
        py::arg("r") = 1.5,
        py::arg("shots") = 1000,
        py::arg("seed") = 0);
}
