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

#include "cvcluster/tomography.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cvcluster/cluster.h"
#include "test_util.h"

using namespace cvcluster;
using namespace cvcluster::testing;

namespace {

double model_variance(const Matrix &v, const MeasurementSetting &s) {
    Vector f = s.form();
    return f.dot(v * f);
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

Matrix random_symmetric(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0, 1);
    Matrix e(n, n);
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            e(i, j) = g(rng);
        }
    }
    return 0.5 * (e + e.transpose());
}

}  // namespace

TEST(settings, counts_and_rank) {
    auto one = informationally_complete_settings(1);
    ASSERT_EQ(one.size(), 3u);
    ASSERT_EQ(design_rank(one), 3);
    auto two = informationally_complete_settings(2);
    ASSERT_EQ(two.size(), 12u);
    ASSERT_EQ(design_rank(two), 10);
    auto four = informationally_complete_settings(4);
    ASSERT_EQ(design_rank(four), 36);
    for (const auto &s : four) {
        ASSERT_NEAR(s.mode_vector.norm(), 1, 1e-14);
        ASSERT_NEAR(s.form().norm(), 1, 1e-14);
    }
    ASSERT_THROW(informationally_complete_settings(0), Error);
}

TEST(settings, rank_twenty_modes) {
    auto s = informationally_complete_settings(20);
    ASSERT_EQ(s.size(), 1200u);
    ASSERT_EQ(design_rank(s), 820);
}

TEST(settings, form_matches_rotated_quadrature) {
    MeasurementSetting s{CVector::Unit(3, 1), 0.3};
    Vector expect = QuadratureForm::rotated(3, 1, 0.3).coeffs;
    ASSERT_LT((s.form() - expect).norm(), 1e-15);
}

TEST(acquire, vacuum_variances_near_one) {
    auto settings = informationally_complete_settings(2);
    size_t n = 20000;
    auto data = acquire(vacuum(2), settings, n, 1.0, 7);
    ASSERT_EQ(data.records.size(), settings.size());
    for (const auto &rec : data.records) {
        ASSERT_EQ(rec.samples, n);
        ASSERT_LT(std::abs(rec.variance - 1), 5 * std::sqrt(2.0 / n));
    }
}

TEST(acquire, large_sample_limit) {
    auto v = two_mode_squeezed(0.5);
    GaussianState s(Vector::Zero(4), v);
    std::vector<MeasurementSetting> one{informationally_complete_settings(2)[7]};
    size_t n = 1000000;
    auto data = acquire(s, one, n, 1.0, 99);
    double truth = model_variance(v, one[0]);
    ASSERT_LT(std::abs(data.records[0].variance - truth), 5 * std::sqrt(2.0 / n) * truth);
}

TEST(acquire, seed_reproducibility_and_workers) {
    auto state = build_cluster(chain_graph(3), 0.5);
    auto settings = informationally_complete_settings(3);
    auto a = acquire(state, settings, 500, 0.9, 5, 1);
    auto b = acquire(state, settings, 500, 0.9, 5, 3);
    auto c = acquire(state, settings, 500, 0.9, 6, 1);
    bool differs = false;
    for (size_t k = 0; k < settings.size(); k++) {
        ASSERT_EQ(a.records[k].variance, b.records[k].variance);
        ASSERT_EQ(a.records[k].mean, b.records[k].mean);
        differs |= a.records[k].variance != c.records[k].variance;
    }
    ASSERT_TRUE(differs);
}

TEST(linear_inversion, exact_data_recovers_truth) {
    std::mt19937_64 rng(14);
    for (int m : {1, 2, 3, 5}) {
        Matrix v = random_physical_covariance(m, rng);
        auto data = exact_dataset(v, informationally_complete_settings(m), 1000);
        ASSERT_LT((linear_inversion(data) - v).norm(), 1e-8);
    }
}

TEST(linear_inversion, vacuum_data) {
    auto data = acquire(vacuum(2), informationally_complete_settings(2), 20000, 1.0, 3);
    ASSERT_LT((linear_inversion(data) - Matrix::Identity(4, 4)).norm(), 0.1);
}

TEST(linear_inversion, epr_pair_accuracy) {
    Matrix v = two_mode_squeezed(0.5);
    auto data = acquire(GaussianState(Vector::Zero(4), v), informationally_complete_settings(2), 100000, 1.0, 8);
    ASSERT_LT((linear_inversion(data) - v).norm(), 0.05 * v.norm());
}

TEST(linear_inversion, rank_deficient) {
    auto settings = informationally_complete_settings(2);
    settings.resize(5);
    auto data = exact_dataset(Matrix::Identity(4, 4), settings, 100);
    try {
        linear_inversion(data);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.code(), ErrorCode::RankDeficient);
    }
    ASSERT_THROW(mle_reconstruct(data), Error);
}

TEST(neg_log_likelihood, minimized_at_exact_variances) {
    std::mt19937_64 rng(4);
    Matrix v = random_physical_covariance(2, rng);
    auto data = exact_dataset(v, informationally_complete_settings(2), 100);
    double at_truth = neg_log_likelihood(data, v);
    for (int trial = 0; trial < 10; trial++) {
        Matrix w = v + 0.05 * random_symmetric(4, rng);
        ASSERT_GT(neg_log_likelihood(data, w), at_truth);
    }
    ASSERT_LT(neg_log_likelihood_gradient(data, v).norm(), 1e-9);
    ASSERT_TRUE(std::isinf(neg_log_likelihood(data, -Matrix::Identity(4, 4))));
}

TEST(neg_log_likelihood, gradient_matches_finite_differences) {
    std::mt19937_64 rng(101);
    for (int point = 0; point < 20; point++) {
        int m = 1 + point % 3;
        Matrix truth = random_physical_covariance(m, rng);
        auto data = acquire(GaussianState(Vector::Zero(2 * m), truth), informationally_complete_settings(m), 400, 0.95, point);
        Matrix v = random_physical_covariance(m, rng);
        Matrix g = neg_log_likelihood_gradient(data, v);
        Matrix dir = random_symmetric(2 * m, rng);
        double h = 1e-5;
        double fd = (neg_log_likelihood(data, v + h * dir) - neg_log_likelihood(data, v - h * dir)) / (2 * h);
        double analytic = (g.array() * dir.array()).sum();
        ASSERT_NEAR(analytic, fd, 1e-5 * std::max(1.0, std::abs(fd))) << "point " << point;
    }
}

TEST(neg_log_likelihood, factor_gradient_matches_finite_differences) {
    std::mt19937_64 rng(202);
    for (int point = 0; point < 20; point++) {
        int m = 1 + point % 3;
        Matrix truth = random_physical_covariance(m, rng);
        auto data = exact_dataset(truth, informationally_complete_settings(m), 1000);
        Matrix t = Eigen::LLT<Matrix>(random_physical_covariance(m, rng)).matrixL();
        Matrix g = neg_log_likelihood_factor_gradient(data, t);
        ASSERT_EQ(Matrix(g.triangularView<Eigen::StrictlyUpper>()).norm(), 0);
        Matrix dir = random_symmetric(2 * m, rng).triangularView<Eigen::Lower>();
        double h = 1e-6;
        auto f = [&](const Matrix &tt) { return neg_log_likelihood(data, tt * tt.transpose()); };
        double fd = (f(t + h * dir) - f(t - h * dir)) / (2 * h);
        double analytic = (g.array() * dir.array()).sum();
        ASSERT_NEAR(analytic, fd, 1e-5 * std::max(1.0, std::abs(fd))) << "point " << point;
    }
}

TEST(project_to_physical, clamps_and_preserves) {
    std::mt19937_64 rng(31);
    Matrix good = random_physical_covariance(3, rng);
    ASSERT_EQ(project_to_physical(good), good);
    Matrix bad = 0.5 * Matrix::Identity(4, 4);
    Matrix fixed = project_to_physical(bad);
    ASSERT_GE(symplectic_eigenvalues(fixed).min(), 1 - 1e-9);
    Matrix indefinite = Matrix::Identity(4, 4);
    indefinite(0, 0) = -0.2;
    ASSERT_GE(symplectic_eigenvalues(project_to_physical(indefinite)).min(), 1 - 1e-9);
}

TEST(mle_reconstruct, exact_data_matches_linear_inversion) {
    auto v = build_cluster(chain_graph(2), 0.4).cov();
    auto data = exact_dataset(v, informationally_complete_settings(2), 1000);
    auto result = mle_reconstruct(data);
    ASSERT_LT((result.covariance - linear_inversion(data)).norm(), 1e-6);
    ASSERT_GE(result.min_symplectic_eigenvalue, 1 - 1e-6);
    ASSERT_EQ(result.physicality_residual, std::max(0.0, 1 - result.min_symplectic_eigenvalue));
}

TEST(mle_reconstruct, repairs_unphysical_linear_inversion) {
    auto state = build_cluster(chain_graph(3), 0.9);
    int found = 0;
    for (uint64_t seed = 0; seed < 40 && found < 3; seed++) {
        auto data = acquire(state, informationally_complete_settings(3), 60, 1.0, seed);
        Matrix lin = linear_inversion(data);
        Eigen::SelfAdjointEigenSolver<Matrix> es(lin);
        bool unphysical = es.eigenvalues().minCoeff() <= 0 || symplectic_eigenvalues(lin).min() < 1;
        if (!unphysical) {
            continue;
        }
        found++;
        auto result = mle_reconstruct(data);
        ASSERT_GE(result.min_symplectic_eigenvalue, 1 - 1e-6);
        ASSERT_LE(result.objective, neg_log_likelihood(data, project_to_physical(lin)) + 1e-9);
        ASSERT_NEAR(result.objective, neg_log_likelihood(data, result.covariance), 1e-9 * std::abs(result.objective));
    }
    ASSERT_GT(found, 0);
}

TEST(mle_reconstruct, error_decreases_with_samples) {
    auto v = build_cluster(chain_graph(4), 0.5).cov();
    GaussianState state(Vector::Zero(8), v);
    auto settings = informationally_complete_settings(4);
    double prev = INFINITY;
    for (size_t n : {1000, 10000, 100000}) {
        std::vector<double> errors;
        for (uint64_t seed = 0; seed < 10; seed++) {
            auto result = mle_reconstruct(acquire(state, settings, n, 1.0, seed));
            ASSERT_GE(result.min_symplectic_eigenvalue, 1 - 1e-6);
            errors.push_back((result.covariance - v).norm());
        }
        double med = median(errors);
        ASSERT_LT(med, prev) << "n=" << n;
        prev = med;
    }
}

TEST(mle_reconstruct, initial_guess_size_checked) {
    auto data = exact_dataset(Matrix::Identity(2, 2), informationally_complete_settings(1), 10);
    MleOptions options;
    options.init = Matrix::Identity(4, 4);
    ASSERT_THROW(mle_reconstruct(data, options), Error);
}

TEST(mle_reconstruct, twenty_mode_chain_reveals_adjacency) {
    auto graph = chain_graph(20);
    double eta = 0.9;
    auto state = build_cluster(graph, 0.7);
    auto data = acquire(state, informationally_complete_settings(20), 10000, eta, 2026, 2);
    auto result = mle_reconstruct(data);
    ASSERT_GE(result.min_symplectic_eigenvalue, 1 - 1e-6);
    Matrix g = graph.adjacency();
    Matrix ideal = eta * state.cov().topRightCorner(20, 20);
    Matrix got = result.covariance.topRightCorner(20, 20);
    for (int i = 0; i < 20; i++) {
        for (int j = 0; j < 20; j++) {
            if (std::abs(ideal(i, j)) > 0.15) {
                ASSERT_EQ(got(i, j) > 0, ideal(i, j) > 0) << i << "," << j;
            }
            // Strongly positive entries sit exactly on the graph's edges.
            ASSERT_EQ(got(i, j) > 0.5, g(i, j) == 1) << i << "," << j;
        }
    }
}
