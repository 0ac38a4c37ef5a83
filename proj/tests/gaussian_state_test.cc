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

#include "cvcluster/gaussian_state.h"

#include <gtest/gtest.h>

#include <numbers>
#include <numeric>
#include <random>

#include "test_util.h"

using namespace cvcluster;
using namespace cvcluster::testing;

namespace {

double sample_variance(const std::vector<double> &xs) {
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double acc = 0;
    for (double x : xs) {
        acc += (x - mean) * (x - mean);
    }
    return acc / (xs.size() - 1);
}

double sample_mean(const std::vector<double> &xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

GaussianState epr_state(double r) {
    return GaussianState(Vector::Zero(4), two_mode_squeezed(r));
}

}  // namespace

TEST(vacuum, covariance_is_identity) {
    ASSERT_EQ(vacuum(1).cov(), Matrix::Identity(2, 2));
    ASSERT_EQ(vacuum(20).cov(), Matrix::Identity(40, 40));
    ASSERT_EQ(vacuum(20).mean(), Vector::Zero(40));
    Vector v = Vector::Zero(6);
    v[1] = 0.6;
    v[4] = 0.8;
    auto m = expectation_and_variance(vacuum(3), QuadratureForm(v));
    ASSERT_NEAR(m.variance, 1, 1e-15);
    ASSERT_EQ(m.mean, 0);
    ASSERT_THROW(vacuum(-1), Error);
}

TEST(squeezed_vacuum, closed_form) {
    std::vector<double> r{0.5};
    std::vector<double> theta{std::numbers::pi / 2};
    auto s = squeezed_vacuum(r, theta);
    ASSERT_NEAR(s.cov()(1, 1), std::exp(-1.0), 1e-12);
    ASSERT_NEAR(s.cov()(0, 0), std::exp(1.0), 1e-12);
    ASSERT_NEAR(s.cov()(0, 1), 0, 1e-12);
    ASSERT_NEAR(expectation_and_variance(s, QuadratureForm::p(1, 0)).variance, 0.3679, 1e-4);
    ASSERT_NEAR(expectation_and_variance(s, QuadratureForm::x(1, 0)).variance, 2.7183, 1e-4);
}

TEST(squeezed_vacuum, zero_squeezing_is_vacuum) {
    std::vector<double> r{0, 0, 0};
    std::vector<double> theta{0.3, 1.1, -2};
    auto s = squeezed_vacuum(r, theta);
    ASSERT_LT((s.cov() - Matrix::Identity(6, 6)).norm(), 1e-15);
}

TEST(squeezed_vacuum, rotated_axis_is_minimum) {
    std::vector<double> r{0.8};
    std::vector<double> theta{0.4};
    auto s = squeezed_vacuum(r, theta);
    ASSERT_NEAR(expectation_and_variance(s, QuadratureForm::rotated(1, 0, 0.4)).variance, std::exp(-1.6), 1e-12);
    ASSERT_NEAR(
        expectation_and_variance(s, QuadratureForm::rotated(1, 0, 0.4 + std::numbers::pi / 2)).variance,
        std::exp(1.6),
        1e-12);
    ASSERT_TRUE(s.is_physical());
}

TEST(squeezing_db, conversions) {
    ASSERT_NEAR(squeezing_db(0.115), 0.9988, 1e-3);
    ASSERT_NEAR(squeezing_r_from_db(squeezing_db(0.7)), 0.7, 1e-14);
    ASSERT_NEAR(squeezing_db(0), 0, 1e-15);
}

TEST(apply_passive, identity_unchanged) {
    std::mt19937_64 rng(1);
    GaussianState s(Vector::LinSpaced(6, -1, 1), random_physical_covariance(3, rng));
    auto t = apply_passive(s, CMatrix::Identity(3, 3));
    ASSERT_LT((t.cov() - s.cov()).norm(), 1e-15);
    ASSERT_LT((t.mean() - s.mean()).norm(), 1e-15);
}

TEST(apply_passive, beam_splitter_gives_epr) {
    double r = 0.6;
    std::vector<double> rs{r, r};
    std::vector<double> theta{0, std::numbers::pi / 2};
    CMatrix bs(2, 2);
    bs << 1, 1, 1, -1;
    bs /= std::sqrt(2.0);
    auto s = apply_passive(squeezed_vacuum(rs, theta), bs);
    ASSERT_LT((s.cov() - two_mode_squeezed(r)).norm(), 1e-12);
    QuadratureForm xs = QuadratureForm::x(2, 0) + QuadratureForm::x(2, 1);
    QuadratureForm pd = QuadratureForm::p(2, 0) - QuadratureForm::p(2, 1);
    double duan = 0.25 * expectation_and_variance(s, xs).variance + 0.25 * expectation_and_variance(s, pd).variance;
    ASSERT_NEAR(duan, std::exp(-2 * r), 1e-12);
}

TEST(apply_passive, rejects_non_unitary) {
    CMatrix u = CMatrix::Identity(2, 2);
    u(0, 0) = 1.1;
    try {
        apply_passive(vacuum(2), u);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.code(), ErrorCode::NotUnitary);
    }
    ASSERT_THROW(apply_passive(vacuum(2), CMatrix::Identity(3, 3)), Error);
}

TEST(passive_symplectic, orthogonal_and_symplectic) {
    std::mt19937_64 rng(9);
    for (int m : {1, 2, 5, 12}) {
        Matrix s = passive_symplectic(random_unitary(m, rng));
        ASSERT_LT((s.transpose() * s - Matrix::Identity(2 * m, 2 * m)).norm(), 1e-12);
        ASSERT_LT(symplectic_residual(s), 1e-12);
    }
}

TEST(apply_passive, preserves_vacuum_and_purity) {
    std::mt19937_64 rng(4);
    CMatrix u = random_unitary(6, rng);
    ASSERT_LT((apply_passive(vacuum(6), u).cov() - Matrix::Identity(12, 12)).norm(), 1e-12);
    std::vector<double> r{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    std::vector<double> theta(6, 0.7);
    auto s = apply_passive(squeezed_vacuum(r, theta), u);
    for (double nu : symplectic_eigenvalues(s.cov()).values) {
        ASSERT_NEAR(nu, 1, 1e-10);
    }
}

TEST(displace, shifts_means_only) {
    auto s = displace(vacuum(2), 1, 0, 2);
    ASSERT_EQ(s.mean()[3], 2);
    ASSERT_EQ(s.cov(), Matrix::Identity(4, 4));
    auto t = displace(vacuum(1), 0, -1, 0);
    ASSERT_EQ(t.mean()[0], -1);
    try {
        displace(vacuum(2), 2, 1, 1);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.code(), ErrorCode::IndexOutOfRange);
    }
}

TEST(homodyne_condition, vacuum_leaves_other_modes) {
    auto s = homodyne_condition(vacuum(3), QuadratureForm::x(3, 1), 1.5);
    ASSERT_EQ(s.mode_count(), 2);
    ASSERT_LT((s.cov() - Matrix::Identity(4, 4)).norm(), 1e-15);
    ASSERT_LT(s.mean().norm(), 1e-15);
}

TEST(homodyne_condition, epr_pair) {
    double r = 0.5;
    auto s = homodyne_condition(epr_state(r), QuadratureForm::x(2, 0), 1.0);
    ASSERT_EQ(s.mode_count(), 1);
    ASSERT_NEAR(s.cov()(0, 0), 1 / std::cosh(2 * r), 1e-12);
    ASSERT_NEAR(s.cov()(0, 0), 0.6481, 1e-4);
    // x quadratures of our EPR pair are anticorrelated.
    ASSERT_NEAR(s.mean()[0], -std::tanh(2 * r), 1e-12);
    ASSERT_NEAR(std::abs(s.mean()[0]), 0.7616, 1e-4);
    ASSERT_NEAR(s.cov()(1, 1), std::cosh(2 * r), 1e-12);
}

TEST(homodyne_condition, matches_brute_force_conditioning) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 30; trial++) {
        int m = 2 + trial % 5;
        int mode = trial % m;
        double theta = u(rng);
        double outcome = u(rng);
        Vector mean(2 * m);
        for (int i = 0; i < 2 * m; i++) {
            mean[i] = u(rng);
        }
        GaussianState s(mean, random_physical_covariance(m, rng));
        auto form = QuadratureForm::rotated(m, mode, theta);
        auto c = homodyne_condition(s, form, outcome);

        // Rotate the measured mode so the measured quadrature becomes x, then condition by the pseudo-inverse rule.
        Matrix rot = Matrix::Identity(2 * m, 2 * m);
        rot(mode, mode) = std::cos(theta);
        rot(mode, mode + m) = std::sin(theta);
        rot(mode + m, mode) = -std::sin(theta);
        rot(mode + m, mode + m) = std::cos(theta);
        Matrix v = rot * s.cov() * rot.transpose();
        Vector mu = rot * s.mean();
        Vector b = v.col(mode);
        double var = v(mode, mode);
        Matrix vc = v - b * b.transpose() / var;
        Vector mc = mu + b * (outcome - mu[mode]) / var;
        std::vector<int> keep;
        for (int k = 0; k < m; k++) {
            if (k != mode) {
                keep.push_back(k);
            }
        }
        auto idx = quadrature_indices(m, keep);
        Matrix expect_cov = submatrix(vc, idx, idx);
        Vector expect_mean(idx.size());
        for (size_t i = 0; i < idx.size(); i++) {
            expect_mean[i] = mc[idx[i]];
        }
        ASSERT_LT((c.cov() - expect_cov).norm(), 1e-9);
        ASSERT_LT((c.mean() - expect_mean).norm(), 1e-9);
        ASSERT_TRUE(c.is_physical(1e-8));
    }
}

TEST(homodyne_condition, rejects_multi_mode_form) {
    auto f = QuadratureForm::x(2, 0) + QuadratureForm::x(2, 1);
    ASSERT_THROW(homodyne_condition(vacuum(2), f, 0), Error);
}

TEST(homodyne_condition, degenerate_variance) {
    Matrix big = Matrix::Identity(4, 4);
    big(0, 0) = 1e-15;
    big(2, 2) = 1e15;
    try {
        homodyne_condition(GaussianState(Vector::Zero(4), big), QuadratureForm::x(2, 0), 0);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.code(), ErrorCode::DegenerateVariance);
    }
}

TEST(expectation_and_variance, examples) {
    auto m = expectation_and_variance(vacuum(1), QuadratureForm::x(1, 0));
    ASSERT_EQ(m.mean, 0);
    ASSERT_EQ(m.variance, 1);
    std::vector<double> r{0.5};
    std::vector<double> theta{std::numbers::pi / 2};
    auto s = expectation_and_variance(squeezed_vacuum(r, theta), QuadratureForm::p(1, 0));
    ASSERT_NEAR(s.variance, std::exp(-1.0), 1e-12);
    auto t = expectation_and_variance(vacuum(2), QuadratureForm::x(2, 0) + QuadratureForm::x(2, 1));
    ASSERT_NEAR(t.variance, 2, 1e-15);
    ASSERT_THROW(expectation_and_variance(vacuum(2), QuadratureForm::x(3, 0)), Error);
}

TEST(measured_moments, loss_mixing) {
    std::vector<double> r{0.5};
    std::vector<double> theta{std::numbers::pi / 2};
    auto s = displace(squeezed_vacuum(r, theta), 0, 0, 2);
    auto m = measured_moments(s, QuadratureForm::p(1, 0), 0.8);
    ASSERT_NEAR(m.variance, 0.8 * std::exp(-1.0) + 0.2, 1e-12);
    ASSERT_NEAR(m.mean, std::sqrt(0.8) * 2, 1e-12);
    auto full = measured_moments(s, QuadratureForm::p(1, 0), 0);
    ASSERT_NEAR(full.variance, 1, 1e-15);
    ASSERT_THROW(measured_moments(s, QuadratureForm::p(1, 0), 1.2), Error);
}

TEST(sample_quadratures, vacuum_variance) {
    size_t n = 100000;
    auto xs = sample_quadratures(vacuum(2), QuadratureForm::x(2, 1), n, 1.0, 17);
    ASSERT_EQ(xs.size(), n);
    double v = sample_variance(xs);
    ASSERT_LT(std::abs(v - 1), 5 * std::sqrt(2.0 / n));
    ASSERT_LT(std::abs(sample_mean(xs)), 5 / std::sqrt((double)n));
}

TEST(sample_quadratures, full_loss_is_vacuum_noise) {
    size_t n = 100000;
    std::vector<double> r{1.5};
    std::vector<double> theta{0};
    auto s = displace(squeezed_vacuum(r, theta), 0, 3, 0);
    auto xs = sample_quadratures(s, QuadratureForm::x(1, 0), n, 0.0, 3);
    ASSERT_LT(std::abs(sample_variance(xs) - 1), 5 * std::sqrt(2.0 / n));
    ASSERT_LT(std::abs(sample_mean(xs)), 5 / std::sqrt((double)n));
}

TEST(sample_quadratures, consistent_with_measured_moments) {
    std::mt19937_64 rng(77);
    size_t n = 200000;
    for (int trial = 0; trial < 5; trial++) {
        GaussianState s(Vector::Constant(6, 0.3 * trial), random_physical_covariance(3, rng));
        Vector coeffs = Vector::Zero(6);
        coeffs[trial % 6] = 1;
        coeffs[(trial + 4) % 6] = -0.5;
        QuadratureForm f(coeffs);
        double eta = 0.7 + 0.05 * trial;
        auto expect = measured_moments(s, f, eta);
        auto xs = sample_quadratures(s, f, n, eta, 1000 + trial);
        ASSERT_LT(std::abs(sample_variance(xs) - expect.variance), 5 * std::sqrt(2.0 / n) * expect.variance);
        ASSERT_LT(std::abs(sample_mean(xs) - expect.mean), 5 * std::sqrt(expect.variance / n));
    }
}

TEST(sample_quadratures, seed_reproducibility) {
    auto a = sample_quadratures(vacuum(1), QuadratureForm::x(1, 0), 1000, 0.9, 5);
    auto b = sample_quadratures(vacuum(1), QuadratureForm::x(1, 0), 1000, 0.9, 5);
    auto c = sample_quadratures(vacuum(1), QuadratureForm::x(1, 0), 1000, 0.9, 6);
    ASSERT_EQ(a, b);
    ASSERT_NE(a, c);
}

TEST(derive_seed, distinct_streams) {
    ASSERT_EQ(derive_seed(1, 2), derive_seed(1, 2));
    ASSERT_NE(derive_seed(1, 2), derive_seed(1, 3));
    ASSERT_NE(derive_seed(1, 2), derive_seed(2, 2));
}

TEST(gaussian_state, validation) {
    Matrix v = Matrix::Identity(4, 4);
    v(0, 1) = 1;
    try {
        GaussianState(Vector::Zero(4), v);
        FAIL();
    } catch (const Error &e) {
        ASSERT_EQ(e.code(), ErrorCode::NonSymmetric);
    }
    ASSERT_THROW(GaussianState(Vector::Zero(2), Matrix::Identity(4, 4)), Error);
    Matrix unphysical = Matrix::Identity(2, 2) * 0.5;
    ASSERT_FALSE(GaussianState(Vector::Zero(2), unphysical).is_physical());
    ASSERT_TRUE(vacuum(3).is_physical());
}

TEST(commutator, canonical_pairs) {
    ASSERT_EQ(commutator(QuadratureForm::x(2, 0), QuadratureForm::p(2, 0)), 1);
    ASSERT_EQ(commutator(QuadratureForm::p(2, 0), QuadratureForm::x(2, 0)), -1);
    ASSERT_EQ(commutator(QuadratureForm::x(2, 0), QuadratureForm::p(2, 1)), 0);
    ASSERT_EQ(commutator(QuadratureForm::x(2, 0), QuadratureForm::x(2, 1)), 0);
}
