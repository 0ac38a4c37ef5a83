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

#include "cvcluster/witnesses.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

using namespace cvcluster;

static void check_pair(const Matrix &v, int m, int n) {
    check_covariance_shape(v);
    int modes = (int)v.rows() / 2;
    if (m < 0 || n < 0 || m >= modes || n >= modes || m == n) {
        throw Error(ErrorCode::IndexOutOfRange, "need two distinct valid mode indices");
    }
}

double cvcluster::duan_value(const Matrix &v, int m, int n) {
    check_pair(v, m, n);
    int k = (int)v.rows() / 2;
    double xx = v(m, m) + v(n, n) + 2 * v(m, n);
    double pp = v(m + k, m + k) + v(n + k, n + k) - 2 * v(m + k, n + k);
    return 0.25 * (xx + pp);
}

double cvcluster::epr_product(const Matrix &v, int m, int n) {
    check_pair(v, m, n);
    int k = (int)v.rows() / 2;
    double vx = v(n, n);
    double vp = v(n + k, n + k);
    if (!(vx > 0) || !(vp > 0)) {
        throw Error(ErrorCode::DegenerateVariance, "conditioning quadrature has no variance");
    }
    double cx = v(m, m) - v(m, n) * v(m, n) / vx;
    double cp = v(m + k, m + k) - v(m + k, n + k) * v(m + k, n + k) / vp;
    return cx * cp;
}

std::vector<int> cvcluster::modes_of_mask(uint64_t mask, int mode_count) {
    std::vector<int> out;
    for (int k = 0; k < mode_count; k++) {
        if ((mask >> k) & 1) {
            out.push_back(k);
        }
    }
    return out;
}

static uint64_t full_mask(int mode_count) {
    return mode_count >= 64 ? ~(uint64_t)0 : (((uint64_t)1 << mode_count) - 1);
}

Bipartition Bipartition::canonical(int mode_count, uint64_t subset) {
    if (mode_count < 2 || mode_count > 63) {
        throw Error(ErrorCode::TooSmall, "bipartitions need between 2 and 63 modes");
    }
    uint64_t all = full_mask(mode_count);
    if (subset == 0 || (subset & ~all) != 0 || subset == all) {
        throw Error(ErrorCode::IndexOutOfRange, "subset must be a nonempty proper subset of the modes");
    }
    uint64_t other = all & ~subset;
    int na = std::popcount(subset);
    int nb = mode_count - na;
    if (na < nb || (na == nb && (subset & 1))) {
        return {mode_count, subset};
    }
    return {mode_count, other};
}

uint64_t Bipartition::set_b() const {
    return full_mask(mode_count) & ~set_a;
}

std::vector<int> Bipartition::modes_a() const {
    return modes_of_mask(set_a, mode_count);
}

std::vector<int> Bipartition::modes_b() const {
    return modes_of_mask(set_b(), mode_count);
}

namespace {

/// Reusable buffers for spectra of covariance factors.
struct SpectrumWorkspace {
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    Matrix k;
    Matrix c;
    Matrix ctc;

    /// Squared symplectic eigenvalues (each listed twice, ascending) of l l^T against
    /// the form [[0, D], [-D, 0]], where D = diag(flip).
    const Vector &squared_spectrum(const Matrix &l, const Vector *flip) {
        Eigen::Index n = l.rows() / 2;
        auto lx = l.topRows(n);
        auto lp = l.bottomRows(n);
        if (flip == nullptr) {
            k.noalias() = lx.transpose() * lp;
        } else {
            k.noalias() = lx.transpose() * flip->asDiagonal() * lp;
        }
        c = k - k.transpose();
        ctc.noalias() = c.transpose() * c;
        solver.compute(ctc, Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }

    /// Smallest symplectic eigenvalue.
    double min_value(const Matrix &l, const Vector *flip) {
        const Vector &ev = squared_spectrum(l, flip);
        return std::sqrt(std::max(0.5 * (ev[0] + ev[1]), 0.0));
    }

    /// Sum of ln(mu) over symplectic eigenvalues mu > 1.
    double log_excess(const Matrix &l) {
        const Vector &ev = squared_spectrum(l, nullptr);
        double total = 0;
        for (Eigen::Index j = 0; j + 1 < ev.size(); j += 2) {
            double mu2 = 0.5 * (ev[j] + ev[j + 1]);
            if (mu2 > 1) {
                total += 0.5 * std::log(mu2);
            }
        }
        return total;
    }
};

Matrix checked_cholesky(const Matrix &v) {
    Eigen::LLT<Matrix> llt(v);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
    }
    return llt.matrixL();
}

/// Evaluates witnesses for many bipartitions of one covariance matrix.
class SweepEvaluator {
   public:
    explicit SweepEvaluator(const Matrix &v) : modes_((int)v.rows() / 2) {
        l_ = checked_cholesky(v);
        // Conditional covariances are inverses of principal blocks of V^{-1}.
        Matrix eye = Matrix::Identity(v.rows(), v.cols());
        inverse_ = Eigen::LLT<Matrix>(v).solve(eye);
        inverse_ = 0.5 * (inverse_ + inverse_.transpose());
    }

    WitnessRecord evaluate(uint64_t set_a, SpectrumWorkspace &ws) const {
        WitnessRecord rec{set_a, 0, 0, 0};
        Vector flip = Vector::Ones(modes_);
        for (int k = 0; k < modes_; k++) {
            if ((set_a >> k) & 1) {
                flip[k] = -1;
            }
        }
        rec.npt = -std::log(ws.min_value(l_, &flip));
        uint64_t set_b = full_mask(modes_) & ~set_a;
        rec.steer_ab = steer_into(set_b, ws);
        rec.steer_ba = steer_into(set_a, ws);
        return rec;
    }

   private:
    double steer_into(uint64_t target, SpectrumWorkspace &ws) const {
        auto modes = modes_of_mask(target, modes_);
        auto idx = quadrature_indices(modes_, modes);
        Matrix block = submatrix(inverse_, idx, idx);
        Eigen::LLT<Matrix> llt(block);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCode::SingularBlock, "conditional covariance is singular");
        }
        Matrix l = llt.matrixL();
        // Symplectic eigenvalues of the inverse are reciprocals of the conditional ones.
        return ws.log_excess(l);
    }

    int modes_;
    Matrix l_;
    Matrix inverse_;
};

}  // namespace

double cvcluster::npt_value(const Matrix &v, const Bipartition &cut) {
    check_covariance_shape(v);
    int m = (int)v.rows() / 2;
    if (cut.mode_count != m) {
        throw Error(ErrorCode::SizeMismatch, "bipartition does not match covariance");
    }
    Bipartition::canonical(m, cut.set_a);
    Matrix omega = symplectic_form(m);
    for (int k = 0; k < m; k++) {
        if ((cut.set_a >> k) & 1) {
            omega(k, k + m) = -1;
            omega(k + m, k) = 1;
        }
    }
    Matrix l = checked_cholesky(v);
    return -std::log(symplectic_eigenvalues_from_factor(l, omega).min());
}

double cvcluster::steerability(const Matrix &v, std::span<const int> from, std::span<const int> to) {
    check_covariance_shape(v);
    int m = (int)v.rows() / 2;
    if (from.empty() || to.empty()) {
        throw Error(ErrorCode::TooSmall, "steering needs nonempty parties");
    }
    std::vector<int> joint;
    joint.insert(joint.end(), from.begin(), from.end());
    joint.insert(joint.end(), to.begin(), to.end());
    std::vector<int> sorted = joint;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::IndexOutOfRange, "parties must be disjoint");
    }
    for (int k : sorted) {
        if (k < 0 || k >= m) {
            throw Error(ErrorCode::IndexOutOfRange, "mode index out of range");
        }
    }
    // Marginal on from+to, relabeled so `to` occupies the last |to| modes.
    auto idx = quadrature_indices(m, joint);
    Matrix marginal = submatrix(v, idx, idx);
    std::vector<int> keep;
    for (size_t k = from.size(); k < joint.size(); k++) {
        keep.push_back((int)k);
    }
    Matrix cond = schur_complement(marginal, keep);
    double total = 0;
    for (double nu : symplectic_eigenvalues(cond).values) {
        if (nu < 1) {
            total -= std::log(nu);
        }
    }
    return std::max(0.0, total);
}

WitnessReport cvcluster::full_sweep(const Matrix &v, int workers, uint64_t limit) {
    check_covariance_shape(v);
    int m = (int)v.rows() / 2;
    if (m > MAX_SWEEP_MODES) {
        throw Error(ErrorCode::TooManyModes, "full sweep is limited to " + std::to_string(MAX_SWEEP_MODES) + " modes");
    }
    if (m < 2) {
        throw Error(ErrorCode::TooSmall, "full sweep needs at least two modes");
    }
    SweepEvaluator evaluator(v);
    uint64_t total = ((uint64_t)1 << (m - 1)) - 1;
    if (limit != 0) {
        total = std::min(total, limit);
    }

    WitnessReport report;
    report.mode_count = m;
    report.records.resize(total);
    const uint64_t chunk = 512;
    std::atomic<uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        SpectrumWorkspace ws;
        try {
            while (true) {
                uint64_t start = next.fetch_add(chunk);
                if (start >= total) {
                    break;
                }
                uint64_t end = std::min(total, start + chunk);
                for (uint64_t i = start; i < end; i++) {
                    // Subsets of modes 1..M-1; the complement always holds mode 0.
                    uint64_t subset = (i + 1) << 1;
                    report.records[i] = evaluator.evaluate(Bipartition::canonical(m, subset).set_a, ws);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(total);
        }
    };
    int n_threads = std::max(1, workers);
    std::vector<std::thread> threads;
    for (int t = 1; t < n_threads; t++) {
        threads.emplace_back(work);
    }
    work();
    for (auto &t : threads) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::sort(report.records.begin(), report.records.end(), [](const WitnessRecord &a, const WitnessRecord &b) {
        if (a.npt != b.npt) {
            return a.npt < b.npt;
        }
        return a.set_a < b.set_a;
    });
    if (!report.records.empty()) {
        report.min_npt = report.records.front().npt;
    }
    for (const auto &r : report.records) {
        report.zero_steer_ab += r.steer_ab < ZERO_STEERING_THRESHOLD;
        report.zero_steer_ba += r.steer_ba < ZERO_STEERING_THRESHOLD;
    }
    return report;
}
