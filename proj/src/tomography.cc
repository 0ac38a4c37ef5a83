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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <thread>

using namespace cvcluster;

Vector MeasurementSetting::form() const {
    CVector rotated = mode_vector * std::polar(1.0, phase);
    Eigen::Index m = rotated.size();
    Vector v(2 * m);
    v.head(m) = rotated.real();
    v.tail(m) = rotated.imag();
    return v;
}

std::vector<MeasurementSetting> cvcluster::informationally_complete_settings(int mode_count) {
    if (mode_count < 1) {
        throw Error(ErrorCode::TooSmall, "tomography needs at least one mode");
    }
    const double phases[] = {0, std::numbers::pi / 4, std::numbers::pi / 2};
    const double s = 1 / std::sqrt(2.0);
    std::vector<MeasurementSetting> out;
    for (int m = 0; m < mode_count; m++) {
        CVector u = CVector::Zero(mode_count);
        u[m] = 1;
        for (double ph : phases) {
            out.push_back({u, ph});
        }
    }
    for (int m = 0; m < mode_count; m++) {
        for (int n = m + 1; n < mode_count; n++) {
            CVector sym = CVector::Zero(mode_count);
            sym[m] = s;
            sym[n] = s;
            CVector quad = CVector::Zero(mode_count);
            quad[m] = s;
            quad[n] = std::complex<double>(0, s);
            for (double ph : phases) {
                out.push_back({sym, ph});
            }
            for (double ph : phases) {
                out.push_back({quad, ph});
            }
        }
    }
    return out;
}

namespace {

/// Row k holds vech(v_k v_k^T) so that s_k = row_k . vech(V), with vech listing V_ii and V_ij (i<j).
Matrix design_matrix(const std::vector<MeasurementSetting> &settings, int n) {
    int unknowns = n * (n + 1) / 2;
    Matrix a(settings.size(), unknowns);
    for (size_t k = 0; k < settings.size(); k++) {
        Vector v = settings[k].form();
        if (v.size() != n) {
            throw Error(ErrorCode::SizeMismatch, "setting does not match mode count");
        }
        int col = 0;
        for (int i = 0; i < n; i++) {
            for (int j = i; j < n; j++) {
                a(k, col++) = (i == j ? 1.0 : 2.0) * v[i] * v[j];
            }
        }
    }
    return a;
}

Matrix unvech(const Vector &x, int n) {
    Matrix v(n, n);
    int col = 0;
    for (int i = 0; i < n; i++) {
        for (int j = i; j < n; j++) {
            v(i, j) = v(j, i) = x[col++];
        }
    }
    return v;
}

/// Sufficient statistics of the variance likelihood.
struct Objective {
    Matrix forms;
    Vector counts;
    Vector variances;

    explicit Objective(const TomographyDataset &data) {
        size_t k = data.settings.size();
        if (k == 0 || data.records.size() != k) {
            throw Error(ErrorCode::SizeMismatch, "dataset settings and records differ");
        }
        int n = 2 * data.mode_count;
        forms.resize(k, n);
        counts.resize(k);
        variances.resize(k);
        for (size_t i = 0; i < k; i++) {
            Vector v = data.settings[i].form();
            if (v.size() != n) {
                throw Error(ErrorCode::SizeMismatch, "setting does not match mode count");
            }
            forms.row(i) = v.transpose();
            counts[i] = (double)data.records[i].samples;
            variances[i] = data.records[i].variance;
        }
    }

    Vector model(const Matrix &cov) const {
        Matrix fv = forms * cov;
        return fv.cwiseProduct(forms).rowwise().sum();
    }

    double value(const Matrix &cov) const {
        Vector s = model(cov);
        double total = 0;
        for (Eigen::Index k = 0; k < s.size(); k++) {
            if (!(s[k] > 0)) {
                return std::numeric_limits<double>::infinity();
            }
            total += counts[k] * (std::log(s[k]) + variances[k] / s[k]);
        }
        return total;
    }

    /// Returns the value and writes dF/dV.
    double value_and_gradient(const Matrix &cov, Matrix &grad) const {
        Vector s = model(cov);
        Vector w(s.size());
        double total = 0;
        for (Eigen::Index k = 0; k < s.size(); k++) {
            if (!(s[k] > 0)) {
                grad.setZero(cov.rows(), cov.cols());
                return std::numeric_limits<double>::infinity();
            }
            total += counts[k] * (std::log(s[k]) + variances[k] / s[k]);
            w[k] = counts[k] * (1 / s[k] - variances[k] / (s[k] * s[k]));
        }
        grad.noalias() = forms.transpose() * w.asDiagonal() * forms;
        return total;
    }
};

int packed_size(int n) {
    return n * (n + 1) / 2;
}

Vector pack_lower(const Matrix &t) {
    int n = (int)t.rows();
    Vector x(packed_size(n));
    int k = 0;
    for (int j = 0; j < n; j++) {
        for (int i = j; i < n; i++) {
            x[k++] = t(i, j);
        }
    }
    return x;
}

Matrix unpack_lower(const Vector &x, int n) {
    Matrix t = Matrix::Zero(n, n);
    int k = 0;
    for (int j = 0; j < n; j++) {
        for (int i = j; i < n; i++) {
            t(i, j) = x[k++];
        }
    }
    return t;
}

Matrix factor_gradient(const Matrix &grad_v, const Matrix &t) {
    Matrix g = 2 * grad_v * t;
    return g.triangularView<Eigen::Lower>();
}

double min_nu(const Matrix &cov) {
    try {
        return symplectic_eigenvalues(cov).min();
    } catch (const Error &) {
        return 0;
    }
}

/// Two-loop recursion state.
struct LbfgsMemory {
    std::deque<Vector> s;
    std::deque<Vector> y;
    size_t capacity = 10;

    void clear() {
        s.clear();
        y.clear();
    }

    void push(Vector ds, Vector dy) {
        double sy = ds.dot(dy);
        if (!(sy > 1e-12 * ds.norm() * dy.norm())) {
            return;
        }
        s.push_back(std::move(ds));
        y.push_back(std::move(dy));
        if (s.size() > capacity) {
            s.pop_front();
            y.pop_front();
        }
    }

    Vector direction(const Vector &g) const {
        Vector q = g;
        std::vector<double> alpha(s.size());
        for (size_t i = s.size(); i-- > 0;) {
            alpha[i] = s[i].dot(q) / y[i].dot(s[i]);
            q -= alpha[i] * y[i];
        }
        if (!s.empty()) {
            q *= s.back().dot(y.back()) / y.back().squaredNorm();
        }
        for (size_t i = 0; i < s.size(); i++) {
            double beta = y[i].dot(q) / y[i].dot(s[i]);
            q += (alpha[i] - beta) * s[i];
        }
        return -q;
    }
};

struct Evaluated {
    Vector x;
    double f;
    Vector g;
};

Evaluated evaluate(const Objective &obj, const Vector &x, int n) {
    Matrix t = unpack_lower(x, n);
    Matrix gv;
    double f = obj.value_and_gradient(t * t.transpose(), gv);
    Vector g = std::isfinite(f) ? pack_lower(factor_gradient(gv, t)) : Vector::Zero(x.size());
    return {x, f, g};
}

Vector physical_factor(const Matrix &cov) {
    Matrix p = project_to_physical(cov);
    Eigen::LLT<Matrix> llt(p);
    return pack_lower(llt.matrixL());
}

bool small_change(double f_old, double f_new, double tol) {
    return std::abs(f_old - f_new) <= tol * std::max(1.0, std::abs(f_new));
}

}  // namespace

int cvcluster::design_rank(const std::vector<MeasurementSetting> &settings) {
    if (settings.empty()) {
        return 0;
    }
    int n = (int)settings.front().form().size();
    Matrix a = design_matrix(settings, n);
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(1e-10);
    return (int)qr.rank();
}

TomographyDataset cvcluster::acquire(
    const GaussianState &state,
    const std::vector<MeasurementSetting> &settings,
    size_t samples,
    double efficiency,
    uint64_t seed,
    int workers) {
    if (samples < 2) {
        throw Error(ErrorCode::InvalidConfig, "need at least two samples per setting");
    }
    TomographyDataset data;
    data.mode_count = state.mode_count();
    data.settings = settings;
    data.records.resize(settings.size());
    for (const auto &s : settings) {
        if (s.mode_vector.size() != state.mode_count() || std::abs(s.mode_vector.norm() - 1) > 1e-10) {
            throw Error(ErrorCode::SizeMismatch, "setting mode vector must be a unit vector over the state's modes");
        }
    }
    std::atomic<size_t> next{0};
    auto work = [&]() {
        while (true) {
            size_t k = next.fetch_add(1);
            if (k >= settings.size()) {
                break;
            }
            QuadratureForm form(settings[k].form());
            auto xs = sample_quadratures(state, form, samples, efficiency, derive_seed(seed, k));
            double mean = 0;
            for (double x : xs) {
                mean += x;
            }
            mean /= (double)samples;
            double ss = 0;
            for (double x : xs) {
                ss += (x - mean) * (x - mean);
            }
            data.records[k] = {samples, ss / (double)(samples - 1), mean};
        }
    };
    std::vector<std::thread> threads;
    for (int t = 1; t < workers; t++) {
        threads.emplace_back(work);
    }
    work();
    for (auto &t : threads) {
        t.join();
    }
    return data;
}

TomographyDataset cvcluster::exact_dataset(
    const Matrix &cov, const std::vector<MeasurementSetting> &settings, size_t samples) {
    check_covariance_shape(cov);
    TomographyDataset data;
    data.mode_count = (int)cov.rows() / 2;
    data.settings = settings;
    for (const auto &s : settings) {
        Vector v = s.form();
        if (v.size() != cov.rows()) {
            throw Error(ErrorCode::SizeMismatch, "setting does not match covariance");
        }
        data.records.push_back({samples, v.dot(cov * v), 0.0});
    }
    return data;
}

Matrix cvcluster::linear_inversion(const TomographyDataset &data) {
    int n = 2 * data.mode_count;
    if (data.records.size() != data.settings.size() || n == 0) {
        throw Error(ErrorCode::SizeMismatch, "dataset settings and records differ");
    }
    Matrix a = design_matrix(data.settings, n);
    Vector b(a.rows());
    for (Eigen::Index k = 0; k < a.rows(); k++) {
        const auto &rec = data.records[k];
        if (!(rec.variance > 0)) {
            throw Error(ErrorCode::DegenerateVariance, "recorded variance must be positive");
        }
        double w = std::sqrt((double)rec.samples) / rec.variance;
        a.row(k) *= w;
        b[k] = w * rec.variance;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < a.cols()) {
        throw Error(ErrorCode::RankDeficient, "settings do not span the covariance space");
    }
    return unvech(qr.solve(b), n);
}

double cvcluster::neg_log_likelihood(const TomographyDataset &data, const Matrix &cov) {
    return Objective(data).value(cov);
}

Matrix cvcluster::neg_log_likelihood_gradient(const TomographyDataset &data, const Matrix &cov) {
    Matrix g;
    Objective(data).value_and_gradient(cov, g);
    return g;
}

Matrix cvcluster::neg_log_likelihood_factor_gradient(const TomographyDataset &data, const Matrix &factor) {
    Matrix g;
    Objective(data).value_and_gradient(factor * factor.transpose(), g);
    return factor_gradient(g, factor);
}

Matrix cvcluster::project_to_physical(const Matrix &cov) {
    check_covariance_shape(cov, 1e-8 * std::max(1.0, cov.cwiseAbs().maxCoeff()));
    Matrix v = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(v);
    const double floor = 1e-6;
    if (eig.eigenvalues()[0] < floor) {
        Vector lam = eig.eigenvalues().cwiseMax(floor);
        v = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
        v = 0.5 * (v + v.transpose());
    }
    WilliamsonDecomposition w = williamson(v);
    if (w.spectrum.min() >= 1) {
        return v;
    }
    for (double &nu : w.spectrum.values) {
        nu = std::max(nu, 1.0);
    }
    Matrix out = w.symplectic * w.diagonal() * w.symplectic.transpose();
    return 0.5 * (out + out.transpose());
}

ReconstructionResult cvcluster::mle_reconstruct(const TomographyDataset &data, const MleOptions &options) {
    Objective obj(data);
    int n = 2 * data.mode_count;
    if (design_rank(data.settings) < packed_size(n)) {
        throw Error(ErrorCode::RankDeficient, "settings do not span the covariance space");
    }
    Matrix linear = linear_inversion(data);
    Vector linear_start = physical_factor(linear);
    Vector x0 = linear_start;
    if (options.init.has_value()) {
        if (options.init->rows() != n || options.init->cols() != n) {
            throw Error(ErrorCode::SizeMismatch, "initial covariance has the wrong size");
        }
        x0 = physical_factor(*options.init);
    }

    const double c1 = 1e-4;
    int iterations = 0;
    bool converged = false;

    // Unconstrained quasi-Newton on the Cholesky factor, re-projected periodically.
    Evaluated cur = evaluate(obj, x0, n);
    LbfgsMemory mem;
    int since_projection = 0;
    while (iterations < options.max_iter) {
        Vector d = mem.direction(cur.g);
        double slope = d.dot(cur.g);
        if (!(slope < 0)) {
            mem.clear();
            d = -cur.g;
            slope = d.dot(cur.g);
        }
        if (!(slope < 0)) {
            converged = true;
            break;
        }
        double step = mem.s.empty() ? std::min(1.0, 1.0 / cur.g.norm()) : 1.0;
        bool accepted = false;
        Evaluated trial;
        for (int h = 0; h < 60; h++) {
            trial = evaluate(obj, cur.x + step * d, n);
            if (trial.f <= cur.f + c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            converged = true;
            break;
        }
        iterations++;
        bool done = small_change(cur.f, trial.f, options.tol);
        mem.push(trial.x - cur.x, trial.g - cur.g);
        cur = std::move(trial);
        if (done) {
            converged = true;
            break;
        }
        if (options.projection_interval > 0 && ++since_projection >= options.projection_interval) {
            since_projection = 0;
            Matrix t = unpack_lower(cur.x, n);
            cur = evaluate(obj, physical_factor(t * t.transpose()), n);
            mem.clear();
        }
    }

    // Feasible polish: every accepted iterate is physical and strictly improves the objective.
    Matrix t = unpack_lower(cur.x, n);
    Evaluated best = evaluate(obj, physical_factor(t * t.transpose()), n);
    Evaluated from_linear = evaluate(obj, linear_start, n);
    if (from_linear.f < best.f) {
        best = std::move(from_linear);
    }
    auto project = [&](const Vector &x) {
        Matrix tt = unpack_lower(x, n);
        return evaluate(obj, physical_factor(tt * tt.transpose()), n);
    };
    mem.clear();
    bool polished = false;
    while (iterations < options.max_iter) {
        bool accepted = false;
        Evaluated trial;
        for (int attempt = 0; attempt < 2 && !accepted; attempt++) {
            Vector d = attempt == 0 ? mem.direction(best.g) : Vector(-best.g);
            if (!(d.dot(best.g) < 0)) {
                continue;
            }
            double step = mem.s.empty() || attempt == 1 ? std::min(1.0, 1.0 / best.g.norm()) : 1.0;
            for (int h = 0; h < 40; h++) {
                trial = project(best.x + step * d);
                if (trial.f < best.f) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                mem.clear();
            }
        }
        if (!accepted) {
            polished = true;
            break;
        }
        iterations++;
        bool done = small_change(best.f, trial.f, options.tol);
        mem.push(trial.x - best.x, trial.g - best.g);
        best = std::move(trial);
        if (done) {
            polished = true;
            break;
        }
    }

    ReconstructionResult out;
    Matrix tb = unpack_lower(best.x, n);
    out.covariance = tb * tb.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    out.iterations = iterations;
    out.objective = obj.value(out.covariance);
    out.min_symplectic_eigenvalue = min_nu(out.covariance);
    out.physicality_residual = std::max(0.0, 1 - out.min_symplectic_eigenvalue);
    out.converged = converged && polished;
    return out;
}
