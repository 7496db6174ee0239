#include "aniso/linsolve.hpp"

#include "aniso/errors.hpp"

#include <algorithm>
#include <cmath>

namespace aniso {

std::string to_string(SolverMethod method) {
    switch (method) {
        case SolverMethod::Auto: return "auto";
        case SolverMethod::ConjugateGradient: return "cg";
        case SolverMethod::DenseCholesky: return "cholesky";
        case SolverMethod::DenseLU: return "lu";
    }
    return "?";
}

void SolverConfig::validate() const {
    if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
    if (max_iter < 0) throw InvalidArgument("max_iter must be non-negative");
}

namespace {

bool try_cholesky(std::vector<double>& a, int n) {
    for (int j = 0; j < n; ++j) {
        double* rj = a.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(n);
        double d = rj[j];
        for (int k = 0; k < j; ++k) d -= rj[k] * rj[k];
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        rj[j] = d;
        for (int i = j + 1; i < n; ++i) {
            double* ri = a.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n);
            double s = ri[j];
            for (int k = 0; k < j; ++k) s -= ri[k] * rj[k];
            ri[j] = s / d;
        }
    }
    return true;
}

SolveResult conjugate_gradient(const SparseMatrix& K, std::span<const double> b, const SolverConfig& cfg,
                               std::span<const double> guess) {
    const int n = K.size();
    const auto N = static_cast<std::size_t>(n);
    const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 20 * std::max(n, 1);
    SolveResult res;
    res.method = SolverMethod::ConjugateGradient;
    res.x = guess.empty() ? Vector(N, 0.0) : Vector(guess.begin(), guess.end());
    if (res.x.size() != N) throw InvalidArgument("initial guess has the wrong size");

    Vector inv_diag(N, 1.0);
    if (cfg.preconditioner == Preconditioner::Jacobi) {
        const Vector d = K.diagonal();
        for (std::size_t i = 0; i < N; ++i)
            if (d[i] > 0.0) inv_diag[i] = 1.0 / d[i];
    }

    Vector r = subtract(b, K * res.x);
    const double bnorm = norm2(b);
    const double target = cfg.rel_tol * bnorm;
    double rnorm = norm2(r);
    if (cfg.record_history) res.residual_history.push_back(rnorm);
    if (cfg.record_iterates) res.iterates.push_back(res.x);
    if (rnorm <= target || bnorm == 0.0) {
        if (bnorm == 0.0) std::fill(res.x.begin(), res.x.end(), 0.0);
        res.residual_norm = bnorm == 0.0 ? 0.0 : rnorm;
        return res;
    }

    Vector z(N), p(N), Kp(N);
    for (std::size_t i = 0; i < N; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    Vector best = res.x;
    double best_norm = rnorm;

    for (int it = 1; it <= max_iter; ++it) {
        K.multiply(p, Kp);
        const double curvature = dot(p, Kp);
        if (!(curvature > 0.0))
            throw SolverBreakdown("conjugate gradient breakdown (non-positive curvature); "
                                  "the matrix is not SPD, use a dense solver");
        const double alpha = rz / curvature;
        axpy(alpha, p, res.x);
        axpy(-alpha, Kp, r);
        rnorm = norm2(r);
        res.iterations = it;
        if (cfg.record_history) res.residual_history.push_back(rnorm);
        if (cfg.record_iterates) res.iterates.push_back(res.x);
        if (rnorm < best_norm) {
            best_norm = rnorm;
            best = res.x;
        }
        if (rnorm <= target) {
            // Confirm against the true residual, which can drift from the recursion.
            const double true_norm = norm2(subtract(b, K * res.x));
            if (true_norm <= target) {
                res.residual_norm = true_norm;
                return res;
            }
            r = subtract(b, K * res.x);
            rnorm = true_norm;
        }
        for (std::size_t i = 0; i < N; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NonConvergence("conjugate gradient did not converge in " + std::to_string(max_iter) + " iterations",
                         std::move(best), best_norm);
}

SolveResult dense_solve(const SparseMatrix& K, std::span<const double> b, SolverMethod method) {
    SolveResult res;
    res.method = method;
    const Factorization f(K);
    if (method == SolverMethod::DenseCholesky && !f.is_cholesky())
        throw SolverBreakdown("Cholesky failed: matrix is not symmetric positive definite");
    res.x = f.solve(b);
    res.residual_norm = norm2(subtract(b, K * res.x));
    return res;
}

}  // namespace

SolveResult solve(const SparseMatrix& K, std::span<const double> rhs, const SolverConfig& cfg,
                  std::span<const double> guess) {
    cfg.validate();
    if (rhs.size() != static_cast<std::size_t>(K.size())) throw InvalidArgument("right-hand side has the wrong size");
    switch (cfg.method) {
        case SolverMethod::ConjugateGradient: return conjugate_gradient(K, rhs, cfg, guess);
        case SolverMethod::DenseCholesky:
        case SolverMethod::DenseLU: return dense_solve(K, rhs, cfg.method);
        case SolverMethod::Auto: break;
    }
    if (!K.is_symmetric()) return dense_solve(K, rhs, SolverMethod::DenseLU);
    try {
        return conjugate_gradient(K, rhs, cfg, guess);
    } catch (const SolverBreakdown&) {
        if (K.size() > kDenseLimit) throw;
        return dense_solve(K, rhs, SolverMethod::DenseLU);
    }
}

Factorization::Factorization(const SparseMatrix& K) : n_(K.size()) {
    if (n_ > kDenseLimit) throw InvalidArgument("dense factorization limited to n <= 4000");
    const auto N = static_cast<std::size_t>(n_);
    factor_ = K.to_dense();
    if (K.is_symmetric()) {
        std::vector<double> trial = factor_;
        if (try_cholesky(trial, n_)) {
            factor_ = std::move(trial);
            cholesky_ = true;
            return;
        }
    }
    pivot_.resize(N);
    for (int k = 0; k < n_; ++k) {
        int piv = k;
        double big = std::abs(factor_[static_cast<std::size_t>(k) * N + static_cast<std::size_t>(k)]);
        for (int i = k + 1; i < n_; ++i) {
            const double v = std::abs(factor_[static_cast<std::size_t>(i) * N + static_cast<std::size_t>(k)]);
            if (v > big) {
                big = v;
                piv = i;
            }
        }
        if (big == 0.0) throw SolverBreakdown("LU failed: matrix is singular");
        pivot_[static_cast<std::size_t>(k)] = piv;
        if (piv != k)
            std::swap_ranges(factor_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(k) * N),
                             factor_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(k + 1) * N),
                             factor_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(piv) * N));
        const double* rk = factor_.data() + static_cast<std::size_t>(k) * N;
        for (int i = k + 1; i < n_; ++i) {
            double* ri = factor_.data() + static_cast<std::size_t>(i) * N;
            const double l = ri[k] / rk[k];
            ri[k] = l;
            if (l == 0.0) continue;
            for (int j = k + 1; j < n_; ++j) ri[j] -= l * rk[j];
        }
    }
}

Vector Factorization::solve(std::span<const double> rhs) const {
    if (rhs.size() != static_cast<std::size_t>(n_)) throw InvalidArgument("right-hand side has the wrong size");
    const auto N = static_cast<std::size_t>(n_);
    Vector x(rhs.begin(), rhs.end());
    if (cholesky_) {
        for (std::size_t i = 0; i < N; ++i) {
            const double* ri = factor_.data() + i * N;
            double s = x[i];
            for (std::size_t k = 0; k < i; ++k) s -= ri[k] * x[k];
            x[i] = s / ri[i];
        }
        for (std::size_t ii = N; ii-- > 0;) {
            double s = x[ii];
            for (std::size_t k = ii + 1; k < N; ++k) s -= factor_[k * N + ii] * x[k];
            x[ii] = s / factor_[ii * N + ii];
        }
        return x;
    }
    for (std::size_t k = 0; k < N; ++k) {
        const auto piv = static_cast<std::size_t>(pivot_[k]);
        if (piv != k) std::swap(x[k], x[piv]);
    }
    for (std::size_t i = 0; i < N; ++i) {
        const double* ri = factor_.data() + i * N;
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= ri[k] * x[k];
        x[i] = s;
    }
    for (std::size_t ii = N; ii-- > 0;) {
        const double* ri = factor_.data() + ii * N;
        double s = x[ii];
        for (std::size_t k = ii + 1; k < N; ++k) s -= ri[k] * x[k];
        x[ii] = s / ri[ii];
    }
    return x;
}

ReusableSolver::ReusableSolver(SparseMatrix K, SolverConfig cfg, int dense_threshold)
    : K_(std::move(K)), cfg_(cfg) {
    cfg_.validate();
    const bool dense = cfg_.method == SolverMethod::DenseCholesky || cfg_.method == SolverMethod::DenseLU ||
                       (cfg_.method == SolverMethod::Auto && K_.size() <= dense_threshold);
    if (dense) dense_ = std::make_shared<const Factorization>(K_);
}

Vector ReusableSolver::solve(std::span<const double> rhs, std::span<const double> guess) const {
    if (dense_) return dense_->solve(rhs);
    return aniso::solve(K_, rhs, cfg_, guess).x;
}

}  // namespace aniso
