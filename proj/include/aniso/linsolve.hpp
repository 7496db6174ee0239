#pragma once

#include "aniso/sparse.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace aniso {

enum class SolverMethod {
    Auto,               // CG when symmetric, dense LU otherwise
    ConjugateGradient,
    DenseCholesky,      // n ≤ 4000
    DenseLU,            // n ≤ 4000
};

enum class Preconditioner { None, Jacobi };

[[nodiscard]] std::string to_string(SolverMethod method);

struct SolverConfig {
    SolverMethod method = SolverMethod::Auto;
    Preconditioner preconditioner = Preconditioner::Jacobi;
    double rel_tol = 1e-10;
    int max_iter = 0;  // 0 → 20·n
    bool record_history = false;
    bool record_iterates = false;

    /// Throws InvalidArgument unless rel_tol > 0 and max_iter ≥ 0.
    void validate() const;
};

inline constexpr int kDenseLimit = 4000;

struct SolveResult {
    Vector x;
    double residual_norm = 0.0;  // ‖K x − rhs‖₂
    int iterations = 0;
    SolverMethod method = SolverMethod::Auto;
    std::vector<double> residual_history;  // CG only, when requested
    std::vector<Vector> iterates;          // CG only, when requested
};

/// Solves K x = rhs. `guess` warm-starts CG. Auto falls back from a CG
/// breakdown to dense Cholesky, and uses dense LU for nonsymmetric K.
/// Throws NonConvergence (with best iterate) or SolverBreakdown.
[[nodiscard]] SolveResult solve(const SparseMatrix& K, std::span<const double> rhs, const SolverConfig& cfg = {},
                                std::span<const double> guess = {});

/// Dense factorization of a fixed matrix for repeated solves: Cholesky when
/// symmetric positive definite, otherwise LU with partial pivoting.
class Factorization {
public:
    /// Throws SolverBreakdown when singular, InvalidArgument above kDenseLimit.
    explicit Factorization(const SparseMatrix& K);

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] bool is_cholesky() const noexcept { return cholesky_; }
    [[nodiscard]] Vector solve(std::span<const double> rhs) const;

private:
    int n_ = 0;
    bool cholesky_ = false;
    std::vector<double> factor_;
    std::vector<int> pivot_;
};

/// Repeated solves with one matrix: a dense factorization up to
/// `dense_threshold`, warm-started CG above it.
class ReusableSolver {
public:
    ReusableSolver(SparseMatrix K, SolverConfig cfg = {}, int dense_threshold = 1500);

    [[nodiscard]] const SparseMatrix& matrix() const noexcept { return K_; }
    [[nodiscard]] Vector solve(std::span<const double> rhs, std::span<const double> guess = {}) const;

private:
    SparseMatrix K_;
    SolverConfig cfg_;
    std::shared_ptr<const Factorization> dense_;
};

}  // namespace aniso
