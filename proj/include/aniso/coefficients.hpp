#pragma once

#include "aniso/expression.hpp"
#include "aniso/tensor_spaces.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace aniso {

/// Multipliers applied blockwise to A when forming A_ε:
/// (ε², ε, ε, 1) for (A11, A12, A21, A22).
struct BlockScaling {
    double s11 = 1.0;
    double s12 = 1.0;
    double s21 = 1.0;
    double s22 = 1.0;
};

/// Throws InvalidArgument unless 0 < ε ≤ 1.
[[nodiscard]] BlockScaling scale_matrix(double epsilon);

/// The 2×2 diffusion matrix A(x) = [a11 a12; a21 a22] with its declared
/// ellipticity constant and optional declared partial derivatives of the
/// off-diagonal entries.
struct CoefficientField {
    Expression a11 = Expression::constant(1.0);
    Expression a12 = Expression::constant(0.0);
    Expression a21 = Expression::constant(0.0);
    Expression a22 = Expression::constant(1.0);

    std::optional<Expression> da12_dx1;
    std::optional<Expression> da12_dx2;
    std::optional<Expression> da21_dx1;
    std::optional<Expression> da21_dx2;

    double lambda = 1.0;

    bool a22_depends_only_on_x2 = false;  // (hypAd2)
    bool hyp_ad1 = false;                 // ∂x₁a12, ∂x₂a12 bounded
    bool hyp_a12_second = false;          // ∂²x₁x₂ a12 ∈ L²

    [[nodiscard]] static CoefficientField identity();

    /// A(x) row-major.
    [[nodiscard]] std::array<double, 4> at(double x1, double x2) const;

    /// A_ε ξ·ξ at x.
    [[nodiscard]] double quadratic_form(double x1, double x2, std::array<double, 2> xi,
                                        const BlockScaling& scaling) const;

    /// Spot-checks ellipticity, boundedness and (when flagged) the x₂-only
    /// dependence of a22 on an n × n sampling lattice. Throws InvalidArgument
    /// naming the violated hypothesis.
    void validate(const TensorDomain& domain, int samples = 64) const;

    /// Smallest eigenvalue of the symmetric part of A over the lattice.
    [[nodiscard]] double sampled_min_eigenvalue(const TensorDomain& domain, int samples) const;
};

enum class ReactionKind { Zero, Linear, Custom };

/// Monotone reaction β with β(0) = 0 and |β(s)| ≤ M(1 + |s|).
struct ReactionSpec {
    ReactionKind kind = ReactionKind::Zero;
    double mu = 0.0;                            // Linear
    Expression function = Expression::constant(0.0);  // Custom, in the variable s
    double lipschitz = 0.0;                     // Custom
    double growth = 0.0;                        // Custom

    [[nodiscard]] static ReactionSpec zero() { return {}; }
    [[nodiscard]] static ReactionSpec linear(double mu);
    [[nodiscard]] static ReactionSpec custom(Expression beta, double lipschitz, double growth);

    [[nodiscard]] double operator()(double s) const;
    [[nodiscard]] double growth_constant() const;
    [[nodiscard]] double lipschitz_constant() const;

    /// Samples β on [−span, span]; throws InvalidArgument if β(0) ≠ 0, β is
    /// decreasing somewhere or the growth bound fails.
    void validate(double span = 100.0, int samples = 4001) const;
};

/// Source term f with an optional declared ∂x₁f.
struct SourceField {
    Expression f = Expression::constant(0.0);
    std::optional<Expression> df_dx1;
    bool hyp_fad1 = false;  // ∇X₁f ∈ L²
    bool hyp_fad2 = false;  // f(·, x₂) ∈ H¹₀(ω₁)

    /// ‖f‖_{L²(Ω)} by a fine tensor Gauss rule.
    [[nodiscard]] double l2_norm(const TensorDomain& domain) const;
    /// ‖∂x₁f‖_{L²(Ω)}; uses the declared partial when present, otherwise
    /// central differences.
    [[nodiscard]] double grad_x1_norm(const TensorDomain& domain) const;

    /// When hyp_fad2 is declared, checks that f vanishes on x₁ ∈ ∂ω₁.
    void validate(const TensorDomain& domain) const;
};

/// ∫_Ω g(x) dx with a composite Gauss rule fine enough for smooth g.
[[nodiscard]] double integrate_closed_form(const TensorDomain& domain,
                                           const std::function<double(double, double)>& g,
                                           int cells = 64, int order = 8);

struct LedgerEntry {
    std::string name;
    double value;
    std::string formula;
};

/// Explicit constants of the error analysis, computed from A, λ, Ω, f, β.
struct ConstantLedger {
    double C_omega1 = 0, C_omega2 = 0, C_Omega = 0;
    double area = 0;
    double lambda = 0;
    double M = 0;  // growth constant of β

    double sup_a11 = 0, sup_a12 = 0, sup_a21 = 0, sup_a22 = 0;
    double sup_A = 0;            // sup_x of the spectral norm of A(x)
    double sup_da12_dx2 = 0;     // ‖∂x_j a_ij‖, i ∈ X₁, j ∈ X₂
    double sup_da12_dx1 = 0;     // ‖∂x_i a_ij‖

    double C = 0;        // (‖A21‖² + ‖A11‖²)/2λ
    double C_prime = 0;
    double C_second = 0;
    double C1 = 0, C2 = 0;
    double C3 = 0;            // √q·C²_{ω₂}/λ (proof form)
    double C3_statement = 0;  // √q·C_{ω₂}/λ

    double f_norm = 0;
    double grad_x1_f_norm = 0;

    double cea_limit = 0;           // nonlinear, square-root form
    double cea_perturbed = 0;       // nonlinear, divided by ε² at use
    double cea_linear_limit = 0;    // ‖A22‖/λ
    double cea_linear_perturbed = 0;  // ‖A‖/λ, divided by ε² at use

    int sampling_grid = 0;

    /// Constant of the O(ε) rate bound: C1·C3‖∇X₁f‖ + C2‖f‖.
    [[nodiscard]] double rate_constant() const { return C1 * C3 * grad_x1_f_norm + C2 * f_norm; }

    [[nodiscard]] std::vector<LedgerEntry> entries() const;
};

/// Sup-norms are estimated on a (grid+1)² lattice of Ω including the boundary.
[[nodiscard]] ConstantLedger compute_constants(const CoefficientField& A, const TensorDomain& domain,
                                               const SourceField& f,
                                               const ReactionSpec& beta = ReactionSpec::zero(),
                                               int grid = 512);

}  // namespace aniso
