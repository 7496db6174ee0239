#pragma once

#include "aniso/assembly.hpp"
#include "aniso/coefficients.hpp"
#include "aniso/linsolve.hpp"
#include "aniso/tensor_spaces.hpp"

#include <string>
#include <vector>

namespace aniso {

/// ε ∈ (0,1] or the limit token.
class EpsilonValue {
public:
    /// Throws InvalidArgument("epsilon must lie in (0,1]").
    static EpsilonValue of(double epsilon);
    static EpsilonValue limit() noexcept { return EpsilonValue(); }

    [[nodiscard]] bool is_limit() const noexcept { return limit_; }
    /// Throws InvalidArgument for the limit token.
    [[nodiscard]] double value() const;
    /// "LIMIT" or the value in %.17g.
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const EpsilonValue&, const EpsilonValue&) = default;

private:
    EpsilonValue() = default;
    bool limit_ = true;
    double value_ = 0.0;
};

struct ProblemSpec {
    TensorDomain domain{{0.0, 1.0}, {0.0, 1.0}};
    CoefficientField A;
    SourceField f;
    ReactionSpec beta;
    EpsilonValue epsilon = EpsilonValue::limit();

    [[nodiscard]] ProblemSpec with_epsilon(EpsilonValue e) const;
};

struct SolveOptions {
    SolverConfig solver = [] {
        SolverConfig c;
        c.rel_tol = 1e-12;
        return c;
    }();
    double damping = 1.0;   // θ ∈ (0,1]
    double tol = 1e-9;      // nonlinear residual, relative to ‖F‖
    int max_picard = 200;
    /// Shift σ in the Picard step (K + σM)u⁺ = F − B(u) + σMu; negative
    /// selects L_β/2.
    double shift = -1.0;
    Vector initial_guess;   // empty → zero
};

struct GalerkinSolution {
    SpacePtr space;
    Vector coeffs;
    EpsilonValue epsilon = EpsilonValue::limit();
    int picard_iterations = 0;
    double final_residual = 0.0;  // ‖(K u + B(u)) − F‖ (or linear analogue)
    double rhs_norm = 0.0;        // ‖F‖
    std::vector<double> residual_history;  // Picard only
};

/// K_eps for ε, K22 for the limit.
[[nodiscard]] SparseMatrix operator_for(const AssembledProblem& p, const EpsilonValue& e);

/// β = Zero or Linear(μ): solves (μM + K)u = F.
[[nodiscard]] GalerkinSolution solve_linear(const ProblemSpec& spec, const AssembledProblem& problem,
                                            const SolveOptions& opts = {});
[[nodiscard]] GalerkinSolution solve_linear(const ProblemSpec& spec, SpacePtr space,
                                            const SolveOptions& opts = {});

/// Damped, shifted Picard iteration for any β. Throws NonConvergence when
/// max_picard is exceeded.
[[nodiscard]] GalerkinSolution solve_semilinear(const ProblemSpec& spec, const AssembledProblem& problem,
                                                const SolveOptions& opts = {});
[[nodiscard]] GalerkinSolution solve_semilinear(const ProblemSpec& spec, SpacePtr space,
                                                const SolveOptions& opts = {});

/// Dispatches on β.
[[nodiscard]] GalerkinSolution solve(const ProblemSpec& spec, const AssembledProblem& problem,
                                     const SolveOptions& opts = {});

/// lhs ≤ rhs·(1 + 1e-9) + 1e-14.
[[nodiscard]] bool within_bound(double lhs, double rhs);

struct BoundCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct AprioriReport {
    std::vector<BoundCheck> checks;
    [[nodiscard]] bool pass() const;
};

/// Gradient and reaction norms of a solution against the a-priori bounds:
/// ε-solutions get the full-gradient and ε⁻²-weighted reaction bounds,
/// limit solutions the ∇X₂ and unweighted ones.
[[nodiscard]] AprioriReport apriori_check(const GalerkinSolution& sol, const AssembledProblem& problem,
                                          const ReactionSpec& beta, const ConstantLedger& ledger);

/// ‖β(u_h)‖_{L²} by the space's quadrature.
[[nodiscard]] double reaction_norm(const GalerkinSpace& space, std::span<const double> coeffs,
                                   const ReactionSpec& beta);

/// √(vᵀGv)
[[nodiscard]] double energy_norm(const SparseMatrix& G, std::span<const double> v);

}  // namespace aniso
