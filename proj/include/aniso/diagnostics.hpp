#pragma once

#include "aniso/assembly.hpp"
#include "aniso/coefficients.hpp"
#include "aniso/elliptic.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace aniso {

struct ErrorNorms {
    double e_x1 = 0.0;  // ‖∂₁(u_a − u_b)‖
    double e_x2 = 0.0;  // ‖∂₂(u_a − u_b)‖
    double e_l2 = 0.0;  // ‖u_a − u_b‖
};

/// Both solutions must live on the problem's space (InvalidArgument otherwise).
[[nodiscard]] ErrorNorms error_norms(const GalerkinSolution& a, const GalerkinSolution& b,
                                     const AssembledProblem& problem);
[[nodiscard]] ErrorNorms error_norms(const AssembledProblem& problem, std::span<const double> a,
                                     std::span<const double> b);

/// A closed-form solution with its partial derivatives.
struct ExactSolution {
    Expression u;
    Expression du_dx1;
    Expression du_dx2;
};

/// Errors of a discrete field against a closed form, by the space's quadrature.
[[nodiscard]] ErrorNorms error_vs_exact(const GalerkinSpace& space, std::span<const double> coeffs,
                                        const ExactSolution& exact);

/// Least-squares slope of log(errors) against log(epsilons), skipping errors
/// below 1e3 machine epsilon. Empty when fewer than two points remain.
[[nodiscard]] std::optional<double> fit_slope(std::span<const double> epsilons, std::span<const double> errors);

/// Nonincreasing up to an absolute slack.
[[nodiscard]] bool nonincreasing(std::span<const double> values, double slack = 1e-12);

/// Fixed smooth test functions φ used to probe ⟨∂₁(u_ε − u), φ⟩.
inline constexpr int kWeakProbes = 3;

struct RatePoint {
    double epsilon = 1.0;
    ErrorNorms errors;
    double bound = 0.0;  // rate constant × ε; 0 when no verdict was requested
    bool verdict = true;
    std::array<double, kWeakProbes> weak{};  // ⟨∂₁(u_ε − u), φ_k⟩
};

struct RateStudyOptions {
    std::vector<double> epsilons{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::optional<ExactSolution> exact;  // default reference: limit solve on the same space
    bool bound_verdict = true;
    double min_slope = 0.95;
    SolveOptions solve;
};

struct RateStudy {
    std::string space;
    std::string reference;  // "limit-solve" or "exact"
    std::vector<RatePoint> points;
    std::optional<double> slope;  // fitted on e_x2
    double rate_constant = 0.0;
    bool bound_requested = false;
    bool bound_pass = true;
    bool slope_pass = true;
    /// max_ε e_x1(ε) / e_x1(ε₀) with ε₀ the first listed ε (1 when e_x1(ε₀) = 0).
    double x1_growth = 1.0;
    ConstantLedger ledger;

    [[nodiscard]] bool pass() const { return bound_pass && slope_pass; }
};

/// Throws HypothesisRefused when a bound verdict is requested and the
/// source or coefficient flags do not declare the needed hypotheses.
[[nodiscard]] RateStudy rate_study(const ProblemSpec& spec, SpacePtr space, const RateStudyOptions& opts = {});

/// Hypotheses the rate bound needs; the first missing one is named.
void require_rate_hypotheses(const ProblemSpec& spec);

struct CeaRow {
    std::string space;
    std::string epsilon;  // "LIMIT" or value
    double error = 0.0;   // Galerkin error in the problem's energy seminorm
    double best = 0.0;    // best approximation from the space in that seminorm
    double constant = 0.0;
    double bound = 0.0;   // constant·best (linear) or constant·√best (nonlinear)
    bool pass = false;
};

struct CeaReport {
    bool nonlinear = false;
    std::vector<CeaRow> rows;
    [[nodiscard]] bool pass() const;
};

/// For each space and ε: Galerkin error against a solve on `reference`
/// (which must contain every space) versus the orthogonal projection of that
/// reference onto the space. The limit uses the ∂₂ seminorm, ε the full
/// gradient.
[[nodiscard]] CeaReport cea_check(const ProblemSpec& spec, const std::vector<SpacePtr>& spaces, SpacePtr reference,
                                  const std::vector<EpsilonValue>& epsilons, const SolveOptions& solve = {});

struct APDiagramReport {
    std::vector<double> epsilons;
    std::vector<std::string> spaces;
    std::vector<std::vector<double>> grid;  // grid[i][j]: ε_i, space j, ‖∂₂(u_{ε,n} − u_ref)‖
    std::vector<double> trace_eps;          // ε ↦ grid[i][last]
    std::vector<double> trace_n;            // n ↦ ‖∂₂(u_{0,n} − u_ref)‖
    double gap = 0.0;                       // |trace_eps.back() − trace_n.back()|
    double finest = 0.0;                    // trace_eps.back()
    bool trace_eps_monotone = false;
    bool trace_n_monotone = false;
    bool gap_pass = false;

    [[nodiscard]] bool pass() const { return trace_eps_monotone && trace_n_monotone && gap_pass; }
};

/// `spaces` must be nested and increasing, all contained in `reference`,
/// where the limit problem is solved for u_ref.
[[nodiscard]] APDiagramReport ap_diagram(const ProblemSpec& spec, const std::vector<double>& epsilons,
                                         const std::vector<SpacePtr>& spaces, SpacePtr reference,
                                         const SolveOptions& solve = {});

struct DifferenceQuotientReport {
    std::string space;
    double grad_x1_u = 0.0;
    double grad_x1_f = 0.0;
    double C3 = 0.0;            // proof constant
    double C3_statement = 0.0;  // reported only
    double bound = 0.0;
    double bound_statement = 0.0;
    bool pass = false;
    bool statement_pass = false;
};

/// ‖∂₁u_V‖ ≤ C3‖∂₁f‖ for the limit Galerkin solution. Refuses unless a22 is
/// declared x₂-only and ∂₁f ∈ L² is declared.
[[nodiscard]] DifferenceQuotientReport difference_quotient_bound(const ProblemSpec& spec, SpacePtr space,
                                                                 const SolveOptions& solve = {});

struct LinearReactionStudy {
    std::vector<double> mus;
    std::vector<RateStudy> studies;
    std::vector<double> scaled_max;  // max_ε e_x2·μ/ε
    bool bounded_pass = false;       // scaled_max[k] ≤ 1.2·scaled_max[0]
    bool shrink_pass = false;        // e(μ_{k+1}) ≤ 1.2·(μ_k/μ_{k+1})·e(μ_k) at every ε
    bool slope_pass = false;

    [[nodiscard]] bool pass() const { return bounded_pass && shrink_pass && slope_pass; }
};

/// Rate studies with β = μ·s for each μ. Refuses unless the second-derivative
/// hypothesis on a12 is declared.
[[nodiscard]] LinearReactionStudy linear_reaction_rate_study(const ProblemSpec& spec, SpacePtr space,
                                                             const std::vector<double>& mus,
                                                             const RateStudyOptions& opts = {});

}  // namespace aniso
