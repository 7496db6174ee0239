#pragma once

#include "aniso/assembly.hpp"
#include "aniso/elliptic.hpp"
#include "aniso/linsolve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aniso {

/// Discrete generator −M⁻¹K: the flow is M u′ = −K u.
struct DiscreteGenerator {
    SparseMatrix M;
    SparseMatrix K;
    SpacePtr space;  // null for generators built from raw 1D matrices
    std::string label;
};

[[nodiscard]] DiscreteGenerator make_generator(const AssembledProblem& problem, const EpsilonValue& e);
/// Limit generator of the ω₂ factor alone, with a22 frozen at x₁ = a₁.
[[nodiscard]] DiscreteGenerator make_generator_x2(const GalerkinSpace& space, const CoefficientField& A);

/// Largest generalized eigenvalue of (−K, M), by dense symmetric reduction.
/// Only meaningful for symmetric K; nonsymmetric K uses its symmetric part.
[[nodiscard]] double max_generalized_eigenvalue(const DiscreteGenerator& gen);

/// Solves (μM + K)u = M f.
[[nodiscard]] Vector resolvent_apply(const DiscreteGenerator& gen, double mu, std::span<const double> f);

/// ‖v‖_M
[[nodiscard]] double mass_norm(const SparseMatrix& M, std::span<const double> v);

/// Coefficients of the L² projection of g onto the space.
[[nodiscard]] Vector l2_projection(const GalerkinSpace& space, const SparseMatrix& M,
                                   const std::function<double(double, double)>& g);

enum class Stepper { BackwardEuler, CrankNicolson, YosidaRK4 };
[[nodiscard]] std::string to_string(Stepper s);
[[nodiscard]] Stepper parse_stepper(const std::string& name);

struct EvolutionConfig {
    double T = 1.0;
    Stepper stepper = Stepper::BackwardEuler;
    int steps = 64;
    double mu = 1.0;  // Yosida parameter
    /// Must lie on the step lattice kT/m. Empty: every step.
    std::vector<double> sample_times;

    void validate() const;
};

/// Load vector of a time-dependent source at time t.
using SourceAt = std::function<Vector(double)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    /// ‖u_k‖_M ≤ ‖u_0‖_M (1 + slack) at every step, where the slack is 0 for
    /// backward Euler and 1e-10 otherwise. Always true when a source is present.
    bool contractive = true;
};

/// Backward Euler: (M + τK)u⁺ = M u + τF(t⁺). Crank–Nicolson:
/// (M + τK/2)u⁺ = (M − τK/2)u + τ(F(t) + F(t⁺))/2. Yosida: classical RK4 on
/// u′ = μ²R_μu − μu, which needs m ≥ 4⌈Tμ⌉ and takes no source.
[[nodiscard]] Trajectory evolve(const DiscreteGenerator& gen, std::span<const double> g, const EvolutionConfig& cfg,
                                const SourceAt& source = {});

/// Tensor initial datum g₁(x₁)g₂(x₂).
struct TensorDatum {
    Expression g1;  // in x1
    Expression g2;  // in x2
};

struct ResolventRow {
    double epsilon = 1.0;
    double deviation = 0.0;  // ‖R_{ε,μ}f − R_{0,μ}f‖_M
};

struct ResolventDeviationReport {
    double mu = 1.0;
    std::vector<ResolventRow> rows;
    std::optional<double> slope;
    double min_slope = 0.95;
    [[nodiscard]] bool pass() const { return !slope || *slope >= min_slope; }
};

/// The source is taken through its L² projection. Refuses unless the source
/// and coefficient flags are all declared.
[[nodiscard]] ResolventDeviationReport resolvent_deviation(const ProblemSpec& spec, SpacePtr space,
                                                           const std::vector<double>& epsilons, double mu,
                                                           double min_slope = 0.95);

struct DeviationRow {
    double epsilon = 1.0;
    double sup_deviation = 0.0;         // max over samples of ‖u_ε(t) − u₀(t)‖_M
    double sup_deviation_double_T = 0.0;
    double stepper_error = 0.0;         // deviation change when m doubles
    int steps = 0;                      // m actually used
    std::vector<double> times;
    std::vector<double> deviation;      // per sample time
};

struct DeviationStudyOptions {
    std::vector<double> epsilons{0.5, 0.25, 0.125, 0.0625, 0.03125};
    double T = 1.0;
    Stepper stepper = Stepper::BackwardEuler;
    double mu = 1.0;  // for YosidaRK4
    int initial_steps = 128;
    int max_steps = 1 << 14;
    int samples = 16;          // equally spaced in (0, T]
    double certify_ratio = 0.01;
    double min_slope = 0.95;
    double linearity_factor = 2.2;
};

struct DeviationStudy {
    std::vector<DeviationRow> rows;
    std::optional<double> slope;
    bool slope_pass = true;
    bool linearity_pass = true;
    bool certified = true;
    [[nodiscard]] bool pass() const { return slope_pass && linearity_pass && certified; }
};

/// Sup-deviation of the perturbed and limit flows from the same tensor datum.
/// Each ε doubles m from initial_steps until the deviation moves by at most
/// certify_ratio·D; refuses, naming the needed m, when max_steps is not enough.
/// Also refuses unless the datum vanishes at the endpoints and the coefficient
/// flags are declared.
[[nodiscard]] DeviationStudy semigroup_deviation_study(const ProblemSpec& spec, SpacePtr space, const TensorDatum& g,
                                                       const DeviationStudyOptions& opts = {});

struct TensorOracleReport {
    double s = 1.0;
    double mu = 1.0;
    double max_difference = 0.0;  // ‖2D − g₁⊗1D‖_M
    double tolerance = 1e-8;
    double norm_2d = 0.0;
    [[nodiscard]] bool pass() const { return max_difference <= tolerance; }
};

/// YosidaRK4 on the 2D limit generator from g₁⊗g₂ against g₁ ⊗ (1D flow of g₂).
/// Needs a22 declared x₂-only.
[[nodiscard]] TensorOracleReport tensor_semigroup_oracle_check(const ProblemSpec& spec, SpacePtr space,
                                                               const TensorDatum& g, double s, double mu,
                                                               int steps = 0);

struct ParabolicOptions {
    std::vector<double> epsilons{0.5, 0.25, 0.125, 0.0625, 0.03125};
    EvolutionConfig evolution;  // sample_times ignored; samples used instead
    int samples = 16;
    double tol = 0.05;
};

struct ParabolicReport {
    std::vector<double> epsilons;
    std::vector<double> initial_gap;  // ‖u0(ε) − u0‖_M
    std::vector<double> sup_deviation;
    bool initial_converges = false;
    bool monotone = false;
    bool below_tol = false;
    [[nodiscard]] bool pass() const { return initial_converges && monotone && below_tol; }
};

/// u0_family may use the variable eps; source, when given, may use t.
/// Backward Euler and Crank–Nicolson only when a source is present.
[[nodiscard]] ParabolicReport parabolic_convergence(const ProblemSpec& spec, SpacePtr space,
                                                    const Expression& u0_family, const Expression& u0_limit,
                                                    const std::optional<Expression>& source,
                                                    const ParabolicOptions& opts = {});

/// k·T/samples for k = 1..samples.
[[nodiscard]] std::vector<double> uniform_samples(double T, int samples);

}  // namespace aniso
