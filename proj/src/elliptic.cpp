#include "aniso/elliptic.hpp"

#include "aniso/errors.hpp"

#include <cmath>
#include <cstdio>

namespace aniso {

EpsilonValue EpsilonValue::of(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in (0,1]");
    EpsilonValue e;
    e.limit_ = false;
    e.value_ = epsilon;
    return e;
}

double EpsilonValue::value() const {
    if (limit_) throw InvalidArgument("the limit problem has no epsilon value");
    return value_;
}

std::string EpsilonValue::to_string() const {
    if (limit_) return "LIMIT";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
}

ProblemSpec ProblemSpec::with_epsilon(EpsilonValue e) const {
    ProblemSpec s = *this;
    s.epsilon = e;
    return s;
}

SparseMatrix operator_for(const AssembledProblem& p, const EpsilonValue& e) {
    return e.is_limit() ? p.K_limit() : p.K_eps(e.value());
}

namespace {

SparseMatrix shifted(const SparseMatrix& K, const SparseMatrix& M, double sigma) {
    if (sigma == 0.0) return K;
    const double scales[] = {1.0, sigma};
    const SparseMatrix* terms[] = {&K, &M};
    return SparseMatrix::linear_combination(scales, terms);
}

Vector operator_residual(const SparseMatrix& K, const GalerkinSpace& space, const ReactionSpec& beta,
                         std::span<const double> u, std::span<const double> F) {
    Vector r = K * u;
    if (beta.kind != ReactionKind::Zero) axpy(1.0, assemble_reaction(space, u, beta), r);
    axpy(-1.0, F, r);
    return r;
}

}  // namespace

GalerkinSolution solve_linear(const ProblemSpec& spec, const AssembledProblem& problem, const SolveOptions& opts) {
    if (spec.beta.kind == ReactionKind::Custom)
        throw InvalidArgument("solve_linear needs a zero or linear reaction");
    const double mu = spec.beta.kind == ReactionKind::Linear ? spec.beta.mu : 0.0;
    const SparseMatrix op = shifted(operator_for(problem, spec.epsilon), problem.M, mu);
    GalerkinSolution sol;
    sol.space = problem.space;
    sol.epsilon = spec.epsilon;
    sol.rhs_norm = norm2(problem.F);
    auto res = aniso::solve(op, problem.F, opts.solver, opts.initial_guess);
    sol.coeffs = std::move(res.x);
    sol.final_residual = norm2(subtract(op * sol.coeffs, problem.F));
    return sol;
}

GalerkinSolution solve_linear(const ProblemSpec& spec, SpacePtr space, const SolveOptions& opts) {
    return solve_linear(spec, assemble_problem(std::move(space), spec.A, spec.f), opts);
}

GalerkinSolution solve_semilinear(const ProblemSpec& spec, const AssembledProblem& problem,
                                  const SolveOptions& opts) {
    if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw InvalidArgument("damping must lie in (0,1]");
    if (!(opts.tol > 0.0)) throw InvalidArgument("nonlinear tolerance must be positive");
    const GalerkinSpace& space = *problem.space;
    const auto n = static_cast<std::size_t>(space.dimension());
    const SparseMatrix K = operator_for(problem, spec.epsilon);
    const double sigma = opts.shift >= 0.0 ? opts.shift : 0.5 * spec.beta.lipschitz_constant();
    const ReusableSolver step_solver(shifted(K, problem.M, sigma), opts.solver);

    GalerkinSolution sol;
    sol.space = problem.space;
    sol.epsilon = spec.epsilon;
    sol.rhs_norm = norm2(problem.F);
    Vector u = opts.initial_guess.empty() ? Vector(n, 0.0) : opts.initial_guess;
    if (u.size() != n) throw InvalidArgument("initial guess has the wrong size");

    const double target = opts.tol * sol.rhs_norm;
    double r = norm2(operator_residual(K, space, spec.beta, u, problem.F));
    sol.residual_history.push_back(r);
    for (int it = 1; r > target; ++it) {
        if (it > opts.max_picard)
            throw NonConvergence("Picard iteration did not converge in " + std::to_string(opts.max_picard) +
                                     " iterations; try a smaller damping",
                                 u, r);
        Vector rhs = problem.F;
        if (spec.beta.kind != ReactionKind::Zero) axpy(-1.0, assemble_reaction(space, u, spec.beta), rhs);
        if (sigma != 0.0) axpy(sigma, problem.M * u, rhs);
        const Vector step = step_solver.solve(rhs, u);

        double theta = opts.damping;
        Vector candidate(n);
        double rc = 0.0;
        for (int halvings = 0;; ++halvings) {
            for (std::size_t i = 0; i < n; ++i) candidate[i] = (1.0 - theta) * u[i] + theta * step[i];
            rc = norm2(operator_residual(K, space, spec.beta, candidate, problem.F));
            if (rc <= r || halvings == 6) break;
            theta *= 0.5;
        }
        u = std::move(candidate);
        r = rc;
        sol.residual_history.push_back(r);
        sol.picard_iterations = it;
    }
    sol.coeffs = std::move(u);
    sol.final_residual = r;
    return sol;
}

GalerkinSolution solve_semilinear(const ProblemSpec& spec, SpacePtr space, const SolveOptions& opts) {
    return solve_semilinear(spec, assemble_problem(std::move(space), spec.A, spec.f), opts);
}

GalerkinSolution solve(const ProblemSpec& spec, const AssembledProblem& problem, const SolveOptions& opts) {
    if (spec.beta.kind == ReactionKind::Custom) return solve_semilinear(spec, problem, opts);
    return solve_linear(spec, problem, opts);
}

bool within_bound(double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-9) + 1e-14; }

bool AprioriReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

double reaction_norm(const GalerkinSpace& space, std::span<const double> coeffs, const ReactionSpec& beta) {
    if (beta.kind == ReactionKind::Zero) return 0.0;
    GridField g = evaluate_on_grid(space, coeffs);
    for (double& v : g.data) {
        const double b = beta(v);
        v = b * b;
    }
    return std::sqrt(integrate(space, g));
}

double energy_norm(const SparseMatrix& G, std::span<const double> v) {
    return std::sqrt(std::max(0.0, G.bilinear(v, v)));
}

AprioriReport apriori_check(const GalerkinSolution& sol, const AssembledProblem& problem, const ReactionSpec& beta,
                            const ConstantLedger& c) {
    AprioriReport rep;
    const double f = c.f_norm;
    const double lam = c.lambda;
    const double beta_norm = reaction_norm(*sol.space, sol.coeffs, beta);
    const double root_area = std::sqrt(c.area);
    auto add = [&](std::string name, double lhs, double rhs) {
        rep.checks.push_back({std::move(name), lhs, rhs, within_bound(lhs, rhs)});
    };
    if (sol.epsilon.is_limit()) {
        add("grad_x2_limit", energy_norm(problem.G2, sol.coeffs), c.C_omega2 * f / lam);
        add("reaction_limit", beta_norm, c.M * (root_area + c.C_omega2 * c.C_omega2 * f / lam));
    } else {
        const double e2 = sol.epsilon.value() * sol.epsilon.value();
        const double grad = std::sqrt(std::max(0.0, problem.G1.bilinear(sol.coeffs, sol.coeffs) +
                                                        problem.G2.bilinear(sol.coeffs, sol.coeffs)));
        add("grad_perturbed", grad, c.C_Omega * f / (lam * e2));
        add("reaction_perturbed", beta_norm, c.M / e2 * (root_area + c.C_Omega * c.C_Omega * f / lam));
    }
    return rep;
}

}  // namespace aniso
