#include "aniso/diagnostics.hpp"

#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>

namespace aniso {

namespace {

void require_same_space(const GalerkinSpace& a, const GalerkinSpace& b) {
    if (!a.same_space(b)) throw InvalidArgument("solutions live on different spaces");
}

void validate_epsilons(const std::vector<double>& eps) {
    if (eps.empty()) throw InvalidArgument("epsilon list is empty");
    for (double e : eps) (void)EpsilonValue::of(e);
}

/// φ_k on the domain in normalized coordinates t = (x − a)/L.
double weak_probe(int k, const TensorDomain& d, double x1, double x2) {
    constexpr double pi = std::numbers::pi;
    const double t1 = (x1 - d.omega1.a) / d.omega1.length();
    const double t2 = (x2 - d.omega2.a) / d.omega2.length();
    switch (k) {
        case 0: return std::sin(pi * t1) * std::sin(pi * t2);
        case 1: return t1 * std::sin(pi * t2);
        default: return std::cos(pi * t1) * t2 * (1.0 - t2);
    }
}

std::array<double, kWeakProbes> weak_values(const GalerkinSpace& space, const GridField& d1_difference) {
    std::array<double, kWeakProbes> out{};
    for (int k = 0; k < kWeakProbes; ++k) {
        GridField g = sample_on_grid(space, [&](double x1, double x2) { return weak_probe(k, space.domain(), x1, x2); });
        for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] *= d1_difference.data[i];
        out[static_cast<std::size_t>(k)] = integrate(space, g);
    }
    return out;
}

double squared_integral(const GalerkinSpace& space, const GridField& g) {
    GridField s = g;
    for (double& v : s.data) v *= v;
    return std::max(0.0, integrate(space, s));
}

SparseMatrix sum_of(const SparseMatrix& a, const SparseMatrix& b) {
    const double scales[] = {1.0, 1.0};
    const SparseMatrix* terms[] = {&a, &b};
    return SparseMatrix::linear_combination(scales, terms);
}

/// ‖P c − target‖_G minimized over c, with P the prolongation coarse → fine.
double best_approximation(const GalerkinSpace& coarse, const GalerkinSpace& fine, const SparseMatrix& G,
                          std::span<const double> target) {
    const int nc = coarse.dimension();
    std::vector<Vector> columns(static_cast<std::size_t>(nc));
    std::vector<Vector> g_columns(static_cast<std::size_t>(nc));
    for (int k = 0; k < nc; ++k) {
        Vector e(static_cast<std::size_t>(nc), 0.0);
        e[static_cast<std::size_t>(k)] = 1.0;
        columns[static_cast<std::size_t>(k)] = prolongate(coarse, fine, e);
        g_columns[static_cast<std::size_t>(k)] = G * columns[static_cast<std::size_t>(k)];
    }
    std::vector<double> gram(static_cast<std::size_t>(nc) * static_cast<std::size_t>(nc));
    Vector rhs(static_cast<std::size_t>(nc));
    for (int i = 0; i < nc; ++i) {
        rhs[static_cast<std::size_t>(i)] = dot(g_columns[static_cast<std::size_t>(i)], target);
        for (int j = 0; j < nc; ++j)
            gram[static_cast<std::size_t>(i * nc + j)] =
                dot(columns[static_cast<std::size_t>(i)], g_columns[static_cast<std::size_t>(j)]);
    }
    const Vector c = Factorization(SparseMatrix::from_dense(nc, gram)).solve(rhs);
    Vector proj(target.size(), 0.0);
    for (int k = 0; k < nc; ++k) axpy(c[static_cast<std::size_t>(k)], columns[static_cast<std::size_t>(k)], proj);
    return energy_norm(G, subtract(proj, target));
}

}  // namespace

ErrorNorms error_norms(const AssembledProblem& problem, std::span<const double> a, std::span<const double> b) {
    const Vector d = subtract(a, b);
    if (d.size() != static_cast<std::size_t>(problem.space->dimension()))
        throw InvalidArgument("coefficient vectors do not match the space");
    return {energy_norm(problem.G1, d), energy_norm(problem.G2, d), energy_norm(problem.M, d)};
}

ErrorNorms error_norms(const GalerkinSolution& a, const GalerkinSolution& b, const AssembledProblem& problem) {
    require_same_space(*a.space, *problem.space);
    require_same_space(*b.space, *problem.space);
    return error_norms(problem, a.coeffs, b.coeffs);
}

ErrorNorms error_vs_exact(const GalerkinSpace& space, std::span<const double> coeffs, const ExactSolution& exact) {
    GridField v = evaluate_on_grid(space, coeffs);
    GridField d1 = evaluate_on_grid(space, coeffs, Derivative::X1);
    GridField d2 = evaluate_on_grid(space, coeffs, Derivative::X2);
    const auto ev = sample_on_grid(space, [&](double x1, double x2) { return exact.u(x1, x2); });
    const auto e1 = sample_on_grid(space, [&](double x1, double x2) { return exact.du_dx1(x1, x2); });
    const auto e2 = sample_on_grid(space, [&](double x1, double x2) { return exact.du_dx2(x1, x2); });
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        v.data[i] -= ev.data[i];
        d1.data[i] -= e1.data[i];
        d2.data[i] -= e2.data[i];
    }
    return {std::sqrt(squared_integral(space, d1)), std::sqrt(squared_integral(space, d2)),
            std::sqrt(squared_integral(space, v))};
}

std::optional<double> fit_slope(std::span<const double> epsilons, std::span<const double> errors) {
    if (epsilons.size() != errors.size()) throw InvalidArgument("fit_slope: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] >= 1e3 * DBL_EPSILON)) continue;
        const double x = std::log(epsilons[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / denom;
}

bool nonincreasing(std::span<const double> values, double slack) {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[i - 1] + slack) return false;
    return true;
}

void require_rate_hypotheses(const ProblemSpec& spec) {
    if (!spec.f.hyp_fad1) throw HypothesisRefused("hypFad1", "source gradient in x1 not declared square integrable");
    if (!spec.f.hyp_fad2) throw HypothesisRefused("hypFad2", "source slices not declared in H1_0 of omega1");
    if (!spec.A.hyp_ad1) throw HypothesisRefused("hypAd1", "derivatives of a12 not declared bounded");
    if (!spec.A.a22_depends_only_on_x2) throw HypothesisRefused("hypAd2", "a22 not declared to depend on x2 only");
}

RateStudy rate_study(const ProblemSpec& spec, SpacePtr space, const RateStudyOptions& opts) {
    validate_epsilons(opts.epsilons);
    if (opts.bound_verdict) require_rate_hypotheses(spec);
    RateStudy st;
    st.space = space->describe();
    st.reference = opts.exact ? "exact" : "limit-solve";
    st.ledger = compute_constants(spec.A, spec.domain, spec.f, spec.beta);
    st.rate_constant = st.ledger.rate_constant();
    st.bound_requested = opts.bound_verdict;

    const AssembledProblem p = assemble_problem(space, spec.A, spec.f);
    Vector reference;
    if (!opts.exact) reference = solve(spec.with_epsilon(EpsilonValue::limit()), p, opts.solve).coeffs;
    GridField reference_d1;
    if (opts.exact)
        reference_d1 = sample_on_grid(*space, [&](double x1, double x2) { return opts.exact->du_dx1(x1, x2); });
    else
        reference_d1 = evaluate_on_grid(*space, reference, Derivative::X1);

    st.points.resize(opts.epsilons.size());
    parallel_for(static_cast<int>(opts.epsilons.size()), [&](int k) {
        const double eps = opts.epsilons[static_cast<std::size_t>(k)];
        const auto sol = solve(spec.with_epsilon(EpsilonValue::of(eps)), p, opts.solve);
        RatePoint& pt = st.points[static_cast<std::size_t>(k)];
        pt.epsilon = eps;
        pt.errors = opts.exact ? error_vs_exact(*space, sol.coeffs, *opts.exact) : error_norms(p, sol.coeffs, reference);
        GridField d1 = evaluate_on_grid(*space, sol.coeffs, Derivative::X1);
        for (std::size_t i = 0; i < d1.data.size(); ++i) d1.data[i] -= reference_d1.data[i];
        pt.weak = weak_values(*space, d1);
        if (opts.bound_verdict) {
            pt.bound = st.rate_constant * eps;
            pt.verdict = within_bound(pt.errors.e_x2, pt.bound);
        }
    });

    std::vector<double> eps, ex2;
    for (const auto& pt : st.points) {
        eps.push_back(pt.epsilon);
        ex2.push_back(pt.errors.e_x2);
        if (!pt.verdict) st.bound_pass = false;
    }
    st.slope = fit_slope(eps, ex2);
    if (opts.bound_verdict) st.slope_pass = !st.slope || *st.slope >= opts.min_slope;
    const double first = st.points.front().errors.e_x1;
    double peak = 0.0;
    for (const auto& pt : st.points) peak = std::max(peak, pt.errors.e_x1);
    st.x1_growth = first > 0.0 ? peak / first : 1.0;
    return st;
}

bool CeaReport::pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

CeaReport cea_check(const ProblemSpec& spec, const std::vector<SpacePtr>& spaces, SpacePtr reference,
                    const std::vector<EpsilonValue>& epsilons, const SolveOptions& solve_opts) {
    CeaReport rep;
    rep.nonlinear = spec.beta.kind != ReactionKind::Zero;
    const auto ledger = compute_constants(spec.A, spec.domain, spec.f, spec.beta);
    const AssembledProblem ref = assemble_problem(reference, spec.A, spec.f);
    const SparseMatrix full = sum_of(ref.G1, ref.G2);
    std::vector<AssembledProblem> coarse;
    for (const auto& s : spaces) coarse.push_back(assemble_problem(s, spec.A, spec.f));

    rep.rows.resize(epsilons.size() * spaces.size());
    parallel_for(static_cast<int>(rep.rows.size()), [&](int idx) {
        const auto ie = static_cast<std::size_t>(idx) / spaces.size();
        const auto is = static_cast<std::size_t>(idx) % spaces.size();
        const EpsilonValue& e = epsilons[ie];
        const ProblemSpec local = spec.with_epsilon(e);
        const Vector u_ref = solve(local, ref, solve_opts).coeffs;
        const SparseMatrix& G = e.is_limit() ? ref.G2 : full;
        const auto u_v = solve(local, coarse[is], solve_opts);
        const Vector lifted = prolongate(*spaces[is], *reference, u_v.coeffs);
        CeaRow& row = rep.rows[static_cast<std::size_t>(idx)];
        row.space = spaces[is]->describe();
        row.epsilon = e.to_string();
        row.error = energy_norm(G, subtract(lifted, u_ref));
        row.best = best_approximation(*spaces[is], *reference, G, u_ref);
        const double inv_e2 = e.is_limit() ? 1.0 : 1.0 / (e.value() * e.value());
        if (rep.nonlinear) {
            row.constant = (e.is_limit() ? ledger.cea_limit : ledger.cea_perturbed) * inv_e2;
            row.bound = row.constant * std::sqrt(row.best);
        } else {
            row.constant = (e.is_limit() ? ledger.cea_linear_limit : ledger.cea_linear_perturbed) * inv_e2;
            row.bound = row.constant * row.best;
        }
        row.pass = within_bound(row.error, row.bound);
    });
    return rep;
}

APDiagramReport ap_diagram(const ProblemSpec& spec, const std::vector<double>& epsilons,
                           const std::vector<SpacePtr>& spaces, SpacePtr reference, const SolveOptions& solve_opts) {
    validate_epsilons(epsilons);
    if (spaces.empty()) throw InvalidArgument("ap_diagram needs at least one space");
    APDiagramReport rep;
    rep.epsilons = epsilons;
    for (const auto& s : spaces) rep.spaces.push_back(s->describe());
    const AssembledProblem ref = assemble_problem(reference, spec.A, spec.f);
    const Vector u_ref = solve(spec.with_epsilon(EpsilonValue::limit()), ref, solve_opts).coeffs;

    std::vector<AssembledProblem> problems(spaces.size());
    parallel_for(static_cast<int>(spaces.size()), [&](int j) {
        problems[static_cast<std::size_t>(j)] = assemble_problem(spaces[static_cast<std::size_t>(j)], spec.A, spec.f);
    });

    const std::size_t ne = epsilons.size();
    const std::size_t ns = spaces.size();
    rep.grid.assign(ne, std::vector<double>(ns, 0.0));
    rep.trace_n.assign(ns, 0.0);
    // Row ne holds the limit solves.
    parallel_for(static_cast<int>((ne + 1) * ns), [&](int idx) {
        const auto i = static_cast<std::size_t>(idx) / ns;
        const auto j = static_cast<std::size_t>(idx) % ns;
        const EpsilonValue e = i < ne ? EpsilonValue::of(epsilons[i]) : EpsilonValue::limit();
        const auto sol = solve(spec.with_epsilon(e), problems[j], solve_opts);
        const double err = energy_norm(ref.G2, subtract(prolongate(*spaces[j], *reference, sol.coeffs), u_ref));
        if (i < ne) rep.grid[i][j] = err;
        else rep.trace_n[j] = err;
    });
    for (std::size_t i = 0; i < ne; ++i) rep.trace_eps.push_back(rep.grid[i].back());
    rep.finest = rep.trace_eps.back();
    rep.gap = std::abs(rep.trace_eps.back() - rep.trace_n.back());
    rep.trace_eps_monotone = nonincreasing(rep.trace_eps);
    rep.trace_n_monotone = nonincreasing(rep.trace_n);
    rep.gap_pass = within_bound(rep.gap, 2.0 * rep.finest);
    return rep;
}

DifferenceQuotientReport difference_quotient_bound(const ProblemSpec& spec, SpacePtr space,
                                                   const SolveOptions& solve_opts) {
    if (!spec.A.a22_depends_only_on_x2) throw HypothesisRefused("hypAd2", "a22 not declared to depend on x2 only");
    if (!spec.f.hyp_fad1) throw HypothesisRefused("hypFad1", "source gradient in x1 not declared square integrable");
    DifferenceQuotientReport rep;
    rep.space = space->describe();
    const auto ledger = compute_constants(spec.A, spec.domain, spec.f, spec.beta);
    const AssembledProblem p = assemble_problem(space, spec.A, spec.f);
    const auto sol = solve(spec.with_epsilon(EpsilonValue::limit()), p, solve_opts);
    rep.grad_x1_u = energy_norm(p.G1, sol.coeffs);
    rep.grad_x1_f = ledger.grad_x1_f_norm;
    rep.C3 = ledger.C3;
    rep.C3_statement = ledger.C3_statement;
    rep.bound = rep.C3 * rep.grad_x1_f;
    rep.bound_statement = rep.C3_statement * rep.grad_x1_f;
    rep.pass = within_bound(rep.grad_x1_u, rep.bound);
    rep.statement_pass = within_bound(rep.grad_x1_u, rep.bound_statement);
    return rep;
}

LinearReactionStudy linear_reaction_rate_study(const ProblemSpec& spec, SpacePtr space, const std::vector<double>& mus,
                                               const RateStudyOptions& opts) {
    if (!spec.A.hyp_a12_second)
        throw HypothesisRefused("hypA12_second", "second mixed derivative of a12 not declared square integrable");
    if (mus.empty()) throw InvalidArgument("mu list is empty");
    LinearReactionStudy out;
    out.mus = mus;
    RateStudyOptions local = opts;
    local.bound_verdict = false;
    out.slope_pass = true;
    for (double mu : mus) {
        ProblemSpec s = spec;
        s.beta = ReactionSpec::linear(mu);
        out.studies.push_back(rate_study(s, space, local));
        const auto& st = out.studies.back();
        if (st.slope && *st.slope < opts.min_slope) out.slope_pass = false;
        double peak = 0.0;
        for (const auto& pt : st.points) peak = std::max(peak, pt.errors.e_x2 * mu / pt.epsilon);
        out.scaled_max.push_back(peak);
    }
    out.bounded_pass = true;
    for (double v : out.scaled_max)
        if (!within_bound(v, 1.2 * out.scaled_max.front())) out.bounded_pass = false;
    out.shrink_pass = true;
    for (std::size_t k = 1; k < mus.size(); ++k)
        for (std::size_t i = 0; i < opts.epsilons.size(); ++i) {
            const double prev = out.studies[k - 1].points[i].errors.e_x2;
            const double cur = out.studies[k].points[i].errors.e_x2;
            if (!within_bound(cur, 1.2 * mus[k - 1] / mus[k] * prev)) out.shrink_pass = false;
        }
    return out;
}

}  // namespace aniso
