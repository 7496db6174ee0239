#include "aniso/semigroup.hpp"

#include "aniso/diagnostics.hpp"
#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace aniso {

namespace {

SolverConfig tight() {
    SolverConfig cfg;
    cfg.rel_tol = 1e-12;
    return cfg;
}

SparseMatrix combine(double a, const SparseMatrix& A, double b, const SparseMatrix& B) {
    const double scales[] = {a, b};
    const SparseMatrix* terms[] = {&A, &B};
    return SparseMatrix::linear_combination(scales, terms);
}

/// (μM + K)⁻¹M, factored once.
class Resolvent {
public:
    Resolvent(const DiscreteGenerator& gen, double mu) : M_(gen.M), solver_(combine(mu, gen.M, 1.0, gen.K), tight()) {}
    [[nodiscard]] Vector apply(std::span<const double> f) const { return solver_.solve(M_ * f); }

private:
    const SparseMatrix& M_;
    ReusableSolver solver_;
};

Vector load_1d(const BasisTable1D& t, const Expression& g, bool second) {
    Vector out(static_cast<std::size_t>(t.n), 0.0);
    for (int i = 0; i < t.n; ++i) {
        double acc = 0.0;
        for (int p = t.range[static_cast<std::size_t>(i)].first; p < t.range[static_cast<std::size_t>(i)].second; ++p) {
            const double x = t.rule.points[static_cast<std::size_t>(p)];
            const double gx = second ? g(0.0, x) : g(x, 0.0);
            acc += t.rule.weights[static_cast<std::size_t>(p)] * gx * t.v(i, p);
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

Vector projection_1d(const BasisTable1D& t, const Expression& g, bool second) {
    return Factorization(SparseMatrix::from_dense(t.n, mass_1d(t))).solve(load_1d(t, g, second));
}

Vector tensor_coefficients(const GalerkinSpace& space, const TensorDatum& g) {
    const Vector c1 = projection_1d(space.table1(), g.g1, false);
    const Vector c2 = projection_1d(space.table2(), g.g2, true);
    Vector c(static_cast<std::size_t>(space.dimension()));
    for (int i = 0; i < space.dim1(); ++i)
        for (int j = 0; j < space.dim2(); ++j)
            c[static_cast<std::size_t>(space.flat(i, j))] = c1[static_cast<std::size_t>(i)] * c2[static_cast<std::size_t>(j)];
    return c;
}

void require_flags(const ProblemSpec& spec, bool with_source) {
    if (with_source) {
        if (!spec.f.hyp_fad1) throw HypothesisRefused("hypFad1", "source gradient in x1 not declared square integrable");
        if (!spec.f.hyp_fad2) throw HypothesisRefused("hypFad2", "source slices not declared in H1_0 of omega1");
    }
    if (!spec.A.hyp_ad1) throw HypothesisRefused("hypAd1", "derivatives of a12 not declared bounded");
    if (!spec.A.a22_depends_only_on_x2) throw HypothesisRefused("hypAd2", "a22 not declared to depend on x2 only");
    if (!spec.A.hyp_a12_second)
        throw HypothesisRefused("hypA12_second", "second mixed derivative of a12 not declared square integrable");
}

int stepper_order(Stepper s) {
    switch (s) {
        case Stepper::BackwardEuler: return 1;
        case Stepper::CrankNicolson: return 2;
        case Stepper::YosidaRK4: return 4;
    }
    return 1;
}

std::vector<std::size_t> sample_indices(const EvolutionConfig& cfg) {
    std::vector<std::size_t> idx;
    if (cfg.sample_times.empty()) {
        for (int k = 0; k <= cfg.steps; ++k) idx.push_back(static_cast<std::size_t>(k));
        return idx;
    }
    const double tau = cfg.T / cfg.steps;
    for (double t : cfg.sample_times) {
        const double k = std::round(t / tau);
        if (std::abs(k * tau - t) > 1e-9 * std::max(cfg.T, 1.0))
            throw InvalidArgument("sample time " + std::to_string(t) + " is not on the step lattice");
        idx.push_back(static_cast<std::size_t>(k));
    }
    return idx;
}

}  // namespace

DiscreteGenerator make_generator(const AssembledProblem& problem, const EpsilonValue& e) {
    return {problem.M, operator_for(problem, e), problem.space, e.is_limit() ? "limit" : "eps=" + e.to_string()};
}

DiscreteGenerator make_generator_x2(const GalerkinSpace& space, const CoefficientField& A) {
    const auto& t2 = space.table2();
    std::vector<double> w(t2.rule.points.size());
    const double x1 = space.domain().omega1.a;
    for (std::size_t q = 0; q < w.size(); ++q) w[q] = A.a22(x1, t2.rule.points[q]);
    return {SparseMatrix::from_dense(t2.n, mass_1d(t2)), SparseMatrix::from_dense(t2.n, stiffness_1d(t2, w)), nullptr,
            "limit-x2"};
}

double max_generalized_eigenvalue(const DiscreteGenerator& gen) {
    const int n = gen.M.size();
    if (n > kDenseLimit) throw InvalidArgument("generator too large for a dense eigenvalue check");
    const auto kd = gen.K.to_dense();
    const auto md = gen.M.to_dense();
    Eigen::MatrixXd K(n, n), M(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const auto rc = static_cast<std::size_t>(r * n + c), cr = static_cast<std::size_t>(c * n + r);
            K(r, c) = -0.5 * (kd[rc] + kd[cr]);
            M(r, c) = 0.5 * (md[rc] + md[cr]);
        }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverBreakdown("generalized eigenvalue solve failed");
    return es.eigenvalues().maxCoeff();
}

double mass_norm(const SparseMatrix& M, std::span<const double> v) { return std::sqrt(std::max(0.0, M.bilinear(v, v))); }

Vector resolvent_apply(const DiscreteGenerator& gen, double mu, std::span<const double> f) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("resolvent parameter must be positive");
    if (f.size() != static_cast<std::size_t>(gen.M.size())) throw InvalidArgument("resolvent: size mismatch");
    return solve(combine(mu, gen.M, 1.0, gen.K), gen.M * f, tight()).x;
}

Vector l2_projection(const GalerkinSpace& space, const SparseMatrix& M, const std::function<double(double, double)>& g) {
    return ReusableSolver(M, tight()).solve(assemble_load(space, g));
}

std::string to_string(Stepper s) {
    switch (s) {
        case Stepper::BackwardEuler: return "backward-euler";
        case Stepper::CrankNicolson: return "crank-nicolson";
        case Stepper::YosidaRK4: return "yosida-rk4";
    }
    return "?";
}

Stepper parse_stepper(const std::string& name) {
    if (name == "backward-euler" || name == "be") return Stepper::BackwardEuler;
    if (name == "crank-nicolson" || name == "cn") return Stepper::CrankNicolson;
    if (name == "yosida-rk4" || name == "yosida") return Stepper::YosidaRK4;
    throw InvalidArgument("unknown stepper '" + name + "'");
}

void EvolutionConfig::validate() const {
    if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("final time must be finite and nonnegative");
    if (T > 0.0 && steps < 1) throw InvalidArgument("step count must be at least 1 when T > 0");
    if (stepper == Stepper::YosidaRK4) {
        if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("Yosida parameter must be positive");
        const double need = 4.0 * std::ceil(T * mu);
        if (steps < need)
            throw InvalidArgument("Yosida RK4 needs at least " + std::to_string(static_cast<long>(need)) + " steps");
    }
    for (double t : sample_times)
        if (!(t >= 0.0 && t <= T * (1 + 1e-12))) throw InvalidArgument("sample times must lie in [0,T]");
}

Trajectory evolve(const DiscreteGenerator& gen, std::span<const double> g, const EvolutionConfig& cfg,
                  const SourceAt& source) {
    cfg.validate();
    if (g.size() != static_cast<std::size_t>(gen.M.size())) throw InvalidArgument("initial state has the wrong size");
    if (source && cfg.stepper == Stepper::YosidaRK4) throw InvalidArgument("Yosida flow takes no source term");
    Trajectory out;
    Vector u(g.begin(), g.end());
    if (cfg.T == 0.0) {
        const std::size_t count = cfg.sample_times.empty() ? 1 : cfg.sample_times.size();
        for (std::size_t k = 0; k < count; ++k) {
            out.times.push_back(0.0);
            out.states.push_back(u);
        }
        return out;
    }
    const auto wanted = sample_indices(cfg);
    const double tau = cfg.T / cfg.steps;
    const double g_norm = mass_norm(gen.M, g);
    const double slack = cfg.stepper == Stepper::BackwardEuler ? 0.0 : 1e-10;

    std::vector<Vector> at_step(static_cast<std::size_t>(cfg.steps) + 1);
    std::vector<char> keep(static_cast<std::size_t>(cfg.steps) + 1, 0);
    for (auto k : wanted) keep[k] = 1;
    if (keep[0]) at_step[0] = u;

    std::optional<ReusableSolver> implicit;
    std::optional<SparseMatrix> explicit_part;
    std::optional<Resolvent> yosida;
    switch (cfg.stepper) {
        case Stepper::BackwardEuler: implicit.emplace(combine(1.0, gen.M, tau, gen.K), tight()); break;
        case Stepper::CrankNicolson:
            implicit.emplace(combine(1.0, gen.M, 0.5 * tau, gen.K), tight());
            explicit_part = combine(1.0, gen.M, -0.5 * tau, gen.K);
            break;
        case Stepper::YosidaRK4: yosida.emplace(gen, cfg.mu); break;
    }
    const double mu = cfg.mu;
    auto a_mu = [&](const Vector& v) {
        Vector r = yosida->apply(v);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = mu * mu * r[i] - mu * v[i];
        return r;
    };

    Vector f_prev = source && cfg.stepper == Stepper::CrankNicolson ? source(0.0) : Vector{};
    for (int k = 1; k <= cfg.steps; ++k) {
        const double t = k * tau;
        switch (cfg.stepper) {
            case Stepper::BackwardEuler: {
                Vector rhs = gen.M * u;
                if (source) axpy(tau, source(t), rhs);
                u = implicit->solve(rhs, u);
                break;
            }
            case Stepper::CrankNicolson: {
                Vector rhs = *explicit_part * u;
                if (source) {
                    Vector f_next = source(t);
                    axpy(0.5 * tau, f_prev, rhs);
                    axpy(0.5 * tau, f_next, rhs);
                    f_prev = std::move(f_next);
                }
                u = implicit->solve(rhs, u);
                break;
            }
            case Stepper::YosidaRK4: {
                const Vector k1 = a_mu(u);
                Vector tmp = u;
                axpy(0.5 * tau, k1, tmp);
                const Vector k2 = a_mu(tmp);
                tmp = u;
                axpy(0.5 * tau, k2, tmp);
                const Vector k3 = a_mu(tmp);
                tmp = u;
                axpy(tau, k3, tmp);
                const Vector k4 = a_mu(tmp);
                for (std::size_t i = 0; i < u.size(); ++i) u[i] += tau / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
                break;
            }
        }
        if (!source && mass_norm(gen.M, u) > g_norm * (1 + slack) + 1e-14 * g_norm) out.contractive = false;
        if (keep[static_cast<std::size_t>(k)]) at_step[static_cast<std::size_t>(k)] = u;
    }
    for (auto k : wanted) {
        out.times.push_back(static_cast<double>(k) * tau);
        out.states.push_back(at_step[k]);
    }
    return out;
}

std::vector<double> uniform_samples(double T, int samples) {
    if (samples < 1) throw InvalidArgument("need at least one sample time");
    std::vector<double> out;
    for (int k = 1; k <= samples; ++k) out.push_back(T * k / samples);
    return out;
}

ResolventDeviationReport resolvent_deviation(const ProblemSpec& spec, SpacePtr space,
                                             const std::vector<double>& epsilons, double mu, double min_slope) {
    require_flags(spec, true);
    if (epsilons.empty()) throw InvalidArgument("epsilon list is empty");
    for (double e : epsilons) (void)EpsilonValue::of(e);
    if (!(mu > 0.0)) throw InvalidArgument("resolvent parameter must be positive");
    ResolventDeviationReport rep;
    rep.mu = mu;
    rep.min_slope = min_slope;
    const AssembledProblem p = assemble_problem(space, spec.A, spec.f);
    const Vector f = ReusableSolver(p.M, tight()).solve(p.F);
    const Vector limit = resolvent_apply(make_generator(p, EpsilonValue::limit()), mu, f);
    rep.rows.resize(epsilons.size());
    parallel_for(static_cast<int>(epsilons.size()), [&](int k) {
        const double e = epsilons[static_cast<std::size_t>(k)];
        const Vector u = resolvent_apply(make_generator(p, EpsilonValue::of(e)), mu, f);
        rep.rows[static_cast<std::size_t>(k)] = {e, mass_norm(p.M, subtract(u, limit))};
    });
    std::vector<double> eps, dev;
    for (const auto& r : rep.rows) {
        eps.push_back(r.epsilon);
        dev.push_back(r.deviation);
    }
    rep.slope = fit_slope(eps, dev);
    return rep;
}

DeviationStudy semigroup_deviation_study(const ProblemSpec& spec, SpacePtr space, const TensorDatum& g,
                                         const DeviationStudyOptions& opts) {
    require_flags(spec, false);
    const auto& d = space->domain();
    for (double x : {d.omega1.a, d.omega1.b})
        if (std::abs(g.g1(x, 0.0)) > 1e-10) throw HypothesisRefused("hypG", "x1 profile must vanish at the endpoints");
    for (double x : {d.omega2.a, d.omega2.b})
        if (std::abs(g.g2(0.0, x)) > 1e-10) throw HypothesisRefused("hypG", "x2 profile must vanish at the endpoints");
    if (opts.epsilons.empty()) throw InvalidArgument("epsilon list is empty");
    for (double e : opts.epsilons) (void)EpsilonValue::of(e);
    if (opts.initial_steps < 1 || opts.initial_steps % opts.samples != 0)
        throw InvalidArgument("initial step count must be a positive multiple of the sample count");

    const AssembledProblem p = assemble_problem(space, spec.A, spec.f);
    const Vector g0 = tensor_coefficients(*space, g);
    const DiscreteGenerator limit = make_generator(p, EpsilonValue::limit());

    // Runs to 2T with 2m steps so both horizons share the step size T/m.
    auto deviations = [&](const DiscreteGenerator& gen, int m) {
        EvolutionConfig cfg;
        cfg.T = 2.0 * opts.T;
        cfg.stepper = opts.stepper;
        cfg.steps = 2 * m;
        cfg.mu = opts.mu;
        cfg.sample_times = uniform_samples(cfg.T, 2 * opts.samples);
        const auto a = evolve(gen, g0, cfg);
        const auto b = evolve(limit, g0, cfg);
        std::vector<Vector> diff;
        for (std::size_t k = 0; k < a.states.size(); ++k) diff.push_back(subtract(a.states[k], b.states[k]));
        return std::make_pair(a.times, diff);
    };

    DeviationStudy st;
    st.rows.resize(opts.epsilons.size());
    std::vector<std::string> refusals(opts.epsilons.size());
    const auto half = static_cast<std::size_t>(opts.samples);
    parallel_for(static_cast<int>(opts.epsilons.size()), [&](int idx) {
        const double e = opts.epsilons[static_cast<std::size_t>(idx)];
        const DiscreteGenerator gen = make_generator(p, EpsilonValue::of(e));
        int m = opts.initial_steps;
        auto coarse = deviations(gen, m);
        DeviationRow& row = st.rows[static_cast<std::size_t>(idx)];
        row.epsilon = e;
        while (true) {
            auto fine = deviations(gen, 2 * m);
            double err = 0.0, D = 0.0, D2 = 0.0;
            std::vector<double> per_t;
            for (std::size_t k = 0; k < fine.second.size(); ++k) {
                const double dk = mass_norm(p.M, fine.second[k]);
                err = std::max(err, mass_norm(p.M, subtract(fine.second[k], coarse.second[k])));
                D2 = std::max(D2, dk);
                if (k < half) {
                    D = std::max(D, dk);
                    per_t.push_back(dk);
                }
            }
            row.sup_deviation = D;
            row.sup_deviation_double_T = D2;
            row.stepper_error = err;
            row.steps = 2 * m;
            row.times.assign(fine.first.begin(), fine.first.begin() + static_cast<std::ptrdiff_t>(half));
            row.deviation = per_t;
            if (err <= opts.certify_ratio * D2) break;
            if (4 * m > opts.max_steps) {
                const double factor = std::pow(err / (opts.certify_ratio * D2), 1.0 / stepper_order(opts.stepper));
                const long need = static_cast<long>(std::ceil(2.0 * m * factor));
                refusals[static_cast<std::size_t>(idx)] = "epsilon " + EpsilonValue::of(e).to_string() +
                                                          " needs about " + std::to_string(need) + " steps";
                return;
            }
            m *= 2;
            coarse = std::move(fine);
        }
    });
    for (const auto& r : refusals)
        if (!r.empty()) throw HypothesisRefused("stepper-resolution", r);

    std::vector<double> eps, dev;
    for (const auto& r : st.rows) {
        eps.push_back(r.epsilon);
        dev.push_back(r.sup_deviation);
        if (!within_bound(r.sup_deviation_double_T, opts.linearity_factor * r.sup_deviation)) st.linearity_pass = false;
    }
    st.slope = fit_slope(eps, dev);
    st.slope_pass = !st.slope || *st.slope >= opts.min_slope;
    return st;
}

TensorOracleReport tensor_semigroup_oracle_check(const ProblemSpec& spec, SpacePtr space, const TensorDatum& g,
                                                 double s, double mu, int steps) {
    if (!spec.A.a22_depends_only_on_x2) throw HypothesisRefused("hypAd2", "a22 not declared to depend on x2 only");
    TensorOracleReport rep;
    rep.s = s;
    rep.mu = mu;
    EvolutionConfig cfg;
    cfg.T = s;
    cfg.stepper = Stepper::YosidaRK4;
    cfg.mu = mu;
    cfg.steps = steps > 0 ? steps : std::max(64, static_cast<int>(4 * std::ceil(s * mu)) * 16);
    cfg.sample_times = {s};

    const AssembledProblem p = assemble_problem(space, spec.A, spec.f);
    const Vector g2d = tensor_coefficients(*space, g);
    const Vector full = evolve(make_generator(p, EpsilonValue::limit()), g2d, cfg).states.back();

    const Vector c1 = projection_1d(space->table1(), g.g1, false);
    const Vector c2 = projection_1d(space->table2(), g.g2, true);
    const Vector flow2 = evolve(make_generator_x2(*space, spec.A), c2, cfg).states.back();
    Vector product(full.size());
    for (int i = 0; i < space->dim1(); ++i)
        for (int j = 0; j < space->dim2(); ++j)
            product[static_cast<std::size_t>(space->flat(i, j))] =
                c1[static_cast<std::size_t>(i)] * flow2[static_cast<std::size_t>(j)];
    rep.max_difference = mass_norm(p.M, subtract(full, product));
    rep.norm_2d = mass_norm(p.M, full);
    return rep;
}

ParabolicReport parabolic_convergence(const ProblemSpec& spec, SpacePtr space, const Expression& u0_family,
                                      const Expression& u0_limit, const std::optional<Expression>& source,
                                      const ParabolicOptions& opts) {
    if (opts.epsilons.empty()) throw InvalidArgument("epsilon list is empty");
    for (double e : opts.epsilons) (void)EpsilonValue::of(e);
    ParabolicReport rep;
    rep.epsilons = opts.epsilons;
    const AssembledProblem p = assemble_problem(space, spec.A, spec.f);
    EvolutionConfig cfg = opts.evolution;
    cfg.sample_times = uniform_samples(cfg.T, opts.samples);
    cfg.sample_times.insert(cfg.sample_times.begin(), 0.0);
    cfg.validate();

    SourceAt load;
    if (source) {
        const Expression src = *source;
        load = [space, src](double t) {
            return assemble_load(*space, [&](double x1, double x2) { return src(Variables{x1, x2, t, 1.0, 0.0}); });
        };
    }
    const Vector limit0 = l2_projection(*space, p.M, [&](double x1, double x2) { return u0_limit(x1, x2); });
    const auto limit = evolve(make_generator(p, EpsilonValue::limit()), limit0, cfg, load);

    const std::size_t n = opts.epsilons.size();
    rep.initial_gap.assign(n, 0.0);
    rep.sup_deviation.assign(n, 0.0);
    parallel_for(static_cast<int>(n), [&](int k) {
        const double e = opts.epsilons[static_cast<std::size_t>(k)];
        const Vector u0 = l2_projection(
            *space, p.M, [&](double x1, double x2) { return u0_family(Variables{x1, x2, 0.0, e, 0.0}); });
        rep.initial_gap[static_cast<std::size_t>(k)] = mass_norm(p.M, subtract(u0, limit0));
        const auto tr = evolve(make_generator(p, EpsilonValue::of(e)), u0, cfg, load);
        double sup = 0.0;
        for (std::size_t s = 0; s < tr.states.size(); ++s)
            sup = std::max(sup, mass_norm(p.M, subtract(tr.states[s], limit.states[s])));
        rep.sup_deviation[static_cast<std::size_t>(k)] = sup;
    });
    rep.initial_converges = nonincreasing(rep.initial_gap) && rep.initial_gap.back() <= rep.initial_gap.front();
    rep.monotone = nonincreasing(rep.sup_deviation);
    rep.below_tol = rep.sup_deviation.back() <= opts.tol;
    return rep;
}

}  // namespace aniso
