#include "aniso/coefficients.hpp"

#include "aniso/errors.hpp"

#include <algorithm>
#include <cmath>

namespace aniso {

BlockScaling scale_matrix(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in (0,1]");
    return {epsilon * epsilon, epsilon, epsilon, 1.0};
}

CoefficientField CoefficientField::identity() {
    CoefficientField a;
    a.a22_depends_only_on_x2 = true;
    a.hyp_ad1 = true;
    a.hyp_a12_second = true;
    a.da12_dx1 = Expression::constant(0.0);
    a.da12_dx2 = Expression::constant(0.0);
    a.da21_dx1 = Expression::constant(0.0);
    a.da21_dx2 = Expression::constant(0.0);
    return a;
}

std::array<double, 4> CoefficientField::at(double x1, double x2) const {
    return {a11(x1, x2), a12(x1, x2), a21(x1, x2), a22(x1, x2)};
}

double CoefficientField::quadratic_form(double x1, double x2, std::array<double, 2> xi,
                                        const BlockScaling& s) const {
    const auto m = at(x1, x2);
    return s.s11 * m[0] * xi[0] * xi[0] + s.s12 * m[1] * xi[1] * xi[0] +
           s.s21 * m[2] * xi[0] * xi[1] + s.s22 * m[3] * xi[1] * xi[1];
}

namespace {

/// Calls g(x1, x2) on the (n+1)² lattice including the boundary.
template <typename G>
void for_lattice(const TensorDomain& d, int n, G&& g) {
    for (int i = 0; i <= n; ++i) {
        const double x1 = d.omega1.a + d.omega1.length() * i / n;
        for (int j = 0; j <= n; ++j) g(x1, d.omega2.a + d.omega2.length() * j / n);
    }
}

double min_eig_sym(const std::array<double, 4>& m) {
    const double off = 0.5 * (m[1] + m[2]);
    const double mean = 0.5 * (m[0] + m[3]);
    const double half = 0.5 * (m[0] - m[3]);
    return mean - std::hypot(half, off);
}

double spectral_norm(const std::array<double, 4>& m) {
    const double fro2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
    const double det = m[0] * m[3] - m[1] * m[2];
    const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
    return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

double sup_abs(const TensorDomain& d, int n, const std::function<double(double, double)>& g) {
    double m = 0.0;
    for_lattice(d, n, [&](double x1, double x2) {
        const double v = g(x1, x2);
        if (!std::isfinite(v)) throw InvalidArgument("non-finite coefficient sample");
        m = std::max(m, std::abs(v));
    });
    return m;
}

/// Sup of |∂ e| along axis 1 or 2: declared partial when given, central
/// differences otherwise, zero for constants.
double sup_partial(const TensorDomain& d, int n, const Expression& e,
                   const std::optional<Expression>& declared, int axis) {
    if (declared) return sup_abs(d, n, [&](double x1, double x2) { return (*declared)(x1, x2); });
    if (e.independent_of(axis == 1 ? "x1" : "x2")) return 0.0;
    const double h = 1e-6 * (axis == 1 ? d.omega1.length() : d.omega2.length());
    return sup_abs(d, n, [&](double x1, double x2) {
        if (axis == 1) return (e(x1 + h, x2) - e(x1 - h, x2)) / (2 * h);
        return (e(x1, x2 + h) - e(x1, x2 - h)) / (2 * h);
    });
}

}  // namespace

double CoefficientField::sampled_min_eigenvalue(const TensorDomain& domain, int samples) const {
    double lo = INFINITY;
    for_lattice(domain, samples, [&](double x1, double x2) { lo = std::min(lo, min_eig_sym(at(x1, x2))); });
    return lo;
}

void CoefficientField::validate(const TensorDomain& domain, int samples) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("hypothesis hypA1 violated: lambda must be positive");
    if (samples < 1) throw InvalidArgument("sampling lattice must have at least one cell");
    for_lattice(domain, samples, [&](double x1, double x2) {
        const auto m = at(x1, x2);
        for (double v : m)
            if (!std::isfinite(v))
                throw InvalidArgument("hypothesis hypA2 violated: coefficient not bounded at a sample point");
        if (min_eig_sym(m) < lambda * (1.0 - 1e-12))
            throw InvalidArgument("hypothesis hypA1 violated: A(x)xi.xi < lambda|xi|^2 at x = (" +
                                  std::to_string(x1) + ", " + std::to_string(x2) + ")");
    });
    if (a22_depends_only_on_x2) {
        for (int j = 0; j <= samples; ++j) {
            const double x2 = domain.omega2.a + domain.omega2.length() * j / samples;
            const double ref = a22(domain.omega1.a, x2);
            for (int i = 1; i <= samples; ++i) {
                const double x1 = domain.omega1.a + domain.omega1.length() * i / samples;
                if (std::abs(a22(x1, x2) - ref) > 1e-12 * std::max(1.0, std::abs(ref)))
                    throw InvalidArgument("hypothesis hypAd2 violated: a22 varies with x1");
            }
        }
    }
}

ReactionSpec ReactionSpec::linear(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("linear reaction needs mu > 0");
    ReactionSpec r;
    r.kind = ReactionKind::Linear;
    r.mu = mu;
    return r;
}

ReactionSpec ReactionSpec::custom(Expression beta, double lipschitz, double growth) {
    if (!(lipschitz >= 0.0) || !(growth >= 0.0))
        throw InvalidArgument("reaction constants must be non-negative");
    ReactionSpec r;
    r.kind = ReactionKind::Custom;
    r.function = std::move(beta);
    r.lipschitz = lipschitz;
    r.growth = growth;
    return r;
}

double ReactionSpec::operator()(double s) const {
    switch (kind) {
        case ReactionKind::Zero: return 0.0;
        case ReactionKind::Linear: return mu * s;
        case ReactionKind::Custom: {
            Variables v;
            v.s = s;
            return function(v);
        }
    }
    return 0.0;
}

double ReactionSpec::growth_constant() const {
    switch (kind) {
        case ReactionKind::Zero: return 0.0;
        case ReactionKind::Linear: return mu;
        case ReactionKind::Custom: return growth;
    }
    return 0.0;
}

double ReactionSpec::lipschitz_constant() const {
    switch (kind) {
        case ReactionKind::Zero: return 0.0;
        case ReactionKind::Linear: return mu;
        case ReactionKind::Custom: return lipschitz;
    }
    return 0.0;
}

void ReactionSpec::validate(double span, int samples) const {
    if (std::abs((*this)(0.0)) > 1e-14) throw InvalidArgument("hypothesis hypBeta1 violated: beta(0) != 0");
    const double M = growth_constant();
    double prev = -INFINITY;
    for (int k = 0; k < samples; ++k) {
        const double s = -span + 2.0 * span * k / (samples - 1);
        const double b = (*this)(s);
        if (!std::isfinite(b)) throw InvalidArgument("hypothesis hypBeta1 violated: beta not finite");
        if (b < prev - 1e-12 * std::max(1.0, std::abs(prev)))
            throw InvalidArgument("hypothesis hypBeta1 violated: beta decreasing near s = " + std::to_string(s));
        if (std::abs(b) > M * (1.0 + std::abs(s)) * (1.0 + 1e-12) + 1e-14)
            throw InvalidArgument("hypothesis hypBeta2 violated: |beta(s)| > M(1+|s|) at s = " + std::to_string(s));
        prev = b;
    }
}

double integrate_closed_form(const TensorDomain& domain, const std::function<double(double, double)>& g,
                             int cells, int order) {
    const auto r1 = Quadrature1D::composite(domain.omega1, cells, order);
    const auto r2 = Quadrature1D::composite(domain.omega2, cells, order);
    double sum = 0.0;
    for (std::size_t p = 0; p < r1.points.size(); ++p) {
        double row = 0.0;
        for (std::size_t q = 0; q < r2.points.size(); ++q) row += r2.weights[q] * g(r1.points[p], r2.points[q]);
        sum += r1.weights[p] * row;
    }
    return sum;
}

double SourceField::l2_norm(const TensorDomain& domain) const {
    const double s = integrate_closed_form(domain, [&](double x1, double x2) {
        const double v = f(x1, x2);
        if (!std::isfinite(v)) throw InvalidArgument("non-finite source sample");
        return v * v;
    });
    return std::sqrt(s);
}

double SourceField::grad_x1_norm(const TensorDomain& domain) const {
    if (df_dx1) {
        return std::sqrt(integrate_closed_form(domain, [&](double x1, double x2) {
            const double v = (*df_dx1)(x1, x2);
            return v * v;
        }));
    }
    if (f.independent_of("x1")) return 0.0;
    const double h = 1e-5 * domain.omega1.length();
    return std::sqrt(integrate_closed_form(domain, [&](double x1, double x2) {
        const double v = (f(x1 + h, x2) - f(x1 - h, x2)) / (2 * h);
        return v * v;
    }));
}

void SourceField::validate(const TensorDomain& domain) const {
    if (!hyp_fad2) return;
    const int n = 64;
    double scale = 0.0;
    for_lattice(domain, n, [&](double x1, double x2) { scale = std::max(scale, std::abs(f(x1, x2))); });
    for (int j = 0; j <= n; ++j) {
        const double x2 = domain.omega2.a + domain.omega2.length() * j / n;
        for (double x1 : {domain.omega1.a, domain.omega1.b})
            if (std::abs(f(x1, x2)) > 1e-10 * std::max(1.0, scale))
                throw InvalidArgument("hypothesis hypFad2 declared but f does not vanish on the x1 boundary");
    }
}

ConstantLedger compute_constants(const CoefficientField& A, const TensorDomain& domain, const SourceField& f,
                                 const ReactionSpec& beta, int grid) {
    if (grid < 1) throw InvalidArgument("sampling grid must have at least one cell");
    if (!(A.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    ConstantLedger c;
    c.sampling_grid = grid;
    c.C_omega1 = domain.poincare1();
    c.C_omega2 = domain.poincare2();
    c.C_Omega = domain.poincare();
    c.area = domain.area();
    c.lambda = A.lambda;
    c.M = beta.growth_constant();

    c.sup_a11 = sup_abs(domain, grid, [&](double x1, double x2) { return A.a11(x1, x2); });
    c.sup_a12 = sup_abs(domain, grid, [&](double x1, double x2) { return A.a12(x1, x2); });
    c.sup_a21 = sup_abs(domain, grid, [&](double x1, double x2) { return A.a21(x1, x2); });
    c.sup_a22 = sup_abs(domain, grid, [&](double x1, double x2) { return A.a22(x1, x2); });
    c.sup_A = sup_abs(domain, grid, [&](double x1, double x2) { return spectral_norm(A.at(x1, x2)); });
    c.sup_da12_dx2 = sup_partial(domain, grid, A.a12, A.da12_dx2, 2);
    c.sup_da12_dx1 = sup_partial(domain, grid, A.a12, A.da12_dx1, 1);

    const double lam = A.lambda;
    const double Cw2 = c.C_omega2;
    c.C = (c.sup_a21 * c.sup_a21 + c.sup_a11 * c.sup_a11) / (2.0 * lam);
    const double t2 = Cw2 * c.sup_da12_dx2;
    c.C_prime = (3.0 * t2 * t2 + 3.0 * c.sup_a12 * c.sup_a12) / lam;
    const double t1 = Cw2 * c.sup_da12_dx1;
    c.C_second = 3.0 * t1 * t1 / lam;
    c.C1 = std::sqrt(4.0 * (c.C + c.C_prime) / lam);
    c.C2 = 2.0 * std::sqrt(c.C_second) * Cw2 / std::pow(lam, 1.5);
    c.C3 = Cw2 * Cw2 / lam;
    c.C3_statement = Cw2 / lam;

    c.f_norm = f.l2_norm(domain);
    c.grad_x1_f_norm = f.grad_x1_norm(domain);

    const double root_area = std::sqrt(c.area);
    const double lim2 = (2.0 * c.M * Cw2 * (root_area + Cw2 * Cw2 * c.f_norm / lam) +
                         c.sup_a22 * 2.0 * Cw2 * c.f_norm / lam) / lam;
    const double CO = c.C_Omega;
    const double per2 = (2.0 * c.M * CO * (root_area + CO * CO * c.f_norm / lam) +
                         c.sup_A * 2.0 * CO * c.f_norm / lam) / lam;
    c.cea_limit = std::sqrt(lim2);
    c.cea_perturbed = std::sqrt(per2);
    c.cea_linear_limit = c.sup_a22 / lam;
    c.cea_linear_perturbed = c.sup_A / lam;

    for (const auto& e : c.entries())
        if (!std::isfinite(e.value) || e.value < 0.0)
            throw InvalidArgument("constant " + e.name + " is not finite and non-negative");
    return c;
}

std::vector<LedgerEntry> ConstantLedger::entries() const {
    return {
        {"C_omega1", C_omega1, "|omega1|/pi"},
        {"C_omega2", C_omega2, "|omega2|/pi"},
        {"C_Omega", C_Omega, "(C_omega1^-2 + C_omega2^-2)^(-1/2)"},
        {"lambda", lambda, "declared"},
        {"M", M, "growth constant of beta"},
        {"sup_a11", sup_a11, "sampled"},
        {"sup_a12", sup_a12, "sampled"},
        {"sup_a21", sup_a21, "sampled"},
        {"sup_a22", sup_a22, "sampled"},
        {"sup_A", sup_A, "sampled spectral norm"},
        {"sup_da12_dx2", sup_da12_dx2, "sampled"},
        {"sup_da12_dx1", sup_da12_dx1, "sampled"},
        {"C", C, "(sup_a21^2 + sup_a11^2)/(2 lambda)"},
        {"C_prime", C_prime, "(3 (C_omega2 sup_da12_dx2)^2 + 3 sup_a12^2)/lambda"},
        {"C_second", C_second, "3 (C_omega2 sup_da12_dx1)^2/lambda"},
        {"C1", C1, "sqrt(4 (C + C_prime)/lambda)"},
        {"C2", C2, "2 sqrt(C_second) C_omega2/lambda^(3/2)"},
        {"C3", C3, "C_omega2^2/lambda"},
        {"C3_statement", C3_statement, "C_omega2/lambda"},
        {"f_norm", f_norm, "quadrature"},
        {"grad_x1_f_norm", grad_x1_f_norm, "quadrature"},
        {"cea_limit", cea_limit,
         "sqrt((2 M C_omega2 (|Omega|^1/2 + C_omega2^2 |f|/lambda) + sup_a22 2 C_omega2 |f|/lambda)/lambda)"},
        {"cea_perturbed", cea_perturbed,
         "sqrt((2 M C_Omega (|Omega|^1/2 + C_Omega^2 |f|/lambda) + sup_A 2 C_Omega |f|/lambda)/lambda)"},
        {"cea_linear_limit", cea_linear_limit, "sup_a22/lambda"},
        {"cea_linear_perturbed", cea_linear_perturbed, "sup_A/lambda"},
        {"rate_constant", rate_constant(), "C1 C3 grad_x1_f_norm + C2 f_norm"},
    };
}

}  // namespace aniso
