#include "aniso/tensor_spaces.hpp"

#include "aniso/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace aniso {

double Interval::poincare() const noexcept { return length() / std::numbers::pi; }

TensorDomain::TensorDomain(Interval w1, Interval w2) : omega1(w1), omega2(w2) {
    if (!(omega1.b > omega1.a) || !std::isfinite(omega1.length()))
        throw InvalidArgument("omega1 must satisfy b > a");
    if (!(omega2.b > omega2.a) || !std::isfinite(omega2.length()))
        throw InvalidArgument("omega2 must satisfy b > a");
}

double TensorDomain::poincare() const noexcept {
    const double c1 = poincare1();
    const double c2 = poincare2();
    return 1.0 / std::sqrt(1.0 / (c1 * c1) + 1.0 / (c2 * c2));
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
    if (order < 1) throw InvalidArgument("Gauss-Legendre order must be >= 1");
    std::vector<double> x(static_cast<std::size_t>(order));
    std::vector<double> w(static_cast<std::size_t>(order));
    const int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        w[static_cast<std::size_t>(i)] = weight;
        w[static_cast<std::size_t>(n - 1 - i)] = weight;
    }
    if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
    return {std::move(x), std::move(w)};
}

Quadrature1D Quadrature1D::composite(const Interval& interval, int cells, int order) {
    if (cells < 1) throw InvalidArgument("quadrature needs at least one cell");
    auto [ref_x, ref_w] = gauss_legendre(order);
    Quadrature1D rule;
    rule.cells = cells;
    rule.order = order;
    const double h = interval.length() / cells;
    rule.points.reserve(static_cast<std::size_t>(cells * order));
    rule.weights.reserve(static_cast<std::size_t>(cells * order));
    for (int c = 0; c < cells; ++c) {
        const double left = interval.a + c * h;
        for (int k = 0; k < order; ++k) {
            rule.points.push_back(left + 0.5 * h * (ref_x[static_cast<std::size_t>(k)] + 1.0));
            rule.weights.push_back(0.5 * h * ref_w[static_cast<std::size_t>(k)]);
        }
    }
    return rule;
}

std::string to_string(BasisKind kind) { return kind == BasisKind::Q1 ? "q1" : "sine"; }

BasisKind parse_basis_kind(const std::string& text) {
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "q1") return BasisKind::Q1;
    if (lower == "sine") return BasisKind::Sine;
    throw InvalidArgument("unknown basis kind '" + text + "' (expected q1 or sine)");
}

BasisFamily1D::BasisFamily1D(BasisKind kind, int m, Interval interval)
    : kind_(kind), m_(m), interval_(interval) {
    if (m < 1) throw InvalidArgument("basis parameter m must be >= 1");
    if (kind == BasisKind::Q1 && m < 2)
        throw InvalidArgument("Q1 basis needs m >= 2 subintervals to have an interior node");
    if (!(interval.b > interval.a)) throw InvalidArgument("degenerate basis interval");
}

int BasisFamily1D::dimension() const noexcept { return kind_ == BasisKind::Q1 ? m_ - 1 : m_; }

int BasisFamily1D::default_cells() const noexcept { return kind_ == BasisKind::Q1 ? m_ : 2 * m_ + 4; }

int BasisFamily1D::default_order() const noexcept { return kind_ == BasisKind::Q1 ? 4 : 8; }

std::pair<double, double> BasisFamily1D::support(int index) const {
    if (index < 0 || index >= dimension()) throw InvalidArgument("basis index out of range");
    if (kind_ == BasisKind::Sine) return {interval_.a, interval_.b};
    const double h = interval_.length() / m_;
    return {interval_.a + index * h, interval_.a + (index + 2) * h};
}

std::pair<double, double> BasisFamily1D::eval(int index, double x) const {
    if (index < 0 || index >= dimension()) throw InvalidArgument("basis index out of range");
    const double L = interval_.length();
    if (x < interval_.a || x > interval_.b) return {0.0, 0.0};
    if (kind_ == BasisKind::Sine) {
        const double k = index + 1;
        const double scale = std::sqrt(2.0 / L);
        const double arg = k * std::numbers::pi * (x - interval_.a) / L;
        return {scale * std::sin(arg), scale * k * std::numbers::pi / L * std::cos(arg)};
    }
    const double h = L / m_;
    const double node = interval_.a + (index + 1) * h;
    const double r = (x - node) / h;
    if (r <= -1.0 || r >= 1.0) return {0.0, 0.0};
    if (r <= 0.0) return {1.0 + r, 1.0 / h};
    return {1.0 - r, -1.0 / h};
}

BasisTable1D BasisTable1D::build(const BasisFamily1D& basis, int cells, int order) {
    BasisTable1D t;
    t.rule = Quadrature1D::composite(basis.interval(), cells, order);
    t.n = basis.dimension();
    const std::size_t P = t.rule.points.size();
    t.value.assign(static_cast<std::size_t>(t.n) * P, 0.0);
    t.deriv.assign(static_cast<std::size_t>(t.n) * P, 0.0);
    t.range.resize(static_cast<std::size_t>(t.n));
    const bool aligned = basis.kind() == BasisKind::Q1 && cells == basis.parameter();
    for (int i = 0; i < t.n; ++i) {
        int lo = 0;
        int hi = static_cast<int>(P);
        if (aligned) {
            lo = i * order;
            hi = (i + 2) * order;
        } else if (basis.kind() == BasisKind::Q1) {
            auto [s0, s1] = basis.support(i);
            lo = static_cast<int>(std::lower_bound(t.rule.points.begin(), t.rule.points.end(), s0) - t.rule.points.begin());
            hi = static_cast<int>(std::upper_bound(t.rule.points.begin(), t.rule.points.end(), s1) - t.rule.points.begin());
        }
        t.range[static_cast<std::size_t>(i)] = {lo, hi};
        for (int p = lo; p < hi; ++p) {
            auto [v, d] = basis.eval(i, t.rule.points[static_cast<std::size_t>(p)]);
            t.value[static_cast<std::size_t>(i) * P + static_cast<std::size_t>(p)] = v;
            t.deriv[static_cast<std::size_t>(i) * P + static_cast<std::size_t>(p)] = d;
        }
    }
    return t;
}

GalerkinSpace::GalerkinSpace(TensorDomain domain, BasisFamily1D basis1, BasisFamily1D basis2, int quad_order)
    : domain_(domain), basis1_(basis1), basis2_(basis2), quad_order_(quad_order) {
    if (!(basis1_.interval() == domain_.omega1) || !(basis2_.interval() == domain_.omega2))
        throw InvalidArgument("basis intervals must match the domain factors");
    if (quad_order < 0) throw InvalidArgument("quadrature order must be >= 0");
    const int o1 = quad_order > 0 ? quad_order : basis1_.default_order();
    const int o2 = quad_order > 0 ? quad_order : basis2_.default_order();
    table1_ = BasisTable1D::build(basis1_, basis1_.default_cells(), o1);
    table2_ = BasisTable1D::build(basis2_, basis2_.default_cells(), o2);
}

bool GalerkinSpace::same_space(const GalerkinSpace& other) const noexcept {
    return domain_ == other.domain_ && basis1_ == other.basis1_ && basis2_ == other.basis2_;
}

std::string GalerkinSpace::describe() const {
    return to_string(basis1_.kind()) + "(" + std::to_string(basis1_.parameter()) + ")x" +
           to_string(basis2_.kind()) + "(" + std::to_string(basis2_.parameter()) + ")";
}

SpacePtr build_space(const TensorDomain& domain, BasisKind kind1, int m1, BasisKind kind2, int m2,
                     int quad_order) {
    return std::make_shared<const GalerkinSpace>(domain, BasisFamily1D(kind1, m1, domain.omega1),
                                                 BasisFamily1D(kind2, m2, domain.omega2), quad_order);
}

PointValue eval_basis(const GalerkinSpace& space, int flat_index, double x1, double x2) {
    if (flat_index < 0 || flat_index >= space.dimension())
        throw InvalidArgument("basis index " + std::to_string(flat_index) + " out of range");
    auto [i, j] = space.split(flat_index);
    auto [v1, d1] = space.basis1().eval(i, x1);
    auto [v2, d2] = space.basis2().eval(j, x2);
    return {v1 * v2, d1 * v2, v1 * d2};
}

PointValue eval_field(const GalerkinSpace& space, std::span<const double> coeffs, double x1, double x2) {
    if (static_cast<int>(coeffs.size()) != space.dimension())
        throw InvalidArgument("coefficient vector does not match space dimension");
    std::vector<std::pair<double, double>> f2(static_cast<std::size_t>(space.dim2()));
    for (int j = 0; j < space.dim2(); ++j) f2[static_cast<std::size_t>(j)] = space.basis2().eval(j, x2);
    PointValue out;
    for (int i = 0; i < space.dim1(); ++i) {
        auto [v1, d1] = space.basis1().eval(i, x1);
        if (v1 == 0.0 && d1 == 0.0) continue;
        for (int j = 0; j < space.dim2(); ++j) {
            const double c = coeffs[static_cast<std::size_t>(space.flat(i, j))];
            const auto [v2, d2] = f2[static_cast<std::size_t>(j)];
            out.value += c * v1 * v2;
            out.d1 += c * d1 * v2;
            out.d2 += c * v1 * d2;
        }
    }
    return out;
}

std::vector<double> prolongation_1d(const BasisFamily1D& coarse, const BasisFamily1D& fine) {
    if (coarse.kind() != fine.kind() || !(coarse.interval() == fine.interval()))
        throw InvalidArgument("basis families are not nested (kind or interval differ)");
    const int nc = coarse.dimension();
    const int nf = fine.dimension();
    std::vector<double> P(static_cast<std::size_t>(nf) * static_cast<std::size_t>(nc), 0.0);
    if (coarse.kind() == BasisKind::Sine) {
        if (fine.parameter() < coarse.parameter())
            throw InvalidArgument("sine family is not nested: fine has fewer modes");
        for (int k = 0; k < nc; ++k) P[static_cast<std::size_t>(k) * static_cast<std::size_t>(nc) + static_cast<std::size_t>(k)] = 1.0;
        return P;
    }
    if (fine.parameter() % coarse.parameter() != 0)
        throw InvalidArgument("Q1 family is not nested: fine m must be a multiple of coarse m");
    const double hf = fine.interval().length() / fine.parameter();
    for (int r = 0; r < nf; ++r) {
        const double x = fine.interval().a + (r + 1) * hf;
        for (int c = 0; c < nc; ++c)
            P[static_cast<std::size_t>(r) * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)] = coarse.eval(c, x).first;
    }
    return P;
}

std::vector<double> prolongate(const GalerkinSpace& coarse, const GalerkinSpace& fine,
                               std::span<const double> coeffs) {
    if (!(coarse.domain() == fine.domain())) throw InvalidArgument("spaces live on different domains");
    if (static_cast<int>(coeffs.size()) != coarse.dimension())
        throw InvalidArgument("coefficient vector does not match coarse space");
    const auto P1 = prolongation_1d(coarse.basis1(), fine.basis1());
    const auto P2 = prolongation_1d(coarse.basis2(), fine.basis2());
    const int c1 = coarse.dim1();
    const int c2 = coarse.dim2();
    const int f1 = fine.dim1();
    const int f2 = fine.dim2();
    // tmp(i_c, j_f) = Σ_{j_c} c(i_c, j_c) P2(j_f, j_c)
    std::vector<double> tmp(static_cast<std::size_t>(c1) * static_cast<std::size_t>(f2), 0.0);
    for (int ic = 0; ic < c1; ++ic)
        for (int jf = 0; jf < f2; ++jf) {
            double s = 0.0;
            for (int jc = 0; jc < c2; ++jc)
                s += coeffs[static_cast<std::size_t>(ic * c2 + jc)] * P2[static_cast<std::size_t>(jf * c2 + jc)];
            tmp[static_cast<std::size_t>(ic * f2 + jf)] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(f1) * static_cast<std::size_t>(f2), 0.0);
    for (int iff = 0; iff < f1; ++iff)
        for (int ic = 0; ic < c1; ++ic) {
            const double w = P1[static_cast<std::size_t>(iff * c1 + ic)];
            if (w == 0.0) continue;
            for (int jf = 0; jf < f2; ++jf)
                out[static_cast<std::size_t>(iff * f2 + jf)] += w * tmp[static_cast<std::size_t>(ic * f2 + jf)];
        }
    return out;
}

GridField evaluate_on_grid(const GalerkinSpace& space, std::span<const double> coeffs, Derivative which) {
    if (static_cast<int>(coeffs.size()) != space.dimension())
        throw InvalidArgument("coefficient vector does not match space dimension");
    const auto& t1 = space.table1();
    const auto& t2 = space.table2();
    const int n1 = t1.n;
    const int n2 = t2.n;
    const int P = t1.points();
    const int Q = t2.points();
    const bool d1 = which == Derivative::X1;
    const bool d2 = which == Derivative::X2;

    // H(i, q) = Σ_j c(i,j) ψ_j^{(d2)}(q)
    std::vector<double> H(static_cast<std::size_t>(n1) * static_cast<std::size_t>(Q), 0.0);
    for (int i = 0; i < n1; ++i) {
        double* row = H.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(Q);
        for (int j = 0; j < n2; ++j) {
            const double c = coeffs[static_cast<std::size_t>(i * n2 + j)];
            if (c == 0.0) continue;
            auto [lo, hi] = t2.range[static_cast<std::size_t>(j)];
            for (int q = lo; q < hi; ++q) row[q] += c * (d2 ? t2.d(j, q) : t2.v(j, q));
        }
    }
    GridField g{P, Q, std::vector<double>(static_cast<std::size_t>(P) * static_cast<std::size_t>(Q), 0.0)};
    for (int i = 0; i < n1; ++i) {
        const double* row = H.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(Q);
        auto [lo, hi] = t1.range[static_cast<std::size_t>(i)];
        for (int p = lo; p < hi; ++p) {
            const double phi = d1 ? t1.d(i, p) : t1.v(i, p);
            if (phi == 0.0) continue;
            double* out = g.data.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(Q);
            for (int q = 0; q < Q; ++q) out[q] += phi * row[q];
        }
    }
    return g;
}

double integrate(const GalerkinSpace& space, const GridField& g) {
    const auto& w1 = space.table1().rule.weights;
    const auto& w2 = space.table2().rule.weights;
    if (g.p1 != static_cast<int>(w1.size()) || g.p2 != static_cast<int>(w2.size()))
        throw InvalidArgument("grid field does not match the space quadrature");
    double total = 0.0;
    for (int p = 0; p < g.p1; ++p) {
        double row = 0.0;
        for (int q = 0; q < g.p2; ++q) row += w2[static_cast<std::size_t>(q)] * g.at(p, q);
        total += w1[static_cast<std::size_t>(p)] * row;
    }
    return total;
}

}  // namespace aniso
