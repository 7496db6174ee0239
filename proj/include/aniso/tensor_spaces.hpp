#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aniso {

/// Open interval (a, b) with b > a.
struct Interval {
    double a = 0.0;
    double b = 1.0;

    [[nodiscard]] double length() const noexcept { return b - a; }
    /// Best Poincaré constant on H¹₀(a, b): L/π.
    [[nodiscard]] double poincare() const noexcept;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Ω = ω₁ × ω₂.
struct TensorDomain {
    Interval omega1;
    Interval omega2;

    /// Throws InvalidArgument on a degenerate interval.
    TensorDomain(Interval w1, Interval w2);

    [[nodiscard]] double poincare1() const noexcept { return omega1.poincare(); }
    [[nodiscard]] double poincare2() const noexcept { return omega2.poincare(); }
    /// (C_{ω₁}⁻² + C_{ω₂}⁻²)^{-1/2}
    [[nodiscard]] double poincare() const noexcept;
    [[nodiscard]] double area() const noexcept { return omega1.length() * omega2.length(); }

    friend bool operator==(const TensorDomain&, const TensorDomain&) = default;
};

/// Composite Gauss–Legendre rule: `order` points on each of `cells` equal
/// cells of an interval. Exact for polynomials of degree 2·order−1 per cell.
struct Quadrature1D {
    std::vector<double> points;
    std::vector<double> weights;
    int cells = 0;
    int order = 0;

    static Quadrature1D composite(const Interval& interval, int cells, int order);
};

/// Gauss–Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

enum class BasisKind { Q1, Sine };

[[nodiscard]] std::string to_string(BasisKind kind);
/// Accepts "q1" and "sine" (case-insensitive). Throws InvalidArgument.
[[nodiscard]] BasisKind parse_basis_kind(const std::string& text);

/// One-dimensional conforming H¹₀ family.
///
/// Q1(m): the m−1 interior hat functions of the uniform m-cell mesh.
/// Sine(m): √(2/L)·sin(kπ(x−a)/L), k = 1..m, orthonormal in L².
class BasisFamily1D {
public:
    /// Throws InvalidArgument when m < 1 (or m < 2 for Q1, which would be empty).
    BasisFamily1D(BasisKind kind, int m, Interval interval);

    [[nodiscard]] BasisKind kind() const noexcept { return kind_; }
    [[nodiscard]] int parameter() const noexcept { return m_; }
    [[nodiscard]] int dimension() const noexcept;
    [[nodiscard]] const Interval& interval() const noexcept { return interval_; }

    /// (φ_i(x), φ_i'(x)); zero outside the support. Throws on a bad index.
    [[nodiscard]] std::pair<double, double> eval(int index, double x) const;

    /// Closed support [lo, hi] of φ_index.
    [[nodiscard]] std::pair<double, double> support(int index) const;

    /// Number of equal quadrature cells used by default: m for Q1,
    /// 2m+4 panels for Sine.
    [[nodiscard]] int default_cells() const noexcept;
    [[nodiscard]] int default_order() const noexcept;

    friend bool operator==(const BasisFamily1D&, const BasisFamily1D&) = default;

private:
    BasisKind kind_;
    int m_;
    Interval interval_;
};

/// Basis values and derivatives tabulated at the points of a 1D rule.
/// Row-major n × P tables; `range[i]` is the half-open point range where
/// function i can be non-zero.
struct BasisTable1D {
    Quadrature1D rule;
    int n = 0;
    std::vector<double> value;
    std::vector<double> deriv;
    std::vector<std::pair<int, int>> range;

    [[nodiscard]] int points() const noexcept { return static_cast<int>(rule.points.size()); }
    [[nodiscard]] double v(int i, int p) const { return value[static_cast<std::size_t>(i) * rule.points.size() + static_cast<std::size_t>(p)]; }
    [[nodiscard]] double d(int i, int p) const { return deriv[static_cast<std::size_t>(i) * rule.points.size() + static_cast<std::size_t>(p)]; }

    static BasisTable1D build(const BasisFamily1D& basis, int cells, int order);
};

/// Value and both partial derivatives of a basis function or a field.
struct PointValue {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// V₁ ⊗ V₂ on a tensor domain, with DOF ordering flat = i·dim2 + j.
/// Immutable after construction.
class GalerkinSpace {
public:
    /// `quad_order` = 0 selects the per-family default (4 for Q1, 8 for Sine).
    GalerkinSpace(TensorDomain domain, BasisFamily1D basis1, BasisFamily1D basis2, int quad_order = 0);

    [[nodiscard]] const TensorDomain& domain() const noexcept { return domain_; }
    [[nodiscard]] const BasisFamily1D& basis1() const noexcept { return basis1_; }
    [[nodiscard]] const BasisFamily1D& basis2() const noexcept { return basis2_; }
    [[nodiscard]] int dim1() const noexcept { return basis1_.dimension(); }
    [[nodiscard]] int dim2() const noexcept { return basis2_.dimension(); }
    [[nodiscard]] int dimension() const noexcept { return dim1() * dim2(); }
    [[nodiscard]] int quad_order() const noexcept { return quad_order_; }

    [[nodiscard]] int flat(int i, int j) const noexcept { return i * dim2() + j; }
    [[nodiscard]] std::pair<int, int> split(int flat_index) const noexcept {
        return {flat_index / dim2(), flat_index % dim2()};
    }

    [[nodiscard]] const BasisTable1D& table1() const noexcept { return table1_; }
    [[nodiscard]] const BasisTable1D& table2() const noexcept { return table2_; }

    /// Same domain and same basis families (quadrature may differ).
    [[nodiscard]] bool same_space(const GalerkinSpace& other) const noexcept;

    [[nodiscard]] std::string describe() const;

private:
    TensorDomain domain_;
    BasisFamily1D basis1_;
    BasisFamily1D basis2_;
    int quad_order_;
    BasisTable1D table1_;
    BasisTable1D table2_;
};

using SpacePtr = std::shared_ptr<const GalerkinSpace>;

/// Throws InvalidArgument for m < 1 or degenerate intervals.
[[nodiscard]] SpacePtr build_space(const TensorDomain& domain, BasisKind kind1, int m1,
                                   BasisKind kind2, int m2, int quad_order = 0);

/// φ_flat(x) and its partials. Throws InvalidArgument on a bad index.
[[nodiscard]] PointValue eval_basis(const GalerkinSpace& space, int flat_index, double x1, double x2);

/// Value of Σ c_k φ_k at a point.
[[nodiscard]] PointValue eval_field(const GalerkinSpace& space, std::span<const double> coeffs,
                                    double x1, double x2);

/// Matrix (fine.dim × coarse.dim, row-major dense) expressing each coarse
/// basis function in the fine basis. Throws InvalidArgument when the
/// families are not nested.
[[nodiscard]] std::vector<double> prolongation_1d(const BasisFamily1D& coarse, const BasisFamily1D& fine);

/// Coefficients of a coarse-space field in the fine space (P₁ ⊗ P₂).
[[nodiscard]] std::vector<double> prolongate(const GalerkinSpace& coarse, const GalerkinSpace& fine,
                                             std::span<const double> coeffs);

/// Scalar field sampled at the tensor quadrature points of a space;
/// row-major P₁ × P₂.
struct GridField {
    int p1 = 0;
    int p2 = 0;
    std::vector<double> data;

    [[nodiscard]] double& at(int p, int q) { return data[static_cast<std::size_t>(p) * static_cast<std::size_t>(p2) + static_cast<std::size_t>(q)]; }
    [[nodiscard]] double at(int p, int q) const { return data[static_cast<std::size_t>(p) * static_cast<std::size_t>(p2) + static_cast<std::size_t>(q)]; }
};

enum class Derivative { None, X1, X2 };

/// Samples a callable f(x1, x2) at the quadrature points.
template <typename F>
[[nodiscard]] GridField sample_on_grid(const GalerkinSpace& space, F&& f) {
    const auto& q1 = space.table1().rule.points;
    const auto& q2 = space.table2().rule.points;
    GridField g{static_cast<int>(q1.size()), static_cast<int>(q2.size()), {}};
    g.data.resize(q1.size() * q2.size());
    for (std::size_t p = 0; p < q1.size(); ++p)
        for (std::size_t q = 0; q < q2.size(); ++q) g.data[p * q2.size() + q] = f(q1[p], q2[q]);
    return g;
}

/// Evaluates Σ c_k ∂φ_k at all quadrature points by sum factorization.
[[nodiscard]] GridField evaluate_on_grid(const GalerkinSpace& space, std::span<const double> coeffs,
                                         Derivative which = Derivative::None);

/// ∫_Ω g dx by the space's tensor quadrature.
[[nodiscard]] double integrate(const GalerkinSpace& space, const GridField& g);

}  // namespace aniso
