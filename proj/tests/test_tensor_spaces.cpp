#include "aniso/errors.hpp"
#include "aniso/expression.hpp"
#include "aniso/tensor_spaces.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aniso;
using aniso::testing::pi;

TEST(Expression, EvaluatesGrammar) {
    const auto e = Expression::parse("2*sin(x1)^2 + cos(x2) - -1");
    EXPECT_NEAR(e(0.3, 0.7), 2 * std::pow(std::sin(0.3), 2) + std::cos(0.7) + 1, 1e-15);
    EXPECT_NEAR(Expression::parse("2^3^2")({}), 512.0, 0.0);
    EXPECT_NEAR(Expression::parse("-2^2")({}), -4.0, 0.0);
    EXPECT_NEAR(Expression::parse("atan(1)*4")({}), pi, 1e-15);
    Variables v;
    v.s = 2.0;
    v.t = 3.0;
    EXPECT_DOUBLE_EQ(Expression::parse("s*t + exp(0)")(v), 7.0);
}

TEST(Expression, ReportsColumnOfError) {
    try {
        (void)Expression::parse("1 + * 2");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 5);
    }
    EXPECT_THROW((void)Expression::parse("sin(x1"), ParseError);
    EXPECT_THROW((void)Expression::parse("foo(x1)"), ParseError);
    EXPECT_THROW((void)Expression::parse("1 2"), ParseError);
}

TEST(Expression, DependencyQueries) {
    const auto e = Expression::parse("1 + x2^2/10");
    EXPECT_TRUE(e.independent_of("x1"));
    EXPECT_FALSE(e.independent_of("x2"));
    EXPECT_FALSE(e.is_constant());
    EXPECT_TRUE(Expression::parse("pi/2")
                    .is_constant());
}

TEST(Quadrature, GaussLegendreExactness) {
    for (int order = 1; order <= 12; ++order) {
        auto [x, w] = gauss_legendre(order);
        for (int deg = 0; deg <= 2 * order - 1; ++deg) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
            const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
            EXPECT_NEAR(s, exact, 1e-14) << "order " << order << " degree " << deg;
        }
    }
}

TEST(Quadrature, CompositeIntegratesSine) {
    const auto q = Quadrature1D::composite({0.0, pi}, 8, 8);
    double s = 0.0;
    for (std::size_t i = 0; i < q.points.size(); ++i) s += q.weights[i] * std::sin(q.points[i]);
    EXPECT_NEAR(s, 2.0, 1e-14);
}

TEST(Domain, PoincareConstants) {
    const TensorDomain d({0.0, pi}, {0.0, 2 * pi});
    EXPECT_NEAR(d.poincare1(), 1.0, 1e-15);
    EXPECT_NEAR(d.poincare2(), 2.0, 1e-15);
    EXPECT_NEAR(d.poincare(), 1.0 / std::sqrt(1.25), 1e-15);
    EXPECT_THROW(TensorDomain({1.0, 1.0}, {0.0, 1.0}), InvalidArgument);
}

TEST(Basis, SineIsOrthonormal) {
    const BasisFamily1D b(BasisKind::Sine, 5, {0.0, pi});
    const auto t = BasisTable1D::build(b, b.default_cells(), b.default_order());
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 5; ++k) {
            double m = 0.0, s = 0.0;
            for (int p = 0; p < t.points(); ++p) {
                m += t.rule.weights[static_cast<std::size_t>(p)] * t.v(i, p) * t.v(k, p);
                s += t.rule.weights[static_cast<std::size_t>(p)] * t.d(i, p) * t.d(k, p);
            }
            EXPECT_NEAR(m, i == k ? 1.0 : 0.0, 1e-13);
            EXPECT_NEAR(s, i == k ? (i + 1.0) * (i + 1.0) : 0.0, 1e-12);
        }
    EXPECT_NEAR(b.eval(0, 1.0).first, std::sqrt(2 / pi) * std::sin(1.0), 1e-15);
}

TEST(Basis, Q1HatsAndSupport) {
    const BasisFamily1D b(BasisKind::Q1, 4, {0.0, 1.0});
    EXPECT_EQ(b.dimension(), 3);
    EXPECT_DOUBLE_EQ(b.eval(1, 0.5).first, 1.0);
    EXPECT_DOUBLE_EQ(b.eval(1, 0.375).first, 0.5);
    EXPECT_DOUBLE_EQ(b.eval(1, 0.375).second, 4.0);
    EXPECT_DOUBLE_EQ(b.eval(1, 0.625).second, -4.0);
    EXPECT_DOUBLE_EQ(b.eval(0, 0.9).first, 0.0);
    EXPECT_THROW(BasisFamily1D(BasisKind::Q1, 1, {0.0, 1.0}), InvalidArgument);
    EXPECT_THROW(BasisFamily1D(BasisKind::Sine, 0, {0.0, 1.0}), InvalidArgument);
}

TEST(Space, DimensionAndOrdering) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Q1, 4, BasisKind::Sine, 3);
    EXPECT_EQ(s->dimension(), 9);
    EXPECT_EQ(s->flat(2, 1), 7);
    EXPECT_EQ(s->split(7), std::make_pair(2, 1));
    EXPECT_THROW((void)eval_basis(*s, 9, 0.0, 0.0), InvalidArgument);
}

TEST(Space, NormalizedModeValue) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Sine, 1, BasisKind::Sine, 1);
    const auto v = eval_basis(*s, 0, pi / 2, pi / 2);
    EXPECT_NEAR(v.value, 2 / pi, 1e-15);
}

TEST(Space, GridEvaluationMatchesPointwise) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Q1, 5, BasisKind::Sine, 4);
    std::mt19937_64 rng(7);
    const Vector c = aniso::testing::random_vector(static_cast<std::size_t>(s->dimension()), rng);
    const auto g = evaluate_on_grid(*s, c);
    const auto g1 = evaluate_on_grid(*s, c, Derivative::X1);
    const auto g2 = evaluate_on_grid(*s, c, Derivative::X2);
    const auto& q1 = s->table1().rule.points;
    const auto& q2 = s->table2().rule.points;
    for (int p = 0; p < g.p1; p += 3)
        for (int q = 0; q < g.p2; q += 5) {
            const auto v = eval_field(*s, c, q1[static_cast<std::size_t>(p)], q2[static_cast<std::size_t>(q)]);
            EXPECT_NEAR(g.at(p, q), v.value, 1e-13);
            EXPECT_NEAR(g1.at(p, q), v.d1, 1e-12);
            EXPECT_NEAR(g2.at(p, q), v.d2, 1e-12);
        }
}

TEST(Space, ProlongationPreservesFields) {
    const auto d = aniso::testing::unit_pi_square();
    for (auto kind : {BasisKind::Q1, BasisKind::Sine}) {
        const auto coarse = build_space(d, kind, 2, kind, 4);
        const auto fine = build_space(d, kind, 4, kind, 8);
        std::mt19937_64 rng(3);
        const Vector c = aniso::testing::random_vector(static_cast<std::size_t>(coarse->dimension()), rng);
        const Vector f = prolongate(*coarse, *fine, c);
        for (double x1 : {0.3, 1.1, 2.9})
            for (double x2 : {0.2, 1.7, 3.0})
                EXPECT_NEAR(eval_field(*coarse, c, x1, x2).value, eval_field(*fine, f, x1, x2).value, 1e-13);
    }
    const auto q3 = build_space(d, BasisKind::Q1, 3, BasisKind::Q1, 3);
    const auto q4 = build_space(d, BasisKind::Q1, 4, BasisKind::Q1, 4);
    EXPECT_THROW((void)prolongate(*q3, *q4, Vector(4, 1.0)), InvalidArgument);
}

TEST(Space, IntegrateGrid) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Sine, 2, BasisKind::Sine, 2);
    const auto g = sample_on_grid(*s, [](double x1, double x2) { return std::sin(x1) * std::sin(x2); });
    EXPECT_NEAR(integrate(*s, g), 4.0, 1e-13);
}

TEST(Basis, ParseKind) {
    EXPECT_EQ(parse_basis_kind("Q1"), BasisKind::Q1);
    EXPECT_EQ(parse_basis_kind("sine"), BasisKind::Sine);
    EXPECT_THROW((void)parse_basis_kind("p2"), InvalidArgument);
}
