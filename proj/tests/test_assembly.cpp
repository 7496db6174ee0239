#include "aniso/assembly.hpp"
#include "aniso/errors.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aniso;
using aniso::testing::pi;

namespace {

CoefficientField smooth_offdiag() {
    CoefficientField A = CoefficientField::identity();
    A.a12 = Expression::parse("0.2*sin(x1)*sin(x2)");
    A.a21 = A.a12;
    A.a11 = Expression::parse("1 + 0.1*cos(x1 + x2)");
    A.lambda = 0.7;
    return A;
}

double max_offdiagonal(const SparseMatrix& K) {
    double m = 0.0;
    for (int r = 0; r < K.size(); ++r)
        for (int c = 0; c < K.size(); ++c)
            if (r != c) m = std::max(m, std::abs(K.at(r, c)));
    return m;
}

}  // namespace

TEST(Assembly, SingleModeBlocks) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Sine, 1, BasisKind::Sine, 1);
    const auto A = CoefficientField::identity();
    EXPECT_NEAR(assemble_block_stiffness(*s, A, Block::B11).at(0, 0), 1.0, 1e-13);
    EXPECT_NEAR(assemble_block_stiffness(*s, A, Block::B22).at(0, 0), 1.0, 1e-13);
    EXPECT_EQ(assemble_block_stiffness(*s, A, Block::B12).nonzeros(), 0u);
    EXPECT_EQ(assemble_block_stiffness(*s, A, Block::B21).nonzeros(), 0u);
}

TEST(Assembly, ReassemblyIdentity) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Q1, 6, BasisKind::Sine, 4);
    const auto A = smooth_offdiag();
    const auto p = assemble_problem(s, A, aniso::testing::source("x1*x2"));
    const auto K = p.K_eps(0.5);
    const double scales[] = {0.25, 0.5, 0.5, 1.0};
    const SparseMatrix* terms[] = {&p.K11, &p.K12, &p.K21, &p.K22};
    const auto manual = SparseMatrix::linear_combination(scales, terms);
    EXPECT_LE(SparseMatrix::max_abs_difference(K, manual), 1e-12 * K.max_abs());
    EXPECT_THROW((void)p.K_eps(0.0), InvalidArgument);
}

TEST(Assembly, LimitStiffnessIsDiagonalOnSineModes) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Sine, 4, BasisKind::Sine, 4);
    const auto K = assemble_limit_stiffness(*s, CoefficientField::identity());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(K.at(s->flat(i, j), s->flat(i, j)), (j + 1.0) * (j + 1.0), 1e-12);
    EXPECT_LE(max_offdiagonal(K), 1e-12);
}

TEST(Assembly, LimitStiffnessKroneckerIdentity) {
    const auto d = aniso::testing::unit_pi_square();
    for (const char* a22 : {"1", "1 + x2^2/10"}) {
        CoefficientField A = CoefficientField::identity();
        A.a22 = Expression::parse(a22);
        for (auto kind : {BasisKind::Q1, BasisKind::Sine}) {
            const auto s = build_space(d, kind, 4, kind, 4);
            const auto K = assemble_limit_stiffness(*s, A);
            const auto& t2 = s->table2();
            std::vector<double> w(t2.rule.points.size());
            for (std::size_t q = 0; q < w.size(); ++q) w[q] = A.a22(0.0, t2.rule.points[q]);
            const auto kron = SparseMatrix::kronecker(s->dim1(), mass_1d(s->table1()), s->dim2(), stiffness_1d(t2, w));
            EXPECT_LE(SparseMatrix::max_abs_difference(K, kron), 1e-12) << a22;
        }
    }
}

TEST(Assembly, SymmetryAndDiscreteEllipticity) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Q1, 8, BasisKind::Q1, 8);
    const auto A = smooth_offdiag();
    const auto p = assemble_problem(s, A, aniso::testing::source("1"));
    std::mt19937_64 rng(42);
    for (double eps : {1.0, 0.25, 1.0 / 64}) {
        const auto K = p.K_eps(eps);
        EXPECT_TRUE(K.is_symmetric());
        for (int trial = 0; trial < 10; ++trial) {
            const Vector v = aniso::testing::random_vector(static_cast<std::size_t>(s->dimension()), rng);
            const double lhs = K.bilinear(v, v);
            const double rhs = A.lambda * (eps * eps * p.G1.bilinear(v, v) + p.G2.bilinear(v, v));
            EXPECT_GE(lhs, rhs * (1 - 1e-12));
        }
    }
}

TEST(Assembly, NonsymmetricOffBlocksAreIndependent) {
    CoefficientField A = CoefficientField::identity();
    A.a12 = Expression::constant(0.3);
    A.a21 = Expression::constant(-0.1);
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Q1, 4, BasisKind::Q1, 4);
    const auto K12 = assemble_block_stiffness(*s, A, Block::B12);
    const auto K21 = assemble_block_stiffness(*s, A, Block::B21);
    // ∫ ∂₂u ∂₁v and ∫ ∂₁u ∂₂v are transposes of each other.
    const double scale_a[] = {1.0 / 0.3};
    const double scale_b[] = {-1.0 / 0.1};
    const SparseMatrix* ta[] = {&K12};
    const SparseMatrix* tb[] = {&K21};
    const auto unit12 = SparseMatrix::linear_combination(scale_a, ta);
    const auto unit21 = SparseMatrix::linear_combination(scale_b, tb);
    EXPECT_LE(SparseMatrix::max_abs_difference(unit12.transpose(), unit21), 1e-12);
    // With constant entries the off-blocks combine symmetrically; a varying
    // a12 breaks that.
    EXPECT_TRUE(assemble_problem(s, A, aniso::testing::source("1")).K_eps(1.0).is_symmetric());
    A.a12 = Expression::parse("0.3*x1");
    const auto p = assemble_problem(s, A, aniso::testing::source("1"));
    EXPECT_FALSE(p.K_eps(1.0).is_symmetric());
}

TEST(Assembly, QuadratureRefinementStability) {
    const auto d = aniso::testing::unit_pi_square();
    const auto A = smooth_offdiag();
    for (auto kind : {BasisKind::Q1, BasisKind::Sine}) {
        const int m = kind == BasisKind::Q1 ? 16 : 6;
        const auto base = build_space(d, kind, m, kind, m);
        const int doubled = 2 * (kind == BasisKind::Q1 ? 4 : 8);
        const auto fine = build_space(d, kind, m, kind, m, doubled);
        for (auto b : {Block::B11, Block::B12, Block::B21, Block::B22}) {
            const auto K = assemble_block_stiffness(*base, A, b);
            const auto Kf = assemble_block_stiffness(*fine, A, b);
            EXPECT_LE(SparseMatrix::max_abs_difference(K, Kf), 1e-10) << to_string(b) << " " << to_string(kind);
        }
    }
}

TEST(Assembly, LoadAndMass) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Sine, 4, BasisKind::Sine, 4);
    const Vector F = assemble_load(*s, aniso::testing::source(aniso::testing::sine_mode(1, 1)));
    EXPECT_NEAR(F[0], 1.0, 1e-13);
    for (std::size_t k = 1; k < F.size(); ++k) EXPECT_NEAR(F[k], 0.0, 1e-13);
    const Vector Z = assemble_load(*s, aniso::testing::source("0"));
    for (double v : Z) EXPECT_EQ(v, 0.0);
    const auto M = assemble_mass(*s);
    Vector e(16, 0.0);
    e[0] = 1.0;
    EXPECT_NEAR(M.bilinear(e, e), 1.0, 1e-13);
    EXPECT_THROW((void)assemble_load(*s, aniso::testing::source("1/(x1-x1)")), InvalidArgument);
}

TEST(Assembly, DiscretePoincareOnSineSpaces) {
    const TensorDomain d({0.0, pi}, {0.0, 2.0});
    const auto s = build_space(d, BasisKind::Sine, 5, BasisKind::Sine, 6);
    const auto M = assemble_mass(*s);
    const auto [G1, G2] = seminorm_matrices(*s);
    const double c2 = d.poincare2();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector v = aniso::testing::random_vector(static_cast<std::size_t>(s->dimension()), rng);
        EXPECT_GE(G2.bilinear(v, v), M.bilinear(v, v) / (c2 * c2) * (1 - 1e-12));
    }
    Vector first(static_cast<std::size_t>(s->dimension()), 0.0);
    first[0] = 1.0;
    EXPECT_NEAR(G2.bilinear(first, first), 1.0 / (c2 * c2), 1e-12);
}

TEST(Assembly, ReactionVectorOfLinearBetaIsMassProduct) {
    const auto s = build_space(aniso::testing::unit_pi_square(), BasisKind::Q1, 5, BasisKind::Sine, 3);
    std::mt19937_64 rng(5);
    const Vector u = aniso::testing::random_vector(static_cast<std::size_t>(s->dimension()), rng);
    const Vector B = assemble_reaction(*s, u, ReactionSpec::linear(2.0));
    const Vector Mu = assemble_mass(*s) * u;
    for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(B[k], 2.0 * Mu[k], 1e-12);
}
