#include "aniso/coefficients.hpp"
#include "aniso/errors.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aniso;
using aniso::testing::pi;

namespace {

CoefficientField constant_offdiag(double a, double lambda) {
    CoefficientField A = CoefficientField::identity();
    A.a12 = Expression::constant(a);
    A.a21 = Expression::constant(a);
    A.lambda = lambda;
    return A;
}

SourceField unit_mode() { return aniso::testing::source(aniso::testing::sine_mode(1, 1)); }

}  // namespace

TEST(ScaleMatrix, Multipliers) {
    const auto s1 = scale_matrix(1.0);
    EXPECT_EQ(s1.s11, 1.0);
    EXPECT_EQ(s1.s12, 1.0);
    EXPECT_EQ(s1.s21, 1.0);
    EXPECT_EQ(s1.s22, 1.0);
    const auto h = scale_matrix(0.5);
    EXPECT_EQ(h.s11, 0.25);
    EXPECT_EQ(h.s12, 0.5);
    EXPECT_EQ(h.s21, 0.5);
    EXPECT_EQ(h.s22, 1.0);
    EXPECT_THROW((void)scale_matrix(0.0), InvalidArgument);
    EXPECT_THROW((void)scale_matrix(1.5), InvalidArgument);
    try {
        (void)scale_matrix(-1.0);
    } catch (const InvalidArgument& e) {
        EXPECT_STREQ(e.what(), "epsilon must lie in (0,1]");
    }
}

TEST(ScaleMatrix, QuadraticFormTendsToA22) {
    CoefficientField A = constant_offdiag(0.3, 0.7);
    A.a22 = Expression::parse("1 + x2^2/10");
    const double a22 = A.a22(0.4, 1.2);
    for (double eps : {1.0, 0.1, 1e-4}) EXPECT_NEAR(A.quadratic_form(0.4, 1.2, {0.0, 1.0}, scale_matrix(eps)), a22, 1e-15);
    EXPECT_NEAR(A.quadratic_form(0.4, 1.2, {1.0, 1.0}, scale_matrix(1e-8)), a22, 1e-7);
}

TEST(Coefficients, ValidationNamesHypothesis) {
    const auto d = aniso::testing::unit_pi_square();
    CoefficientField A = constant_offdiag(0.3, 0.7);
    EXPECT_NO_THROW(A.validate(d));
    A.lambda = 0.71;
    try {
        A.validate(d);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("hypA1"), std::string::npos);
    }
    CoefficientField B = CoefficientField::identity();
    B.a22 = Expression::parse("1 + x1/10");
    try {
        B.validate(d);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("hypAd2"), std::string::npos);
    }
    B.a22_depends_only_on_x2 = false;
    EXPECT_NO_THROW(B.validate(d));
    EXPECT_NEAR(constant_offdiag(0.3, 0.7).sampled_min_eigenvalue(d, 8), 0.7, 1e-15);
}

TEST(Reaction, KindsAndValidation) {
    EXPECT_EQ(ReactionSpec::zero()(3.0), 0.0);
    EXPECT_EQ(ReactionSpec::linear(2.0)(3.0), 6.0);
    EXPECT_THROW((void)ReactionSpec::linear(0.0), InvalidArgument);
    const auto arctan = ReactionSpec::custom(Expression::parse("atan(s)"), 1.0, 2.0);
    EXPECT_NO_THROW(arctan.validate());
    EXPECT_NEAR(arctan(1.0), pi / 4, 1e-15);
    EXPECT_THROW(ReactionSpec::custom(Expression::parse("-s"), 1.0, 1.0).validate(), InvalidArgument);
    EXPECT_THROW(ReactionSpec::custom(Expression::parse("s^3"), 1.0, 1.0).validate(), InvalidArgument);
    EXPECT_THROW(ReactionSpec::custom(Expression::parse("atan(s) + 1"), 1.0, 3.0).validate(), InvalidArgument);
}

TEST(Source, NormsAndBoundaryCheck) {
    const auto d = aniso::testing::unit_pi_square();
    SourceField f = unit_mode();
    EXPECT_NEAR(f.l2_norm(d), 1.0, 1e-13);
    EXPECT_NEAR(f.grad_x1_norm(d), 1.0, 1e-8);
    f.df_dx1 = Expression::parse("2/pi*cos(x1)*sin(x2)");
    EXPECT_NEAR(f.grad_x1_norm(d), 1.0, 1e-13);
    EXPECT_NO_THROW(f.validate(d));
    SourceField g = aniso::testing::source("cos(x1)*sin(x2)");
    EXPECT_THROW(g.validate(d), InvalidArgument);
    g.hyp_fad2 = false;
    EXPECT_NO_THROW(g.validate(d));
}

TEST(Ledger, IdentityOnPiSquare) {
    const auto c = compute_constants(CoefficientField::identity(), aniso::testing::unit_pi_square(), unit_mode());
    EXPECT_NEAR(c.C_omega2, 1.0, 1e-15);
    EXPECT_NEAR(c.C, 0.5, 1e-15);
    EXPECT_EQ(c.C_prime, 0.0);
    EXPECT_EQ(c.C_second, 0.0);
    EXPECT_NEAR(c.C1, std::sqrt(2.0), 1e-15);
    EXPECT_EQ(c.C2, 0.0);
    EXPECT_NEAR(c.C3, 1.0, 1e-15);
    EXPECT_NEAR(c.cea_linear_limit, 1.0, 1e-15);
    EXPECT_NEAR(c.cea_linear_perturbed, 1.0, 1e-15);
    // β = 0: C_céa² = ‖A22‖·2C_ω₂‖f‖/λ² = 2.
    EXPECT_NEAR(c.cea_limit, std::sqrt(2.0), 1e-12);
}

TEST(Ledger, ConstantOffDiagonalClosedForm) {
    const double a = 0.3, lam = 0.7;
    const auto c = compute_constants(constant_offdiag(a, lam), aniso::testing::unit_pi_square(), unit_mode());
    EXPECT_NEAR(c.C, (a * a + 1.0) / (2 * lam), 1e-12);
    EXPECT_EQ(c.C_second, 0.0);
    EXPECT_NEAR(c.C_prime, 3 * a * a / lam, 1e-12);
    EXPECT_NEAR(c.C1, std::sqrt(4 * ((a * a + 1) / (2 * lam) + 3 * a * a / lam) / lam), 1e-12);
    EXPECT_NEAR(c.sup_A, 1.0 + a, 1e-12);
}

TEST(Ledger, FormulasForConstantCoefficientsOnGeneralBox) {
    // Every formula re-evaluated by hand for a constant matrix on (0,2)×(0,3).
    const TensorDomain d({0.0, 2.0}, {0.0, 3.0});
    CoefficientField A;
    A.a11 = Expression::constant(2.0);
    A.a12 = Expression::constant(0.25);
    A.a21 = Expression::constant(-0.5);
    A.a22 = Expression::constant(1.5);
    A.lambda = 1.2;
    SourceField f = aniso::testing::source("1", true, false);
    const auto beta = ReactionSpec::linear(0.5);
    const auto c = compute_constants(A, d, f, beta, 16);
    const double Cw2 = 3 / pi, CO = 1 / std::sqrt(std::pow(pi / 2, 2) + std::pow(pi / 3, 2));
    const double fn = std::sqrt(6.0);
    EXPECT_NEAR(c.C_Omega, CO, 1e-15);
    EXPECT_NEAR(c.C, (0.25 + 4.0) / 2.4, 1e-12);
    EXPECT_NEAR(c.C_prime, 3 * 0.0625 / 1.2, 1e-12);
    EXPECT_NEAR(c.C3, Cw2 * Cw2 / 1.2, 1e-12);
    EXPECT_NEAR(c.C3_statement, Cw2 / 1.2, 1e-12);
    EXPECT_NEAR(c.f_norm, fn, 1e-12);
    const double lim2 = (2 * 0.5 * Cw2 * (std::sqrt(6.0) + Cw2 * Cw2 * fn / 1.2) + 1.5 * 2 * Cw2 * fn / 1.2) / 1.2;
    EXPECT_NEAR(c.cea_limit, std::sqrt(lim2), 1e-12);
    // Spectral norm of [[2, .25], [-.5, 1.5]].
    const double fro2 = 4 + 0.0625 + 0.25 + 2.25, det = 3 + 0.125;
    EXPECT_NEAR(c.sup_A, std::sqrt(0.5 * (fro2 + std::sqrt(fro2 * fro2 - 4 * det * det))), 1e-12);
    const double per2 = (2 * 0.5 * CO * (std::sqrt(6.0) + CO * CO * fn / 1.2) + c.sup_A * 2 * CO * fn / 1.2) / 1.2;
    EXPECT_NEAR(c.cea_perturbed, std::sqrt(per2), 1e-12);
}

TEST(Ledger, DerivativeTermsAndRefinement) {
    CoefficientField A = CoefficientField::identity();
    A.a12 = Expression::parse("0.2*sin(x1)*sin(x2)");
    A.a21 = A.a12;
    A.da12_dx1 = Expression::parse("0.2*cos(x1)*sin(x2)");
    A.da12_dx2 = Expression::parse("0.2*sin(x1)*cos(x2)");
    A.lambda = 0.8;
    const auto d = aniso::testing::unit_pi_square();
    const auto c = compute_constants(A, d, unit_mode());
    EXPECT_NEAR(c.sup_a12, 0.2, 1e-12);
    EXPECT_NEAR(c.sup_da12_dx1, 0.2, 1e-12);
    EXPECT_NEAR(c.C_second, 3 * 0.04 / 0.8, 1e-12);
    EXPECT_NEAR(c.C_prime, (3 * 0.04 + 3 * 0.04) / 0.8, 1e-12);
    EXPECT_GT(c.C2, 0.0);
    const auto fine = compute_constants(A, d, unit_mode(), ReactionSpec::zero(), 1024);
    for (std::size_t k = 0; k < c.entries().size(); ++k) {
        const double a = c.entries()[k].value, b = fine.entries()[k].value;
        EXPECT_LE(std::abs(a - b), 0.01 * std::max(std::abs(b), 1e-300)) << c.entries()[k].name;
    }
    // Undeclared partials fall back to finite differences.
    CoefficientField B = A;
    B.da12_dx1.reset();
    B.da12_dx2.reset();
    const auto fd = compute_constants(B, d, unit_mode());
    EXPECT_NEAR(fd.sup_da12_dx1, 0.2, 1e-8);
    EXPECT_NEAR(fd.sup_da12_dx2, 0.2, 1e-8);
}

TEST(Ledger, CPrimeMonotoneInOffDiagonal) {
    const auto d = aniso::testing::unit_pi_square();
    double prev = -1.0;
    for (double a : {0.0, 0.05, 0.1, 0.2, 0.3}) {
        const auto c = compute_constants(constant_offdiag(a, 0.6), d, unit_mode());
        EXPECT_GE(c.C_prime, prev);
        prev = c.C_prime;
    }
}

TEST(Ledger, EntriesAreFiniteAndNonNegative) {
    const auto c = compute_constants(constant_offdiag(0.3, 0.7), aniso::testing::unit_pi_square(), unit_mode(),
                                     ReactionSpec::custom(Expression::parse("atan(s)"), 1.0, 2.0));
    for (const auto& e : c.entries()) {
        EXPECT_TRUE(std::isfinite(e.value)) << e.name;
        EXPECT_GE(e.value, 0.0) << e.name;
        EXPECT_FALSE(e.formula.empty());
    }
}
