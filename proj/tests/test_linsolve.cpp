#include "aniso/errors.hpp"
#include "aniso/linsolve.hpp"
#include "aniso/sparse.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace aniso;

namespace {

/// B Bᵀ + n I with a fixed seed.
SparseMatrix random_spd(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> b(static_cast<std::size_t>(n * n));
    for (double& x : b) x = u(rng);
    std::vector<double> a(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = i == j ? n : 0.0;
            for (int k = 0; k < n; ++k) s += b[static_cast<std::size_t>(i * n + k)] * b[static_cast<std::size_t>(j * n + k)];
            a[static_cast<std::size_t>(i * n + j)] = s;
        }
    return SparseMatrix::from_dense(n, a);
}

}  // namespace

TEST(Sparse, TripletsSumDuplicates) {
    const auto m = SparseMatrix::from_triplets(3, {{0, 1, 1.0}, {2, 2, 4.0}, {0, 1, 2.0}, {1, 0, -1.0}});
    EXPECT_EQ(m.nonzeros(), 3u);
    EXPECT_DOUBLE_EQ(m.at(0, 1), 3.0);
    EXPECT_DOUBLE_EQ(m.at(1, 1), 0.0);
    EXPECT_THROW((void)SparseMatrix::from_triplets(2, {{2, 0, 1.0}}), InvalidArgument);
    const Vector y = m * Vector{1.0, 2.0, 3.0};
    EXPECT_EQ(y, (Vector{6.0, -1.0, 12.0}));
}

TEST(Sparse, KroneckerLayout) {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{0, 1, 1, 0};
    const auto k = SparseMatrix::kronecker(2, a, 2, b);
    EXPECT_DOUBLE_EQ(k.at(0, 3), 2.0);  // a(0,1) b(0,1)
    EXPECT_DOUBLE_EQ(k.at(3, 0), 3.0);  // a(1,0) b(1,0)
    EXPECT_DOUBLE_EQ(k.at(2, 3), 4.0);
    EXPECT_DOUBLE_EQ(k.at(0, 0), 0.0);
}

TEST(Sparse, SymmetryAndTranspose) {
    const auto m = SparseMatrix::from_triplets(2, {{0, 1, 1.0}, {1, 0, 2.0}});
    EXPECT_FALSE(m.is_symmetric());
    EXPECT_DOUBLE_EQ(m.transpose().at(0, 1), 2.0);
    const SparseMatrix* terms[] = {&m, &m};
    const double scales[] = {1.0, -1.0};
    EXPECT_EQ(SparseMatrix::linear_combination(scales, terms).max_abs(), 0.0);
}

TEST(Sparse, MatrixMarketDump) {
    std::ostringstream out;
    SparseMatrix::identity(2).write_matrix_market(out);
    EXPECT_EQ(out.str(),
              "%%MatrixMarket matrix coordinate real general\n2 2 2\n"
              "1 1 1.00000000000000000e+00\n2 2 1.00000000000000000e+00\n");
}

TEST(Solve, IdentityReturnsRhs) {
    const Vector e1{1.0, 0.0, 0.0};
    const auto r = solve(SparseMatrix::identity(3), e1);
    EXPECT_EQ(r.x, e1);
}

TEST(Solve, DiagonalEigenmodeSystem) {
    // K = diag(k² + ε² j²) as on a sine basis with A = I.
    const double eps = 0.5;
    std::vector<Triplet> t;
    for (int j = 1; j <= 3; ++j)
        for (int k = 1; k <= 3; ++k) t.push_back({(j - 1) * 3 + (k - 1), (j - 1) * 3 + (k - 1), k * k + eps * eps * j * j});
    const auto K = SparseMatrix::from_triplets(9, t);
    Vector rhs(9, 0.0);
    rhs[0] = 1.0;
    const auto r = solve(K, rhs);
    EXPECT_NEAR(r.x[0], 1.0 / (1.0 + eps * eps), 1e-14);
    for (std::size_t i = 1; i < 9; ++i) EXPECT_EQ(r.x[i], 0.0);
}

TEST(Solve, CgMatchesDenseCholesky) {
    const auto K = random_spd(50, 11);
    std::mt19937_64 rng(5);
    const Vector b = aniso::testing::random_vector(50, rng);
    SolverConfig cg;
    cg.method = SolverMethod::ConjugateGradient;
    SolverConfig chol;
    chol.method = SolverMethod::DenseCholesky;
    const auto a = solve(K, b, cg);
    const auto c = solve(K, b, chol);
    EXPECT_TRUE(c.method == SolverMethod::DenseCholesky);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_NEAR(a.x[i], c.x[i], 1e-8);
    EXPECT_LE(a.residual_norm, 1e-10 * norm2(b));
}

TEST(Solve, CgEnergyErrorIsMonotone) {
    const auto K = random_spd(40, 2);
    std::mt19937_64 rng(9);
    const Vector b = aniso::testing::random_vector(40, rng);
    SolverConfig cfg;
    cfg.method = SolverMethod::ConjugateGradient;
    cfg.preconditioner = Preconditioner::None;
    cfg.rel_tol = 1e-13;
    cfg.record_iterates = true;
    cfg.record_history = true;
    const auto r = solve(K, b, cfg);
    SolverConfig dense;
    dense.method = SolverMethod::DenseCholesky;
    const Vector exact = solve(K, b, dense).x;
    double prev = INFINITY;
    for (const auto& x : r.iterates) {
        const Vector e = subtract(x, exact);
        const double energy = std::sqrt(K.bilinear(e, e));
        EXPECT_LE(energy, prev * (1 + 1e-12) + 1e-14);
        prev = energy;
    }
    EXPECT_EQ(r.residual_history.size(), r.iterates.size());
}

TEST(Solve, PolishingNeverIncreasesResidual) {
    const auto K = random_spd(30, 4);
    std::mt19937_64 rng(1);
    const Vector b = aniso::testing::random_vector(30, rng);
    SolverConfig loose;
    loose.method = SolverMethod::ConjugateGradient;
    loose.rel_tol = 1e-6;
    const auto first = solve(K, b, loose);
    SolverConfig tight = loose;
    tight.rel_tol = 1e-12;
    const auto second = solve(K, b, tight, first.x);
    EXPECT_LE(second.residual_norm, first.residual_norm);
}

TEST(Solve, NonConvergenceCarriesBestIterate) {
    const auto K = random_spd(30, 8);
    const Vector b(30, 1.0);
    SolverConfig cfg;
    cfg.method = SolverMethod::ConjugateGradient;
    cfg.max_iter = 2;
    cfg.rel_tol = 1e-14;
    try {
        (void)solve(K, b, cfg);
        FAIL() << "expected NonConvergence";
    } catch (const NonConvergence& e) {
        EXPECT_EQ(e.best_iterate().size(), 30u);
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(Solve, IndefiniteBreaksDownOrFallsBack) {
    const auto K = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, -1.0}});
    const Vector b{1.0, 1.0};
    SolverConfig cg;
    cg.method = SolverMethod::ConjugateGradient;
    cg.preconditioner = Preconditioner::None;
    EXPECT_THROW((void)solve(K, b, cg), SolverBreakdown);
    const auto r = solve(K, b);
    EXPECT_NEAR(r.x[0], 1.0, 1e-15);
    EXPECT_NEAR(r.x[1], -1.0, 1e-15);
}

TEST(Solve, NonsymmetricUsesLu) {
    const auto K = SparseMatrix::from_triplets(2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 1, 3.0}});
    const auto r = solve(K, Vector{3.0, 3.0});
    EXPECT_TRUE(r.method == SolverMethod::DenseLU);
    EXPECT_NEAR(r.x[0], 1.0, 1e-15);
    EXPECT_NEAR(r.x[1], 1.0, 1e-15);
}

TEST(Solve, RejectsBadConfig) {
    SolverConfig cfg;
    cfg.rel_tol = 0.0;
    EXPECT_THROW((void)solve(SparseMatrix::identity(1), Vector{1.0}, cfg), InvalidArgument);
    EXPECT_THROW((void)solve(SparseMatrix::identity(2), Vector{1.0}), InvalidArgument);
}

TEST(Factorization, ReusableMatchesOneShot) {
    const auto K = random_spd(20, 3);
    std::mt19937_64 rng(2);
    const Vector b = aniso::testing::random_vector(20, rng);
    const ReusableSolver dense(K);
    SolverConfig cg;
    cg.method = SolverMethod::ConjugateGradient;
    cg.rel_tol = 1e-13;
    const ReusableSolver iterative(K, cg);
    const Vector x1 = dense.solve(b);
    const Vector x2 = iterative.solve(b);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(x1[i], x2[i], 1e-10);
    EXPECT_TRUE(Factorization(K).is_cholesky());
    EXPECT_THROW(Factorization(SparseMatrix(2)), SolverBreakdown);
}
