#include "aniso/assembly.hpp"

#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace aniso {

std::string to_string(Block block) {
    switch (block) {
        case Block::B11: return "11";
        case Block::B12: return "12";
        case Block::B21: return "21";
        case Block::B22: return "22";
    }
    return "?";
}

namespace {

struct Sides {
    bool test_d1, trial_d1, test_d2, trial_d2;
};

Sides sides_of(Derivative trial, Derivative test) {
    return {test == Derivative::X1, trial == Derivative::X1, test == Derivative::X2, trial == Derivative::X2};
}

/// Σ_p w_p c_p ψ_i(p) χ_k(p), dense n × n; ψ/χ are values or derivatives.
std::vector<double> pair_1d(const BasisTable1D& t, bool test_deriv, bool trial_deriv,
                            std::span<const double> weight) {
    const int n = t.n;
    std::vector<double> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const int lo = std::max(t.range[static_cast<std::size_t>(i)].first, t.range[static_cast<std::size_t>(k)].first);
            const int hi = std::min(t.range[static_cast<std::size_t>(i)].second, t.range[static_cast<std::size_t>(k)].second);
            double s = 0.0;
            for (int p = lo; p < hi; ++p) {
                const double a = test_deriv ? t.d(i, p) : t.v(i, p);
                const double b = trial_deriv ? t.d(k, p) : t.v(k, p);
                const double c = weight.empty() ? 1.0 : weight[static_cast<std::size_t>(p)];
                s += t.rule.weights[static_cast<std::size_t>(p)] * c * a * b;
            }
            out[static_cast<std::size_t>(i * n + k)] = s;
        }
    return out;
}

SparseMatrix kronecker_block(const GalerkinSpace& space, Sides s, double scale) {
    auto a = pair_1d(space.table1(), s.test_d1, s.trial_d1, {});
    const auto b = pair_1d(space.table2(), s.test_d2, s.trial_d2, {});
    for (double& v : a) v *= scale;
    return SparseMatrix::kronecker(space.dim1(), a, space.dim2(), b);
}

const Expression& coefficient_of(const CoefficientField& A, Block block) {
    switch (block) {
        case Block::B11: return A.a11;
        case Block::B12: return A.a12;
        case Block::B21: return A.a21;
        case Block::B22: return A.a22;
    }
    return A.a22;
}

std::pair<Derivative, Derivative> derivatives_of(Block block) {
    switch (block) {
        case Block::B11: return {Derivative::X1, Derivative::X1};
        case Block::B12: return {Derivative::X2, Derivative::X1};
        case Block::B21: return {Derivative::X1, Derivative::X2};
        case Block::B22: return {Derivative::X2, Derivative::X2};
    }
    return {Derivative::None, Derivative::None};
}

GridField sample_checked(const GalerkinSpace& space, const std::function<double(double, double)>& f,
                         const char* what) {
    return sample_on_grid(space, [&](double x1, double x2) {
        const double v = f(x1, x2);
        if (!std::isfinite(v)) throw InvalidArgument(std::string("non-finite ") + what + " at a quadrature point");
        return v;
    });
}

}  // namespace

SparseMatrix assemble_weighted(const GalerkinSpace& space, const GridField& weight, Derivative trial,
                               Derivative test) {
    const auto& t1 = space.table1();
    const auto& t2 = space.table2();
    if (weight.p1 != t1.points() || weight.p2 != t2.points())
        throw InvalidArgument("weight grid does not match the space's quadrature");
    const Sides s = sides_of(trial, test);
    const int n1 = space.dim1();
    const int n2 = space.dim2();
    const int P2 = t2.points();

    // x₂ factor: for every overlapping (j, l), the products w_q ψ_j(q) χ_l(q).
    struct Pair2 {
        int j, l, lo, hi;
        std::vector<double> prod;
    };
    std::vector<Pair2> pairs2;
    for (int j = 0; j < n2; ++j)
        for (int l = 0; l < n2; ++l) {
            const int lo = std::max(t2.range[static_cast<std::size_t>(j)].first, t2.range[static_cast<std::size_t>(l)].first);
            const int hi = std::min(t2.range[static_cast<std::size_t>(j)].second, t2.range[static_cast<std::size_t>(l)].second);
            if (lo >= hi) continue;
            Pair2 pr{j, l, lo, hi, {}};
            pr.prod.resize(static_cast<std::size_t>(hi - lo));
            for (int q = lo; q < hi; ++q) {
                const double a = s.test_d2 ? t2.d(j, q) : t2.v(j, q);
                const double b = s.trial_d2 ? t2.d(l, q) : t2.v(l, q);
                pr.prod[static_cast<std::size_t>(q - lo)] = t2.rule.weights[static_cast<std::size_t>(q)] * a * b;
            }
            pairs2.push_back(std::move(pr));
        }

    std::vector<std::vector<Triplet>> rows(static_cast<std::size_t>(n1));
    parallel_for(n1, [&](int i) {
        std::vector<double> W(static_cast<std::size_t>(P2));
        auto& out = rows[static_cast<std::size_t>(i)];
        for (int k = 0; k < n1; ++k) {
            const int lo = std::max(t1.range[static_cast<std::size_t>(i)].first, t1.range[static_cast<std::size_t>(k)].first);
            const int hi = std::min(t1.range[static_cast<std::size_t>(i)].second, t1.range[static_cast<std::size_t>(k)].second);
            if (lo >= hi) continue;
            std::fill(W.begin(), W.end(), 0.0);
            for (int p = lo; p < hi; ++p) {
                const double a = s.test_d1 ? t1.d(i, p) : t1.v(i, p);
                const double b = s.trial_d1 ? t1.d(k, p) : t1.v(k, p);
                const double wp = t1.rule.weights[static_cast<std::size_t>(p)] * a * b;
                if (wp == 0.0) continue;
                const double* c = weight.data.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(P2);
                for (int q = 0; q < P2; ++q) W[static_cast<std::size_t>(q)] += wp * c[q];
            }
            for (const auto& pr : pairs2) {
                double v = 0.0;
                for (int q = pr.lo; q < pr.hi; ++q)
                    v += W[static_cast<std::size_t>(q)] * pr.prod[static_cast<std::size_t>(q - pr.lo)];
                out.push_back({space.flat(i, pr.j), space.flat(k, pr.l), v});
            }
        }
    });
    std::vector<Triplet> all;
    for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
    return SparseMatrix::from_triplets(space.dimension(), std::move(all));
}

SparseMatrix assemble_block_stiffness(const GalerkinSpace& space, const CoefficientField& A, Block block) {
    const Expression& c = coefficient_of(A, block);
    const auto [trial, test] = derivatives_of(block);
    if (c.is_constant()) {
        const double value = c({});
        if (!std::isfinite(value)) throw InvalidArgument("non-finite coefficient a" + to_string(block));
        if (value == 0.0) return SparseMatrix(space.dimension());
        return kronecker_block(space, sides_of(trial, test), value);
    }
    const auto g = sample_checked(space, [&](double x1, double x2) { return c(x1, x2); }, "coefficient");
    return assemble_weighted(space, g, trial, test);
}

SparseMatrix assemble_limit_stiffness(const GalerkinSpace& space, const CoefficientField& A) {
    return assemble_block_stiffness(space, A, Block::B22);
}

SparseMatrix assemble_mass(const GalerkinSpace& space) {
    return kronecker_block(space, sides_of(Derivative::None, Derivative::None), 1.0);
}

std::pair<SparseMatrix, SparseMatrix> seminorm_matrices(const GalerkinSpace& space) {
    return {kronecker_block(space, sides_of(Derivative::X1, Derivative::X1), 1.0),
            kronecker_block(space, sides_of(Derivative::X2, Derivative::X2), 1.0)};
}

Vector assemble_load_grid(const GalerkinSpace& space, const GridField& g, Derivative test) {
    const auto& t1 = space.table1();
    const auto& t2 = space.table2();
    if (g.p1 != t1.points() || g.p2 != t2.points())
        throw InvalidArgument("grid does not match the space's quadrature");
    const bool d1 = test == Derivative::X1;
    const bool d2 = test == Derivative::X2;
    const int P2 = t2.points();
    Vector out(static_cast<std::size_t>(space.dimension()), 0.0);
    parallel_for(space.dim1(), [&](int i) {
        std::vector<double> H(static_cast<std::size_t>(P2), 0.0);
        const auto [lo, hi] = t1.range[static_cast<std::size_t>(i)];
        for (int p = lo; p < hi; ++p) {
            const double wp = t1.rule.weights[static_cast<std::size_t>(p)] * (d1 ? t1.d(i, p) : t1.v(i, p));
            if (wp == 0.0) continue;
            for (int q = 0; q < P2; ++q) H[static_cast<std::size_t>(q)] += wp * g.at(p, q);
        }
        for (int j = 0; j < space.dim2(); ++j) {
            const auto [qlo, qhi] = t2.range[static_cast<std::size_t>(j)];
            double v = 0.0;
            for (int q = qlo; q < qhi; ++q)
                v += t2.rule.weights[static_cast<std::size_t>(q)] * H[static_cast<std::size_t>(q)] *
                     (d2 ? t2.d(j, q) : t2.v(j, q));
            out[static_cast<std::size_t>(space.flat(i, j))] = v;
        }
    });
    return out;
}

Vector assemble_load(const GalerkinSpace& space, const std::function<double(double, double)>& f) {
    return assemble_load_grid(space, sample_checked(space, f, "source"));
}

Vector assemble_load(const GalerkinSpace& space, const SourceField& f) {
    return assemble_load(space, [&](double x1, double x2) { return f.f(x1, x2); });
}

Vector assemble_reaction(const GalerkinSpace& space, std::span<const double> coeffs, const ReactionSpec& beta) {
    GridField u = evaluate_on_grid(space, coeffs);
    for (double& v : u.data) v = beta(v);
    return assemble_load_grid(space, u);
}

std::vector<double> mass_1d(const BasisTable1D& table) { return pair_1d(table, false, false, {}); }

std::vector<double> stiffness_1d(const BasisTable1D& table, std::span<const double> weight) {
    if (!weight.empty() && weight.size() != static_cast<std::size_t>(table.points()))
        throw InvalidArgument("1D weight does not match the rule");
    return pair_1d(table, true, true, weight);
}

SparseMatrix AssembledProblem::K_eps(double epsilon) const {
    const BlockScaling s = scale_matrix(epsilon);
    const double scales[] = {s.s11, s.s12, s.s21, s.s22};
    const SparseMatrix* terms[] = {&K11, &K12, &K21, &K22};
    return SparseMatrix::linear_combination(scales, terms);
}

AssembledProblem assemble_problem(SpacePtr space, const CoefficientField& A, const SourceField& f) {
    if (!space) throw InvalidArgument("assemble_problem: null space");
    AssembledProblem p;
    const GalerkinSpace& s = *space;
    p.K11 = assemble_block_stiffness(s, A, Block::B11);
    p.K12 = assemble_block_stiffness(s, A, Block::B12);
    p.K21 = assemble_block_stiffness(s, A, Block::B21);
    p.K22 = assemble_block_stiffness(s, A, Block::B22);
    p.M = assemble_mass(s);
    auto [g1, g2] = seminorm_matrices(s);
    p.G1 = std::move(g1);
    p.G2 = std::move(g2);
    p.F = assemble_load(s, f);
    p.space = std::move(space);
    return p;
}

}  // namespace aniso
