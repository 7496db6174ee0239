#pragma once

#include "aniso/coefficients.hpp"
#include "aniso/sparse.hpp"
#include "aniso/tensor_spaces.hpp"

#include <functional>
#include <string>
#include <utility>

namespace aniso {

/// Which part of ∫ A∇u·∇v is assembled:
/// 11 → a11 ∂₁u ∂₁v, 12 → a12 ∂₂u ∂₁v, 21 → a21 ∂₁u ∂₂v, 22 → a22 ∂₂u ∂₂v.
enum class Block { B11, B12, B21, B22 };

[[nodiscard]] std::string to_string(Block block);

/// Rows index test functions, columns trial functions. Zero coefficients give
/// an empty matrix; constant coefficients are assembled as Kronecker products
/// of 1D matrices, everything else by sum factorization over the tensor rule.
[[nodiscard]] SparseMatrix assemble_block_stiffness(const GalerkinSpace& space, const CoefficientField& A,
                                                    Block block);

/// ∫ a22 ∂₂u ∂₂v, the operator of the limit problem.
[[nodiscard]] SparseMatrix assemble_limit_stiffness(const GalerkinSpace& space, const CoefficientField& A);

/// ∫ c ∂u ∂v for a sampled weight c with the given derivative choices on the
/// trial (u) and test (v) side.
[[nodiscard]] SparseMatrix assemble_weighted(const GalerkinSpace& space, const GridField& weight,
                                             Derivative trial, Derivative test);

[[nodiscard]] SparseMatrix assemble_mass(const GalerkinSpace& space);

/// (G1, G2) with vᵀG1v = ‖∂₁v_h‖², vᵀG2v = ‖∂₂v_h‖².
[[nodiscard]] std::pair<SparseMatrix, SparseMatrix> seminorm_matrices(const GalerkinSpace& space);

/// ∫ g ∂φ over the tensor rule for a sampled g.
[[nodiscard]] Vector assemble_load_grid(const GalerkinSpace& space, const GridField& g,
                                        Derivative test = Derivative::None);

/// ∫ f φ. Throws InvalidArgument on non-finite samples.
[[nodiscard]] Vector assemble_load(const GalerkinSpace& space, const std::function<double(double, double)>& f);
[[nodiscard]] Vector assemble_load(const GalerkinSpace& space, const SourceField& f);

/// ∫ β(u_h) φ with u_h evaluated at the quadrature points.
[[nodiscard]] Vector assemble_reaction(const GalerkinSpace& space, std::span<const double> coeffs,
                                       const ReactionSpec& beta);

/// Dense row-major 1D matrices on one factor of a space.
/// mass: Σ w φ_i φ_k; stiffness: Σ w c φ_i' φ_k' with c sampled at the rule
/// points (all ones when empty).
[[nodiscard]] std::vector<double> mass_1d(const BasisTable1D& table);
[[nodiscard]] std::vector<double> stiffness_1d(const BasisTable1D& table, std::span<const double> weight = {});

/// Everything needed for linear solves on one space.
struct AssembledProblem {
    SpacePtr space;
    SparseMatrix K11, K12, K21, K22;
    SparseMatrix M;
    SparseMatrix G1, G2;
    Vector F;

    /// ε²K11 + εK12 + εK21 + K22. Throws for ε outside (0,1].
    [[nodiscard]] SparseMatrix K_eps(double epsilon) const;
    [[nodiscard]] const SparseMatrix& K_limit() const noexcept { return K22; }
};

[[nodiscard]] AssembledProblem assemble_problem(SpacePtr space, const CoefficientField& A, const SourceField& f);

}  // namespace aniso
