#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace aniso {

using Vector = std::vector<double>;

struct Triplet {
    int row;
    int col;
    double value;
};

/// Square matrix in compressed sparse row form. Column indices are sorted
/// within each row and unique.
class SparseMatrix {
public:
    SparseMatrix() = default;
    explicit SparseMatrix(int n);

    /// Duplicates are summed. Throws InvalidArgument on out-of-range indices.
    static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);
    /// Row-major dense n × n; exact zeros are dropped.
    static SparseMatrix from_dense(int n, std::span<const double> dense);
    static SparseMatrix identity(int n);

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return values_.size(); }

    [[nodiscard]] const std::vector<int>& row_offsets() const noexcept { return row_ptr_; }
    [[nodiscard]] const std::vector<int>& columns() const noexcept { return col_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    /// Entry (r, c), zero when not stored.
    [[nodiscard]] double at(int r, int c) const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] Vector operator*(std::span<const double> x) const;

    /// xᵀ A y
    [[nodiscard]] double bilinear(std::span<const double> x, std::span<const double> y) const;

    [[nodiscard]] Vector diagonal() const;
    [[nodiscard]] SparseMatrix transpose() const;
    [[nodiscard]] std::vector<double> to_dense() const;

    /// Σ scales[k]·terms[k] over a common size.
    static SparseMatrix linear_combination(std::span<const double> scales,
                                           std::span<const SparseMatrix* const> terms);

    /// max |A(r,c)|
    [[nodiscard]] double max_abs() const;
    /// max_{r,c} |A(r,c) − B(r,c)|
    [[nodiscard]] static double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b);
    /// ‖A − Aᵀ‖_max ≤ rel_tol · ‖A‖_max
    [[nodiscard]] bool is_symmetric(double rel_tol = 1e-12) const;

    /// Kronecker product A ⊗ B of two dense row-major matrices.
    static SparseMatrix kronecker(int na, std::span<const double> a, int nb, std::span<const double> b);

    /// MatrixMarket coordinate real general.
    void write_matrix_market(std::ostream& out) const;

private:
    int n_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_;
    std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector subtract(std::span<const double> a, std::span<const double> b);

}  // namespace aniso
