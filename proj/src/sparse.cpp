#include "aniso/sparse.hpp"

#include "aniso/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace aniso {

SparseMatrix::SparseMatrix(int n) : n_(n), row_ptr_(static_cast<std::size_t>(n) + 1, 0) {
    if (n < 0) throw InvalidArgument("matrix size must be non-negative");
}

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    SparseMatrix m(n);
    for (const auto& t : triplets)
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw InvalidArgument("triplet index out of range");
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    m.col_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t k = 0;
    for (int r = 0; r < n; ++r) {
        while (k < triplets.size() && triplets[k].row == r) {
            const int c = triplets[k].col;
            double v = 0.0;
            while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) v += triplets[k++].value;
            m.col_.push_back(c);
            m.values_.push_back(v);
        }
        m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<int>(m.col_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::from_dense(int n, std::span<const double> dense) {
    if (dense.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw InvalidArgument("dense matrix has the wrong size");
    SparseMatrix m(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const double v = dense[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)];
            if (v != 0.0) {
                m.col_.push_back(c);
                m.values_.push_back(v);
            }
        }
        m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<int>(m.col_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    SparseMatrix m(n);
    for (int r = 0; r < n; ++r) {
        m.col_.push_back(r);
        m.values_.push_back(1.0);
        m.row_ptr_[static_cast<std::size_t>(r) + 1] = r + 1;
    }
    return m;
}

double SparseMatrix::at(int r, int c) const {
    if (r < 0 || r >= n_ || c < 0 || c >= n_) throw InvalidArgument("matrix index out of range");
    const auto begin = col_.begin() + row_ptr_[static_cast<std::size_t>(r)];
    const auto end = col_.begin() + row_ptr_[static_cast<std::size_t>(r) + 1];
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return 0.0;
    return values_[static_cast<std::size_t>(it - col_.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != static_cast<std::size_t>(n_) || y.size() != static_cast<std::size_t>(n_))
        throw InvalidArgument("matrix-vector size mismatch");
    for (int r = 0; r < n_; ++r) {
        double s = 0.0;
        for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
            s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(r)] = s;
    }
}

Vector SparseMatrix::operator*(std::span<const double> x) const {
    Vector y(static_cast<std::size_t>(n_));
    multiply(x, y);
    return y;
}

double SparseMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
    return dot(x, (*this) * y);
}

Vector SparseMatrix::diagonal() const {
    Vector d(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r) d[static_cast<std::size_t>(r)] = at(r, r);
    return d;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (int r = 0; r < n_; ++r)
        for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
            t.push_back({col_[static_cast<std::size_t>(k)], r, values_[static_cast<std::size_t>(k)]});
    return from_triplets(n_, std::move(t));
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> d(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r)
        for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
            d[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(col_[static_cast<std::size_t>(k)])] =
                values_[static_cast<std::size_t>(k)];
    return d;
}

SparseMatrix SparseMatrix::linear_combination(std::span<const double> scales,
                                              std::span<const SparseMatrix* const> terms) {
    if (scales.size() != terms.size() || terms.empty())
        throw InvalidArgument("linear_combination needs matching, non-empty inputs");
    const int n = terms.front()->size();
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const SparseMatrix& m = *terms[i];
        if (m.size() != n) throw InvalidArgument("linear_combination size mismatch");
        for (int r = 0; r < n; ++r)
            for (int k = m.row_ptr_[static_cast<std::size_t>(r)]; k < m.row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
                t.push_back({r, m.col_[static_cast<std::size_t>(k)], scales[i] * m.values_[static_cast<std::size_t>(k)]});
    }
    return from_triplets(n, std::move(t));
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::max_abs_difference(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.size() != b.size()) throw InvalidArgument("max_abs_difference size mismatch");
    const double scales[] = {1.0, -1.0};
    const SparseMatrix* terms[] = {&a, &b};
    return linear_combination(scales, terms).max_abs();
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
    const double scale = max_abs();
    if (scale == 0.0) return true;
    return max_abs_difference(*this, transpose()) <= rel_tol * scale;
}

SparseMatrix SparseMatrix::kronecker(int na, std::span<const double> a, int nb, std::span<const double> b) {
    if (a.size() != static_cast<std::size_t>(na) * static_cast<std::size_t>(na) ||
        b.size() != static_cast<std::size_t>(nb) * static_cast<std::size_t>(nb))
        throw InvalidArgument("kronecker: factor sizes do not match");
    std::vector<Triplet> t;
    for (int i = 0; i < na; ++i)
        for (int k = 0; k < na; ++k) {
            const double aik = a[static_cast<std::size_t>(i * na + k)];
            if (aik == 0.0) continue;
            for (int j = 0; j < nb; ++j)
                for (int l = 0; l < nb; ++l) {
                    const double bjl = b[static_cast<std::size_t>(j * nb + l)];
                    if (bjl != 0.0) t.push_back({i * nb + j, k * nb + l, aik * bjl});
                }
        }
    return from_triplets(na * nb, std::move(t));
}

void SparseMatrix::write_matrix_market(std::ostream& out) const {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << n_ << ' ' << n_ << ' ' << values_.size() << '\n';
    char buf[64];
    for (int r = 0; r < n_; ++r)
        for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17e", values_[static_cast<std::size_t>(k)]);
            out << r + 1 << ' ' << col_[static_cast<std::size_t>(k)] + 1 << ' ' << buf << '\n';
        }
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw InvalidArgument("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("subtract: size mismatch");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

}  // namespace aniso
