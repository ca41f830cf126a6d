#pragma once

// Crout LU decomposition with partial pivoting and the matching back
// substitution (after Numerical Recipes ludcmp/lubksb), generic over an exact
// rational field and double.  Right-hand sides may be any type closed under
// "subtract scalar multiple" and "divide by scalar", which is how the
// constructors solve with polynomial right-hand sides.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"
#include "ratpoly.hpp"

namespace gaptooth {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0)) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        for (const auto& row : init) {
            if (row.size() != cols_) throw ConfigurationError("ragged matrix initialiser");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(a, k), (*this)(b, k));
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw ConfigurationError("matrix product dimension mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k) == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }

    template <class V>
    std::vector<V> apply(const std::vector<V>& x) const {
        if (x.size() != cols_) throw ConfigurationError("matrix-vector dimension mismatch");
        std::vector<V> y(rows_, V(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

private:
    std::size_t rows_{0}, cols_{0};
    std::vector<T> data_;
};

template <class T>
inline constexpr bool is_exact_scalar_v = std::is_same_v<T, Rational>;

/// Packed factorisation: unit-diagonal L strictly below the diagonal, U on and above.
/// indx[j] is the row interchanged with row j at step j; parity is the permutation sign.
template <class T>
struct LUFactorization {
    Matrix<T> lu;
    std::vector<std::size_t> indx;
    int parity{1};

    std::size_t size() const { return lu.rows(); }

    T determinant() const {
        T d = T(parity);
        for (std::size_t i = 0; i < size(); ++i) d *= lu(i, i);
        return d;
    }

    /// Row permutation P such that P A = L U.
    Matrix<T> permutation() const {
        const std::size_t n = size();
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t j = 0; j < n; ++j) std::swap(perm[j], perm[indx[j]]);
        Matrix<T> p(n, n);
        for (std::size_t i = 0; i < n; ++i) p(i, perm[i]) = T(1);
        return p;
    }

    Matrix<T> lower() const {
        const std::size_t n = size();
        Matrix<T> l(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            l(i, i) = T(1);
            for (std::size_t j = 0; j < i; ++j) l(i, j) = lu(i, j);
        }
        return l;
    }

    Matrix<T> upper() const {
        const std::size_t n = size();
        Matrix<T> u(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) u(i, j) = lu(i, j);
        return u;
    }
};

namespace detail {

inline double magnitude(double x) { return std::fabs(x); }
inline Rational magnitude(const Rational& x) { return abs(x); }

template <class T, class V>
void sub_scaled(V& acc, const T& c, const V& x) {
    if constexpr (std::is_same_v<V, Poly>) {
        acc.axpy(Rational(-c), x);
    } else {
        acc -= c * x;
    }
}

template <class V>
bool is_zero(const V& v) {
    if constexpr (std::is_same_v<V, Poly>) {
        return v.is_zero();
    } else {
        return v == 0;
    }
}

}  // namespace detail

/// Factorises a square matrix.  The double path follows the scaled partial
/// pivoting of ludcmp, replacing an exactly zero pivot by 1e-20.  The exact
/// path pivots on the largest magnitude and reports exact singularity.
template <class T>
LUFactorization<T> lu_decomp(Matrix<T> a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw ConfigurationError("lu_decomp needs a square matrix");
    LUFactorization<T> f;
    f.indx.assign(n, 0);
    f.parity = 1;

    std::vector<T> vv(n, T(1));
    if constexpr (!is_exact_scalar_v<T>) {
        for (std::size_t i = 0; i < n; ++i) {
            T big = T(0);
            for (std::size_t j = 0; j < n; ++j) big = std::max(big, detail::magnitude(a(i, j)));
            if (big == T(0)) throw SingularMatrixError("lu_decomp: zero row " + std::to_string(i));
            vv[i] = T(1) / big;
        }
    }

    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            T sum = a(i, j);
            for (std::size_t k = 0; k < i; ++k) sum -= a(i, k) * a(k, j);
            a(i, j) = sum;
        }
        T best = T(0);
        std::size_t imax = j;
        bool found = false;
        for (std::size_t i = j; i < n; ++i) {
            T sum = a(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= a(i, k) * a(k, j);
            a(i, j) = sum;
            if constexpr (is_exact_scalar_v<T>) {
                T mag = detail::magnitude(sum);
                if (sum != 0 && (!found || mag > best)) {
                    best = mag;
                    imax = i;
                    found = true;
                }
            } else {
                T dum = vv[i] * detail::magnitude(sum);
                if (dum >= best) {
                    imax = i;
                    best = dum;
                }
            }
        }
        if (j != imax) {
            a.swap_rows(imax, j);
            f.parity = -f.parity;
            vv[imax] = vv[j];
        }
        f.indx[j] = imax;
        if (a(j, j) == T(0)) {
            if constexpr (is_exact_scalar_v<T>) {
                throw SingularMatrixError("lu_decomp: exactly singular at column " + std::to_string(j));
            } else {
                a(j, j) = T(1.0e-20);
            }
        }
        if (j + 1 != n) {
            T dum = T(1) / a(j, j);
            for (std::size_t i = j + 1; i < n; ++i) a(i, j) *= dum;
        }
    }
    f.lu = std::move(a);
    return f;
}

/// Solves A x = b in place using a factorisation of A.  Leading zeros of the
/// permuted right-hand side are skipped in the forward pass.
template <class T, class V>
void lu_backsub_inplace(const LUFactorization<T>& f, std::vector<V>& b) {
    const std::size_t n = f.size();
    if (b.size() != n) throw ConfigurationError("lu_backsub: right-hand side has wrong length");
    std::size_t first = n;  // first nonzero index, n meaning none yet
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ll = f.indx[i];
        V sum = b[ll];
        b[ll] = b[i];
        if (first != n) {
            for (std::size_t j = first; j < i; ++j)
                if (f.lu(i, j) != 0) detail::sub_scaled(sum, f.lu(i, j), b[j]);
        } else if (!detail::is_zero(sum)) {
            first = i;
        }
        b[i] = std::move(sum);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        V sum = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j)
            if (f.lu(ii, j) != 0) detail::sub_scaled(sum, f.lu(ii, j), b[j]);
        if constexpr (std::is_same_v<V, Poly>) {
            sum /= f.lu(ii, ii);
        } else {
            sum = sum / f.lu(ii, ii);
        }
        b[ii] = std::move(sum);
    }
}

template <class T, class V>
std::vector<V> lu_backsub(const LUFactorization<T>& f, std::vector<V> b) {
    lu_backsub_inplace(f, b);
    return b;
}

/// Indices of a maximal set of linearly independent rows, chosen greedily in
/// row order (exact arithmetic).
inline std::vector<std::size_t> independent_rows(const Matrix<Rational>& a) {
    const std::size_t cols = a.cols();
    std::vector<std::vector<Rational>> basis;  // echelon rows
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> chosen;
    for (std::size_t r = 0; r < a.rows() && basis.size() < cols; ++r) {
        std::vector<Rational> row(cols);
        for (std::size_t c = 0; c < cols; ++c) row[c] = a(r, c);
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const Rational& v = row[pivots[k]];
            if (v == 0) continue;
            Rational factor = v / basis[k][pivots[k]];
            for (std::size_t c = 0; c < cols; ++c)
                if (basis[k][c] != 0) row[c] -= factor * basis[k][c];
        }
        std::size_t p = cols;
        for (std::size_t c = 0; c < cols; ++c)
            if (row[c] != 0) {
                p = c;
                break;
            }
        if (p == cols) continue;
        basis.push_back(std::move(row));
        pivots.push_back(p);
        chosen.push_back(r);
    }
    return chosen;
}

/// Gauss-Jordan solution of a possibly rank-deficient exact system.  Columns
/// are pivoted left to right and free unknowns are set to zero, so trailing
/// unknowns are the first to be dropped.  Returns nothing when inconsistent.
inline std::optional<std::vector<Rational>> solve_exact_minimal(Matrix<Rational> a, std::vector<Rational> b) {
    const std::size_t m = a.rows(), n = a.cols();
    if (b.size() != m) throw ConfigurationError("solve_exact_minimal: right-hand side has wrong length");
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t c = 0; c < n && row < m; ++c) {
        std::size_t p = row;
        while (p < m && a(p, c) == 0) ++p;
        if (p == m) continue;
        a.swap_rows(p, row);
        std::swap(b[p], b[row]);
        const Rational inv = 1 / a(row, c);
        for (std::size_t k = 0; k < n; ++k) a(row, k) *= inv;
        b[row] *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || a(i, c) == 0) continue;
            const Rational f = a(i, c);
            for (std::size_t k = 0; k < n; ++k) a(i, k) -= f * a(row, k);
            b[i] -= f * b[row];
        }
        pivot_col.push_back(c);
        ++row;
    }
    for (std::size_t i = row; i < m; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rational> x(n, Rational(0));
    for (std::size_t k = 0; k < pivot_col.size(); ++k) x[pivot_col[k]] = b[k];
    return x;
}

}  // namespace gaptooth
