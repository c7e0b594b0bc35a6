#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "loopair/errors.hpp"

namespace loopair {

/// Dense row-major matrix of doubles. Everything in this toolkit is tiny
/// (a handful of rows and columns), so the kernel favours clarity over
/// blocking or vectorisation.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> init) {
        rows_ = init.size();
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) {
                throw ValidationError("matrix initializer rows have unequal lengths");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline bool same_shape(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols();
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ValidationError("matrix product dimension mismatch: " + std::to_string(a.rows()) +
                              "x" + std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                              "x" + std::to_string(b.cols()));
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) { return multiply(a, b); }

/// Elementwise (Schur) product.
inline Matrix schur(const Matrix& a, const Matrix& b) {
    if (!same_shape(a, b)) {
        throw ValidationError("schur product requires identical dimensions, got " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                              std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * b(i, j);
    return c;
}

namespace detail {

/// Relative pivot acceptance threshold shared by solve() and det().
inline constexpr double kPivotTolerance = 1e-12;

struct Elimination {
    Matrix a;                        // reduced in place
    std::vector<double> row_scale;   // max |entry| of each original row
    double det_sign = 1.0;
    bool singular = false;
};

/// Scaled partial pivoting; a pivot is rejected when its magnitude falls
/// below kPivotTolerance times the originating row's largest entry.
inline bool eliminate_column(Elimination& e, Matrix* rhs, std::size_t k) {
    const std::size_t n = e.a.rows();
    std::size_t pivot_row = k;
    double best = -1.0;
    for (std::size_t i = k; i < n; ++i) {
        const double scale = e.row_scale[i] > 0.0 ? e.row_scale[i] : 1.0;
        const double candidate = std::abs(e.a(i, k)) / scale;
        if (candidate > best) {
            best = candidate;
            pivot_row = i;
        }
    }
    const double pivot = e.a(pivot_row, k);
    if (std::abs(pivot) < kPivotTolerance * std::max(e.row_scale[pivot_row], 1e-300)) {
        e.singular = true;
        return false;
    }
    if (pivot_row != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(e.a(k, j), e.a(pivot_row, j));
        if (rhs != nullptr) {
            for (std::size_t j = 0; j < rhs->cols(); ++j)
                std::swap((*rhs)(k, j), (*rhs)(pivot_row, j));
        }
        std::swap(e.row_scale[k], e.row_scale[pivot_row]);
        e.det_sign = -e.det_sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
        const double factor = e.a(i, k) / e.a(k, k);
        if (factor == 0.0) continue;
        e.a(i, k) = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) e.a(i, j) -= factor * e.a(k, j);
        if (rhs != nullptr) {
            for (std::size_t j = 0; j < rhs->cols(); ++j)
                (*rhs)(i, j) -= factor * (*rhs)(k, j);
        }
    }
    return true;
}

inline Elimination begin_elimination(const Matrix& a) {
    Elimination e{a, std::vector<double>(a.rows(), 0.0)};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            e.row_scale[i] = std::max(e.row_scale[i], std::abs(a(i, j)));
    return e;
}

}  // namespace detail

/// Solve sym * X = rhs by Gaussian elimination with scaled partial pivoting.
/// Throws SingularMatrixError when a pivot fails the acceptance test.
inline Matrix solve(const Matrix& sym, const Matrix& rhs) {
    if (sym.rows() != sym.cols()) {
        throw ValidationError("solve requires a square system matrix");
    }
    if (sym.rows() != rhs.rows()) {
        throw ValidationError("solve right-hand side has " + std::to_string(rhs.rows()) +
                              " rows, expected " + std::to_string(sym.rows()));
    }
    const std::size_t n = sym.rows();
    detail::Elimination e = detail::begin_elimination(sym);
    Matrix x = rhs;
    for (std::size_t k = 0; k < n; ++k) {
        if (!detail::eliminate_column(e, &x, k)) {
            throw SingularMatrixError("pivot " + std::to_string(k + 1) + " of " +
                                      std::to_string(n) + "x" + std::to_string(n) +
                                      " system below acceptance threshold");
        }
    }
    for (std::size_t kk = n; kk-- > 0;) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double sum = x(kk, j);
            for (std::size_t m = kk + 1; m < n; ++m) sum -= e.a(kk, m) * x(m, j);
            x(kk, j) = sum / e.a(kk, kk);
        }
    }
    return x;
}

/// Determinant via the same pivoted elimination. Returns 0.0 when a pivot
/// is rejected instead of throwing.
inline double det(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw ValidationError("determinant requires a square matrix");
    }
    if (a.rows() == 0) return 1.0;
    detail::Elimination e = detail::begin_elimination(a);
    double product = 1.0;
    for (std::size_t k = 0; k < a.rows(); ++k) {
        if (!detail::eliminate_column(e, nullptr, k)) return 0.0;
        product *= e.a(k, k);
    }
    return e.det_sign * product;
}

/// Right generalized inverse A^T (A A^T)^-1 for full-row-rank wide or
/// square matrices. Satisfies A * right_pinv(A) = I.
inline Matrix right_pinv(const Matrix& a) {
    if (a.rows() > a.cols()) {
        throw ValidationError("right_pinv requires rows <= cols, got " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    const Matrix at = transpose(a);
    // X = (A A^T)^-1 A, then A^+ = X^T.
    return transpose(solve(a * at, a));
}

/// Left generalized inverse (A^T A)^-1 A^T for full-column-rank tall or
/// square matrices. Satisfies left_pinv(A) * A = I.
inline Matrix left_pinv(const Matrix& a) {
    if (a.rows() < a.cols()) {
        throw ValidationError("left_pinv requires rows >= cols, got " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    const Matrix at = transpose(a);
    return solve(at * a, at);
}

/// A set of column indices (0-based, strictly increasing) naming one
/// order-k column minor.
struct MinorIndex {
    std::vector<std::size_t> columns;
};

struct ColumnMinor {
    MinorIndex index;
    double det = 0.0;
};

/// Number of order-k column subsets, C(cols, order), as a double so callers
/// can test the combinatorial blow-up guard without overflow.
inline double minor_count(std::size_t cols, std::size_t order) {
    if (order > cols) return 0.0;
    double c = 1.0;
    for (std::size_t i = 0; i < order; ++i) {
        c *= static_cast<double>(cols - i);
        c /= static_cast<double>(i + 1);
    }
    return c;
}

/// All order-k column minors of the top `order` rows, in lexicographic
/// column order, with their determinants. Used as the Binet-Cauchy oracle,
/// so sizes stay small by construction.
inline std::vector<ColumnMinor> enumerate_minors(const Matrix& a, std::size_t order) {
    if (order > a.rows() || order > a.cols()) {
        throw ValidationError("minor order exceeds matrix dimensions");
    }
    std::vector<ColumnMinor> minors;
    if (order == 0) return minors;
    std::vector<std::size_t> pick(order);
    for (std::size_t i = 0; i < order; ++i) pick[i] = i;
    Matrix sub(order, order);
    while (true) {
        for (std::size_t i = 0; i < order; ++i)
            for (std::size_t j = 0; j < order; ++j) sub(i, j) = a(i, pick[j]);
        minors.push_back(ColumnMinor{MinorIndex{pick}, det(sub)});
        // next combination in lexicographic order
        std::size_t k = order;
        while (k-- > 0) {
            if (pick[k] + (order - k) < a.cols()) {
                ++pick[k];
                for (std::size_t m = k + 1; m < order; ++m) pick[m] = pick[m - 1] + 1;
                break;
            }
            if (k == 0) return minors;
        }
    }
}

}  // namespace loopair
