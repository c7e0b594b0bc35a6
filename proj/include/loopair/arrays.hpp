#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "loopair/errors.hpp"
#include "loopair/matrix.hpp"
#include "loopair/model.hpp"

namespace loopair {

enum class GainRole { steady_state, normalized, relative, relative_normalized };

enum class ShapeClass { wide, tall, square };

inline const char* to_string(GainRole role) {
    switch (role) {
        case GainRole::steady_state: return "K";
        case GainRole::normalized: return "NGA";
        case GainRole::relative: return "RGA";
        case GainRole::relative_normalized: return "RNGA";
    }
    return "?";
}

inline ShapeClass shape_of(const Matrix& m) {
    if (m.rows() < m.cols()) return ShapeClass::wide;
    if (m.rows() > m.cols()) return ShapeClass::tall;
    return ShapeClass::square;
}

/// A dense gain-like array tagged with what it represents. The tag keeps
/// the pipeline honest: relative arrays are only produced from the matching
/// base role, and sum/pairing operations check what they are handed.
struct GainArray {
    GainRole role = GainRole::steady_state;
    ShapeClass shape = ShapeClass::square;
    Matrix values;
};

inline GainArray make_gain_array(GainRole role, Matrix values) {
    const ShapeClass shape = shape_of(values);
    return GainArray{role, shape, std::move(values)};
}

inline GainArray steady_state_gain(const TransferMatrix& tm) {
    return make_gain_array(GainRole::steady_state, gain_matrix(tm));
}

inline GainArray normalized_gain(const TransferMatrix& tm) {
    return make_gain_array(GainRole::normalized, normalized_gain_matrix(tm));
}

namespace detail {

/// lambda = A o (A^+)^T for either orientation. Wide and square matrices
/// use the right inverse A^T (A A^T)^-1; tall ones the left inverse
/// (A^T A)^-1 A^T. Square systems fall out of the wide path, where the
/// right inverse degenerates to the plain inverse.
inline Matrix relative_array(const Matrix& a) {
    const ShapeClass shape = shape_of(a);
    try {
        if (shape == ShapeClass::tall) {
            // (A^+)^T = A (A^T A)^-1 = (solve(A^T A, A^T))^T
            const Matrix at = transpose(a);
            return schur(a, transpose(solve(at * a, at)));
        }
        // (A^+)^T = (A A^T)^-1 A
        return schur(a, solve(a * transpose(a), a));
    } catch (const SingularMatrixError& e) {
        const char* tag = shape == ShapeClass::tall ? "tall" : (shape == ShapeClass::wide ? "wide" : "square");
        throw SingularMatrixError(std::string(e.what()) + " (" + tag + " " +
                                  std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                  " gain array is rank deficient)");
    }
}

inline void require_role(const GainArray& arr, GainRole expected, const char* op) {
    if (arr.role != expected) {
        throw ValidationError(std::string(op) + " expects a " + to_string(expected) +
                              " array, got " + to_string(arr.role));
    }
}

inline bool is_relative(const GainArray& arr) {
    return arr.role == GainRole::relative || arr.role == GainRole::relative_normalized;
}

}  // namespace detail

/// Relative normalized gain array of a normalized gain array.
inline GainArray rnga(const GainArray& nga) {
    detail::require_role(nga, GainRole::normalized, "rnga");
    return make_gain_array(GainRole::relative_normalized, detail::relative_array(nga.values));
}

/// Relative gain array of a steady-state gain array.
inline GainArray rga(const GainArray& k) {
    detail::require_role(k, GainRole::steady_state, "rga");
    return make_gain_array(GainRole::relative, detail::relative_array(k.values));
}

enum class SumAxis { row, column };

struct SumVector {
    SumAxis axis = SumAxis::row;
    std::vector<double> values;
};

/// Row sums R(i). Equal to 1 for every row of a wide or square relative
/// array (asserted by the verify suite, not here).
inline SumVector row_sums(const GainArray& arr) {
    if (!detail::is_relative(arr)) {
        throw ValidationError("row_sums expects an RGA or RNGA array");
    }
    SumVector s{SumAxis::row, std::vector<double>(arr.values.rows(), 0.0)};
    for (std::size_t i = 0; i < arr.values.rows(); ++i)
        for (std::size_t j = 0; j < arr.values.cols(); ++j) s.values[i] += arr.values(i, j);
    return s;
}

/// Column sums C(j); defined by the theory only for wide and square shapes,
/// where each lies in [0, 1].
inline SumVector col_sums(const GainArray& arr) {
    if (!detail::is_relative(arr)) {
        throw ValidationError("col_sums expects an RGA or RNGA array");
    }
    if (arr.shape == ShapeClass::tall) {
        throw ValidationError("column sums are defined for wide or square arrays only");
    }
    SumVector s{SumAxis::column, std::vector<double>(arr.values.cols(), 0.0)};
    for (std::size_t i = 0; i < arr.values.rows(); ++i)
        for (std::size_t j = 0; j < arr.values.cols(); ++j) s.values[j] += arr.values(i, j);
    return s;
}

/// Column sum C(j) of the relative array computed purely from minor
/// determinants of the base array:
///   C(j) = sum over order-r minors containing column j of det^2
///        / sum over all order-r minors of det^2.
/// Independent of any pseudo-inverse, so it cross-checks col_sums.
/// `column` is 0-based. Pass the base (K or NGA) array, not the relative one.
inline double col_sum_binet_cauchy(const GainArray& base, std::size_t column) {
    if (detail::is_relative(base)) {
        throw ValidationError("col_sum_binet_cauchy expects the base K or NGA array");
    }
    if (base.shape == ShapeClass::tall) {
        throw ValidationError("the Binet-Cauchy column sum applies to wide or square arrays only");
    }
    if (column >= base.values.cols()) {
        throw ValidationError("column index out of range");
    }
    const std::size_t r = base.values.rows();
    double numerator = 0.0;
    double denominator = 0.0;
    for (const ColumnMinor& m : enumerate_minors(base.values, r)) {
        const double d2 = m.det * m.det;
        denominator += d2;
        for (std::size_t c : m.index.columns) {
            if (c == column) {
                numerator += d2;
                break;
            }
        }
    }
    if (denominator == 0.0) {
        throw SingularMatrixError("all order-" + std::to_string(r) +
                                  " minors vanish; column sums are undefined");
    }
    return numerator / denominator;
}

namespace detail {

inline void require_nonzero_diagonal(const std::vector<double>& q, const char* op) {
    for (double v : q) {
        if (v == 0.0) throw ValidationError(std::string(op) + ": zero diagonal entry");
    }
}

}  // namespace detail

/// Scale rows of a normalized gain array by a diagonal q (output scaling).
/// The RNGA recomputed from the result is unchanged.
inline GainArray scale_outputs(const GainArray& nga, const std::vector<double>& q) {
    detail::require_role(nga, GainRole::normalized, "scale_outputs");
    if (q.size() != nga.values.rows()) {
        throw ValidationError("scale_outputs diagonal length must equal row count");
    }
    detail::require_nonzero_diagonal(q, "scale_outputs");
    Matrix scaled = nga.values;
    for (std::size_t i = 0; i < scaled.rows(); ++i)
        for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= q[i];
    return make_gain_array(GainRole::normalized, std::move(scaled));
}

/// Scale columns of a normalized gain array by a diagonal q (input
/// scaling). The RNGA of the result generally differs from the original.
inline GainArray scale_inputs(const GainArray& nga, const std::vector<double>& q) {
    detail::require_role(nga, GainRole::normalized, "scale_inputs");
    if (q.size() != nga.values.cols()) {
        throw ValidationError("scale_inputs diagonal length must equal column count");
    }
    detail::require_nonzero_diagonal(q, "scale_inputs");
    Matrix scaled = nga.values;
    for (std::size_t i = 0; i < scaled.rows(); ++i)
        for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= q[j];
    return make_gain_array(GainRole::normalized, std::move(scaled));
}

namespace detail {

inline void require_permutation(const std::vector<std::size_t>& p, std::size_t n,
                                const char* which) {
    if (p.size() != n) {
        throw ValidationError(std::string(which) + " permutation has length " +
                              std::to_string(p.size()) + ", expected " + std::to_string(n));
    }
    std::vector<bool> hit(n, false);
    for (std::size_t v : p) {
        if (v >= n || hit[v]) {
            throw ValidationError(std::string(which) + " permutation is not a permutation of 0.." +
                                  std::to_string(n - 1));
        }
        hit[v] = true;
    }
}

}  // namespace detail

/// Reorder rows and columns: out(i, j) = in(pr[i], ps[j]). Row and column
/// permutations of the base array induce exactly the same permutations of
/// its relative array.
inline GainArray permute(const GainArray& arr, const std::vector<std::size_t>& pr,
                         const std::vector<std::size_t>& ps) {
    detail::require_permutation(pr, arr.values.rows(), "row");
    detail::require_permutation(ps, arr.values.cols(), "column");
    Matrix out(arr.values.rows(), arr.values.cols());
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = arr.values(pr[i], ps[j]);
    return make_gain_array(arr.role, std::move(out));
}

}  // namespace loopair
