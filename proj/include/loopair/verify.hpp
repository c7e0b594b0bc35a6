#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "loopair/arrays.hpp"
#include "loopair/errors.hpp"
#include "loopair/matrix.hpp"

namespace loopair {

inline constexpr std::uint64_t kDefaultVerifySeed = 1729;

struct VerifyOptions {
    std::size_t trials = 1000;
    std::size_t max_rows = 3;
    std::size_t max_cols = 6;
    std::uint64_t seed = kDefaultVerifySeed;
};

struct PropertyStats {
    std::string name;
    /// True when a larger observation is worse (residual against a bound);
    /// false for the input-scaling witness, where smaller margins are worse.
    bool larger_is_worse = true;
    double tolerance = 0.0;
    std::size_t passes = 0;
    std::size_t failures = 0;
    double worst = 0.0;
    bool seen = false;

    void observe(double value) {
        const bool ok = larger_is_worse ? value <= tolerance : value > tolerance;
        if (ok) {
            ++passes;
        } else {
            ++failures;
        }
        if (!seen) {
            worst = value;
            seen = true;
        } else {
            worst = larger_is_worse ? std::max(worst, value) : std::min(worst, value);
        }
    }
};

struct VerifySummary {
    VerifyOptions options;
    std::vector<PropertyStats> properties;
    std::size_t regenerated = 0;

    bool all_passed() const {
        for (const PropertyStats& p : properties) {
            if (p.failures > 0) return false;
        }
        return true;
    }
};

namespace detail {

/// Self-contained RNG helpers so summaries are reproducible regardless of
/// the standard library's distribution implementations.
struct TrialRng {
    std::uint64_t state;

    explicit TrialRng(std::uint64_t seed) : state(seed) {}

    // splitmix64
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    std::size_t index(std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(next() % (hi - lo + 1));
    }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        for (std::size_t i = n; i-- > 1;) {
            std::swap(p[i], p[index(0, i)]);
        }
        return p;
    }
};

/// Entries uniform in [-1, 1] with |x| < 0.05 excluded.
inline double draw_entry(TrialRng& rng) {
    for (;;) {
        const double x = rng.uniform(-1.0, 1.0);
        if (std::abs(x) >= 0.05) return x;
    }
}

inline Matrix draw_matrix(TrialRng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = draw_entry(rng);
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

/// |a - b| relative to entry magnitude above 1; interaction elements of
/// ill-conditioned draws can be large, so a bare absolute tolerance would
/// punish plain rounding.
inline double scaled_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double scale = std::max(1.0, std::max(std::abs(a(i, j)), std::abs(b(i, j))));
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
        }
    }
    return worst;
}

inline std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

/// Randomized check of the wide-array interaction properties: row sums,
/// column-sum bounds with the minor-determinant oracle, output/input
/// scaling behaviour, permutation covariance and wide/tall transpose
/// duality. Trials are seeded individually from the master seed, so the
/// summary is reproducible and trials are order-independent.
inline VerifySummary run_property_suite(const VerifyOptions& options) {
    if (options.max_rows >= options.max_cols) {
        throw ValidationError("verify needs max rows < max cols (wide matrices)");
    }
    if (options.max_cols > 8) {
        throw ValidationError("verify supports max cols <= 8");
    }

    VerifySummary summary;
    summary.options = options;
    auto& props = summary.properties;
    props.push_back({"row sums equal one", true, 1e-9});
    props.push_back({"column sums within [0,1]", true, 1e-9});
    props.push_back({"Binet-Cauchy column sums agree", true, 1e-9});
    props.push_back({"column sums total r", true, 1e-9});
    props.push_back({"output scaling invariance", true, 1e-10});
    props.push_back({"input scaling witness", false, 1e-8});
    props.push_back({"permutation covariance", true, 1e-12});
    props.push_back({"transpose duality", true, 1e-12});
    PropertyStats& row_sum_stat = props[0];
    PropertyStats& col_bound_stat = props[1];
    PropertyStats& binet_stat = props[2];
    PropertyStats& col_total_stat = props[3];
    PropertyStats& out_scale_stat = props[4];
    PropertyStats& in_scale_stat = props[5];
    PropertyStats& perm_stat = props[6];
    PropertyStats& dual_stat = props[7];

    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        detail::TrialRng rng(options.seed ^ (0x9e3779b97f4a7c15ULL * (trial + 1)));
        const std::size_t r = rng.index(1, std::min(options.max_rows, options.max_cols - 1));
        const std::size_t s = rng.index(r + 1, options.max_cols);

        GainArray nga;
        GainArray lambda;
        for (;;) {
            nga = make_gain_array(GainRole::normalized, detail::draw_matrix(rng, r, s));
            try {
                lambda = rnga(nga);
                break;
            } catch (const SingularMatrixError&) {
                ++summary.regenerated;
            }
        }

        // Property 1
        const SumVector rows = row_sums(lambda);
        double row_residual = 0.0;
        for (double v : rows.values) row_residual = std::max(row_residual, std::abs(v - 1.0));
        row_sum_stat.observe(row_residual);

        // Property 2: bounds and the minor-determinant oracle
        const SumVector cols = col_sums(lambda);
        double bound_violation = 0.0;
        double total = 0.0;
        for (double v : cols.values) {
            bound_violation = std::max(bound_violation, std::max(-v, v - 1.0));
            total += v;
        }
        col_bound_stat.observe(std::max(bound_violation, 0.0));
        double bc_residual = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            bc_residual =
                std::max(bc_residual, std::abs(col_sum_binet_cauchy(nga, j) - cols.values[j]));
        }
        binet_stat.observe(bc_residual);
        col_total_stat.observe(std::abs(total - static_cast<double>(r)));

        // Property 3: output scaling leaves the array unchanged
        std::vector<double> qr(r);
        for (double& v : qr) v = rng.uniform(0.2, 5.0);
        out_scale_stat.observe(
            detail::max_abs_diff(rnga(scale_outputs(nga, qr)).values, lambda.values));

        // Property 4: a non-uniform input scaling must move some element
        std::vector<double> qs(s);
        for (;;) {
            for (double& v : qs) v = rng.uniform(0.2, 5.0);
            const auto [lo, hi] = std::minmax_element(qs.begin(), qs.end());
            if (*hi / *lo >= 1.1) break;  // cI would cancel exactly
        }
        in_scale_stat.observe(
            detail::max_abs_diff(rnga(scale_inputs(nga, qs)).values, lambda.values));

        // Property 5: permutations pass through
        const std::vector<std::size_t> pr = rng.permutation(r);
        const std::vector<std::size_t> ps = rng.permutation(s);
        perm_stat.observe(detail::scaled_diff(rnga(permute(nga, pr, ps)).values,
                                              permute(lambda, pr, ps).values));

        // Wide formula vs tall formula on the transpose
        const GainArray tall = make_gain_array(GainRole::normalized, transpose(nga.values));
        dual_stat.observe(detail::scaled_diff(rnga(tall).values, transpose(lambda.values)));
    }
    return summary;
}

/// Deterministic text summary; identical options give identical bytes.
inline std::string render(const VerifySummary& summary) {
    std::ostringstream os;
    os << "property suite: " << summary.options.trials << " trials, r <= "
       << summary.options.max_rows << ", s <= " << summary.options.max_cols << ", seed "
       << summary.options.seed << "\n";
    os << "regenerated rank-deficient draws: " << summary.regenerated << "\n";
    os << detail::pad("property", 36) << detail::pad("pass", 8) << detail::pad("fail", 8)
       << "worst\n";
    for (const PropertyStats& p : summary.properties) {
        std::string worst = p.seen ? detail::fmt_sci(p.worst) : "-";
        if (p.seen && !p.larger_is_worse) worst += " (smallest witness)";
        os << detail::pad(p.name, 36) << detail::pad(std::to_string(p.passes), 8)
           << detail::pad(std::to_string(p.failures), 8) << worst << "\n";
    }
    os << "result: " << (summary.all_passed() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

}  // namespace loopair
