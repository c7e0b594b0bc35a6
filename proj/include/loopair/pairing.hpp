#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "loopair/arrays.hpp"
#include "loopair/errors.hpp"

namespace loopair {

/// One recommended loop: output i driven by input j, with the interaction
/// element that justified the choice. Indices are 0-based.
struct PairedLoop {
    std::size_t output = 0;
    std::size_t input = 0;
    double value = 0.0;
};

struct EliminatedInput {
    std::size_t input = 0;
    double column_sum = 0.0;
};

struct EliminationResult {
    std::vector<std::size_t> retained;      // ascending column indices, length r
    std::vector<EliminatedInput> eliminated;  // ascending column indices
};

struct PairingPlan {
    GainRole basis = GainRole::relative_normalized;
    std::vector<std::size_t> retained_inputs;
    std::vector<PairedLoop> pairs;  // one per output, in output order
    std::vector<EliminatedInput> eliminated_inputs;
    std::vector<std::string> warnings;
};

/// Keep the r columns with the largest column sums, drop the s - r
/// smallest. Ties keep the lower column index.
inline EliminationResult eliminate_inputs(const GainArray& arr, const SumVector& sums) {
    if (arr.shape == ShapeClass::tall) {
        throw ValidationError("input elimination applies to wide or square arrays only");
    }
    if (sums.axis != SumAxis::column || sums.values.size() != arr.values.cols()) {
        throw ValidationError("eliminate_inputs needs the array's column sums");
    }
    const std::size_t r = arr.values.rows();
    const std::size_t s = arr.values.cols();
    std::vector<std::size_t> order(s);
    for (std::size_t j = 0; j < s; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sums.values[a] != sums.values[b]) return sums.values[a] > sums.values[b];
        return a < b;
    });
    EliminationResult result;
    result.retained.assign(order.begin(), order.begin() + r);
    std::sort(result.retained.begin(), result.retained.end());
    std::vector<std::size_t> dropped(order.begin() + r, order.end());
    std::sort(dropped.begin(), dropped.end());
    for (std::size_t j : dropped) result.eliminated.push_back({j, sums.values[j]});
    return result;
}

namespace detail {

/// How close a candidate matching must come to the optimum before it is
/// reported as a near-tie alternative.
inline constexpr double kNearTieMargin = 0.05;
/// Paired elements below this raise an advisory warning.
inline constexpr double kWeakPairThreshold = 0.5;
/// Exhaustive matching explores r! candidates; refuse beyond this.
inline constexpr std::size_t kMaxExhaustiveOutputs = 10;

inline std::string pair_text(std::size_t output, std::size_t input) {
    return "y" + std::to_string(output + 1) + "-u" + std::to_string(input + 1);
}

inline std::string format_value(double v) {
    std::ostringstream os;
    os.precision(4);
    os << std::fixed << v;
    return os.str();
}

}  // namespace detail

/// Recommend one input per output: eliminate surplus inputs by column sum,
/// then pick the assignment over the retained columns that minimizes
/// sum_i |lambda_i,j(i) - 1| subject to every paired element being
/// positive. Ties prefer the lexicographically smallest pair list.
inline PairingPlan recommend(const GainArray& arr) {
    if (!(arr.role == GainRole::relative || arr.role == GainRole::relative_normalized)) {
        throw ValidationError("recommend expects an RGA or RNGA array");
    }
    if (arr.shape == ShapeClass::tall) {
        throw ValidationError(
            "pairing needs at least as many inputs as outputs; tall interaction arrays are "
            "analysis-only");
    }
    const std::size_t r = arr.values.rows();
    if (r > detail::kMaxExhaustiveOutputs) {
        throw ValidationError("exhaustive matching is limited to " +
                              std::to_string(detail::kMaxExhaustiveOutputs) + " outputs, got " +
                              std::to_string(r));
    }

    PairingPlan plan;
    plan.basis = arr.role;
    EliminationResult elim = eliminate_inputs(arr, col_sums(arr));
    plan.retained_inputs = elim.retained;
    plan.eliminated_inputs = std::move(elim.eliminated);

    // Candidate assignments are permutations of the retained columns in
    // output order; std::next_permutation visits them in lexicographic
    // order, so the first optimum found is the lexicographically smallest.
    std::vector<std::size_t> perm = plan.retained_inputs;
    std::sort(perm.begin(), perm.end());
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best;
    struct Candidate {
        double cost;
        std::vector<std::size_t> assignment;
    };
    std::vector<Candidate> feasible;
    do {
        double cost = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < r; ++i) {
            const double v = arr.values(i, perm[i]);
            if (!(v > 0.0)) {
                ok = false;
                break;
            }
            cost += std::abs(v - 1.0);
        }
        if (!ok) continue;
        feasible.push_back({cost, perm});
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (best.empty()) {
        throw NoViablePairingError(
            "every matching over the retained inputs contains a non-positive element");
    }

    for (std::size_t i = 0; i < r; ++i) {
        plan.pairs.push_back({i, best[i], arr.values(i, best[i])});
    }
    for (const PairedLoop& p : plan.pairs) {
        if (p.value <= 0.0) {
            plan.warnings.push_back("paired element " + detail::pair_text(p.output, p.input) +
                                    " = " + detail::format_value(p.value) + " is not positive");
        } else if (p.value < detail::kWeakPairThreshold) {
            plan.warnings.push_back("paired element " + detail::pair_text(p.output, p.input) +
                                    " = " + detail::format_value(p.value) + " is below 0.5");
        }
    }
    for (const Candidate& c : feasible) {
        if (c.assignment == best) continue;
        if (c.cost <= best_cost + detail::kNearTieMargin) {
            std::string alt;
            for (std::size_t i = 0; i < r; ++i) {
                if (!alt.empty()) alt += ", ";
                alt += detail::pair_text(i, c.assignment[i]);
            }
            plan.warnings.push_back("near-tie alternative (" + alt + ") within " +
                                    detail::format_value(c.cost - best_cost) + " of the optimum");
        }
    }
    return plan;
}

}  // namespace loopair
