#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loopair/errors.hpp"
#include "loopair/matrix.hpp"

namespace loopair {

enum class ElementKind { fopdt, sopdt };

/// One SISO channel of the process: first- or second-order lag plus dead
/// time. Times are in seconds, gains are dimensionless deviation-variable
/// gains. Zero gain is allowed (the channel contributes no interaction);
/// zero dead time is allowed (residence time degenerates to the lags).
struct TransferElement {
    ElementKind kind = ElementKind::fopdt;
    double gain = 0.0;
    double tau1 = 0.0;
    std::optional<double> tau2;  // present iff sopdt
    double deadtime = 0.0;

    /// Average residence time: tau + deadtime, with both lags counted for
    /// second-order channels. Strictly positive for any valid element.
    double residence_time() const {
        double b = tau1 + deadtime;
        if (kind == ElementKind::sopdt) b += tau2.value_or(0.0);
        return b;
    }
};

/// Validates a single element; `where` names the cell in diagnostics.
inline void validate(const TransferElement& el, const std::string& where) {
    if (!std::isfinite(el.gain)) throw ValidationError(where + ": gain must be finite");
    if (!std::isfinite(el.tau1) || el.tau1 <= 0.0)
        throw ValidationError(where + ": time constant must be > 0");
    if (el.kind == ElementKind::sopdt) {
        if (!el.tau2.has_value()) throw ValidationError(where + ": sopdt element requires tau2");
        if (!std::isfinite(*el.tau2) || *el.tau2 <= 0.0)
            throw ValidationError(where + ": tau2 must be > 0");
    } else if (el.tau2.has_value()) {
        throw ValidationError(where + ": tau2 is only valid for sopdt elements");
    }
    if (!std::isfinite(el.deadtime) || el.deadtime < 0.0)
        throw ValidationError(where + ": dead time must be >= 0");
}

/// An r x s grid of transfer elements with labelled outputs (rows) and
/// inputs (columns). Immutable after construction; the constructor enforces
/// every invariant, so instances can be shared freely.
class TransferMatrix {
public:
    TransferMatrix(std::string name,
                   std::vector<std::string> output_names,
                   std::vector<std::string> input_names,
                   std::vector<TransferElement> elements)
        : name_(std::move(name)),
          output_names_(std::move(output_names)),
          input_names_(std::move(input_names)),
          elements_(std::move(elements)) {
        if (output_names_.empty() || input_names_.empty()) {
            throw ValidationError("plant needs at least one output and one input");
        }
        if (elements_.size() != output_names_.size() * input_names_.size()) {
            throw ValidationError("plant has " + std::to_string(elements_.size()) +
                                  " elements, expected " +
                                  std::to_string(output_names_.size() * input_names_.size()));
        }
        for (std::size_t i = 0; i < rows(); ++i) {
            for (std::size_t j = 0; j < cols(); ++j) {
                validate(at(i, j), cell_label(i, j));
            }
        }
    }

    const std::string& name() const { return name_; }
    std::size_t rows() const { return output_names_.size(); }
    std::size_t cols() const { return input_names_.size(); }

    const TransferElement& at(std::size_t i, std::size_t j) const {
        return elements_[i * cols() + j];
    }

    const std::vector<std::string>& output_names() const { return output_names_; }
    const std::vector<std::string>& input_names() const { return input_names_; }

    /// "cell (2,3)" with 1-based indices, matching the plant file convention.
    std::string cell_label(std::size_t i, std::size_t j) const {
        return "cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
    }

    /// Smallest strictly positive dead time, if any cell has one.
    std::optional<double> min_positive_deadtime() const {
        std::optional<double> best;
        for (const auto& el : elements_) {
            if (el.deadtime > 0.0 && (!best || el.deadtime < *best)) best = el.deadtime;
        }
        return best;
    }

private:
    std::string name_;
    std::vector<std::string> output_names_;
    std::vector<std::string> input_names_;
    std::vector<TransferElement> elements_;
};

/// Steady-state gains k_ij = G_ij(0).
inline Matrix gain_matrix(const TransferMatrix& tm) {
    Matrix k(tm.rows(), tm.cols());
    for (std::size_t i = 0; i < tm.rows(); ++i)
        for (std::size_t j = 0; j < tm.cols(); ++j) k(i, j) = tm.at(i, j).gain;
    return k;
}

/// Average residence times b_ij, strictly positive elementwise.
inline Matrix residence_matrix(const TransferMatrix& tm) {
    Matrix b(tm.rows(), tm.cols());
    for (std::size_t i = 0; i < tm.rows(); ++i)
        for (std::size_t j = 0; j < tm.cols(); ++j) b(i, j) = tm.at(i, j).residence_time();
    return b;
}

/// Normalized gains k_ij / b_ij: one division per cell, no hidden scaling.
inline Matrix normalized_gain_matrix(const TransferMatrix& tm) {
    Matrix a(tm.rows(), tm.cols());
    for (std::size_t i = 0; i < tm.rows(); ++i)
        for (std::size_t j = 0; j < tm.cols(); ++j)
            a(i, j) = tm.at(i, j).gain / tm.at(i, j).residence_time();
    return a;
}

}  // namespace loopair
