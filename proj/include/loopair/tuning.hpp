#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loopair/errors.hpp"
#include "loopair/model.hpp"
#include "loopair/pairing.hpp"

namespace loopair {

/// Parallel-form PID parameters for one loop:
///   Gc(s) = kc (1 + 1/(tau_i s) + tau_d s)
/// with the derivative realized through a first-order filter of time
/// constant tau_d / derivative_filter_ratio.
struct PidSettings {
    double kc = 0.0;
    double tau_i = 0.0;
    double tau_d = 0.0;
    double lambda_f = 0.0;
    double derivative_filter_ratio = 10.0;
};

inline constexpr double kDefaultDerivativeFilterRatio = 10.0;

/// IMC tuning for a first-order-plus-dead-time channel, using the
/// first-order Pade treatment of the dead time:
///   tau_i = tau + td/2
///   tau_d = tau td / (2 tau + td)
///   kc    = (2 tau + td) / (k (2 lambda_f + td))
/// The filter constant defaults to the channel dead time; channels without
/// dead time need an explicit lambda_f and get pure PI settings.
inline PidSettings imc_pid_fopdt(const TransferElement& el,
                                 std::optional<double> lambda_f = std::nullopt) {
    if (el.kind != ElementKind::fopdt) {
        throw ValidationError("IMC tuning rule covers fopdt elements only");
    }
    if (el.gain == 0.0) {
        throw ValidationError("cannot tune a loop around a zero-gain element");
    }
    if (el.deadtime <= 0.0 && !lambda_f.has_value()) {
        throw ValidationError(
            "element has no dead time; an explicit filter constant lambda_f is required");
    }
    const double lf = lambda_f.value_or(el.deadtime);
    if (lf <= 0.0) throw ValidationError("lambda_f must be > 0");

    const double tau = el.tau1;
    const double td = el.deadtime;
    PidSettings pid;
    pid.lambda_f = lf;
    pid.tau_i = tau + td / 2.0;
    pid.tau_d = td > 0.0 ? tau * td / (2.0 * tau + td) : 0.0;
    pid.kc = (2.0 * tau + td) / (el.gain * (2.0 * lf + td));
    pid.derivative_filter_ratio = kDefaultDerivativeFilterRatio;
    return pid;
}

struct LoopTuning {
    PairedLoop loop;
    PidSettings pid;
};

/// Per-loop lambda_f overrides keyed by (output, input), both 0-based.
using LambdaOverrides = std::map<std::pair<std::size_t, std::size_t>, double>;

/// Tune every paired loop of a plan, in output order.
inline std::vector<LoopTuning> tune_plan(const TransferMatrix& tm, const PairingPlan& plan,
                                         const LambdaOverrides& overrides = {}) {
    std::vector<LoopTuning> tunings;
    for (const PairedLoop& p : plan.pairs) {
        if (p.output >= tm.rows() || p.input >= tm.cols()) {
            throw ValidationError("pairing plan references a cell outside the plant");
        }
        const TransferElement& el = tm.at(p.output, p.input);
        if (el.kind != ElementKind::fopdt) {
            throw ValidationError("paired element " + tm.cell_label(p.output, p.input) +
                                  " is sopdt; the tuning rule covers fopdt loops only");
        }
        std::optional<double> lf;
        if (auto it = overrides.find({p.output, p.input}); it != overrides.end()) {
            lf = it->second;
        }
        tunings.push_back({p, imc_pid_fopdt(el, lf)});
    }
    return tunings;
}

}  // namespace loopair
