#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "loopair/errors.hpp"
#include "loopair/model.hpp"
#include "loopair/pairing.hpp"
#include "loopair/tuning.hpp"

namespace loopair {

struct SetpointStep {
    std::size_t output = 0;  // 0-based
    double magnitude = 1.0;
    double time = 0.0;  // seconds
};

struct InputStep {
    std::size_t input = 0;  // 0-based
    double magnitude = 1.0;
    double time = 0.0;
};

enum class UnpairedInputPolicy { hold_zero };

struct Scenario {
    std::vector<SetpointStep> steps;
    double horizon = 500.0;
    double step_size = 0.01;
    UnpairedInputPolicy unpaired = UnpairedInputPolicy::hold_zero;
    /// Optional symmetric actuator clamp |u| <= limit. Off by default; the
    /// clamp is a plain saturation with no anti-windup.
    std::optional<double> clamp_limit;
};

inline void validate(const Scenario& sc, const TransferMatrix& tm) {
    if (!(sc.step_size > 0.0)) throw ValidationError("scenario step size must be > 0");
    if (!(sc.horizon > 0.0)) throw ValidationError("scenario horizon must be > 0");
    for (const SetpointStep& st : sc.steps) {
        if (st.output >= tm.rows()) {
            throw ValidationError("setpoint step targets output " + std::to_string(st.output + 1) +
                                  " of a plant with " + std::to_string(tm.rows()) + " outputs");
        }
        if (!(sc.horizon > st.time)) {
            throw ValidationError("scenario horizon must exceed every step time");
        }
        if (st.time < 0.0) throw ValidationError("step times must be >= 0");
    }
    if (auto td = tm.min_positive_deadtime(); td.has_value() && sc.step_size > *td / 10.0) {
        std::ostringstream os;
        os << "step size " << sc.step_size << " s is too coarse to resolve the smallest dead time "
           << *td << " s (need h <= " << *td / 10.0 << " s)";
        throw ValidationError(os.str());
    }
    if (sc.clamp_limit.has_value() && !(*sc.clamp_limit > 0.0)) {
        throw ValidationError("clamp limit must be > 0");
    }
}

/// Time series from one closed- or open-loop run. All series share the
/// time grid; controls cover every plant input (unpaired ones stay at zero
/// deviation under hold_zero).
struct SimulationTrace {
    std::vector<double> time;
    std::vector<std::vector<double>> setpoints;  // [output][step]
    std::vector<std::vector<double>> outputs;    // [output][step]
    std::vector<std::vector<double>> controls;   // [input][step]
    std::vector<double> iae_per_output;
    std::vector<double> isci_per_input;
};

namespace detail {

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    double sum = 0.0;
    for (std::size_t n = 0; n + 1 < t.size(); ++n) {
        sum += 0.5 * (f[n] + f[n + 1]) * (t[n + 1] - t[n]);
    }
    return sum;
}

/// Fixed-capacity ring buffer of past input samples for one delayed cell.
/// Samples are pushed once per integration step; queries interpolate
/// linearly between the two samples straddling t - t_d and return zero for
/// times before the run started.
class DelayLine {
public:
    DelayLine(double deadtime, double h) {
        const double lag = deadtime / h;
        whole_ = static_cast<std::size_t>(std::floor(lag));
        fraction_ = lag - static_cast<double>(whole_);
        buffer_.assign(whole_ + 2, 0.0);
    }

    void push(double value) {
        buffer_[head_] = value;
        head_ = (head_ + 1) % buffer_.size();
        ++count_;
    }

    /// Input value at (latest sample time) - deadtime.
    double delayed() const {
        const double newer = sample_back(whole_);
        if (fraction_ == 0.0) return newer;
        const double older = sample_back(whole_ + 1);
        return fraction_ * older + (1.0 - fraction_) * newer;
    }

private:
    double sample_back(std::size_t steps) const {
        if (steps >= count_) return 0.0;  // before the run: at rest
        const std::size_t idx = (head_ + buffer_.size() - 1 - steps) % buffer_.size();
        return buffer_[idx];
    }

    std::vector<double> buffer_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    std::size_t whole_ = 0;
    double fraction_ = 0.0;
};

/// Flat state layout for the closed-loop integrator: per-cell lag states
/// first (one for fopdt, two cascaded for sopdt), then per-loop integrator
/// and derivative-filter states.
struct StateLayout {
    std::vector<std::size_t> cell_offset;  // rows*cols entries
    std::vector<bool> second_order;
    std::size_t loop_offset = 0;  // first controller state
    std::size_t total = 0;

    StateLayout(const TransferMatrix& tm, std::size_t loops) {
        cell_offset.reserve(tm.rows() * tm.cols());
        second_order.reserve(tm.rows() * tm.cols());
        std::size_t off = 0;
        for (std::size_t i = 0; i < tm.rows(); ++i) {
            for (std::size_t j = 0; j < tm.cols(); ++j) {
                cell_offset.push_back(off);
                const bool so = tm.at(i, j).kind == ElementKind::sopdt;
                second_order.push_back(so);
                off += so ? 2 : 1;
            }
        }
        loop_offset = off;
        total = off + 2 * loops;  // integrator + derivative filter per loop
    }
};

}  // namespace detail

/// Integral of |r_i - y_i| over the horizon (trapezoidal rule).
inline double iae(const SimulationTrace& trace, std::size_t output) {
    if (output >= trace.outputs.size()) throw ValidationError("iae: output index out of range");
    std::vector<double> abs_err(trace.time.size());
    for (std::size_t n = 0; n < trace.time.size(); ++n) {
        abs_err[n] = std::abs(trace.setpoints[output][n] - trace.outputs[output][n]);
    }
    return detail::trapezoid(trace.time, abs_err);
}

/// Integral of u_j^2 over the horizon (trapezoidal rule).
inline double isci(const SimulationTrace& trace, std::size_t input) {
    if (input >= trace.controls.size()) throw ValidationError("isci: input index out of range");
    std::vector<double> sq(trace.time.size());
    for (std::size_t n = 0; n < trace.time.size(); ++n) {
        sq[n] = trace.controls[input][n] * trace.controls[input][n];
    }
    return detail::trapezoid(trace.time, sq);
}

/// Closed-loop simulation of the full delayed plant under decentralized
/// PID control. Each cell is integrated as lag states driven by the
/// delayed input (per-cell ring buffer, linear interpolation); the delayed
/// samples are held constant over each step while plant and controller
/// states advance together with classic fourth-order Runge-Kutta.
inline SimulationTrace simulate(const TransferMatrix& tm, const PairingPlan& plan,
                                const std::vector<LoopTuning>& settings, const Scenario& sc) {
    validate(sc, tm);
    if (settings.size() != plan.pairs.size()) {
        throw ValidationError("need exactly one PID settings record per paired loop");
    }
    for (std::size_t l = 0; l < settings.size(); ++l) {
        if (settings[l].loop.output != plan.pairs[l].output ||
            settings[l].loop.input != plan.pairs[l].input) {
            throw ValidationError("PID settings are not aligned with the pairing plan");
        }
    }

    const std::size_t r = tm.rows();
    const std::size_t s = tm.cols();
    const std::size_t loops = plan.pairs.size();
    const double h = sc.step_size;
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(sc.horizon / h));

    const detail::StateLayout layout(tm, loops);
    std::vector<detail::DelayLine> delay;
    delay.reserve(r * s);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < s; ++j) delay.emplace_back(tm.at(i, j).deadtime, h);

    // Setpoint: superposition of step contributions.
    auto setpoint = [&](double t, std::size_t output) {
        double value = 0.0;
        for (const SetpointStep& st : sc.steps) {
            if (st.output == output && t >= st.time) value += st.magnitude;
        }
        return value;
    };

    auto cell_output = [&](const std::vector<double>& x, std::size_t i, std::size_t j) {
        const std::size_t off = layout.cell_offset[i * s + j];
        return layout.second_order[i * s + j] ? x[off + 1] : x[off];
    };

    auto plant_output = [&](const std::vector<double>& x, std::size_t i) {
        double y = 0.0;
        for (std::size_t j = 0; j < s; ++j) y += cell_output(x, i, j);
        return y;
    };

    // Controller output for the current states; unpaired inputs hold zero.
    auto controls_at = [&](double t, const std::vector<double>& x, std::vector<double>& u) {
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t l = 0; l < loops; ++l) {
            const PidSettings& pid = settings[l].pid;
            const std::size_t i = settings[l].loop.output;
            const double e = setpoint(t, i) - plant_output(x, i);
            const double z = x[layout.loop_offset + 2 * l];
            const double v = x[layout.loop_offset + 2 * l + 1];
            double out = e + z / pid.tau_i;
            if (pid.tau_d > 0.0) out += pid.derivative_filter_ratio * (e - v);
            out *= pid.kc;
            if (sc.clamp_limit.has_value()) {
                out = std::clamp(out, -*sc.clamp_limit, *sc.clamp_limit);
            }
            u[settings[l].loop.input] = out;
        }
    };

    // Time derivative of the full state; delayed inputs are frozen for the
    // duration of one step and passed in via u_delayed.
    auto derivative = [&](double t, const std::vector<double>& x,
                          const std::vector<double>& u_delayed, std::vector<double>& dx) {
        std::fill(dx.begin(), dx.end(), 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < s; ++j) {
                const TransferElement& el = tm.at(i, j);
                const std::size_t off = layout.cell_offset[i * s + j];
                const double ud = u_delayed[i * s + j];
                if (el.kind == ElementKind::sopdt) {
                    dx[off] = (-x[off] + el.gain * ud) / el.tau1;
                    dx[off + 1] = (-x[off + 1] + x[off]) / *el.tau2;
                } else {
                    dx[off] = (-x[off] + el.gain * ud) / el.tau1;
                }
            }
        }
        for (std::size_t l = 0; l < loops; ++l) {
            const PidSettings& pid = settings[l].pid;
            const std::size_t i = settings[l].loop.output;
            const double e = setpoint(t, i) - plant_output(x, i);
            dx[layout.loop_offset + 2 * l] = e;
            if (pid.tau_d > 0.0) {
                const double v = x[layout.loop_offset + 2 * l + 1];
                dx[layout.loop_offset + 2 * l + 1] =
                    (pid.derivative_filter_ratio / pid.tau_d) * (e - v);
            }
        }
    };

    SimulationTrace trace;
    trace.time.reserve(nsteps + 1);
    trace.setpoints.assign(r, {});
    trace.outputs.assign(r, {});
    trace.controls.assign(s, {});

    std::vector<double> x(layout.total, 0.0);
    std::vector<double> u(s, 0.0);
    std::vector<double> u_delayed(r * s, 0.0);
    std::vector<double> k1(layout.total), k2(layout.total), k3(layout.total), k4(layout.total);
    std::vector<double> xt(layout.total);

    auto record = [&](double t) {
        trace.time.push_back(t);
        for (std::size_t i = 0; i < r; ++i) {
            trace.setpoints[i].push_back(setpoint(t, i));
            trace.outputs[i].push_back(plant_output(x, i));
        }
        for (std::size_t j = 0; j < s; ++j) trace.controls[j].push_back(u[j]);
    };

    controls_at(0.0, x, u);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < s; ++j) delay[i * s + j].push(u[j]);
    record(0.0);

    for (std::size_t n = 0; n < nsteps; ++n) {
        const double t = static_cast<double>(n) * h;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < s; ++j) u_delayed[i * s + j] = delay[i * s + j].delayed();

        derivative(t, x, u_delayed, k1);
        for (std::size_t m = 0; m < layout.total; ++m) xt[m] = x[m] + 0.5 * h * k1[m];
        derivative(t + 0.5 * h, xt, u_delayed, k2);
        for (std::size_t m = 0; m < layout.total; ++m) xt[m] = x[m] + 0.5 * h * k2[m];
        derivative(t + 0.5 * h, xt, u_delayed, k3);
        for (std::size_t m = 0; m < layout.total; ++m) xt[m] = x[m] + h * k3[m];
        derivative(t + h, xt, u_delayed, k4);
        for (std::size_t m = 0; m < layout.total; ++m) {
            x[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        }

        const double tn = static_cast<double>(n + 1) * h;
        controls_at(tn, x, u);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < s; ++j) delay[i * s + j].push(u[j]);
        record(tn);

        for (double v : x) {
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "closed loop diverged: non-finite state at t = " << tn << " s";
                throw SimulationError(os.str());
            }
        }
    }

    trace.iae_per_output.resize(r);
    for (std::size_t i = 0; i < r; ++i) trace.iae_per_output[i] = iae(trace, i);
    trace.isci_per_input.resize(s);
    for (std::size_t j = 0; j < s; ++j) trace.isci_per_input[j] = isci(trace, j);
    return trace;
}

/// Open-loop response to prescribed input steps (no controllers).
/// Setpoints are identically zero; the same delay and integration scheme
/// as the closed-loop path applies.
inline SimulationTrace open_loop_response(const TransferMatrix& tm,
                                          const std::vector<InputStep>& input_steps,
                                          double horizon, double h) {
    if (!(h > 0.0) || !(horizon > 0.0)) {
        throw ValidationError("open-loop horizon and step size must be > 0");
    }
    for (const InputStep& st : input_steps) {
        if (st.input >= tm.cols()) throw ValidationError("input step index out of range");
        if (st.time < 0.0 || st.time >= horizon) {
            throw ValidationError("input step times must lie inside the horizon");
        }
    }
    if (auto td = tm.min_positive_deadtime(); td.has_value() && h > *td / 10.0) {
        throw ValidationError("step size too coarse to resolve the smallest dead time");
    }

    const std::size_t r = tm.rows();
    const std::size_t s = tm.cols();
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(horizon / h));
    const detail::StateLayout layout(tm, 0);

    std::vector<detail::DelayLine> delay;
    delay.reserve(r * s);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < s; ++j) delay.emplace_back(tm.at(i, j).deadtime, h);

    auto input_at = [&](double t, std::size_t j) {
        double value = 0.0;
        for (const InputStep& st : input_steps) {
            if (st.input == j && t >= st.time) value += st.magnitude;
        }
        return value;
    };

    auto derivative = [&](const std::vector<double>& x, const std::vector<double>& u_delayed,
                          std::vector<double>& dx) {
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < s; ++j) {
                const TransferElement& el = tm.at(i, j);
                const std::size_t off = layout.cell_offset[i * s + j];
                const double ud = u_delayed[i * s + j];
                dx[off] = (-x[off] + el.gain * ud) / el.tau1;
                if (el.kind == ElementKind::sopdt) {
                    dx[off + 1] = (-x[off + 1] + x[off]) / *el.tau2;
                }
            }
        }
    };

    SimulationTrace trace;
    trace.setpoints.assign(r, {});
    trace.outputs.assign(r, {});
    trace.controls.assign(s, {});

    std::vector<double> x(layout.total, 0.0);
    std::vector<double> u(s, 0.0);
    std::vector<double> u_delayed(r * s, 0.0);
    std::vector<double> k1(layout.total), k2(layout.total), k3(layout.total), k4(layout.total);
    std::vector<double> xt(layout.total);

    auto record = [&](double t) {
        trace.time.push_back(t);
        for (std::size_t i = 0; i < r; ++i) {
            trace.setpoints[i].push_back(0.0);
            double y = 0.0;
            for (std::size_t j = 0; j < s; ++j) {
                const std::size_t off = layout.cell_offset[i * s + j];
                y += layout.second_order[i * s + j] ? x[off + 1] : x[off];
            }
            trace.outputs[i].push_back(y);
        }
        for (std::size_t j = 0; j < s; ++j) trace.controls[j].push_back(u[j]);
    };

    for (std::size_t j = 0; j < s; ++j) u[j] = input_at(0.0, j);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < s; ++j) delay[i * s + j].push(u[j]);
    record(0.0);

    for (std::size_t n = 0; n < nsteps; ++n) {
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < s; ++j) u_delayed[i * s + j] = delay[i * s + j].delayed();

        derivative(x, u_delayed, k1);
        for (std::size_t m = 0; m < layout.total; ++m) xt[m] = x[m] + 0.5 * h * k1[m];
        derivative(xt, u_delayed, k2);
        for (std::size_t m = 0; m < layout.total; ++m) xt[m] = x[m] + 0.5 * h * k2[m];
        derivative(xt, u_delayed, k3);
        for (std::size_t m = 0; m < layout.total; ++m) xt[m] = x[m] + h * k3[m];
        derivative(xt, u_delayed, k4);
        for (std::size_t m = 0; m < layout.total; ++m) {
            x[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        }

        const double tn = static_cast<double>(n + 1) * h;
        for (std::size_t j = 0; j < s; ++j) u[j] = input_at(tn, j);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < s; ++j) delay[i * s + j].push(u[j]);
        record(tn);
    }

    trace.iae_per_output.resize(r);
    for (std::size_t i = 0; i < r; ++i) trace.iae_per_output[i] = iae(trace, i);
    trace.isci_per_input.resize(s);
    for (std::size_t j = 0; j < s; ++j) trace.isci_per_input[j] = isci(trace, j);
    return trace;
}

/// CSV export: header `t,r1..rr,y1..yr,u1..us`, one row per grid point.
inline std::string trace_to_csv(const SimulationTrace& trace) {
    std::ostringstream os;
    os.precision(10);
    os << "t";
    for (std::size_t i = 0; i < trace.setpoints.size(); ++i) os << ",r" << (i + 1);
    for (std::size_t i = 0; i < trace.outputs.size(); ++i) os << ",y" << (i + 1);
    for (std::size_t j = 0; j < trace.controls.size(); ++j) os << ",u" << (j + 1);
    os << "\n";
    for (std::size_t n = 0; n < trace.time.size(); ++n) {
        os << trace.time[n];
        for (const auto& series : trace.setpoints) os << "," << series[n];
        for (const auto& series : trace.outputs) os << "," << series[n];
        for (const auto& series : trace.controls) os << "," << series[n];
        os << "\n";
    }
    return os.str();
}

}  // namespace loopair
