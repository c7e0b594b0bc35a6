#pragma once

#include <cfenv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "loopair/arrays.hpp"
#include "loopair/model.hpp"
#include "loopair/pairing.hpp"
#include "loopair/simulate.hpp"
#include "loopair/tuning.hpp"

namespace loopair {

enum class ReportFormat { structured, table };

struct PropertyCheck {
    std::string name;
    bool pass = false;
    double residual = 0.0;
};

/// Everything derived for one interaction basis (RGA or RNGA).
struct BasisAnalysis {
    GainArray relative;
    SumVector rows;
    SumVector cols;  // raw sums for tall arrays, no bound implied there
    std::optional<PairingPlan> plan;
    std::vector<LoopTuning> tunings;
};

struct ScenarioMetrics {
    std::string basis;  // "rnga" | "rga"
    std::vector<PairedLoop> pairs;
    std::vector<double> iae_per_output;
    std::vector<double> isci_per_input;
};

struct AnalysisReport {
    std::string plant_name;
    std::vector<std::string> output_names;
    std::vector<std::string> input_names;
    std::optional<GainArray> k;
    std::optional<GainArray> nga;
    std::optional<BasisAnalysis> rga_basis;
    std::optional<BasisAnalysis> rnga_basis;
    std::vector<PropertyCheck> checks;
    std::optional<Scenario> scenario;
    std::vector<ScenarioMetrics> metrics;
};

namespace detail {

inline constexpr double kRowSumTol = 1e-9;
inline constexpr double kColSumBoundTol = 1e-9;
inline constexpr double kBinetCauchyTol = 1e-9;
/// Minor enumeration guard: skip the oracle when C(s, r) explodes.
inline constexpr double kMaxMinorCount = 1e6;

/// Full 64-bit precision, 17 significant digits.
inline std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Display form: fixed four decimals, ties to even, no negative zero.
inline std::string fmt_display(double v) {
    double scaled = std::nearbyint(v * 1e4);  // FE_TONEAREST: half to even
    if (scaled == 0.0) scaled = 0.0;          // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", scaled / 1e4);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

/// Minimal deterministic JSON writer: keys are emitted in call order and
/// numbers use the formats above, which is what keeps golden outputs
/// byte-stable.
class JsonWriter {
public:
    explicit JsonWriter(std::ostringstream& os) : os_(os) {}

    void begin_object() { open('{'); }
    void end_object() { close('}'); }
    void begin_array() { open('['); }
    void end_array() { close(']'); }

    void key(const std::string& name) {
        comma();
        os_ << '"' << json_escape(name) << "\":";
        just_keyed_ = true;
    }

    void value(const std::string& s) {
        comma();
        os_ << '"' << json_escape(s) << '"';
    }
    void value(const char* s) { value(std::string(s)); }
    void value(double v) {
        comma();
        os_ << fmt_full(v);
    }
    void value(std::size_t v) {
        comma();
        os_ << v;
    }
    void value(bool v) {
        comma();
        os_ << (v ? "true" : "false");
    }
    void null() {
        comma();
        os_ << "null";
    }

private:
    void open(char c) {
        comma();
        os_ << c;
        first_ = true;
    }
    void close(char c) {
        os_ << c;
        first_ = false;
    }
    void comma() {
        if (just_keyed_) {
            just_keyed_ = false;
            return;
        }
        if (!first_) os_ << ',';
        first_ = false;
    }

    std::ostringstream& os_;
    bool first_ = true;
    bool just_keyed_ = false;
};

inline void write_matrix_values(JsonWriter& w, const Matrix& m) {
    w.begin_array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        w.begin_array();
        for (std::size_t j = 0; j < m.cols(); ++j) w.value(m(i, j));
        w.end_array();
    }
    w.end_array();
}

inline void write_matrix_display(JsonWriter& w, const Matrix& m) {
    w.begin_array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        w.begin_array();
        for (std::size_t j = 0; j < m.cols(); ++j) w.value(fmt_display(m(i, j)));
        w.end_array();
    }
    w.end_array();
}

inline void write_vector_values(JsonWriter& w, const std::vector<double>& v) {
    w.begin_array();
    for (double x : v) w.value(x);
    w.end_array();
}

inline void write_vector_display(JsonWriter& w, const std::vector<double>& v) {
    w.begin_array();
    for (double x : v) w.value(fmt_display(x));
    w.end_array();
}

inline void write_array_block(JsonWriter& w, const char* name, const GainArray& arr) {
    w.key(name);
    w.begin_object();
    w.key("values");
    write_matrix_values(w, arr.values);
    w.key("display");
    write_matrix_display(w, arr.values);
    w.end_object();
}

inline void write_basis(JsonWriter& w, const char* name, const BasisAnalysis& basis) {
    w.key(name);
    w.begin_object();
    w.key("array");
    w.begin_object();
    w.key("values");
    write_matrix_values(w, basis.relative.values);
    w.key("display");
    write_matrix_display(w, basis.relative.values);
    w.end_object();
    w.key("row_sums");
    write_vector_values(w, basis.rows.values);
    w.key("row_sums_display");
    write_vector_display(w, basis.rows.values);
    w.key("col_sums");
    write_vector_values(w, basis.cols.values);
    w.key("col_sums_display");
    write_vector_display(w, basis.cols.values);
    if (basis.plan.has_value()) {
        w.key("pairing");
        w.begin_object();
        w.key("retained_inputs");
        w.begin_array();
        for (std::size_t j : basis.plan->retained_inputs) w.value(j + 1);
        w.end_array();
        w.key("pairs");
        w.begin_array();
        for (const PairedLoop& p : basis.plan->pairs) {
            w.begin_object();
            w.key("output");
            w.value(p.output + 1);
            w.key("input");
            w.value(p.input + 1);
            w.key("value");
            w.value(p.value);
            w.key("value_display");
            w.value(fmt_display(p.value));
            w.end_object();
        }
        w.end_array();
        w.key("eliminated_inputs");
        w.begin_array();
        for (const EliminatedInput& e : basis.plan->eliminated_inputs) {
            w.begin_object();
            w.key("input");
            w.value(e.input + 1);
            w.key("column_sum");
            w.value(e.column_sum);
            w.end_object();
        }
        w.end_array();
        w.key("warnings");
        w.begin_array();
        for (const std::string& warning : basis.plan->warnings) w.value(warning);
        w.end_array();
        w.end_object();
    }
    if (!basis.tunings.empty()) {
        w.key("tuning");
        w.begin_array();
        for (const LoopTuning& t : basis.tunings) {
            w.begin_object();
            w.key("output");
            w.value(t.loop.output + 1);
            w.key("input");
            w.value(t.loop.input + 1);
            w.key("kc");
            w.value(t.pid.kc);
            w.key("tau_i");
            w.value(t.pid.tau_i);
            w.key("tau_d");
            w.value(t.pid.tau_d);
            w.key("lambda_f");
            w.value(t.pid.lambda_f);
            w.key("derivative_filter_ratio");
            w.value(t.pid.derivative_filter_ratio);
            w.end_object();
        }
        w.end_array();
    }
    w.end_object();
}

inline std::string render_structured(const AnalysisReport& report) {
    std::ostringstream os;
    JsonWriter w(os);
    w.begin_object();
    w.key("plant");
    w.value(report.plant_name);
    w.key("outputs");
    w.begin_array();
    for (const auto& n : report.output_names) w.value(n);
    w.end_array();
    w.key("inputs");
    w.begin_array();
    for (const auto& n : report.input_names) w.value(n);
    w.end_array();

    w.key("arrays");
    w.begin_object();
    if (report.k.has_value()) write_array_block(w, "K", *report.k);
    if (report.nga.has_value()) write_array_block(w, "NGA", *report.nga);
    w.end_object();

    if (report.rnga_basis.has_value()) write_basis(w, "rnga", *report.rnga_basis);
    if (report.rga_basis.has_value()) write_basis(w, "rga", *report.rga_basis);

    w.key("property_checks");
    w.begin_array();
    for (const PropertyCheck& c : report.checks) {
        w.begin_object();
        w.key("name");
        w.value(c.name);
        w.key("pass");
        w.value(c.pass);
        w.key("residual");
        w.value(c.residual);
        w.end_object();
    }
    w.end_array();

    w.key("metrics");
    if (report.metrics.empty()) {
        w.null();
    } else {
        w.begin_object();
        if (report.scenario.has_value()) {
            w.key("scenario");
            w.begin_object();
            w.key("steps");
            w.begin_array();
            for (const SetpointStep& st : report.scenario->steps) {
                w.begin_object();
                w.key("output");
                w.value(st.output + 1);
                w.key("magnitude");
                w.value(st.magnitude);
                w.key("time");
                w.value(st.time);
                w.end_object();
            }
            w.end_array();
            w.key("horizon");
            w.value(report.scenario->horizon);
            w.key("step_size");
            w.value(report.scenario->step_size);
            w.end_object();
        }
        w.key("runs");
        w.begin_array();
        for (const ScenarioMetrics& m : report.metrics) {
            w.begin_object();
            w.key("basis");
            w.value(m.basis);
            w.key("pairs");
            w.begin_array();
            for (const PairedLoop& p : m.pairs) {
                w.begin_object();
                w.key("output");
                w.value(p.output + 1);
                w.key("input");
                w.value(p.input + 1);
                w.end_object();
            }
            w.end_array();
            w.key("iae_per_output");
            write_vector_values(w, m.iae_per_output);
            w.key("isci_per_input");
            write_vector_values(w, m.isci_per_input);
            w.end_object();
        }
        w.end_array();
        w.end_object();
    }
    w.end_object();
    os << "\n";
    return os.str();
}

inline std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline void render_matrix_table(std::ostringstream& os, const std::string& title, const Matrix& m,
                                const std::vector<double>* rows, const std::vector<double>* cols) {
    constexpr std::size_t w = 10;
    os << "[" << title << "]\n";
    os << pad_right("", 8);
    for (std::size_t j = 0; j < m.cols(); ++j) os << pad_left("u" + std::to_string(j + 1), w);
    if (rows != nullptr) os << pad_left("| R(i)", w + 2);
    os << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << pad_right("  y" + std::to_string(i + 1), 8);
        for (std::size_t j = 0; j < m.cols(); ++j) os << pad_left(fmt_display(m(i, j)), w);
        if (rows != nullptr) os << pad_left("| " + fmt_display((*rows)[i]), w + 2);
        os << "\n";
    }
    if (cols != nullptr) {
        os << pad_right("  C(j)", 8);
        for (std::size_t j = 0; j < m.cols(); ++j) os << pad_left(fmt_display((*cols)[j]), w);
        os << "\n";
    }
    os << "\n";
}

inline void render_basis_table(std::ostringstream& os, const std::string& label,
                               const BasisAnalysis& basis) {
    render_matrix_table(os, label, basis.relative.values, &basis.rows.values, &basis.cols.values);
    if (basis.plan.has_value()) {
        os << "[pairing " << label << "]\n";
        os << "  retained inputs:";
        for (std::size_t j : basis.plan->retained_inputs) os << " u" << (j + 1);
        os << "\n  eliminated:";
        if (basis.plan->eliminated_inputs.empty()) {
            os << " (none)";
        } else {
            for (const EliminatedInput& e : basis.plan->eliminated_inputs) {
                os << " u" << (e.input + 1) << " (C=" << fmt_display(e.column_sum) << ")";
            }
        }
        os << "\n  pairs:";
        for (const PairedLoop& p : basis.plan->pairs) {
            os << " y" << (p.output + 1) << "-u" << (p.input + 1) << " (" << fmt_display(p.value)
               << ")";
        }
        os << "\n  warnings:";
        if (basis.plan->warnings.empty()) {
            os << " (none)\n";
        } else {
            os << "\n";
            for (const std::string& warning : basis.plan->warnings) os << "    - " << warning << "\n";
        }
        os << "\n";
    }
    if (!basis.tunings.empty()) {
        constexpr std::size_t w = 11;
        os << "[tuning " << label << "]\n";
        os << "  " << pad_right("loop", 8) << pad_left("kc", w) << pad_left("tau_i", w)
           << pad_left("tau_d", w) << pad_left("lambda_f", w) << pad_left("N", 6) << "\n";
        for (const LoopTuning& t : basis.tunings) {
            os << "  "
               << pad_right("y" + std::to_string(t.loop.output + 1) + "-u" +
                                std::to_string(t.loop.input + 1),
                            8)
               << pad_left(fmt_display(t.pid.kc), w) << pad_left(fmt_display(t.pid.tau_i), w)
               << pad_left(fmt_display(t.pid.tau_d), w)
               << pad_left(fmt_display(t.pid.lambda_f), w)
               << pad_left(fmt_display(t.pid.derivative_filter_ratio), 6) << "\n";
        }
        os << "\n";
    }
}

inline std::string render_table(const AnalysisReport& report) {
    std::ostringstream os;
    os << "plant: " << report.plant_name << " (" << report.output_names.size() << " outputs x "
       << report.input_names.size() << " inputs)\n";
    os << "outputs:";
    for (const auto& n : report.output_names) os << " " << n;
    os << "\ninputs:";
    for (const auto& n : report.input_names) os << " " << n;
    os << "\n\n";
    if (report.k.has_value()) render_matrix_table(os, "K", report.k->values, nullptr, nullptr);
    if (report.nga.has_value()) render_matrix_table(os, "NGA", report.nga->values, nullptr, nullptr);
    if (report.rnga_basis.has_value()) render_basis_table(os, "rnga", *report.rnga_basis);
    if (report.rga_basis.has_value()) render_basis_table(os, "rga", *report.rga_basis);
    if (!report.checks.empty()) {
        os << "[checks]\n";
        for (const PropertyCheck& c : report.checks) {
            os << "  " << pad_right(c.name, 44) << (c.pass ? "pass" : "FAIL")
               << "  residual " << fmt_full(c.residual) << "\n";
        }
        os << "\n";
    }
    os << "[metrics]\n";
    if (report.metrics.empty()) {
        os << "  (absent)\n";
    } else {
        if (report.scenario.has_value()) {
            os << "  scenario:";
            for (const SetpointStep& st : report.scenario->steps) {
                os << " step y" << (st.output + 1) << " " << (st.magnitude >= 0 ? "+" : "")
                   << fmt_display(st.magnitude) << " at t=" << fmt_display(st.time) << " s;";
            }
            os << " horizon " << fmt_display(report.scenario->horizon) << " s; h "
               << fmt_display(report.scenario->step_size) << " s\n";
        }
        constexpr std::size_t w = 12;
        os << "  " << pad_right("basis", 7);
        for (std::size_t i = 0; i < report.output_names.size(); ++i)
            os << pad_left("IAE(y" + std::to_string(i + 1) + ")", w);
        for (std::size_t j = 0; j < report.input_names.size(); ++j)
            os << pad_left("ISCI(u" + std::to_string(j + 1) + ")", w);
        os << "\n";
        for (const ScenarioMetrics& m : report.metrics) {
            os << "  " << pad_right(m.basis, 7);
            for (double v : m.iae_per_output) os << pad_left(fmt_display(v), w);
            for (double v : m.isci_per_input) os << pad_left(fmt_display(v), w);
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace detail

/// Deterministic rendering: identical reports produce identical bytes.
inline std::string render(const AnalysisReport& report, ReportFormat format) {
    return format == ReportFormat::structured ? detail::render_structured(report)
                                              : detail::render_table(report);
}

struct ReportOptions {
    bool with_rga = true;
    bool with_rnga = true;
    bool with_pairing = false;
    bool with_tuning = false;
    LambdaOverrides lambda_overrides;
};

namespace detail {

inline SumVector raw_col_sums(const Matrix& m) {
    SumVector s{SumAxis::column, std::vector<double>(m.cols(), 0.0)};
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s.values[j] += m(i, j);
    return s;
}

inline BasisAnalysis build_basis(const TransferMatrix& tm, const GainArray& base,
                                 const char* label, std::vector<PropertyCheck>& checks,
                                 const ReportOptions& opt) {
    BasisAnalysis basis{base.role == GainRole::normalized ? rnga(base) : rga(base),
                        SumVector{},
                        SumVector{},
                        std::nullopt,
                        {}};
    basis.rows = row_sums(basis.relative);
    const bool tall = basis.relative.shape == ShapeClass::tall;
    basis.cols = tall ? raw_col_sums(basis.relative.values) : col_sums(basis.relative);

    if (!tall) {
        double row_residual = 0.0;
        for (double v : basis.rows.values) row_residual = std::max(row_residual, std::abs(v - 1.0));
        checks.push_back({std::string(label) + " row sums equal one", row_residual <= kRowSumTol,
                          row_residual});

        double bound_violation = 0.0;
        for (double v : basis.cols.values) {
            bound_violation = std::max(bound_violation, std::max(-v, v - 1.0));
        }
        bound_violation = std::max(bound_violation, 0.0);
        checks.push_back({std::string(label) + " column sums within [0,1]",
                          bound_violation <= kColSumBoundTol, bound_violation});

        if (minor_count(base.values.cols(), base.values.rows()) <= kMaxMinorCount) {
            double bc_residual = 0.0;
            for (std::size_t j = 0; j < base.values.cols(); ++j) {
                bc_residual = std::max(
                    bc_residual, std::abs(col_sum_binet_cauchy(base, j) - basis.cols.values[j]));
            }
            checks.push_back({std::string(label) + " Binet-Cauchy column sums agree",
                              bc_residual <= kBinetCauchyTol, bc_residual});
        } else {
            checks.push_back({std::string(label) + " Binet-Cauchy oracle skipped (minor count > 1e6)",
                              true, 0.0});
        }

        if (opt.with_pairing) {
            basis.plan = recommend(basis.relative);
            if (opt.with_tuning) {
                basis.tunings = tune_plan(tm, *basis.plan, opt.lambda_overrides);
            }
        }
    }
    return basis;
}

}  // namespace detail

/// Assemble arrays, sums, property residuals and (optionally) pairing and
/// tuning for a plant. Simulation metrics are attached by the caller.
inline AnalysisReport build_report(const TransferMatrix& tm, const ReportOptions& opt = {}) {
    AnalysisReport report;
    report.plant_name = tm.name();
    report.output_names = tm.output_names();
    report.input_names = tm.input_names();
    report.k = steady_state_gain(tm);
    report.nga = normalized_gain(tm);
    if (opt.with_rnga) {
        report.rnga_basis = detail::build_basis(tm, *report.nga, "rnga", report.checks, opt);
    }
    if (opt.with_rga) {
        report.rga_basis = detail::build_basis(tm, *report.k, "rga", report.checks, opt);
    }
    return report;
}

}  // namespace loopair
