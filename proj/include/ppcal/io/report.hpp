/**
 * @file report.hpp
 * @brief Human-readable and comma-separated reports for identification and
 *        estimator comparison. Lengths in mm, angles in deg (or mdeg for
 *        standard deviations of angular deviations).
 */
#pragma once

#include "ppcal/experiments.hpp"
#include "ppcal/identification.hpp"
#include "ppcal/io/yaml_support.hpp"
#include "ppcal/manipulator.hpp"
#include "ppcal/models.hpp"

#include <fmt/format.h>

#include <optional>
#include <string>

namespace ppcal::io {

struct IdentifyReportInfo {
    std::string approach;       ///< "partial" or "fullpose"
    double weight = 0.0;        ///< mm/rad, full-pose only
    std::size_t configurations = 0;
    std::size_t markers = 0;
};

namespace detail {

inline double to_file_units(const Parameter& p, double v) { return p.unit == ParameterUnit::angle ? v / kDegree : v; }
inline const char* unit_name(const Parameter& p) { return p.unit == ParameterUnit::angle ? "deg" : "mm"; }

/// Index of each chain parameter within the unknown vector, or -1 when it was not estimated.
inline std::vector<int> unknown_slots(const ParameterEstimate& est, std::size_t parameters) {
    std::vector<int> slot(parameters, -1);
    for (std::size_t k = 0; k < est.identified.size(); ++k) slot[static_cast<std::size_t>(est.identified[k])] = static_cast<int>(k);
    return slot;
}

inline double uncertainty_at(const ParameterEstimate& est, int slot) {
    if (slot < 0 || slot >= est.covariance.rows()) return 0.0;
    return std::sqrt(std::max(0.0, est.covariance(slot, slot)));
}

}  // namespace detail

inline std::string identify_report_text(const SerialManipulator& model, const IdentificationResult& r,
                                        const IdentifyReportInfo& info) {
    const auto& est = r.parameters;
    std::string out;
    out += fmt::format("Model: {}\n", model.name);
    out += fmt::format("Approach: {}", info.approach);
    if (info.approach == "fullpose") out += fmt::format(" (orientation weight {:.6g} mm/rad)", info.weight);
    out += fmt::format("\nData: {} configurations x {} reference points\n", info.configurations, info.markers);
    out += fmt::format("Iterations: {} ({})\n\n", r.iterations, r.converged ? "converged" : "NOT converged");

    out += "Geometric parameters\n";
    out += fmt::format("  {:<10} {:<5} {:>16} {:>16} {:>14} {:>12}\n", "name", "unit", "nominal", "estimate",
                       "deviation", "+/- (1 sd)");
    const auto slot = detail::unknown_slots(est, model.parameters.size());
    for (std::size_t k = 0; k < model.parameters.size(); ++k) {
        const auto& p = model.parameters[k];
        const auto kk = static_cast<Eigen::Index>(k);
        const double nominal = detail::to_file_units(p, est.nominal[kk]);
        const double estimate = detail::to_file_units(p, est.pi()[kk]);
        const double deviation = detail::to_file_units(p, est.delta[kk]);
        const std::string sd =
            slot[k] < 0 ? std::string("fixed")
                        : fmt::format("{:.3e}", detail::to_file_units(p, detail::uncertainty_at(est, slot[k])));
        out += fmt::format("  {:<10} {:<5} {:>16.6f} {:>16.6f} {:>14.6f} {:>12}\n", p.label, detail::unit_name(p),
                           nominal, estimate, deviation, sd);
    }

    if (!model.compliance.empty()) {
        const auto offset = static_cast<int>(est.identified.size());
        out += fmt::format("\nCompliance, [{}]\n", model.compliance.unit_label);
        out += fmt::format("  {:<10} {:>14} {:>12}\n", "name", "value", "+/- (1 sd)");
        for (std::size_t c = 0; c < model.compliance.size(); ++c)
            out += fmt::format("  {:<10} {:>14.6f} {:>12.3e}\n", model.compliance.coefficients[c].label,
                               est.chi[static_cast<Eigen::Index>(c)],
                               detail::uncertainty_at(est, offset + static_cast<int>(c)));
    }

    const Vector3 p = r.base_tool.p_base();
    const Vector3 rv = r.base_tool.r_base() * 1e3;
    out += "\nBase in measurement frame\n";
    out += fmt::format("  position, [mm]:               {:>12.6f} {:>12.6f} {:>12.6f}\n", p.x(), p.y(), p.z());
    out += fmt::format("  rotation vector, [mrad]:      {:>12.6f} {:>12.6f} {:>12.6f}\n", rv.x(), rv.y(), rv.z());
    out += "Tool reference points in flange frame, [mm]\n";
    for (std::size_t j = 0; j < r.base_tool.tool.size(); ++j) {
        const Vector3& u = r.base_tool.tool[j];
        out += fmt::format("  m{:<28} {:>12.6f} {:>12.6f} {:>12.6f}\n", j + 1, u.x(), u.y(), u.z());
    }
    out += fmt::format("\nResidual RMS, [mm]: {:.6e}\n", est.residual_rms);
    out += fmt::format("Condition number (scaled normal matrix): {:.6e}\n", est.condition);
    if (!est.unidentifiable.empty()) {
        out += "Not identifiable:";
        for (const auto& u : est.unidentifiable) out += " " + u;
        out += "\n";
    }
    for (const auto& w : r.warnings) out += "Warning: " + w + "\n";
    return out;
}

/// One row per quantity: section,name,unit,nominal,estimate,uncertainty. Numbers round-trip exactly.
inline std::string identify_report_csv(const SerialManipulator& model, const IdentificationResult& r,
                                       const IdentifyReportInfo& info) {
    const auto& est = r.parameters;
    std::string out = "section,name,unit,nominal,estimate,uncertainty\n";
    auto row = [&](const char* section, const std::string& name, const std::string& unit, const std::string& nominal,
                   const std::string& estimate, const std::string& sd) {
        out += fmt::format("{},{},{},{},{},{}\n", section, name, unit, nominal, estimate, sd);
    };
    row("run", "approach", "", "", info.approach, "");
    row("run", "iterations", "", "", std::to_string(r.iterations), "");
    row("run", "converged", "", "", r.converged ? "true" : "false", "");
    const auto slot = detail::unknown_slots(est, model.parameters.size());
    for (std::size_t k = 0; k < model.parameters.size(); ++k) {
        const auto& p = model.parameters[k];
        const auto kk = static_cast<Eigen::Index>(k);
        row("parameter", p.label, detail::unit_name(p), number_text(detail::to_file_units(p, est.nominal[kk])),
            number_text(detail::to_file_units(p, est.pi()[kk])),
            slot[k] < 0 ? "" : number_text(detail::to_file_units(p, detail::uncertainty_at(est, slot[k]))));
    }
    const auto offset = static_cast<int>(est.identified.size());
    for (std::size_t c = 0; c < model.compliance.size(); ++c)
        row("compliance", model.compliance.coefficients[c].label, model.compliance.unit_label, "",
            number_text(est.chi[static_cast<Eigen::Index>(c)]),
            number_text(detail::uncertainty_at(est, offset + static_cast<int>(c))));
    const Vector3 p = r.base_tool.p_base();
    const Vector3 rv = r.base_tool.r_base() * 1e3;
    for (int a = 0; a < 3; ++a) {
        const std::string axis(1, "xyz"[a]);
        row("base", "p_" + axis, "mm", "", number_text(p[a]), "");
    }
    for (int a = 0; a < 3; ++a) {
        const std::string axis(1, "xyz"[a]);
        row("base", "r_" + axis, "mrad", "", number_text(rv[a]), "");
    }
    for (std::size_t j = 0; j < r.base_tool.tool.size(); ++j)
        for (int a = 0; a < 3; ++a)
            row("tool", "m" + std::to_string(j + 1) + "_" + std::string(1, "xyz"[a]), "mm", "",
                number_text(r.base_tool.tool[j][a]), "");
    row("fit", "residual_rms", "mm", "", number_text(est.residual_rms), "");
    row("fit", "condition", "", "", number_text(est.condition), "");
    return out;
}

namespace detail {

/// Scale from internal units to report units for standard deviations: mm, mdeg, or compliance units.
inline double std_scale(const ParameterStatistics& p) { return p.angle ? 1e3 / kDegree : 1.0; }

inline std::string std_unit(const SerialManipulator& model, const ParameterStatistics& p) {
    if (p.angle) return "mdeg";
    if (model.parameter_index(p.label) >= 0) return "mm";
    return model.compliance.unit_label;
}

inline bool std_available(const TrialStatistics& s) { return s.trials > 1; }

}  // namespace detail

/// Aligned table: standard deviation of each estimate under both estimators and their ratio.
inline std::string compare_report_text(const ExperimentScenario& sc, const ComparisonResult& r) {
    std::string out;
    out += fmt::format("Model: {}\n", sc.model.name);
    out += fmt::format("Noise: {:.6g} mm per coordinate; trials: {}; seed: {}\n", sc.sigma, sc.trials, sc.seed);
    out += fmt::format("Configurations: {}; reference points: {}\n", r.configurations.size(), sc.truth.tool.size());
    out += fmt::format("Full-pose orientation weight: {:.6g} mm/rad\n", r.weight);
    out += fmt::format("Failed trials: full-pose {}, partial-pose {}\n\n", r.fullpose.failed, r.partial.failed);
    out += fmt::format("{:<10} {:<6} {:>22} {:>22} {:>12}\n", "Parameter", "Unit", "Std, full pose (#1)",
                       "Std, partial pose (#2)", "Improvement");
    for (std::size_t k = 0; k < r.partial.parameters.size(); ++k) {
        const auto& a1 = r.fullpose.parameters[k];
        const auto& a2 = r.partial.parameters[k];
        const double scale = detail::std_scale(a2);
        auto sd = [&](const TrialStatistics& s, const ParameterStatistics& p) {
            return detail::std_available(s) ? fmt::format("{:.4g}", p.stddev * scale) : std::string("n/a");
        };
        const std::string factor = r.improvement[k] ? fmt::format("{:.2f}", *r.improvement[k]) : std::string("n/a");
        out += fmt::format("{:<10} {:<6} {:>22} {:>22} {:>12}\n", a2.label, detail::std_unit(sc.model, a2),
                           sd(r.fullpose, a1), sd(r.partial, a2), factor);
    }
    return out;
}

/// Truth and means in value_unit (mm, deg or compliance units), standard deviations in std_unit; NA when undefined.
inline std::string compare_report_csv(const ExperimentScenario& sc, const ComparisonResult& r) {
    std::string out =
        "parameter,value_unit,std_unit,truth,mean_fullpose,std_fullpose,mean_partial,std_partial,improvement\n";
    for (std::size_t k = 0; k < r.partial.parameters.size(); ++k) {
        const auto& a1 = r.fullpose.parameters[k];
        const auto& a2 = r.partial.parameters[k];
        const double value_scale = a2.angle ? 1.0 / kDegree : 1.0;
        const double scale = detail::std_scale(a2);
        auto sd = [&](const TrialStatistics& s, const ParameterStatistics& p) {
            return detail::std_available(s) ? number_text(p.stddev * scale) : std::string("NA");
        };
        const std::string std_unit = detail::std_unit(sc.model, a2);
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", a2.label, a2.angle ? std::string("deg") : std_unit, std_unit,
                           number_text(a2.truth * value_scale), number_text(a1.mean * value_scale), sd(r.fullpose, a1),
                           number_text(a2.mean * value_scale), sd(r.partial, a2),
                           r.improvement[k] ? number_text(*r.improvement[k]) : std::string("NA"));
    }
    return out;
}

}  // namespace ppcal::io
