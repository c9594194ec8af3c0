/**
 * @file identification.hpp
 * @brief Partial-pose (reference point) and full-pose parameter identification.
 *
 * The partial-pose estimator alternates two linear least-squares problems:
 *
 *  - base/tool step: with the chain parameters frozen, the measured points are
 *    mapped through the current base estimate and fitted with
 *      p~_ij = dp + p_robot_i + skew(p_robot_i)^T * dr + R_robot_i * u_j,
 *    giving a base correction (dp, dr) and u_j = R(dr) * p_tool_j;
 *  - parameter step: with base and tool frozen, the residuals of the full
 *    nonlinear prediction are regressed on [J_pi^(p), A_theta^(p)] to update
 *    the geometric deviations and the compliance coefficients.
 *
 * Residuals are always evaluated with the exact model, so the alternation's
 * fixed point is the exact least-squares solution even though each step uses
 * a first-order regressor.
 *
 * The full-pose estimator converts each configuration's reference points to
 * one flange pose by rigid registration and fits 6 residuals per
 * configuration, orientation rows scaled by a weight in mm/rad.
 */
#pragma once

#include "ppcal/elastostatics.hpp"
#include "ppcal/errors.hpp"
#include "ppcal/kinematics.hpp"
#include "ppcal/least_squares.hpp"
#include "ppcal/manipulator.hpp"
#include "ppcal/measurement.hpp"
#include "ppcal/registration.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace ppcal {

/// Rotations larger than this make the small-angle base model questionable.
inline constexpr double kLargeBaseRotation = 0.15;

struct BaseToolEstimate {
    RigidTransform base;
    std::vector<Vector3> tool;  ///< reference points in the flange frame, mm

    Vector3 p_base() const { return base.translation; }
    Vector3 r_base() const { return rotation_vector(base.rotation); }
};

struct ParameterEstimate {
    std::vector<std::string> parameter_labels;  ///< every chain parameter
    VectorX nominal;                            ///< Pi_0
    VectorX delta;                              ///< Pi - Pi_0, zero for parameters not identified
    std::vector<int> identified;                ///< chain parameters that were estimated
    std::vector<std::string> chi_labels;
    VectorX chi;
    std::vector<std::string> unknown_labels;    ///< identified parameters then chi
    MatrixX covariance;                         ///< over unknown_labels
    std::vector<std::string> unidentifiable;    ///< unknowns dropped for a vanishing regressor column
    double residual_rms = 0.0;                  ///< mm for position residuals
    double condition = 1.0;
    VectorX update;                             ///< increment applied by the last solve

    VectorX pi() const { return nominal + delta; }

    /// One-sigma uncertainty of each unknown (sqrt of the covariance diagonal).
    VectorX uncertainty() const { return covariance.diagonal().cwiseMax(0.0).cwiseSqrt(); }

    /// Estimated unknowns in the order of unknown_labels.
    VectorX unknowns() const {
        VectorX v(static_cast<Eigen::Index>(identified.size()) + chi.size());
        for (std::size_t k = 0; k < identified.size(); ++k) v[static_cast<Eigen::Index>(k)] = delta[identified[k]];
        v.tail(chi.size()) = chi;
        return v;
    }
};

struct IdentifyOptions {
    int max_iter = 50;
    double tol = 1e-9;
    std::optional<bool> estimate_base_tool;  ///< defaults to the model's flag
    LeastSquaresOptions least_squares;
};

struct IdentificationResult {
    BaseToolEstimate base_tool;
    ParameterEstimate parameters;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

/// Everything the model prediction depends on during identification.
struct CalibrationState {
    VectorX pi;
    VectorX chi;
    RigidTransform base;
    std::vector<Vector3> tool;

    static CalibrationState nominal(const SerialManipulator& model) {
        return {model.nominal(), VectorX::Zero(static_cast<Eigen::Index>(model.compliance.size())), model.base,
                model.markers};
    }
};

/// Stacked regression problem: solve regressor * x ~= residual.
struct LinearSystem {
    MatrixX regressor;
    VectorX residual;
    std::vector<std::string> labels;
};

namespace detail {

inline ManipulatorState deflected_state(const SerialManipulator& model, const MeasurementRecord& rec,
                                        const CalibrationState& s) {
    ManipulatorState st{rec.q, VectorX(), rec.load};
    if (!model.compliance.empty() && rec.load.squaredNorm() > 0.0)
        st.theta = compute_deflections(model, st, s.pi, s.base, s.chi);
    return st;
}

inline void check_inputs(const SerialManipulator& model, const MeasurementSet& data, const CalibrationState& s) {
    data.validate(model.joint_count);
    if (data.marker_count() != s.tool.size())
        throw DimensionError("measurements carry " + std::to_string(data.marker_count()) +
                             " reference points, tool has " + std::to_string(s.tool.size()));
    if (s.chi.size() != static_cast<Eigen::Index>(model.compliance.size()))
        throw DimensionError("compliance vector size differs from the model");
}

inline std::vector<std::string> axis_labels(const std::string& stem) {
    return {stem + "_x", stem + "_y", stem + "_z"};
}

}  // namespace detail

/// Labels of the unknowns of the parameter step: identified chain parameters then chi.
inline std::vector<std::string> unknown_labels(const SerialManipulator& model) {
    std::vector<std::string> out;
    for (int k : model.identified()) out.push_back(model.parameters[k].label);
    for (const auto& c : model.compliance.coefficients) out.push_back(c.label);
    return out;
}

/// Base/tool regression: 3 m n rows, unknowns [dp_base; dr_base; u_tool_1; ...; u_tool_n].
inline LinearSystem base_tool_system(const SerialManipulator& model, const CalibrationState& s,
                                     const MeasurementSet& data) {
    detail::check_inputs(model, data, s);
    const auto n = static_cast<Eigen::Index>(data.marker_count());
    const auto m = static_cast<Eigen::Index>(data.size());
    LinearSystem sys;
    sys.regressor = MatrixX::Zero(3 * m * n, 6 + 3 * n);
    sys.residual.resize(3 * m * n);
    for (const auto& l : detail::axis_labels("p_base")) sys.labels.push_back(l);
    for (const auto& l : detail::axis_labels("r_base")) sys.labels.push_back(l);
    for (Eigen::Index j = 0; j < n; ++j)
        for (const auto& l : detail::axis_labels("u_tool" + std::to_string(j + 1))) sys.labels.push_back(l);

    const RigidTransform to_base = s.base.inverse();
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& rec = data.records[static_cast<std::size_t>(i)];
        const ManipulatorState st = detail::deflected_state(model, rec, s);
        const RigidTransform robot = detail::walk(model, st, s.pi, RigidTransform::identity(), false).flange;
        const Matrix3 skew_t = skew(robot.translation).transpose();
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index row = 3 * (i * n + j);
            sys.regressor.block<3, 3>(row, 0) = Matrix3::Identity();
            sys.regressor.block<3, 3>(row, 3) = skew_t;
            sys.regressor.block<3, 3>(row, 6 + 3 * j) = robot.rotation;
            sys.residual.segment<3>(row) =
                to_base.apply(rec.markers[static_cast<std::size_t>(j)]) - robot.translation;
        }
    }
    return sys;
}

/**
 * Base/tool step. Returns the corrected base placement and tool points:
 * R_base <- R_base * polar(I + skew(dr)), p_base <- p_base + R_base * dp,
 * p_tool_j = polar(I + skew(dr))^T * u_j.
 */
inline BaseToolEstimate step1_base_tool(const SerialManipulator& model, const CalibrationState& s,
                                        const MeasurementSet& data, const LeastSquaresOptions& options = {}) {
    const LinearSystem sys = base_tool_system(model, s, data);
    const auto sol = solve_least_squares(sys.regressor, sys.residual, sys.labels, options);
    if (!sol.excluded.empty()) throw UnidentifiableError("base/tool regressor has a vanishing column", {});
    const Vector3 dp = sol.x.segment<3>(0);
    const Vector3 dr = sol.x.segment<3>(3);
    const Matrix3 r_delta = orthonormalize(Matrix3::Identity() + skew(dr));
    BaseToolEstimate est;
    est.base.rotation = s.base.rotation * r_delta;
    est.base.translation = s.base.translation + s.base.rotation * dp;
    const auto n = static_cast<Eigen::Index>(data.marker_count());
    for (Eigen::Index j = 0; j < n; ++j) est.tool.push_back(r_delta.transpose() * sol.x.segment<3>(6 + 3 * j));
    return est;
}

inline BaseToolEstimate step1_base_tool(const SerialManipulator& model, const VectorX& pi,
                                        const MeasurementSet& data) {
    CalibrationState s = CalibrationState::nominal(model);
    s.pi = pi;
    return step1_base_tool(model, s, data);
}

/// Partial-pose regression: 3 m n rows, unknowns [dPi_identified; dchi].
inline LinearSystem partial_pose_system(const SerialManipulator& model, const CalibrationState& s,
                                        const MeasurementSet& data) {
    detail::check_inputs(model, data, s);
    const auto ids = model.identified();
    const auto p = static_cast<Eigen::Index>(ids.size());
    const auto c = static_cast<Eigen::Index>(model.compliance.size());
    const auto n = data.marker_count();
    LinearSystem sys;
    sys.labels = unknown_labels(model);
    sys.regressor = MatrixX::Zero(static_cast<Eigen::Index>(data.equation_count()), p + c);
    sys.residual.resize(static_cast<Eigen::Index>(data.equation_count()));
    Eigen::Index row = 0;
    for (const auto& rec : data.records) {
        const ManipulatorState st = detail::deflected_state(model, rec, s);
        const ChainPose pose = forward_kinematics(model, st, s.pi, s.base, s.tool);
        for (std::size_t j = 0; j < n; ++j, row += 3) {
            const Matrix6X jp = point_jacobian_parameters(model, st, s.pi, s.base, s.tool[j]);
            for (Eigen::Index k = 0; k < p; ++k) sys.regressor.block<3, 1>(row, k) = jp.block<3, 1>(0, ids[k]);
            if (c > 0) sys.regressor.block(row, p, 3, c) = elastic_regressor(model, st, s.pi, s.base, s.tool[j]);
            sys.residual.segment<3>(row) = rec.markers[j] - pose.markers[j];
        }
    }
    return sys;
}

/// Full-pose regression: 6 m rows (position, then weight * orientation), same unknowns as the partial one.
inline LinearSystem full_pose_system(const SerialManipulator& model, const CalibrationState& s,
                                     const MeasurementSet& data, double weight) {
    detail::check_inputs(model, data, s);
    if (!(weight > 0.0)) throw Error("orientation weight must be positive");
    const auto ids = model.identified();
    const auto p = static_cast<Eigen::Index>(ids.size());
    const auto c = static_cast<Eigen::Index>(model.compliance.size());
    LinearSystem sys;
    sys.labels = unknown_labels(model);
    const auto rows = static_cast<Eigen::Index>(6 * data.size());
    sys.regressor = MatrixX::Zero(rows, p + c);
    sys.residual.resize(rows);
    Eigen::Index row = 0;
    for (const auto& rec : data.records) {
        // registered flange pose versus predicted flange pose, both in the measurement frame
        const RigidTransform meas_world = pose_from_markers(rec.markers, s.tool).frame;
        const ManipulatorState st = detail::deflected_state(model, rec, s);
        const RigidTransform pred_world = detail::walk(model, st, s.pi, s.base, false).flange;
        const Matrix6X jp = point_jacobian_parameters(model, st, s.pi, s.base, Vector3::Zero());
        for (Eigen::Index k = 0; k < p; ++k) {
            sys.regressor.block<3, 1>(row, k) = jp.block<3, 1>(0, ids[k]);
            sys.regressor.block<3, 1>(row + 3, k) = weight * jp.block<3, 1>(3, ids[k]);
        }
        if (c > 0) {
            const Matrix6X a = elastic_regressor_full(model, st, s.pi, s.base, Vector3::Zero());
            sys.regressor.block(row, p, 3, c) = a.topRows<3>();
            sys.regressor.block(row + 3, p, 3, c) = weight * a.bottomRows<3>();
        }
        sys.residual.segment<3>(row) = meas_world.translation - pred_world.translation;
        sys.residual.segment<3>(row + 3) =
            weight * rotation_vector(meas_world.rotation * pred_world.rotation.transpose());
        row += 6;
    }
    return sys;
}

namespace detail {

inline ParameterEstimate apply_solution(const SerialManipulator& model, CalibrationState& s,
                                        const LinearSystem& sys, const LeastSquaresSolution& sol) {
    const auto ids = model.identified();
    const auto p = static_cast<Eigen::Index>(ids.size());
    for (Eigen::Index k = 0; k < p; ++k) s.pi[ids[k]] += sol.x[k];
    s.chi += sol.x.tail(s.chi.size());

    ParameterEstimate est;
    for (const auto& par : model.parameters) est.parameter_labels.push_back(par.label);
    est.nominal = model.nominal();
    est.delta = VectorX::Zero(est.nominal.size());
    for (int k : ids) est.delta[k] = s.pi[k] - est.nominal[k];
    est.identified = ids;
    for (const auto& coef : model.compliance.coefficients) est.chi_labels.push_back(coef.label);
    est.chi = s.chi;
    est.unknown_labels = sys.labels;
    est.covariance = sol.covariance;
    for (int k : sol.excluded) est.unidentifiable.push_back(sys.labels[k]);
    est.residual_rms = sol.residual_rms;
    est.condition = sol.condition;
    est.update = sol.x;
    return est;
}

}  // namespace detail

/// Parameter step: one linear solve over [dPi; dchi] with base and tool frozen; updates `s` in place.
inline ParameterEstimate step2_parameters(const SerialManipulator& model, CalibrationState& s,
                                          const MeasurementSet& data, const LeastSquaresOptions& options = {}) {
    const LinearSystem sys = partial_pose_system(model, s, data);
    const auto sol = solve_least_squares(sys.regressor, sys.residual, sys.labels, options);
    return detail::apply_solution(model, s, sys, sol);
}

/// RMS of the reference-point residuals under the exact model, mm.
inline double point_residual_rms(const SerialManipulator& model, const CalibrationState& s,
                                 const MeasurementSet& data) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& rec : data.records) {
        const auto st = detail::deflected_state(model, rec, s);
        const auto pose = forward_kinematics(model, st, s.pi, s.base, s.tool);
        for (std::size_t j = 0; j < pose.markers.size(); ++j, count += 3)
            sum += (rec.markers[j] - pose.markers[j]).squaredNorm();
    }
    return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

namespace detail {

inline double max_abs(const VectorX& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace detail

/// Alternates the base/tool and parameter steps until every update is below options.tol.
inline IdentificationResult identify_iterative(const SerialManipulator& model, const MeasurementSet& data,
                                               const IdentifyOptions& options = {}) {
    if (options.max_iter < 1) throw Error("max_iter must be at least 1");
    if (!(options.tol > 0.0)) throw Error("tolerance must be positive");
    const bool with_base_tool = options.estimate_base_tool.value_or(model.estimate_base_tool);
    const auto unknowns = static_cast<std::size_t>(model.identified().size() + model.compliance.size());
    if (data.equation_count() < unknowns || (with_base_tool && data.equation_count() < 6 + 3 * data.marker_count()))
        throw UnidentifiableError("not enough measurements: " + std::to_string(data.equation_count()) +
                                      " equations",
                                  {});

    IdentificationResult result;
    CalibrationState s = CalibrationState::nominal(model);
    if (data.marker_count() != s.tool.size() && with_base_tool)
        s.tool.assign(data.marker_count(), Vector3::Zero());

    for (int it = 1; it <= options.max_iter; ++it) {
        double largest = 0.0;
        if (with_base_tool) {
            const BaseToolEstimate bt = step1_base_tool(model, s, data, options.least_squares);
            largest = std::max(largest, (bt.base.translation - s.base.translation).cwiseAbs().maxCoeff());
            largest = std::max(largest, detail::max_abs(rotation_vector(s.base.rotation.transpose() * bt.base.rotation)));
            for (std::size_t j = 0; j < bt.tool.size(); ++j)
                largest = std::max(largest, (bt.tool[j] - s.tool[j]).cwiseAbs().maxCoeff());
            s.base = bt.base;
            s.tool = bt.tool;
        }
        result.parameters = step2_parameters(model, s, data, options.least_squares);
        largest = std::max(largest, detail::max_abs(result.parameters.update));
        result.iterations = it;
        if (largest < options.tol) {
            result.converged = true;
            break;
        }
    }
    result.base_tool = {s.base, s.tool};
    result.parameters.residual_rms = point_residual_rms(model, s, data);
    if (rotation_vector(s.base.rotation.transpose() * model.base.rotation).norm() > kLargeBaseRotation)
        result.warnings.push_back("base rotation exceeds the small-angle range of the base/tool step");
    for (const auto& u : result.parameters.unidentifiable)
        result.warnings.push_back("'" + u + "' has no regressor sensitivity and was not identified");
    return result;
}

/// Default orientation weight: marker triad radius, mm per rad.
inline double default_orientation_weight(const SerialManipulator& model) { return model.marker_radius(); }

/// Full-pose estimator with base and tool taken as known (from `known`, else the model).
inline IdentificationResult identify_fullpose(const SerialManipulator& model, const MeasurementSet& data,
                                              double weight, const IdentifyOptions& options = {},
                                              const std::optional<BaseToolEstimate>& known = std::nullopt) {
    if (options.max_iter < 1) throw Error("max_iter must be at least 1");
    if (data.marker_count() < 3) throw DegenerateMarkersError("full-pose identification needs 3 reference points");
    IdentificationResult result;
    CalibrationState s = CalibrationState::nominal(model);
    if (known) {
        s.base = known->base;
        s.tool = known->tool;
    }
    for (int it = 1; it <= options.max_iter; ++it) {
        const LinearSystem sys = full_pose_system(model, s, data, weight);
        const auto sol = solve_least_squares(sys.regressor, sys.residual, sys.labels, options.least_squares);
        result.parameters = detail::apply_solution(model, s, sys, sol);
        result.iterations = it;
        if (detail::max_abs(sol.x) < options.tol) {
            result.converged = true;
            break;
        }
    }
    result.base_tool = {s.base, s.tool};
    result.parameters.residual_rms = point_residual_rms(model, s, data);
    return result;
}

}  // namespace ppcal
