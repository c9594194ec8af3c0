/**
 * @file kinematics.hpp
 * @brief Forward kinematics of reference points and their Jacobians.
 *
 * Reference point j in configuration i sits at
 *
 *   p_ij = p_base + R_base * p_robot(q_i, theta_i, Pi) + R_base * R_robot(q_i, theta_i, Pi) * p_tool_j
 *
 * which is the translation column of T_base * T_robot * T_tool_j. Jacobians are
 * available in closed form (each parameter is a translation along or rotation
 * about a known axis) and by central differences.
 */
#pragma once

#include "ppcal/errors.hpp"
#include "ppcal/manipulator.hpp"
#include "ppcal/transform.hpp"

#include <span>
#include <vector>

namespace ppcal {

struct ChainPose {
    RigidTransform flange;          ///< flange frame in the measurement frame
    std::vector<Vector3> markers;   ///< reference points in the measurement frame
};

enum class JacobianMethod { analytic, central_difference };

/// Step used by the central-difference Jacobians, in mm or rad.
inline constexpr double kDifferenceStep = 1e-6;

namespace detail {

struct ChainWalk {
    RigidTransform flange;
    std::vector<RigidTransform> before;  ///< measurement-frame pose preceding each element
};

inline void check_dimensions(const SerialManipulator& model, const ManipulatorState& state, const VectorX& pi) {
    if (pi.size() != static_cast<Eigen::Index>(model.parameter_count()))
        throw DimensionError("parameter vector has " + std::to_string(pi.size()) + " entries, model declares " +
                             std::to_string(model.parameter_count()));
    if (state.q.size() != model.joint_count)
        throw DimensionError("joint vector has " + std::to_string(state.q.size()) + " entries, model has " +
                             std::to_string(model.joint_count) + " joints");
    const auto virtuals = model.compliance.virtual_joints().size();
    if (state.theta.size() != 0 && state.theta.size() != static_cast<Eigen::Index>(virtuals))
        throw DimensionError("deflection vector has " + std::to_string(state.theta.size()) + " entries, model has " +
                             std::to_string(virtuals) + " compliant joints");
}

/// Per-actuated-joint deflection assembled from the compact theta vector.
inline VectorX joint_deflections(const SerialManipulator& model, const VectorX& theta) {
    VectorX out = VectorX::Zero(model.joint_count);
    if (theta.size() == 0) return out;
    const auto joints = model.compliance.virtual_joints();
    for (std::size_t k = 0; k < joints.size(); ++k) out[joints[k]] += theta[static_cast<Eigen::Index>(k)];
    return out;
}

inline double element_magnitude(const ChainElement& e, const VectorX& q, const VectorX& deflection,
                                const VectorX& pi) {
    double value = e.parameter >= 0 ? pi[e.parameter] : e.constant;
    if (e.kind == ElementKind::joint) value += q[e.joint] + deflection[e.joint];
    return value;
}

inline ChainWalk walk(const SerialManipulator& model, const ManipulatorState& state, const VectorX& pi,
                      const RigidTransform& base, bool keep_frames) {
    check_dimensions(model, state, pi);
    const VectorX deflection = joint_deflections(model, state.theta);
    ChainWalk w;
    w.flange = base;
    if (keep_frames) w.before.reserve(model.chain.size());
    for (const auto& e : model.chain) {
        if (keep_frames) w.before.push_back(w.flange);
        const double value = element_magnitude(e, state.q, deflection, pi);
        if (e.kind == ElementKind::translation)
            w.flange.translation += w.flange.rotation * (e.axis * value);
        else
            w.flange.rotation = w.flange.rotation * axis_rotation(e.axis, value);
    }
    return w;
}

}  // namespace detail

/// Flange pose and reference-point positions for an explicit set of tool points.
inline ChainPose forward_kinematics(const SerialManipulator& model, const ManipulatorState& state,
                                   const VectorX& pi, const RigidTransform& base, std::span<const Vector3> tool) {
    ChainPose pose;
    pose.flange = detail::walk(model, state, pi, base, false).flange;
    pose.markers.reserve(tool.size());
    for (const auto& t : tool) pose.markers.push_back(pose.flange.apply(t));
    return pose;
}

inline ChainPose forward_kinematics(const SerialManipulator& model, const ManipulatorState& state,
                                   const VectorX& pi, const RigidTransform& base) {
    return forward_kinematics(model, state, pi, base, model.markers);
}

/// Linear (rows 0-2) and angular (rows 3-5) sensitivity of a flange-frame point to every parameter.
inline Matrix6X point_jacobian_parameters(const SerialManipulator& model, const ManipulatorState& state,
                                          const VectorX& pi, const RigidTransform& base, const Vector3& tool_point) {
    const auto w = detail::walk(model, state, pi, base, true);
    const Vector3 p = w.flange.apply(tool_point);
    Matrix6X jac = Matrix6X::Zero(6, static_cast<Eigen::Index>(model.parameter_count()));
    for (std::size_t e = 0; e < model.chain.size(); ++e) {
        const auto& el = model.chain[e];
        if (el.parameter < 0) continue;
        const Vector3 dir = w.before[e].rotation * el.axis;
        if (el.kind == ElementKind::translation) {
            jac.block<3, 1>(0, el.parameter) += dir;
        } else {
            jac.block<3, 1>(0, el.parameter) += dir.cross(p - w.before[e].translation);
            jac.block<3, 1>(3, el.parameter) += dir;
        }
    }
    return jac;
}

/// 6 x joint_count Jacobian of a flange-frame point with respect to the actuated coordinates.
inline Matrix6X point_jacobian_joints(const SerialManipulator& model, const ManipulatorState& state,
                                      const VectorX& pi, const RigidTransform& base, const Vector3& tool_point) {
    const auto w = detail::walk(model, state, pi, base, true);
    const Vector3 p = w.flange.apply(tool_point);
    Matrix6X jac = Matrix6X::Zero(6, model.joint_count);
    for (std::size_t e = 0; e < model.chain.size(); ++e) {
        const auto& el = model.chain[e];
        if (el.kind != ElementKind::joint) continue;
        const Vector3 dir = w.before[e].rotation * el.axis;
        jac.block<3, 1>(0, el.joint) = dir.cross(p - w.before[e].translation);
        jac.block<3, 1>(3, el.joint) = dir;
    }
    return jac;
}

/// 6 x |theta| Jacobian of a flange-frame point with respect to the virtual-joint deflections.
inline Matrix6X point_jacobian_elastic(const SerialManipulator& model, const ManipulatorState& state,
                                       const VectorX& pi, const RigidTransform& base, const Vector3& tool_point) {
    const auto joints = model.compliance.virtual_joints();
    Matrix6X jac(6, static_cast<Eigen::Index>(joints.size()));
    if (joints.empty()) {
        detail::check_dimensions(model, state, pi);
        return jac;
    }
    const Matrix6X all = point_jacobian_joints(model, state, pi, base, tool_point);
    for (std::size_t k = 0; k < joints.size(); ++k) jac.col(static_cast<Eigen::Index>(k)) = all.col(joints[k]);
    return jac;
}

/// Central-difference 3 x |Pi| Jacobian of a reference point.
inline Matrix3X difference_jacobian_parameters(const SerialManipulator& model, const ManipulatorState& state,
                                               const VectorX& pi, const RigidTransform& base,
                                               const Vector3& tool_point, double step = kDifferenceStep) {
    const std::span<const Vector3> tool(&tool_point, 1);
    Matrix3X jac(3, pi.size());
    VectorX probe = pi;
    for (Eigen::Index k = 0; k < pi.size(); ++k) {
        probe[k] = pi[k] + step;
        const Vector3 plus = forward_kinematics(model, state, probe, base, tool).markers[0];
        probe[k] = pi[k] - step;
        const Vector3 minus = forward_kinematics(model, state, probe, base, tool).markers[0];
        probe[k] = pi[k];
        jac.col(k) = (plus - minus) / (2.0 * step);
    }
    return jac;
}

/// Central-difference 3 x |theta| Jacobian of a reference point.
inline Matrix3X difference_jacobian_elastic(const SerialManipulator& model, const ManipulatorState& state,
                                            const VectorX& pi, const RigidTransform& base,
                                            const Vector3& tool_point, double step = kDifferenceStep) {
    const auto n = static_cast<Eigen::Index>(model.compliance.virtual_joints().size());
    const std::span<const Vector3> tool(&tool_point, 1);
    Matrix3X jac(3, n);
    ManipulatorState probe = state;
    if (probe.theta.size() == 0) probe.theta = VectorX::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t0 = probe.theta[k];
        probe.theta[k] = t0 + step;
        const Vector3 plus = forward_kinematics(model, probe, pi, base, tool).markers[0];
        probe.theta[k] = t0 - step;
        const Vector3 minus = forward_kinematics(model, probe, pi, base, tool).markers[0];
        probe.theta[k] = t0;
        jac.col(k) = (plus - minus) / (2.0 * step);
    }
    return jac;
}

/// Positional Jacobian J_pi^(p) of a reference point.
inline Matrix3X jacobian_parameters(const SerialManipulator& model, const ManipulatorState& state,
                                    const VectorX& pi, const RigidTransform& base, const Vector3& tool_point,
                                    JacobianMethod method = JacobianMethod::analytic) {
    if (method == JacobianMethod::central_difference)
        return difference_jacobian_parameters(model, state, pi, base, tool_point);
    return point_jacobian_parameters(model, state, pi, base, tool_point).topRows<3>();
}

/// Positional Jacobian J_theta^(p) of a reference point.
inline Matrix3X jacobian_elastic(const SerialManipulator& model, const ManipulatorState& state, const VectorX& pi,
                                 const RigidTransform& base, const Vector3& tool_point,
                                 JacobianMethod method = JacobianMethod::analytic) {
    if (method == JacobianMethod::central_difference)
        return difference_jacobian_elastic(model, state, pi, base, tool_point);
    return point_jacobian_elastic(model, state, pi, base, tool_point).topRows<3>();
}

inline bool within_joint_limits(const SerialManipulator& model, const VectorX& q) {
    if (model.joint_ranges.empty()) return true;
    for (int j = 0; j < model.joint_count; ++j)
        if (q[j] < model.joint_ranges[j].lower || q[j] > model.joint_ranges[j].upper) return false;
    return true;
}

}  // namespace ppcal
