/**
 * @file elastostatics.hpp
 * @brief Joint deflections under load and the compliance regressor.
 *
 * Deflections follow theta = k0 * J_theta^T * F with a diagonal k0 whose
 * nonzero entries are the active compliance coefficients. The load wrench F is
 * expressed in the measurement frame and referred to the flange origin, so
 * J_theta^T * F is the torque about each compliant joint axis. J_theta is
 * taken at the undeflected configuration.
 */
#pragma once

#include "ppcal/compliance.hpp"
#include "ppcal/errors.hpp"
#include "ppcal/kinematics.hpp"
#include "ppcal/manipulator.hpp"

namespace ppcal {

/// theta_k = scale * chi[active(k)] * (J_theta^T F)_k.
inline VectorX deflections(const ComplianceModel& compliance, const VectorX& chi, const Matrix6X& jacobian_elastic,
                           const Vector6& load, const VectorX& q) {
    const auto joints = compliance.virtual_joints();
    if (chi.size() != static_cast<Eigen::Index>(compliance.size()))
        throw DimensionError("compliance vector has " + std::to_string(chi.size()) + " entries, model declares " +
                             std::to_string(compliance.size()));
    if (jacobian_elastic.cols() != static_cast<Eigen::Index>(joints.size()))
        throw DimensionError("elastic Jacobian columns do not match the compliant joints");
    VectorX theta = VectorX::Zero(static_cast<Eigen::Index>(joints.size()));
    if (joints.empty()) return theta;
    const auto active = compliance.active(q);
    const VectorX torque = jacobian_elastic.transpose() * load;
    for (std::size_t k = 0; k < joints.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        theta[kk] = compliance.unit_scale * chi[active[k]] * torque[kk];
    }
    return theta;
}

/// Torques about the compliant joint axes at the undeflected configuration.
inline VectorX compliant_joint_torques(const SerialManipulator& model, const ManipulatorState& state,
                                       const VectorX& pi, const RigidTransform& base) {
    ManipulatorState rigid = state;
    rigid.theta.resize(0);
    return point_jacobian_elastic(model, rigid, pi, base, Vector3::Zero()).transpose() * state.load;
}

/// Deflections of the compliant joints for the state's q and load, given compliance values chi.
inline VectorX compute_deflections(const SerialManipulator& model, const ManipulatorState& state, const VectorX& pi,
                                   const RigidTransform& base, const VectorX& chi) {
    ManipulatorState rigid = state;
    rigid.theta.resize(0);
    const Matrix6X jac = point_jacobian_elastic(model, rigid, pi, base, Vector3::Zero());
    return deflections(model.compliance, chi, jac, state.load, state.q);
}

/**
 * 6 x |chi| regressor: column c is J_theta,k(point) * scale * (J_theta,k^T F)
 * for the joint k that coefficient c acts on, zero when c is not the active
 * segment. Multiplying by chi reproduces J_theta * k0 * J_theta^T * F.
 */
inline Matrix6X elastic_regressor_full(const SerialManipulator& model, const ManipulatorState& state,
                                       const VectorX& pi, const RigidTransform& base, const Vector3& tool_point) {
    const auto& compliance = model.compliance;
    Matrix6X reg = Matrix6X::Zero(6, static_cast<Eigen::Index>(compliance.size()));
    if (compliance.empty()) {
        detail::check_dimensions(model, state, pi);
        return reg;
    }
    const auto active = compliance.active(state.q);
    const VectorX torque = compliant_joint_torques(model, state, pi, base);
    const Matrix6X jp = point_jacobian_elastic(model, state, pi, base, tool_point);
    for (std::size_t k = 0; k < active.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        reg.col(active[k]) = jp.col(kk) * (compliance.unit_scale * torque[kk]);
    }
    return reg;
}

/// Positional rows A_theta^(p) of the compliance regressor.
inline Matrix3X elastic_regressor(const SerialManipulator& model, const ManipulatorState& state, const VectorX& pi,
                                  const RigidTransform& base, const Vector3& tool_point) {
    return elastic_regressor_full(model, state, pi, base, tool_point).topRows<3>();
}

}  // namespace ppcal
