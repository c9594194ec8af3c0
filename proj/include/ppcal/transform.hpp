/**
 * @file transform.hpp
 * @brief Rigid transforms, skew matrices and small-rotation helpers.
 *
 * Lengths are millimeters and angles radians throughout the library.
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>

namespace ppcal {

using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix3 = Eigen::Matrix3d;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using Matrix3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Matrix6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Skew-symmetric cross-product matrix: skew(r) * v == r.cross(v).
inline Matrix3 skew(const Vector3& r) {
    Matrix3 m;
    m << 0.0, -r.z(), r.y(),
         r.z(), 0.0, -r.x(),
         -r.y(), r.x(), 0.0;
    return m;
}

/// Rotation by `angle` about the unit vector `axis`.
inline Matrix3 axis_rotation(const Vector3& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

/// Exponential map of a rotation vector.
inline Matrix3 rotation_from_vector(const Vector3& r) {
    const double angle = r.norm();
    if (angle < 1e-300) return Matrix3::Identity();
    return Eigen::AngleAxisd(angle, r / angle).toRotationMatrix();
}

/// Logarithm map: the rotation vector of R.
inline Vector3 rotation_vector(const Matrix3& rotation) {
    const Eigen::AngleAxisd aa(rotation);
    return aa.axis() * aa.angle();
}

/// Closest rotation to `m` in the Frobenius sense (orthonormal polar factor, det +1).
inline Matrix3 orthonormalize(const Matrix3& m) {
    Eigen::JacobiSVD<Matrix3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3 d = Matrix3::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

/// Fixed-axis x-y-z angles: R = Rz(phi_z) * Ry(phi_y) * Rx(phi_x).
inline Vector3 fixed_xyz_angles(const Matrix3& r) {
    const double phi_y = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
    const double phi_x = std::atan2(r(2, 1), r(2, 2));
    const double phi_z = std::atan2(r(1, 0), r(0, 0));
    return {phi_x, phi_y, phi_z};
}

inline Matrix3 rotation_from_fixed_xyz(const Vector3& phi) {
    return axis_rotation(Vector3::UnitZ(), phi.z()) * axis_rotation(Vector3::UnitY(), phi.y()) *
           axis_rotation(Vector3::UnitX(), phi.x());
}

/// Homogeneous transform split into its rotation and translation blocks.
struct RigidTransform {
    Matrix3 rotation = Matrix3::Identity();
    Vector3 translation = Vector3::Zero();

    static RigidTransform identity() { return {}; }

    static RigidTransform from_vector(const Vector3& position, const Vector3& rotation_vec) {
        return {rotation_from_vector(rotation_vec), position};
    }

    Vector3 apply(const Vector3& point) const { return rotation * point + translation; }

    RigidTransform inverse() const {
        const Matrix3 rt = rotation.transpose();
        return {rt, -(rt * translation)};
    }

    Eigen::Matrix4d matrix() const {
        Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
        t.topLeftCorner<3, 3>() = rotation;
        t.topRightCorner<3, 1>() = translation;
        return t;
    }

    friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
        return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
    }
};

}  // namespace ppcal
