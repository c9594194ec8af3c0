#pragma once

#include "ppcal/errors.hpp"
#include "ppcal/manipulator.hpp"
#include "ppcal/transform.hpp"

#include <span>

namespace ppcal {

struct MarkerPose {
    RigidTransform frame;   ///< maps tool-frame points onto the measured points
    Vector3 position;       ///< frame origin, mm
    Vector3 angles;         ///< fixed-axis x-y-z angles, rad
};

/**
 * Least-squares rigid registration of `tool` (points in the tool frame) onto
 * `measured`: centroid subtraction, SVD of the cross-covariance and a
 * determinant fix so the result is a proper rotation.
 */
inline MarkerPose pose_from_markers(std::span<const Vector3> measured, std::span<const Vector3> tool) {
    if (measured.size() != tool.size())
        throw DimensionError("measured and tool point counts differ");
    const std::vector<Vector3> tool_points(tool.begin(), tool.end());
    require_marker_triad(tool_points);

    const double n = static_cast<double>(tool.size());
    Vector3 cm = Vector3::Zero(), ct = Vector3::Zero();
    for (std::size_t j = 0; j < tool.size(); ++j) {
        cm += measured[j];
        ct += tool[j];
    }
    cm /= n;
    ct /= n;

    Matrix3 h = Matrix3::Zero();
    for (std::size_t j = 0; j < tool.size(); ++j) h += (measured[j] - cm) * (tool[j] - ct).transpose();

    Eigen::JacobiSVD<Matrix3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3 d = Matrix3::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const Matrix3 r = svd.matrixU() * d * svd.matrixV().transpose();

    MarkerPose pose;
    pose.frame = {r, cm - r * ct};
    pose.position = pose.frame.translation;
    pose.angles = fixed_xyz_angles(r);
    return pose;
}

}  // namespace ppcal
