/**
 * @file models.hpp
 * @brief Built-in manipulators: the 3-DOF comparison arm and the 6-DOF
 *        heavy-payload arm with segmented shoulder compliance.
 */
#pragma once

#include "ppcal/compliance.hpp"
#include "ppcal/manipulator.hpp"
#include "ppcal/transform.hpp"

#include <cmath>

namespace ppcal {

inline constexpr double kDegree = M_PI / 180.0;

namespace detail {

inline ChainElement translate(const Vector3& axis, int parameter) {
    return {ElementKind::translation, axis, parameter, 0.0, -1};
}

inline ChainElement joint(const Vector3& axis, int index, int offset_parameter) {
    return {ElementKind::joint, axis, offset_parameter, 0.0, index};
}

}  // namespace detail

/// Reference points of the three-marker measurement tool, flange frame, mm.
inline std::vector<Vector3> triad_tool_points() {
    return {Vector3(279.2, -16.4, -91.9), Vector3(279.2, -25.2, 96.1), Vector3(281.8, 130.5, 5.6)};
}

/**
 * 3-DOF arm: vertical first axis, two parallel horizontal axes.
 *
 *   x = (l2 cos q2 + l3 cos(q2 + q3)) cos q1
 *   y = (l2 cos q2 + l3 cos(q2 + q3)) sin q1
 *   z = l1 + l2 sin q2 + l3 sin(q2 + q3)
 *
 * Parameters: l1, l2, l3 [mm] and joint offsets dq1, dq2, dq3 [rad].
 */
inline SerialManipulator make_demo_manipulator() {
    using detail::joint;
    using detail::translate;
    SerialManipulator m;
    m.name = "demo3";
    m.joint_count = 3;
    m.parameters = {
        {"l1", ParameterUnit::length, 1000.0, true}, {"l2", ParameterUnit::length, 800.0, true},
        {"l3", ParameterUnit::length, 600.0, true},  {"dq1", ParameterUnit::angle, 0.0, true},
        {"dq2", ParameterUnit::angle, 0.0, true},    {"dq3", ParameterUnit::angle, 0.0, true},
    };
    // rotation about -y lifts the x axis towards +z for positive angles
    m.chain = {
        joint(Vector3::UnitZ(), 0, 3), translate(Vector3::UnitZ(), 0),
        joint(-Vector3::UnitY(), 1, 4), translate(Vector3::UnitX(), 1),
        joint(-Vector3::UnitY(), 2, 5), translate(Vector3::UnitX(), 2),
    };
    m.joint_ranges = {{-M_PI, M_PI}, {-M_PI / 2, M_PI / 2}, {-M_PI / 2, M_PI / 2}};
    m.markers = triad_tool_points();
    m.estimate_base_tool = false;
    return m;
}

/// Hand-derived 3 x 6 Jacobian of a tool point of the demo arm (identity base, no deflection).
inline Matrix3X demo_point_jacobian(const VectorX& q, const VectorX& pi, const Vector3& tool) {
    const double l2 = pi[1], l3 = pi[2];
    const double a1 = q[0] + pi[3];
    const double a2 = q[1] + pi[4];
    const double a23 = a2 + q[2] + pi[5];
    const double c1 = std::cos(a1), s1 = std::sin(a1);
    const double c2 = std::cos(a2), s2 = std::sin(a2);
    const double c23 = std::cos(a23), s23 = std::sin(a23);
    const double ex = l3 + tool.x();

    // point in the frame rotated by q1
    const double vx = c23 * ex - s23 * tool.z();
    const double lx = l2 * c2 + vx;
    const double ly = tool.y();
    // d(v)/d(a23)
    const double wx = -s23 * ex - c23 * tool.z();
    const double wz = c23 * ex - s23 * tool.z();

    Matrix3X j(3, 6);
    j.col(0) << 0.0, 0.0, 1.0;
    j.col(1) << c1 * c2, s1 * c2, s2;
    j.col(2) << c1 * c23, s1 * c23, s23;
    j.col(3) << -s1 * lx - c1 * ly, c1 * lx - s1 * ly, 0.0;
    j.col(4) << c1 * (-l2 * s2 + wx), s1 * (-l2 * s2 + wx), l2 * c2 + wz;
    j.col(5) << c1 * wx, s1 * wx, wz;
    return j;
}

/**
 * 6-DOF heavy-payload arm (270 kg class), lengths in mm. Compliance on joints
 * 2..6; joint 2 carries five coefficients over equal q2 segments of
 * [-145, 5] deg, numbered from the top segment downwards. Coefficient values
 * are in units of 1e-9 rad/(N*mm).
 */
inline SerialManipulator make_heavy_manipulator() {
    using detail::joint;
    using detail::translate;
    SerialManipulator m;
    m.name = "heavy6";
    m.joint_count = 6;
    m.parameters = {
        {"d1", ParameterUnit::length, 675.0, false},  {"a1", ParameterUnit::length, 350.0, false},
        {"a2", ParameterUnit::length, 1150.0, false}, {"a3", ParameterUnit::length, -41.0, false},
        {"d4", ParameterUnit::length, 1200.0, false}, {"d6", ParameterUnit::length, 215.0, false},
        {"dq1", ParameterUnit::angle, 0.0, false},    {"dq2", ParameterUnit::angle, 0.0, false},
        {"dq3", ParameterUnit::angle, 0.0, false},    {"dq4", ParameterUnit::angle, 0.0, false},
        {"dq5", ParameterUnit::angle, 0.0, false},    {"dq6", ParameterUnit::angle, 0.0, false},
    };
    m.chain = {
        joint(Vector3::UnitZ(), 0, 6), translate(Vector3::UnitZ(), 0), translate(Vector3::UnitX(), 1),
        joint(Vector3::UnitY(), 1, 7), translate(Vector3::UnitX(), 2),
        joint(Vector3::UnitY(), 2, 8), translate(Vector3::UnitZ(), 3),
        joint(Vector3::UnitX(), 3, 9), translate(Vector3::UnitX(), 4),
        joint(Vector3::UnitY(), 4, 10),
        joint(Vector3::UnitX(), 5, 11), translate(Vector3::UnitX(), 5),
    };
    m.joint_ranges = {{-185 * kDegree, 185 * kDegree}, {-145 * kDegree, 5 * kDegree},
                      {-120 * kDegree, 158 * kDegree}, {-350 * kDegree, 350 * kDegree},
                      {-125 * kDegree, 125 * kDegree}, {-350 * kDegree, 350 * kDegree}};
    m.markers = {Vector3(280.0, -20.0, -90.0), Vector3(280.0, -20.0, 95.0), Vector3(280.0, 130.0, 5.0)};

    const auto segs = equal_segments("chi2_", 1, -145 * kDegree, 5 * kDegree, 5);
    // chi21 is the top segment (q2 near 0), chi25 the bottom one
    for (int k = 0; k < 5; ++k) {
        auto c = segs[static_cast<std::size_t>(4 - k)];
        c.label = "chi2" + std::to_string(k + 1);
        m.compliance.coefficients.push_back(c);
    }
    for (int j = 2; j < 6; ++j) m.compliance.coefficients.push_back({"chi" + std::to_string(j + 1), j, std::nullopt});
    m.compliance.unit_scale = 1e-9;
    m.compliance.unit_label = "1e-9 rad/(N*mm)";
    m.estimate_base_tool = true;
    return m;
}

}  // namespace ppcal
