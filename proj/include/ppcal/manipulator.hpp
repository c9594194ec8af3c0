/**
 * @file manipulator.hpp
 * @brief Serial-chain description used by every other module.
 *
 * A chain is an ordered list of elementary motions applied from the robot base
 * to the mounting flange. Each element is a translation along, or rotation
 * about, a fixed local axis. Its magnitude is either a constant or one entry
 * of the parameter vector. Joint elements add the actuated coordinate and the
 * elastic deflection of that joint on top of an optional offset parameter.
 */
#pragma once

#include "ppcal/compliance.hpp"
#include "ppcal/errors.hpp"
#include "ppcal/transform.hpp"

#include <string>
#include <vector>

namespace ppcal {

enum class ElementKind { translation, rotation, joint };

struct ChainElement {
    ElementKind kind = ElementKind::translation;
    Vector3 axis = Vector3::UnitZ();  ///< unit vector in the element's local frame
    int parameter = -1;               ///< index into the parameter vector, -1 for none
    double constant = 0.0;            ///< magnitude when parameter < 0 (mm or rad)
    int joint = -1;                   ///< actuated joint index for ElementKind::joint
};

enum class ParameterUnit { length, angle };

struct Parameter {
    std::string label;
    ParameterUnit unit = ParameterUnit::length;
    double nominal = 0.0;  ///< mm or rad
    bool identify = true;
};

struct JointRange {
    double lower = -M_PI;
    double upper = M_PI;
};

class SerialManipulator {
public:
    std::string name;
    int joint_count = 0;
    std::vector<ChainElement> chain;
    std::vector<Parameter> parameters;
    std::vector<JointRange> joint_ranges;
    std::vector<Vector3> markers;  ///< reference points in the flange frame, mm
    RigidTransform base;           ///< nominal robot base placement in the measurement frame
    ComplianceModel compliance;
    bool estimate_base_tool = true;

    std::size_t parameter_count() const { return parameters.size(); }
    std::size_t marker_count() const { return markers.size(); }

    int parameter_index(const std::string& label) const {
        for (std::size_t k = 0; k < parameters.size(); ++k)
            if (parameters[k].label == label) return static_cast<int>(k);
        return -1;
    }

    VectorX nominal() const {
        VectorX pi(parameters.size());
        for (std::size_t k = 0; k < parameters.size(); ++k) pi[k] = parameters[k].nominal;
        return pi;
    }

    /// Indices of parameters flagged for identification.
    std::vector<int> identified() const {
        std::vector<int> out;
        for (std::size_t k = 0; k < parameters.size(); ++k)
            if (parameters[k].identify) out.push_back(static_cast<int>(k));
        return out;
    }

    /// Mean distance of the markers from their centroid, mm.
    double marker_radius() const {
        Vector3 c = Vector3::Zero();
        for (const auto& m : markers) c += m;
        c /= static_cast<double>(markers.size());
        double r = 0.0;
        for (const auto& m : markers) r += (m - c).norm();
        return r / static_cast<double>(markers.size());
    }

    void validate() const;
};

/// Largest triangle area over all marker triples, mm^2.
inline double max_triangle_area(const std::vector<Vector3>& points) {
    double best = 0.0;
    for (std::size_t a = 0; a < points.size(); ++a)
        for (std::size_t b = a + 1; b < points.size(); ++b)
            for (std::size_t c = b + 1; c < points.size(); ++c)
                best = std::max(best, 0.5 * (points[b] - points[a]).cross(points[c] - points[a]).norm());
    return best;
}

/// Throws DegenerateMarkersError unless there are >= 3 non-collinear points.
inline void require_marker_triad(const std::vector<Vector3>& points) {
    if (points.size() < 3)
        throw DegenerateMarkersError("at least 3 reference points are required, got " +
                                     std::to_string(points.size()));
    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, p.norm());
    const double area = max_triangle_area(points);
    if (area <= 1e-9 * std::max(1.0, scale * scale))
        throw DegenerateMarkersError("reference points are collinear");
}

inline void SerialManipulator::validate() const {
    if (joint_count <= 0) throw DimensionError("manipulator needs at least one joint");
    if (!joint_ranges.empty() && joint_ranges.size() != static_cast<std::size_t>(joint_count))
        throw DimensionError("joint range count differs from joint count");
    std::vector<int> seen(joint_count, 0);
    for (const auto& e : chain) {
        if (e.parameter >= static_cast<int>(parameters.size()))
            throw DimensionError("chain element refers to parameter " + std::to_string(e.parameter));
        if (std::abs(e.axis.norm() - 1.0) > 1e-12) throw Error("chain element axis is not a unit vector");
        if (e.kind == ElementKind::joint) {
            if (e.joint < 0 || e.joint >= joint_count) throw DimensionError("chain joint index out of range");
            ++seen[e.joint];
        }
    }
    for (int j = 0; j < joint_count; ++j)
        if (seen[j] != 1) throw Error("joint " + std::to_string(j + 1) + " must appear exactly once in the chain");
    require_marker_triad(markers);
    compliance.validate(joint_count);
}

/// Joint coordinates, elastic deflections (one per compliant joint) and load wrench.
struct ManipulatorState {
    VectorX q;
    VectorX theta;                     ///< empty means no deflection
    Vector6 load = Vector6::Zero();    ///< force N, torque N*mm, measurement frame, about the flange origin
};

}  // namespace ppcal
