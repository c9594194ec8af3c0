/**
 * @file compliance.hpp
 * @brief Structure of the diagonal joint-compliance matrix.
 *
 * Every coefficient acts on one virtual joint coincident with an actuated
 * joint. A joint may carry several coefficients, each gated by an interval of
 * that joint's actuated coordinate; exactly one of them is active for any
 * in-range angle. The coefficient values themselves (the vector chi) are not
 * stored here: they are the unknowns of the identification.
 */
#pragma once

#include "ppcal/errors.hpp"
#include "ppcal/transform.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace ppcal {

/// Half-open joint-angle interval [lower, upper), radians.
struct AngleInterval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double q) const { return q >= lower && q < upper; }
};

struct ComplianceCoefficient {
    std::string label;
    int joint = 0;                          ///< 0-based actuated joint index
    std::optional<AngleInterval> segment;   ///< empty: active at every angle
};

struct ComplianceModel {
    std::vector<ComplianceCoefficient> coefficients;
    /// Physical compliance per unit of coefficient value, rad/(N*mm).
    double unit_scale = 1.0;
    std::string unit_label = "rad/(N*mm)";

    std::size_t size() const { return coefficients.size(); }
    bool empty() const { return coefficients.empty(); }

    /// Position of the coefficient named `label`, or -1.
    int index_of(const std::string& label) const {
        for (std::size_t c = 0; c < coefficients.size(); ++c)
            if (coefficients[c].label == label) return static_cast<int>(c);
        return -1;
    }

    /// Distinct compliant joints in order of first appearance; one deflection each.
    std::vector<int> virtual_joints() const {
        std::vector<int> joints;
        for (const auto& c : coefficients)
            if (std::find(joints.begin(), joints.end(), c.joint) == joints.end()) joints.push_back(c.joint);
        return joints;
    }

    /// Index into virtual_joints() for a given coefficient.
    int virtual_index(std::size_t coefficient) const {
        const auto joints = virtual_joints();
        const auto it = std::find(joints.begin(), joints.end(), coefficients.at(coefficient).joint);
        return static_cast<int>(it - joints.begin());
    }

    /// Active coefficient per virtual joint for joint vector q.
    std::vector<int> active(const VectorX& q) const {
        const auto joints = virtual_joints();
        std::vector<int> result(joints.size(), -1);
        for (std::size_t v = 0; v < joints.size(); ++v) {
            const int joint = joints[v];
            if (joint >= q.size()) throw DimensionError("compliance refers to joint beyond q");
            const double angle = q[joint];
            double top = -INFINITY;
            int top_index = -1;
            for (std::size_t c = 0; c < coefficients.size(); ++c) {
                const auto& coef = coefficients[c];
                if (coef.joint != joint) continue;
                if (!coef.segment || coef.segment->contains(angle)) {
                    result[v] = static_cast<int>(c);
                    break;
                }
                if (coef.segment->upper > top) {
                    top = coef.segment->upper;
                    top_index = static_cast<int>(c);
                }
            }
            // the topmost segment is closed on the right
            if (result[v] < 0 && top_index >= 0 && std::abs(angle - top) <= 1e-12) result[v] = top_index;
            if (result[v] < 0)
                throw OutOfRangeError("joint " + std::to_string(joint + 1) + " angle " + std::to_string(angle) +
                                      " rad lies outside every compliance segment");
        }
        return result;
    }

    /// Checks joint indices and that each joint's segments tile one interval without gaps or overlaps.
    void validate(int joint_count) const {
        for (const auto& c : coefficients)
            if (c.joint < 0 || c.joint >= joint_count)
                throw DimensionError("compliance coefficient '" + c.label + "' refers to a missing joint");
        for (int joint : virtual_joints()) {
            std::vector<AngleInterval> segs;
            int plain = 0;
            for (const auto& c : coefficients) {
                if (c.joint != joint) continue;
                if (c.segment)
                    segs.push_back(*c.segment);
                else
                    ++plain;
            }
            if (plain > 1 || (plain == 1 && !segs.empty()))
                throw Error("joint " + std::to_string(joint + 1) + " mixes or duplicates unsegmented compliance");
            std::sort(segs.begin(), segs.end(), [](auto& a, auto& b) { return a.lower < b.lower; });
            for (std::size_t i = 0; i < segs.size(); ++i) {
                if (!(segs[i].upper > segs[i].lower))
                    throw Error("empty compliance segment on joint " + std::to_string(joint + 1));
                if (i > 0 && std::abs(segs[i].lower - segs[i - 1].upper) > 1e-12)
                    throw Error("compliance segments of joint " + std::to_string(joint + 1) +
                                " do not partition their range");
            }
        }
    }
};

/// `count` equal-width segments over [lower, upper] for one joint, labels prefix1..prefixN.
inline std::vector<ComplianceCoefficient> equal_segments(const std::string& prefix, int joint, double lower,
                                                         double upper, int count) {
    std::vector<ComplianceCoefficient> out;
    const double width = (upper - lower) / count;
    for (int i = 0; i < count; ++i) {
        const double lo = lower + i * width;
        const double hi = (i + 1 == count) ? upper : lower + (i + 1) * width;
        out.push_back({prefix + std::to_string(i + 1), joint, AngleInterval{lo, hi}});
    }
    return out;
}

}  // namespace ppcal
