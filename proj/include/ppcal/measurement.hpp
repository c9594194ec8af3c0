#pragma once

#include "ppcal/errors.hpp"
#include "ppcal/transform.hpp"

#include <string>
#include <vector>

namespace ppcal {

enum class LoadPhase { pre, post };

/// One manipulator configuration: joint vector, applied wrench and the measured reference points.
struct MeasurementRecord {
    std::string config_id;
    LoadPhase phase = LoadPhase::pre;
    VectorX q;                          ///< rad
    Vector6 load = Vector6::Zero();     ///< N and N*mm, measurement frame, about the flange origin
    std::vector<Vector3> markers;       ///< mm, measurement frame
};

struct MeasurementSet {
    std::vector<MeasurementRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    std::size_t marker_count() const { return records.empty() ? 0 : records.front().markers.size(); }

    /// Scalar position equations available to the partial-pose estimator (3 m n).
    std::size_t equation_count() const { return 3 * size() * marker_count(); }

    void validate(int joint_count) const {
        if (records.empty()) throw Error("measurement set is empty");
        const auto n = marker_count();
        for (const auto& r : records) {
            if (r.markers.size() != n)
                throw DimensionError("configuration '" + r.config_id + "' has " + std::to_string(r.markers.size()) +
                                     " reference points, expected " + std::to_string(n));
            if (r.q.size() != joint_count)
                throw DimensionError("configuration '" + r.config_id + "' has " + std::to_string(r.q.size()) +
                                     " joint values, expected " + std::to_string(joint_count));
            if (!r.q.allFinite() || !r.load.allFinite()) throw Error("non-finite value in '" + r.config_id + "'");
            for (const auto& m : r.markers)
                if (!m.allFinite()) throw Error("non-finite marker position in '" + r.config_id + "'");
        }
    }
};

}  // namespace ppcal
