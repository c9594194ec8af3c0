// Shared fixtures for the test programs.
#pragma once

#include "ppcal/experiments.hpp"
#include "ppcal/models.hpp"

#include <random>
#include <vector>

namespace testing_support {

using namespace ppcal;

/// Deviations injected into the 3-DOF arm: dl = (3, 2, 5) mm, dq = (1, 0.5, 2) deg.
inline InjectedTruth demo_truth(const SerialManipulator& m) {
    InjectedTruth t = ExperimentScenario::nominal_truth(m);
    t.delta << 3.0, 2.0, 5.0, 1.0 * kDegree, 0.5 * kDegree, 2.0 * kDegree;
    return t;
}

inline ExperimentScenario demo_scenario(double sigma, int trials, std::uint64_t configuration_seed = 1) {
    ExperimentScenario sc;
    sc.model = make_demo_manipulator();
    sc.truth = demo_truth(sc.model);
    sc.sigma = sigma;
    sc.random_configurations = 3;
    sc.configuration_seed = configuration_seed;
    sc.trials = trials;
    sc.seed = 1;
    return sc;
}

/// Fifteen measurement configurations of the 6-DOF arm, degrees.
inline std::vector<std::vector<double>> heavy_configuration_degrees() {
    return {
        {79.20, -0.01, -5.57, 51.00, -97.52, -91.67},     {63.00, -0.01, -12.22, -56.49, 41.42, 150.55},
        {63.00, -0.01, -47.98, -70.04, -61.55, 177.16},   {95, -25.24, 33.00, 129.69, -98.10, 90.57},
        {95, -25.24, -107.01, 109.95, -61.19, 174.21},    {105, -25.24, 14.30, 55.21, 41.26, -152.97},
        {56.6, -56.9, 44.54, -55.11, 41.90, 152.06},      {56.6, -56.9, 64.73, -129.65, -98.26, -90.55},
        {144.8, -56.9, 104.49, -69.41, 61.67, -6.33},     {-41, -99.85, -91.68, 55.12, 41.53, -152.48},
        {-143, -99.85, -32.64, 110.31, -61.47, -6.29},    {-143, -99.85, -72.01, 129.65, -98.09, 90.82},
        {133, -140, 147.68, 129.64, -97.90, 90.99},       {-60, -140, 7.59, -110.09, -61.36, -174.09},
        {-60, -140, -52.00, -124.89, -41.62, 27.78},
    };
}

inline std::vector<VectorX> heavy_configurations() {
    std::vector<VectorX> out;
    for (const auto& row : heavy_configuration_degrees()) {
        VectorX q(6);
        for (int j = 0; j < 6; ++j) q[j] = row[static_cast<std::size_t>(j)] * kDegree;
        out.push_back(q);
    }
    return out;
}

inline RigidTransform tracker_base() {
    return RigidTransform::from_vector(Vector3(-34.4, -31.9, -97.8), Vector3(52.8, 2.2, -15.6) * 1e-3);
}

inline VectorX reference_compliance() {
    VectorX chi(9);
    chi << 0.287, 0.277, 0.302, 0.293, 0.246, 0.416, 2.786, 3.483, 2.074;
    return chi;
}

inline InjectedTruth heavy_truth(const SerialManipulator& m) {
    InjectedTruth t = ExperimentScenario::nominal_truth(m);
    t.base = tracker_base();
    t.tool = triad_tool_points();
    t.chi = reference_compliance();
    return t;
}

inline ExperimentScenario heavy_scenario(double sigma, int trials) {
    ExperimentScenario sc;
    sc.model = make_heavy_manipulator();
    sc.truth = heavy_truth(sc.model);
    sc.sigma = sigma;
    sc.configurations = heavy_configurations();
    sc.trials = trials;
    sc.seed = 1;
    sc.load = GravityLoad{250.0, Vector3(300.0, 0.0, -200.0), true};
    sc.options.max_iter = 100;
    return sc;
}

inline VectorX random_configuration(const SerialManipulator& m, std::mt19937_64& rng) {
    VectorX q(m.joint_count);
    for (int j = 0; j < m.joint_count; ++j) {
        std::uniform_real_distribution<double> u(m.joint_ranges[j].lower, m.joint_ranges[j].upper);
        q[j] = u(rng);
    }
    return q;
}

inline double relative_error(const MatrixX& a, const MatrixX& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testing_support
