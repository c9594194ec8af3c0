#include "ppcal/experiments.hpp"
#include "ppcal/identification.hpp"
#include "ppcal/models.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ppcal;
using namespace testing_support;

namespace {

double rotation_error(const RigidTransform& a, const RigidTransform& b) {
    return rotation_vector(a.rotation.transpose() * b.rotation).norm();
}

// Heavy arm without compliance, base and tool from the tracker setup, unloaded data.
ExperimentScenario base_tool_scenario() {
    auto sc = heavy_scenario(0.0, 1);
    sc.model.compliance.coefficients.clear();
    sc.truth.chi.resize(0);
    sc.load.reset();
    return sc;
}

}  // namespace

TEST(RegressorShape, RowCountsAreThreeMnAndSixM) {
    for (int m : {3, 5, 8}) {
        auto sc = demo_scenario(0.0, 1);
        sc.random_configurations = m;
        const auto data = simulate_measurements(sc, 1);
        const auto s = CalibrationState::nominal(sc.model);
        const auto partial = partial_pose_system(sc.model, s, data);
        EXPECT_EQ(partial.regressor.rows(), 3 * m * 3);
        EXPECT_EQ(partial.residual.size(), 3 * m * 3);
        EXPECT_EQ(static_cast<std::size_t>(partial.regressor.rows()), data.equation_count());
        const auto full = full_pose_system(sc.model, s, data, 100.0);
        EXPECT_EQ(full.regressor.rows(), 6 * m);
        EXPECT_EQ(full.regressor.cols(), 6);
        const auto bt = base_tool_system(sc.model, s, data);
        EXPECT_EQ(bt.regressor.rows(), 3 * m * 3);
        EXPECT_EQ(bt.regressor.cols(), 6 + 3 * 3);
    }
}

TEST(RegressorShape, PartialPoseMatchesDifferenceOfPrediction) {
    auto sc = demo_scenario(0.0, 1);
    const auto data = simulate_measurements(sc, 1);
    const auto s = CalibrationState::nominal(sc.model);
    const auto sys = partial_pose_system(sc.model, s, data);
    std::size_t row = 0;
    for (const auto& rec : data.records)
        for (std::size_t j = 0; j < rec.markers.size(); ++j, row += 3) {
            const Matrix3X fd = jacobian_parameters(sc.model, {rec.q, VectorX(), Vector6::Zero()}, s.pi, s.base,
                                                    s.tool[j], JacobianMethod::central_difference);
            EXPECT_LT(relative_error(sys.regressor.block(static_cast<Eigen::Index>(row), 0, 3, 6), fd), 1e-6);
        }
}

TEST(Identify, NominalDataConvergesInOneIteration) {
    auto sc = demo_scenario(0.0, 1);
    sc.truth = ExperimentScenario::nominal_truth(sc.model);
    const auto r = identify_iterative(sc.model, simulate_measurements(sc, 1));
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_LT(r.parameters.delta.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Identify, DemoZeroNoiseRecoversInjectedDeviations) {
    const auto sc = demo_scenario(0.0, 1);
    const auto r = identify_iterative(sc.model, simulate_measurements(sc, 1));
    ASSERT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 10);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(r.parameters.delta[k], sc.truth.delta[k], 1e-8);
    for (int k = 3; k < 6; ++k) EXPECT_NEAR(r.parameters.delta[k] / kDegree, sc.truth.delta[k] / kDegree, 1e-8);
    EXPECT_LT(r.parameters.residual_rms, 1e-9);
}

TEST(Identify, FullPoseZeroNoiseIsExactForAnyWeight) {
    const auto sc = demo_scenario(0.0, 1);
    const auto data = simulate_measurements(sc, 1);
    for (double w : {1.0, 104.8, 1e4}) {
        const auto r = identify_fullpose(sc.model, data, w);
        ASSERT_TRUE(r.converged) << w;
        EXPECT_LT((r.parameters.delta - sc.truth.delta).cwiseAbs().maxCoeff(), 1e-9) << w;
    }
    EXPECT_THROW(identify_fullpose(sc.model, data, 0.0), Error);
    EXPECT_THROW(identify_fullpose(sc.model, data, -1.0), Error);
}

TEST(Identify, SingleConfigurationIsUnidentifiable) {
    auto sc = demo_scenario(0.0, 1);
    sc.random_configurations = 1;
    try {
        identify_iterative(sc.model, simulate_measurements(sc, 1));
        FAIL() << "expected UnidentifiableError";
    } catch (const UnidentifiableError& e) {
        EXPECT_FALSE(e.combinations().empty());
        EXPECT_NE(std::string(e.what()).find("unidentifiable"), std::string::npos);
    }
}

TEST(Identify, NoiseLeavesResidualAtNoiseLevel) {
    auto sc = demo_scenario(0.05, 1);
    sc.random_configurations = 40;
    const auto r = identify_iterative(sc.model, simulate_measurements(sc, 17));
    ASSERT_TRUE(r.converged);
    // residual dof: 3 m n - 6 of 3 m n
    const double expected = 0.05 * std::sqrt((360.0 - 6.0) / 360.0);
    EXPECT_NEAR(r.parameters.residual_rms, expected, 0.3 * expected);
    const VectorX err = (r.parameters.delta - sc.truth.delta).cwiseQuotient(r.parameters.uncertainty());
    EXPECT_LT(err.cwiseAbs().maxCoeff(), 5.0);
}

TEST(Identify, ShiftingTheToolLeavesParametersUnchanged) {
    auto sc = demo_scenario(0.0, 1);
    const auto reference = identify_iterative(sc.model, simulate_measurements(sc, 1));
    const Vector3 shift(15.0, -40.0, 25.0);
    for (auto& u : sc.model.markers) u += shift;
    for (auto& u : sc.truth.tool) u += shift;
    const auto moved = identify_iterative(sc.model, simulate_measurements(sc, 1));
    EXPECT_LT((moved.parameters.delta - reference.parameters.delta).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(StepOne, RecoversTrackerBaseAndTool) {
    const auto sc = base_tool_scenario();
    const auto data = simulate_measurements(sc, 1);
    const auto r = identify_iterative(sc.model, data);
    ASSERT_TRUE(r.converged);
    EXPECT_LT((r.base_tool.base.translation - sc.truth.base.translation).norm(), 1e-8);
    EXPECT_LT(rotation_error(r.base_tool.base, sc.truth.base), 1e-8);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LT((r.base_tool.tool[j] - sc.truth.tool[j]).norm(), 1e-8);
}

TEST(StepOne, FirstStepReducesResidualTenfold) {
    const auto sc = base_tool_scenario();
    const auto data = simulate_measurements(sc, 1);
    CalibrationState s = CalibrationState::nominal(sc.model);
    const double before = point_residual_rms(sc.model, s, data);
    const auto bt = step1_base_tool(sc.model, s, data);
    s.base = bt.base;
    s.tool = bt.tool;
    const double after = point_residual_rms(sc.model, s, data);
    EXPECT_LT(after, 0.1 * before);
}

TEST(StepOne, ExactStateIsAFixedPoint) {
    const auto sc = base_tool_scenario();
    const auto data = simulate_measurements(sc, 1);
    CalibrationState s = CalibrationState::nominal(sc.model);
    s.base = sc.truth.base;
    s.tool = sc.truth.tool;
    const auto bt = step1_base_tool(sc.model, s, data);
    EXPECT_LT((bt.base.translation - sc.truth.base.translation).norm(), 1e-10);
    EXPECT_LT(rotation_error(bt.base, sc.truth.base), 1e-12);
}

TEST(Identify, JointRecoveryOfBaseToolParametersAndCompliance) {
    auto sc = heavy_scenario(0.0, 1);
    for (const char* label : {"a2", "d4", "dq2", "dq3", "dq4", "dq5"})
        sc.model.parameters[static_cast<std::size_t>(sc.model.parameter_index(label))].identify = true;
    sc.truth.delta[sc.model.parameter_index("a2")] = 1.5;
    sc.truth.delta[sc.model.parameter_index("d4")] = -2.0;
    sc.truth.delta[sc.model.parameter_index("dq2")] = 0.05 * kDegree;
    sc.truth.delta[sc.model.parameter_index("dq3")] = -0.03 * kDegree;
    sc.truth.delta[sc.model.parameter_index("dq4")] = 0.1 * kDegree;
    sc.truth.delta[sc.model.parameter_index("dq5")] = -0.08 * kDegree;
    const auto r = identify_iterative(sc.model, simulate_measurements(sc, 1), sc.options);
    ASSERT_TRUE(r.converged) << r.iterations;
    EXPECT_LT((r.parameters.delta - sc.truth.delta).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT((r.parameters.chi - sc.truth.chi).cwiseQuotient(sc.truth.chi).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT((r.base_tool.base.translation - sc.truth.base.translation).norm(), 1e-7);
}

TEST(Identify, ElastostaticFixtureRecoversCompliance) {
    const auto sc = heavy_scenario(0.0, 1);
    const auto data = simulate_measurements(sc, 1);
    EXPECT_EQ(data.size(), 30u);
    const auto r = identify_iterative(sc.model, data, sc.options);
    ASSERT_TRUE(r.converged);
    EXPECT_LT((r.parameters.chi - sc.truth.chi).cwiseQuotient(sc.truth.chi).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((r.base_tool.base.translation - sc.truth.base.translation).norm(), 1e-8);
}

TEST(Identify, RejectsBadOptionsAndData) {
    const auto sc = demo_scenario(0.0, 1);
    const auto data = simulate_measurements(sc, 1);
    IdentifyOptions o;
    o.max_iter = 0;
    EXPECT_THROW(identify_iterative(sc.model, data, o), Error);
    o.max_iter = 5;
    o.tol = 0.0;
    EXPECT_THROW(identify_iterative(sc.model, data, o), Error);
    EXPECT_THROW(identify_iterative(sc.model, MeasurementSet{}), Error);
}

TEST(Identify, IterationLimitReportsNonConvergence) {
    const auto sc = demo_scenario(0.0, 1);
    IdentifyOptions o;
    o.max_iter = 1;
    const auto r = identify_iterative(sc.model, simulate_measurements(sc, 1), o);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 1);
}
