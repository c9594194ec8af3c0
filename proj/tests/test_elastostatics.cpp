#include "ppcal/elastostatics.hpp"
#include "ppcal/experiments.hpp"
#include "ppcal/models.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ppcal;
using testing_support::random_configuration;

namespace {

ManipulatorState loaded(const VectorX& q, const Vector6& w) { return {q, VectorX(), w}; }

VectorX q_with_shoulder(double q2_deg) {
    VectorX q = VectorX::Zero(6);
    q[1] = q2_deg * kDegree;
    q[2] = 0.3;
    q[4] = -0.6;
    return q;
}

}  // namespace

TEST(Compliance, SegmentSelection) {
    const auto m = make_heavy_manipulator();
    const auto& c = m.compliance;
    EXPECT_EQ(c.virtual_joints(), (std::vector<int>{1, 2, 3, 4, 5}));
    auto active_label = [&](double q2_deg) {
        return c.coefficients[static_cast<std::size_t>(c.active(q_with_shoulder(q2_deg))[0])].label;
    };
    EXPECT_EQ(active_label(-0.01), "chi21");
    EXPECT_EQ(active_label(5.0), "chi21");  // top segment is closed
    EXPECT_EQ(active_label(-24.9), "chi21");
    EXPECT_EQ(active_label(-25.1), "chi22");
    EXPECT_EQ(active_label(-56.9), "chi23");
    EXPECT_EQ(active_label(-99.85), "chi24");
    EXPECT_EQ(active_label(-140.0), "chi25");
    EXPECT_EQ(active_label(-145.0), "chi25");
    EXPECT_THROW(c.active(q_with_shoulder(6.0)), OutOfRangeError);
    EXPECT_THROW(c.active(q_with_shoulder(-146.0)), OutOfRangeError);
    // unsegmented joints always use their single coefficient
    const auto a = c.active(q_with_shoulder(-10.0));
    EXPECT_EQ(a[1], 5);
    EXPECT_EQ(a[4], 8);
}

TEST(Compliance, ValidateRejectsGapsAndOverlaps) {
    ComplianceModel c;
    c.coefficients = {{"a", 0, AngleInterval{0.0, 1.0}}, {"b", 0, AngleInterval{1.5, 2.0}}};
    EXPECT_THROW(c.validate(1), Error);
    c.coefficients = {{"a", 0, std::nullopt}, {"b", 0, std::nullopt}};
    EXPECT_THROW(c.validate(1), Error);
    c.coefficients = {{"a", 3, std::nullopt}};
    EXPECT_THROW(c.validate(2), DimensionError);
    c.coefficients = equal_segments("s", 0, -1.0, 1.0, 4);
    EXPECT_NO_THROW(c.validate(1));
}

TEST(Deflections, ExplicitExample) {
    ComplianceModel c;
    c.coefficients = {{"k1", 0, std::nullopt}, {"k2", 1, std::nullopt}};
    c.unit_scale = 1e-3;
    Matrix6X j = Matrix6X::Zero(6, 2);
    j(0, 0) = 2.0;   // joint 1 moves the point along x
    j(5, 1) = 1.0;   // joint 2 rotates about z
    Vector6 w;
    w << 10.0, 0, 0, 0, 0, 500.0;
    VectorX chi(2);
    chi << 0.5, 4.0;
    const VectorX theta = deflections(c, chi, j, w, VectorX::Zero(2));
    EXPECT_NEAR(theta[0], 1e-3 * 0.5 * 20.0, 1e-15);
    EXPECT_NEAR(theta[1], 1e-3 * 4.0 * 500.0, 1e-15);
    EXPECT_THROW(deflections(c, VectorX::Zero(3), j, w, VectorX::Zero(2)), DimensionError);
}

// For a pure force at the flange origin the virtual work gives tau_k = F . dp/dtheta_k.
TEST(Deflections, MatchVirtualWorkWithDifferenceJacobian) {
    const auto m = make_heavy_manipulator();
    const VectorX chi = testing_support::reference_compliance();
    const RigidTransform base = testing_support::tracker_base();
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        const VectorX q = random_configuration(m, rng);
        Vector6 w = Vector6::Zero();
        w.head<3>() = Vector3(100.0, -300.0, -2452.5);
        const VectorX theta = compute_deflections(m, loaded(q, w), m.nominal(), base, chi);
        const Matrix3X jd = difference_jacobian_elastic(m, loaded(q, Vector6::Zero()), m.nominal(), base,
                                                        Vector3::Zero());
        const auto active = m.compliance.active(q);
        VectorX expected(theta.size());
        for (Eigen::Index k = 0; k < theta.size(); ++k)
            expected[k] = 1e-9 * chi[active[static_cast<std::size_t>(k)]] * jd.col(k).dot(w.head<3>());
        EXPECT_LT((theta - expected).norm(), 1e-6 * expected.norm());
    }
}

TEST(Deflections, PayloadGivesMillimetreDeflections) {
    auto sc = testing_support::heavy_scenario(0.0, 1);
    const auto configs = testing_support::heavy_configurations();
    double largest = 0.0;
    for (const auto& q : configs) {
        const RigidTransform flange =
            forward_kinematics(sc.model, loaded(q, Vector6::Zero()), sc.model.nominal(), sc.truth.base, {}).flange;
        const Vector6 w = gravity_wrench(*sc.load, flange);
        const auto unloaded = exact_points(sc.model, sc.truth, q, Vector6::Zero());
        const auto deflected = exact_points(sc.model, sc.truth, q, w);
        for (std::size_t j = 0; j < 3; ++j) largest = std::max(largest, (deflected[j] - unloaded[j]).norm());
    }
    EXPECT_GT(largest, 1.0);
    EXPECT_LT(largest, 20.0);
}

TEST(ElasticRegressor, ReproducesLinearDeflection) {
    const auto m = make_heavy_manipulator();
    const VectorX chi = testing_support::reference_compliance();
    std::mt19937_64 rng(4);
    for (int i = 0; i < 50; ++i) {
        const VectorX q = random_configuration(m, rng);
        Vector6 w;
        w << 50.0, -20.0, -2452.5, 1e4, -3e4, 5e3;
        const auto st = loaded(q, w);
        const VectorX theta = compute_deflections(m, st, m.nominal(), RigidTransform{}, chi);
        for (const auto& u : m.markers) {
            const Matrix3X a = elastic_regressor(m, st, m.nominal(), RigidTransform{}, u);
            const Matrix3X jt = jacobian_elastic(m, st, m.nominal(), RigidTransform{}, u);
            const Vector3 lhs = a * chi;
            const Vector3 rhs = jt * theta;
            EXPECT_LE((lhs - rhs).norm(), 1e-12 * std::max(1.0, rhs.norm()));
        }
    }
}

TEST(ElasticRegressor, InactiveSegmentsHaveZeroColumns) {
    const auto m = make_heavy_manipulator();
    Vector6 w;
    w << 0, 0, -2452.5, 0, 0, 0;
    const VectorX q = q_with_shoulder(-70.0);
    const Matrix3X a = elastic_regressor(m, loaded(q, w), m.nominal(), RigidTransform{}, m.markers[0]);
    EXPECT_EQ(a.cols(), 9);
    for (int c : {0, 1, 3, 4}) EXPECT_EQ(a.col(c).norm(), 0.0);
    EXPECT_GT(a.col(2).norm(), 0.0);
    const Matrix3X unloaded = elastic_regressor(m, loaded(q, Vector6::Zero()), m.nominal(), RigidTransform{},
                                                m.markers[0]);
    EXPECT_EQ(unloaded.norm(), 0.0);
}

TEST(ElasticRegressor, LinearInLoad) {
    const auto m = make_heavy_manipulator();
    Vector6 w;
    w << 10, 20, -300, 400, 500, -600;
    const VectorX q = q_with_shoulder(-30.0);
    const Matrix3X a1 = elastic_regressor(m, loaded(q, w), m.nominal(), RigidTransform{}, m.markers[1]);
    const Matrix3X a2 = elastic_regressor(m, loaded(q, 2.5 * w), m.nominal(), RigidTransform{}, m.markers[1]);
    EXPECT_LT((a2 - 2.5 * a1).norm(), 1e-12 * a2.norm());
}

TEST(ElasticRegressor, PredictsSmallDeflectionToSecondOrder) {
    const auto m = make_heavy_manipulator();
    const VectorX chi = testing_support::reference_compliance();
    VectorX q = q_with_shoulder(-40.0);
    Vector6 w = Vector6::Zero();
    w[2] = -245.25;  // 25 kg
    ManipulatorState st = loaded(q, w);
    st.theta = compute_deflections(m, st, m.nominal(), RigidTransform{}, chi);
    const Vector3 u = m.markers[2];
    const std::span<const Vector3> tool(&u, 1);
    const Vector3 moved = forward_kinematics(m, st, m.nominal(), RigidTransform{}, tool).markers[0];
    const Vector3 still = forward_kinematics(m, loaded(q, w), m.nominal(), RigidTransform{}, tool).markers[0];
    const Vector3 linear = elastic_regressor(m, loaded(q, w), m.nominal(), RigidTransform{}, u) * chi;
    EXPECT_LT(((moved - still) - linear).norm(), 1e-3 * linear.norm());
}
