#include "ppcal/transform.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ppcal;

TEST(Skew, MatchesExplicitMatrix) {
    Matrix3 expected;
    expected << 0, -3, 2,
                3, 0, -1,
                -2, 1, 0;
    EXPECT_EQ(skew(Vector3(1, 2, 3)), expected);
}

TEST(Skew, ReproducesCrossProductAndIsAntisymmetric) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    for (int i = 0; i < 50; ++i) {
        const Vector3 r(n(rng), n(rng), n(rng)), v(n(rng), n(rng), n(rng));
        EXPECT_LT((skew(r) * v - r.cross(v)).norm(), 1e-14);
        EXPECT_LT((skew(r).transpose() + skew(r)).norm(), 1e-15);
        EXPECT_LT((skew(r) * r).norm(), 1e-14);
    }
}

TEST(Rotation, SmallAngleLinearizationIsSecondOrder) {
    const Vector3 dir = Vector3(0.3, -0.5, 0.8).normalized();
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const Matrix3 exact = rotation_from_vector(dir * eps);
        const double err = (exact - (Matrix3::Identity() + skew(dir * eps))).norm();
        EXPECT_LT(err, eps * eps);
        EXPECT_GT(err, 0.1 * eps * eps);
    }
}

TEST(Rotation, VectorRoundTrip) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 50; ++i) {
        const Vector3 r(u(rng), u(rng), u(rng));
        EXPECT_LT((rotation_vector(rotation_from_vector(r)) - r).norm(), 1e-12);
    }
    EXPECT_LT(rotation_vector(Matrix3::Identity()).norm(), 1e-15);
}

TEST(Rotation, AxisRotationQuarterTurnAboutZ) {
    const Matrix3 r = axis_rotation(Vector3::UnitZ(), M_PI / 2);
    EXPECT_LT((r * Vector3::UnitX() - Vector3::UnitY()).norm(), 1e-15);
}

TEST(Rotation, OrthonormalizeRestoresProperRotation) {
    const Matrix3 r = rotation_from_vector(Vector3(0.2, -0.1, 0.4));
    const Matrix3 perturbed = r + 1e-3 * skew(Vector3(1, 1, 1)) * r + 1e-4 * Matrix3::Ones();
    const Matrix3 fixed = orthonormalize(perturbed);
    EXPECT_LT((fixed.transpose() * fixed - Matrix3::Identity()).norm(), 1e-14);
    EXPECT_NEAR(fixed.determinant(), 1.0, 1e-14);
    EXPECT_LT((fixed - r).norm(), 1e-2);
    // a rotation is its own polar factor
    EXPECT_LT((orthonormalize(r) - r).norm(), 1e-14);
}

TEST(Rotation, OrthonormalizeRejectsReflection) {
    Matrix3 m = Matrix3::Identity();
    m(2, 2) = -1.0;
    EXPECT_NEAR(orthonormalize(m).determinant(), 1.0, 1e-14);
}

TEST(Rotation, FixedAxisAnglesRoundTrip) {
    const Vector3 phi(0.1, -0.4, 2.0);
    const Matrix3 r = rotation_from_fixed_xyz(phi);
    const Matrix3 expected = Eigen::AngleAxisd(phi.z(), Vector3::UnitZ()).toRotationMatrix() *
                             Eigen::AngleAxisd(phi.y(), Vector3::UnitY()).toRotationMatrix() *
                             Eigen::AngleAxisd(phi.x(), Vector3::UnitX()).toRotationMatrix();
    EXPECT_LT((r - expected).norm(), 1e-15);
    EXPECT_LT((fixed_xyz_angles(r) - phi).norm(), 1e-14);
}

TEST(RigidTransform, CompositionAndInverseMatchHomogeneousMatrices) {
    const RigidTransform a = RigidTransform::from_vector(Vector3(1, 2, 3), Vector3(0.1, 0.2, -0.3));
    const RigidTransform b = RigidTransform::from_vector(Vector3(-4, 0.5, 2), Vector3(-0.7, 0.0, 0.2));
    EXPECT_LT(((a * b).matrix() - a.matrix() * b.matrix()).norm(), 1e-13);
    EXPECT_LT((a.inverse().matrix() - a.matrix().inverse()).norm(), 1e-13);
    const Vector3 p(7, -8, 9);
    const Eigen::Vector4d h = a.matrix() * Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0);
    EXPECT_LT((a.apply(p) - h.head<3>()).norm(), 1e-13);
    EXPECT_LT(((a * a.inverse()).matrix() - Eigen::Matrix4d::Identity()).norm(), 1e-14);
}
