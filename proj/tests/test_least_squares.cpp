#include "ppcal/least_squares.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ppcal;

namespace {

MatrixX random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    MatrixX m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
    return m;
}

}  // namespace

TEST(LeastSquares, AgreesWithHouseholderQr) {
    MatrixX b = random_matrix(40, 6, 1);
    b.col(2) *= 1e3;  // badly scaled column, equilibration should cope
    const VectorX r = random_matrix(40, 1, 2);
    const auto sol = solve_least_squares(b, r);
    const VectorX ref = b.householderQr().solve(r);
    EXPECT_LT((sol.x - ref).norm(), 1e-10 * ref.norm());
    EXPECT_FALSE(sol.used_qr);
    EXPECT_TRUE(sol.excluded.empty());
}

TEST(LeastSquares, ResidualIsOrthogonalToColumns) {
    const MatrixX b = random_matrix(30, 5, 3);
    const VectorX r = random_matrix(30, 1, 4);
    const auto sol = solve_least_squares(b, r);
    const VectorX post = r - b * sol.x;
    EXPECT_LT((b.transpose() * post).norm(), 1e-10 * b.norm() * r.norm());
    EXPECT_NEAR(sol.residual_rms, std::sqrt(post.squaredNorm() / 30.0), 1e-12);
    EXPECT_NEAR(sol.variance, post.squaredNorm() / 25.0, 1e-12);
}

TEST(LeastSquares, CovarianceIsScaledInverseNormalMatrix) {
    const MatrixX b = random_matrix(25, 4, 5);
    const VectorX r = random_matrix(25, 1, 6);
    const auto sol = solve_least_squares(b, r);
    const MatrixX expected = sol.variance * (b.transpose() * b).inverse();
    EXPECT_LT((sol.covariance - expected).norm(), 1e-10 * expected.norm());
}

TEST(LeastSquares, ExactSystemIsSolvedExactly) {
    const MatrixX b = random_matrix(12, 3, 7);
    const VectorX x(Eigen::Vector3d(1.5, -2.0, 0.25));
    const auto sol = solve_least_squares(b, b * x);
    EXPECT_LT((sol.x - x).norm(), 1e-12);
    EXPECT_LT(sol.residual_rms, 1e-12);
}

TEST(LeastSquares, VanishingColumnIsExcludedAndReported) {
    MatrixX b = random_matrix(20, 4, 8);
    b.col(1).setZero();
    const VectorX r = random_matrix(20, 1, 9);
    const auto sol = solve_least_squares(b, r, {"a", "b", "c", "d"});
    ASSERT_EQ(sol.excluded, std::vector<int>{1});
    EXPECT_EQ(sol.x[1], 0.0);
    EXPECT_EQ(sol.covariance.row(1).norm(), 0.0);
    MatrixX reduced(20, 3);
    reduced << b.col(0), b.col(2), b.col(3);
    const VectorX ref = reduced.householderQr().solve(r);
    EXPECT_LT((Eigen::Vector3d(sol.x[0], sol.x[2], sol.x[3]) - ref).norm(), 1e-10);
}

TEST(LeastSquares, RankDeficiencyNamesTheCombination) {
    MatrixX b = random_matrix(20, 3, 10);
    b.col(2) = 2.0 * b.col(0);
    const VectorX r = random_matrix(20, 1, 11);
    try {
        solve_least_squares(b, r, {"alpha", "beta", "gamma"});
        FAIL() << "expected UnidentifiableError";
    } catch (const UnidentifiableError& e) {
        ASSERT_EQ(e.combinations().size(), 1u);
        const auto& c = e.combinations()[0];
        EXPECT_NE(c.find("alpha"), std::string::npos);
        EXPECT_NE(c.find("gamma"), std::string::npos);
        EXPECT_EQ(c.find("beta"), std::string::npos);
    }
}

TEST(LeastSquares, IllConditionedSystemFallsBackToQr) {
    MatrixX b = random_matrix(20, 3, 12);
    b.col(2) = b.col(0) + 2e-5 * b.col(1).cwiseProduct(b.col(1));
    const VectorX x(Eigen::Vector3d(1.0, 2.0, 3.0));
    const auto sol = solve_least_squares(b, b * x);
    EXPECT_GT(sol.condition, 1e8);
    EXPECT_LT(sol.condition, 1e10);
    EXPECT_TRUE(sol.used_qr);
    EXPECT_LT((sol.x - x).norm(), 1e-4);
}

TEST(LeastSquares, RejectsBadShapes) {
    EXPECT_THROW(solve_least_squares(MatrixX::Ones(4, 2), VectorX::Ones(3)), DimensionError);
    EXPECT_THROW(solve_least_squares(random_matrix(2, 3, 1), VectorX::Ones(2)), UnidentifiableError);
}
