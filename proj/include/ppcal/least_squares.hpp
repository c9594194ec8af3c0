/**
 * @file least_squares.hpp
 * @brief Linear least squares through the normal equations, with monitoring.
 *
 * Columns are equilibrated to unit norm before the condition number of the
 * normal matrix is measured, so the number reflects identifiability rather than
 * the mix of mm and rad units. Columns with norm below `column_floor` are
 * dropped and reported. Above `max_condition` the problem is refused and the
 * near-null directions are reported; between `fallback_condition` and
 * `max_condition` the stacked system is solved by column-pivoting QR instead
 * of Cholesky.
 */
#pragma once

#include "ppcal/errors.hpp"
#include "ppcal/transform.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace ppcal {

struct LeastSquaresOptions {
    double column_floor = 1e-12;
    double fallback_condition = 1e8;
    double max_condition = 1e10;
};

struct LeastSquaresSolution {
    VectorX x;                  ///< zero for excluded columns
    MatrixX covariance;         ///< sigma^2 (B^T B)^-1, zero rows/cols for excluded columns
    std::vector<int> excluded;  ///< columns dropped for vanishing norm
    double condition = 1.0;     ///< of the equilibrated normal matrix
    double residual_rms = 0.0;  ///< sqrt(RSS / rows) of the linear fit
    double variance = 0.0;      ///< RSS / (rows - unknowns)
    bool used_qr = false;
};

namespace detail {

inline std::string describe_direction(const VectorX& v, const std::vector<std::string>& labels) {
    std::string out;
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (std::abs(v[k]) < 1e-3 * peak) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.3g*", out.empty() ? "" : (v[k] < 0 ? " - " : " + "),
                      out.empty() ? v[k] : std::abs(v[k]));
        out += buf;
        out += static_cast<std::size_t>(k) < labels.size() ? labels[k] : "x" + std::to_string(k);
    }
    return out;
}

}  // namespace detail

/// Solves min |B x - r|^2. `labels` name the columns for error reports.
inline LeastSquaresSolution solve_least_squares(const MatrixX& b, const VectorX& r,
                                                const std::vector<std::string>& labels = {},
                                                const LeastSquaresOptions& options = {}) {
    if (b.rows() != r.size()) throw DimensionError("regressor and residual row counts differ");
    const Eigen::Index cols = b.cols();
    LeastSquaresSolution sol;
    sol.x = VectorX::Zero(cols);
    sol.covariance = MatrixX::Zero(cols, cols);

    std::vector<int> kept;
    for (Eigen::Index k = 0; k < cols; ++k) {
        if (b.col(k).norm() < options.column_floor)
            sol.excluded.push_back(static_cast<int>(k));
        else
            kept.push_back(static_cast<int>(k));
    }
    const auto p = static_cast<Eigen::Index>(kept.size());
    if (p == 0) {
        sol.residual_rms = r.size() ? std::sqrt(r.squaredNorm() / r.size()) : 0.0;
        return sol;
    }
    if (b.rows() < p)
        throw UnidentifiableError("only " + std::to_string(b.rows()) + " equations for " + std::to_string(p) +
                                      " unknowns",
                                  {});

    VectorX scale(p);
    MatrixX bs(b.rows(), p);
    std::vector<std::string> kept_labels;
    for (Eigen::Index k = 0; k < p; ++k) {
        scale[k] = b.col(kept[k]).norm();
        bs.col(k) = b.col(kept[k]) / scale[k];
        kept_labels.push_back(static_cast<std::size_t>(kept[k]) < labels.size() ? labels[kept[k]]
                                                                                 : "x" + std::to_string(kept[k]));
    }

    const MatrixX normal = bs.transpose() * bs;
    Eigen::SelfAdjointEigenSolver<MatrixX> eig(normal);
    const VectorX& ev = eig.eigenvalues();
    sol.condition = ev[0] > 0.0 ? ev[p - 1] / ev[0] : std::numeric_limits<double>::infinity();

    if (!(sol.condition <= options.max_condition)) {
        std::vector<std::string> directions;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (ev[k] * options.max_condition > ev[p - 1]) break;
            VectorX v = eig.eigenvectors().col(k).cwiseQuotient(scale);
            v /= v.norm();
            directions.push_back(detail::describe_direction(v, kept_labels));
        }
        std::string what = "normal matrix is rank deficient (condition " + std::to_string(sol.condition) +
                           "); unidentifiable combination";
        for (const auto& d : directions) what += " [" + d + "]";
        throw UnidentifiableError(what, directions);
    }

    VectorX y;
    const VectorX rhs = bs.transpose() * r;
    Eigen::LLT<MatrixX> llt(normal);
    if (sol.condition > options.fallback_condition || llt.info() != Eigen::Success) {
        y = bs.colPivHouseholderQr().solve(r);
        sol.used_qr = true;
    } else {
        y = llt.solve(rhs);
    }
    const MatrixX normal_inv = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

    const VectorX post = r - bs * y;
    const double rss = post.squaredNorm();
    sol.residual_rms = std::sqrt(rss / static_cast<double>(b.rows()));
    sol.variance = b.rows() > p ? rss / static_cast<double>(b.rows() - p) : 0.0;
    for (Eigen::Index a = 0; a < p; ++a) {
        sol.x[kept[a]] = y[a] / scale[a];
        for (Eigen::Index c = 0; c < p; ++c)
            sol.covariance(kept[a], kept[c]) = sol.variance * normal_inv(a, c) / (scale[a] * scale[c]);
    }
    return sol;
}

}  // namespace ppcal
