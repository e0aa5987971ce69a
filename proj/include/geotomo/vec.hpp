#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace geotomo {

// Dimension cap for stack-allocated vectors.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Volume of the unit n-ball.
inline double unit_ball_volume(int n) {
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Orthonormal basis of u-perp, returned as the columns of an n x (n-1) matrix.
/// Built by Gram-Schmidt starting from the coordinate axes least aligned with u,
/// so u = e_n gives e_1..e_{n-1}.
Mat complement_basis(const Vec& u);

}  // namespace geotomo
