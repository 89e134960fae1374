#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace akvf {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

} // namespace akvf
