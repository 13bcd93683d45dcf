#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tac {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Vec2 = Eigen::Vector2d;

}  // namespace tac
