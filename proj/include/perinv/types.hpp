#pragma once

#include <Eigen/Dense>

namespace perinv {

// Points and vectors are stored as rows throughout the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using IntVector = Eigen::VectorXi;

}  // namespace perinv
