#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dssc {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

// Cluster index per data point.
using Labels = std::vector<int>;

}  // namespace dssc
