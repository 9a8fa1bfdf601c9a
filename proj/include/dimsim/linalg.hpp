#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dimsim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;

}  // namespace dimsim
