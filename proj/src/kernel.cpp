// SPDX-License-Identifier: Apache-2.0
#include "localdeform/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "localdeform/errors.hpp"
#include "localdeform/shape.hpp"

namespace localdeform {

Eigen::MatrixXd kernelized_covariance(const Eigen::MatrixXd& data,
                                      const Eigen::MatrixXd& d_euc,
                                      double bandwidth) {
  if (!(bandwidth > 0.0)) {
    throw ValidationError("kernelized_covariance: bandwidth must be > 0");
  }
  const Eigen::Index n = d_euc.rows();
  if (d_euc.cols() != n) {
    throw DimensionError("kernelized_covariance: distance matrix not square");
  }
  if (data.rows() != 3 * n) {
    throw DimensionError("kernelized_covariance: data rows " +
                         std::to_string(data.rows()) + " do not match 3N = " +
                         std::to_string(3 * n));
  }

  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  Eigen::MatrixXd gram = data * data.transpose();
  const double gram_max = gram.cwiseAbs().maxCoeff();
  if (gram_max > 0.0) kernel = gram / gram_max;

  const double d_max = d_euc.cwiseAbs().maxCoeff();
  Eigen::MatrixXd spatial(n, n);
  if (d_max > 0.0) {
    const double denom = 2.0 * bandwidth * d_max;
    spatial = (-(d_euc / denom).array().square()).exp();
  } else {
    spatial.setOnes();
  }
  // symmetrize against rounding in the elementwise evaluation
  spatial = ((spatial + spatial.transpose()) / 2.0).eval();
  for (int block = 0; block < 3; ++block) {
    kernel.block(block * n, block * n, n, n) += spatial;
  }
  kernel = ((kernel + kernel.transpose()) / 2.0).eval();
  return kernel;
}

Eigen::MatrixXd kpca(const Eigen::MatrixXd& kernel,
                     Eigen::Index factor_count) {
  const Eigen::Index dim = kernel.rows();
  if (kernel.cols() != dim) {
    throw DimensionError("kpca: kernel matrix must be square");
  }
  if (factor_count < 1 || factor_count > dim) {
    throw DimensionError("kpca: factor count outside [1, dim]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel);
  if (solver.info() != Eigen::Success) {
    throw NumericError("kpca: eigendecomposition failed");
  }
  // Eigen returns ascending eigenvalues; take the trailing columns reversed.
  Eigen::MatrixXd factors(dim, factor_count);
  for (Eigen::Index m = 0; m < factor_count; ++m) {
    factors.col(m) = solver.eigenvectors().col(dim - 1 - m);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double mag = std::abs(factors(i, m));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (factors(arg, m) < 0.0) factors.col(m) = -factors.col(m);
  }
  return factors;
}

FactorizationResult solve_kernelized(const Eigen::MatrixXd& data,
                                     const Eigen::MatrixXd& d_euc,
                                     const IncidenceOperator& incidence,
                                     const RegularizerWeights& weights,
                                     const SolverConfig& solver_config,
                                     const KernelConfig& kernel_config) {
  const Eigen::MatrixXd kernel =
      kernelized_covariance(data, d_euc, kernel_config.bandwidth);
  FactorizationResult surrogate =
      solve(kernel, incidence, weights, solver_config);
  FactorizationResult result;
  result.factors = std::move(surrogate.factors);
  result.trace = std::move(surrogate.trace);
  // The surrogate coefficients weight the kernel columns; the data
  // coefficients are recovered by least squares on the actual shapes.
  result.coefficients = fit_coefficient_matrix(result.factors, data);
  return result;
}

}  // namespace localdeform
