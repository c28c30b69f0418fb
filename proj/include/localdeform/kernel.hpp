// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "localdeform/solver.hpp"

namespace localdeform {

struct KernelConfig {
  double bandwidth = 0.2;  // beta; sampled as 1 / U(1, 10) when searching
  bool use_kernel = true;
};

/// Kernelized covariance for small training sets:
/// K = X X^T / max|X X^T| + I_3 (x) K'_euc with
/// (K'_euc)_ij = exp(-(d_euc(i,j) / (2 beta max d_euc))^2).
/// The matrix is symmetric and 3N x 3N; it is materialized densely.
/// (The degenerate choice K = I_3N would model fully independent vertex
/// movements; the spatial Gaussian term makes nearby vertices co-vary.)
Eigen::MatrixXd kernelized_covariance(const Eigen::MatrixXd& data,
                                      const Eigen::MatrixXd& d_euc,
                                      double bandwidth);

/// The factor_count most dominant eigenvectors of a symmetric PSD matrix,
/// orthonormal, eigenvalue-ordered, sign fixed like pca().
Eigen::MatrixXd kpca(const Eigen::MatrixXd& kernel, Eigen::Index factor_count);

/// Factorize the kernelized covariance instead of the data (for K smaller
/// than the desired number of factors), discard the surrogate coefficients
/// and recover the data coefficients by least squares.
FactorizationResult solve_kernelized(const Eigen::MatrixXd& data,
                                     const Eigen::MatrixXd& d_euc,
                                     const IncidenceOperator& incidence,
                                     const RegularizerWeights& weights,
                                     const SolverConfig& solver_config,
                                     const KernelConfig& kernel_config);

}  // namespace localdeform
