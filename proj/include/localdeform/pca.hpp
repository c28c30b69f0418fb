// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

namespace localdeform {

/// The M most dominant eigenvectors of the sample covariance
/// X X^T / (K - 1), computed from the singular decomposition of the data.
/// Columns are orthonormal, ordered by non-increasing eigenvalue, and sign
/// fixed so the largest-magnitude entry of each column is positive. Requests
/// beyond the numerical rank are truncated with a warning.
Eigen::MatrixXd pca(const Eigen::MatrixXd& data, Eigen::Index factor_count);

}  // namespace localdeform
