// SPDX-License-Identifier: Apache-2.0
#include "localdeform/pca.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "localdeform/errors.hpp"
#include "localdeform/log.hpp"

namespace localdeform {

namespace {

// Largest-magnitude entry positive; first occurrence wins on ties.
void fix_column_signs(Eigen::MatrixXd& columns) {
  for (Eigen::Index m = 0; m < columns.cols(); ++m) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      const double mag = std::abs(columns(i, m));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (columns(arg, m) < 0.0) columns.col(m) = -columns.col(m);
  }
}

}  // namespace

Eigen::MatrixXd pca(const Eigen::MatrixXd& data, Eigen::Index factor_count) {
  if (factor_count < 1) {
    throw DimensionError("pca: factor count must be positive");
  }
  if (factor_count > std::min(data.rows(), data.cols())) {
    throw DimensionError("pca: factor count " +
                         std::to_string(factor_count) + " exceeds min(" +
                         std::to_string(data.rows()) + ", " +
                         std::to_string(data.cols()) + ")");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU);
  const auto& singular = svd.singularValues();
  const double cutoff = singular.size() > 0
                            ? singular[0] * 1e-12 *
                                  static_cast<double>(
                                      std::max(data.rows(), data.cols()))
                            : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < singular.size(); ++i) {
    if (singular[i] > cutoff) ++rank;
  }
  Eigen::Index kept = factor_count;
  if (kept > rank) {
    log_warning("pca: requested " + std::to_string(factor_count) +
                " factors but the data rank is " + std::to_string(rank) +
                "; truncating");
    kept = rank;
  }
  Eigen::MatrixXd factors = svd.matrixU().leftCols(kept);
  fix_column_signs(factors);
  return factors;
}

}  // namespace localdeform
