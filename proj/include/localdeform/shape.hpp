// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

namespace localdeform {

/// Stack an N x 3 coordinate matrix into a 3N vector: rows 1..N hold the
/// x coordinates, N+1..2N the y coordinates, 2N+1..3N the z coordinates.
Eigen::VectorXd vectorize(const Eigen::MatrixXd& shape);

/// Inverse of vectorize.
Eigen::MatrixXd devectorize(const Eigen::VectorXd& stacked);

// A prepared training set: K homologous shapes of N vertices, centred at
// their mean and globally scaled so that the sample standard deviation of
// all 3NK entries of the data matrix is one. The original units are
// recoverable through mean_shape and scale.
struct ShapeSet {
  Eigen::Index vertex_count = 0;               // N
  Eigen::Index shape_count = 0;                // K
  std::vector<Eigen::MatrixXd> shapes;         // original units, N x 3 each
  Eigen::MatrixXd mean_shape;                  // N x 3, original units
  Eigen::MatrixXd data;                        // 3N x K, centred and scaled
  double scale = 1.0;                          // std of the centred stack

  /// Shape k in original units reconstructed from a normalized deviation.
  Eigen::VectorXd to_original(const Eigen::VectorXd& deviation) const;
};

/// Centre raw shapes at their mean and normalize the global standard
/// deviation. Throws DimensionError on mismatched vertex counts and
/// DegenerateInputError when all shapes are identical.
ShapeSet prepare_shape_set(const std::vector<Eigen::MatrixXd>& raw_shapes);

// Linear deformation model y(alpha) = mean + scale * factors * alpha.
// Factors and coefficients live in the normalized data space of the
// training ShapeSet; mean and scale carry the original units.
struct DeformationModel {
  Eigen::VectorXd mean;           // 3N, original units
  Eigen::MatrixXd factors;        // 3N x M
  Eigen::MatrixXd coefficients;   // M x K (training weights)
  double scale = 1.0;

  Eigen::Index factor_count() const { return factors.cols(); }
  Eigen::Index point_dimension() const { return factors.rows(); }
};

/// Deformed shape for weight vector alpha. With denormalize the result is in
/// original units (mean + scale * factors * alpha); otherwise it is the
/// normalized deviation factors * alpha.
Eigen::VectorXd deform(const DeformationModel& model,
                       const Eigen::VectorXd& alpha, bool denormalize = true);

/// Least-squares fit of basis weights: argmin_a ||basis a - x||_2,
/// minimum-norm when basis is rank deficient.
Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& basis,
                                 const Eigen::VectorXd& x);

/// Column-wise variant reusing a single decomposition of basis.
Eigen::MatrixXd fit_coefficient_matrix(const Eigen::MatrixXd& basis,
                                       const Eigen::MatrixXd& xs);

}  // namespace localdeform
