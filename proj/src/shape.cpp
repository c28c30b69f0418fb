// SPDX-License-Identifier: Apache-2.0
#include "localdeform/shape.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "localdeform/errors.hpp"

namespace localdeform {

Eigen::VectorXd vectorize(const Eigen::MatrixXd& shape) {
  if (shape.cols() != 3) {
    throw DimensionError("vectorize: shape must have 3 columns, got " +
                         std::to_string(shape.cols()));
  }
  const Eigen::Index n = shape.rows();
  Eigen::VectorXd out(3 * n);
  out.segment(0, n) = shape.col(0);
  out.segment(n, n) = shape.col(1);
  out.segment(2 * n, n) = shape.col(2);
  return out;
}

Eigen::MatrixXd devectorize(const Eigen::VectorXd& stacked) {
  if (stacked.size() % 3 != 0) {
    throw DimensionError("devectorize: length must be divisible by 3, got " +
                         std::to_string(stacked.size()));
  }
  const Eigen::Index n = stacked.size() / 3;
  Eigen::MatrixXd out(n, 3);
  out.col(0) = stacked.segment(0, n);
  out.col(1) = stacked.segment(n, n);
  out.col(2) = stacked.segment(2 * n, n);
  return out;
}

Eigen::VectorXd ShapeSet::to_original(const Eigen::VectorXd& deviation) const {
  return vectorize(mean_shape) + scale * deviation;
}

ShapeSet prepare_shape_set(const std::vector<Eigen::MatrixXd>& raw_shapes) {
  const Eigen::Index k = static_cast<Eigen::Index>(raw_shapes.size());
  if (k < 2) {
    throw DimensionError("prepare_shape_set: need at least 2 shapes, got " +
                         std::to_string(k));
  }
  const Eigen::Index n = raw_shapes.front().rows();
  if (n < 2) {
    throw DimensionError("prepare_shape_set: need at least 2 vertices, got " +
                         std::to_string(n));
  }
  for (const auto& shape : raw_shapes) {
    if (shape.rows() != n || shape.cols() != 3) {
      throw DimensionError(
          "prepare_shape_set: all shapes must be " + std::to_string(n) +
          "x3; got " + std::to_string(shape.rows()) + "x" +
          std::to_string(shape.cols()));
    }
    if (!shape.allFinite()) {
      throw NumericError("prepare_shape_set: non-finite coordinates");
    }
  }

  ShapeSet set;
  set.vertex_count = n;
  set.shape_count = k;
  set.shapes = raw_shapes;
  set.mean_shape = Eigen::MatrixXd::Zero(n, 3);
  for (const auto& shape : raw_shapes) set.mean_shape += shape;
  set.mean_shape /= static_cast<double>(k);

  set.data.resize(3 * n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    set.data.col(j) = vectorize(raw_shapes[static_cast<std::size_t>(j)] -
                                set.mean_shape);
  }

  // Sample standard deviation over all 3NK entries; the grand mean is zero
  // by construction, it is subtracted anyway to keep the statistic honest.
  const double count = static_cast<double>(set.data.size());
  const double grand_mean = set.data.sum() / count;
  const double variance =
      (set.data.array() - grand_mean).square().sum() / (count - 1.0);
  const double sd = std::sqrt(variance);
  if (!(sd > 0.0)) {
    throw DegenerateInputError(
        "prepare_shape_set: zero variance (all shapes identical)");
  }
  set.scale = sd;
  set.data /= sd;
  return set;
}

Eigen::VectorXd deform(const DeformationModel& model,
                       const Eigen::VectorXd& alpha, bool denormalize) {
  if (alpha.size() != model.factor_count()) {
    throw DimensionError("deform: alpha has length " +
                         std::to_string(alpha.size()) + ", model has " +
                         std::to_string(model.factor_count()) + " factors");
  }
  Eigen::VectorXd deviation = model.factors * alpha;
  if (!denormalize) return deviation;
  return model.mean + model.scale * deviation;
}

Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& basis,
                                 const Eigen::VectorXd& x) {
  if (basis.rows() != x.size()) {
    throw DimensionError("fit_coefficients: basis has " +
                         std::to_string(basis.rows()) + " rows, x has " +
                         std::to_string(x.size()));
  }
  return basis.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(x);
}

Eigen::MatrixXd fit_coefficient_matrix(const Eigen::MatrixXd& basis,
                                       const Eigen::MatrixXd& xs) {
  if (basis.rows() != xs.rows()) {
    throw DimensionError("fit_coefficients: basis has " +
                         std::to_string(basis.rows()) + " rows, data has " +
                         std::to_string(xs.rows()));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.solve(xs);
}

}  // namespace localdeform
