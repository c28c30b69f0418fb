// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

#include "localdeform/graph.hpp"

namespace localdeform {

struct NormalizedFactors {
  Eigen::MatrixXd factors;
  Eigen::MatrixXd coefficients;
  std::vector<Eigen::Index> permutation;  // output column -> input column
};

/// Scale each coefficient row to standard deviation one (rows with zero
/// deviation keep scale one), compensate in the factors so the product is
/// unchanged, and sort factors by non-increasing l2 norm. All-zero
/// coefficient rows sort last; remaining ties break by original index.
NormalizedFactors normalize_and_order(const Eigen::MatrixXd& factors,
                                      const Eigen::MatrixXd& coefficients);

struct SplitFactors {
  Eigen::MatrixXd factors;
  Eigen::MatrixXd coefficients;
  std::vector<Eigen::Index> source;  // output column -> originating column
};

/// Vertices whose coordinate triple in the column has any entry with
/// magnitude above the threshold.
std::vector<Eigen::Index> active_vertices(const Eigen::VectorXd& factor,
                                          Eigen::Index n_vertices,
                                          double threshold = 0.0);

/// Split every factor with disconnected support into one factor per
/// connected component of its activation graph (edges with at least one
/// active endpoint). Rows are copied verbatim and the coefficient row is
/// duplicated, so the factorization product is preserved exactly.
/// Components without active vertices are dropped.
SplitFactors split_factors(const Eigen::MatrixXd& factors,
                           const Eigen::MatrixXd& coefficients,
                           const VertexGraph& graph, double threshold = 0.0);

/// Keep the first min(M, count) factors and coefficient rows.
void truncate_to_count(Eigen::MatrixXd& factors,
                       Eigen::MatrixXd& coefficients,
                       Eigen::Index factor_count);

}  // namespace localdeform
