// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "localdeform/factor_post.hpp"
#include "localdeform/kernel.hpp"
#include "localdeform/shape.hpp"
#include "localdeform/solver.hpp"

namespace localdeform {

// End-to-end training options. Weight fields carry an auto-resolution
// convention: negative penalty weights (and non-positive lambda / lambda_a)
// are replaced by the size-dependent defaults of the problem being solved,
// so cross-validation folds resolve against their own dimensions.
struct TrainOptions {
  SolverConfig solver;
  RegularizerWeights weights{-1.0, -1.0, -1.0, -1.0, -1.0, -1.0};
  bool kernelized = false;
  KernelConfig kernel;
  double split_threshold = 0.0;
};

/// Apply the auto-resolution convention against concrete problem sizes.
RegularizerWeights resolve_weights(RegularizerWeights weights,
                                   Eigen::Index n_vertices,
                                   Eigen::Index n_columns,
                                   Eigen::Index factor_count,
                                   Eigen::Index edge_count);

struct TrainedModel {
  DeformationModel model;
  SolverTrace trace;
  RegularizerWeights resolved_weights;
};

/// Factorize (plain or kernelized), split factors into connected support
/// regions, normalize and order, truncate to the requested factor count.
/// A factorization that collapses entirely keeps one zero factor so the
/// model stays well-formed.
TrainedModel train_model(const ShapeSet& set, const VertexGraph& graph,
                         const TrainOptions& options);

}  // namespace localdeform
