// SPDX-License-Identifier: Apache-2.0
#include "localdeform/pipeline.hpp"

#include "localdeform/graph.hpp"

namespace localdeform {

RegularizerWeights resolve_weights(RegularizerWeights weights,
                                   Eigen::Index n_vertices,
                                   Eigen::Index n_columns,
                                   Eigen::Index factor_count,
                                   Eigen::Index edge_count) {
  const RegularizerWeights defaults =
      default_weights(n_vertices, n_columns, factor_count, edge_count);
  if (weights.lambda <= 0.0) weights.lambda = defaults.lambda;
  if (weights.lambda_a <= 0.0) weights.lambda_a = defaults.lambda_a;
  if (weights.lambda_l1 < 0.0) weights.lambda_l1 = defaults.lambda_l1;
  if (weights.lambda_l2 < 0.0) weights.lambda_l2 = defaults.lambda_l2;
  if (weights.lambda_linf < 0.0) weights.lambda_linf = defaults.lambda_linf;
  if (weights.lambda_graph < 0.0) weights.lambda_graph = defaults.lambda_graph;
  return weights;
}

TrainedModel train_model(const ShapeSet& set, const VertexGraph& graph,
                         const TrainOptions& options) {
  const IncidenceOperator incidence(graph);
  // The kernelized route factorizes the 3N x 3N covariance, so the default
  // size rules see 3N data columns instead of K.
  const Eigen::Index data_columns =
      options.kernelized ? set.data.rows() : set.shape_count;
  const RegularizerWeights weights =
      resolve_weights(options.weights, set.vertex_count, data_columns,
                      options.solver.factor_count, graph.edge_count());

  FactorizationResult factorization =
      options.kernelized
          ? solve_kernelized(set.data, euclidean_distances(set.mean_shape),
                             incidence, weights, options.solver,
                             options.kernel)
          : solve(set.data, incidence, weights, options.solver);

  SplitFactors split =
      split_factors(factorization.factors, factorization.coefficients, graph,
                    options.split_threshold);
  NormalizedFactors ordered =
      normalize_and_order(split.factors, split.coefficients);
  truncate_to_count(ordered.factors, ordered.coefficients,
                    options.solver.factor_count);
  if (ordered.factors.cols() == 0) {
    ordered.factors = Eigen::MatrixXd::Zero(set.data.rows(), 1);
    ordered.coefficients = Eigen::MatrixXd::Zero(1, set.shape_count);
  }

  TrainedModel out;
  out.model.mean = vectorize(set.mean_shape);
  out.model.scale = set.scale;
  out.model.factors = std::move(ordered.factors);
  out.model.coefficients = std::move(ordered.coefficients);
  out.trace = std::move(factorization.trace);
  out.resolved_weights = weights;
  return out;
}

}  // namespace localdeform
