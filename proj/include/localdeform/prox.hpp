// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "localdeform/graph.hpp"

namespace localdeform {

// Inner-loop parameters of the dual forward-backward splitting used for the
// factor-norm proximal mapping.
struct ProxConfig {
  double dual_step = 1.999;        // gamma, must lie in (0, 2)
  double epsilon = 1e-4;           // relaxation is (1 + epsilon) / 2
  int max_iterations = 20;         // hard cap on inner iterations
  double primal_tolerance = 1e-8;  // early exit on inf-norm iterate change
  // Diagnostic sink: when set, the inf-norm change of the primal iterate is
  // appended per inner iteration.
  std::vector<double>* residual_trace = nullptr;

  double relaxation() const { return (1.0 + epsilon) / 2.0; }
};

// Penalty weights of the factorisation objective
//   ||X - Phi A||_F^2 + lambda * sum_m ||Phi_m||_phi * ||A_m||_a
// with ||z||_a = lambda_a ||z||_2 and
// ||z||_phi = lambda_l1 ||z||_1 + lambda_l2 ||z||_2
//           + lambda_linf ||z||_{1,inf} + lambda_graph ||E z||_2.
struct RegularizerWeights {
  double lambda = 1.0;
  double lambda_a = 1.0;
  double lambda_l1 = 0.0;
  double lambda_l2 = 0.0;
  double lambda_linf = 0.0;
  double lambda_graph = 0.0;

  void validate() const;
};

/// Default weights as functions of the problem size: data columns enter
/// lambda and lambda_a, the graph size enters lambda_graph.
RegularizerWeights default_weights(Eigen::Index n_vertices,
                                   Eigen::Index n_columns,
                                   Eigen::Index factor_count,
                                   Eigen::Index edge_count);

/// The coordinate triple {i, i + N, i + 2N} of vertex i in a stacked vector.
inline std::array<Eigen::Index, 3> vertex_group(Eigen::Index vertex,
                                                Eigen::Index n_vertices) {
  return {vertex, vertex + n_vertices, vertex + 2 * n_vertices};
}

/// Elementwise soft thresholding (y - s)_+ - (-y - s)_+; entries with
/// |y_i| <= s become exactly zero.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& y, double s);

/// Radial shrinkage (1 - s / ||y||_2)_+ y, the proximal mapping of the
/// l2 norm; returns zero when ||y||_2 <= s.
Eigen::VectorXd block_soft_threshold(const Eigen::VectorXd& y, double s);

/// Euclidean projection onto { x : ||x||_1 <= radius }.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& y, double radius);

/// Euclidean projection onto { x : ||x||_2 <= radius }.
Eigen::VectorXd project_l2_ball(const Eigen::VectorXd& y, double radius);

/// Proximal mapping of s * sum_g ||y_g||_inf over the per-vertex coordinate
/// triples: each group is shrunk by its l1-ball projection,
/// y_g - proj_{||.||_1 <= s}(y_g).
Eigen::VectorXd prox_l1_linf_groups(const Eigen::VectorXd& y, double s,
                                    Eigen::Index n_vertices);

/// Proximal mapping of the coefficient norm scale * lambda_a ||.||_2
/// (exact closed form by block soft thresholding).
Eigen::VectorXd prox_a_norm(const Eigen::VectorXd& z, double scale,
                            double lambda_a);

/// Value of the factor norm ||z||_phi for given weights and graph.
double phi_norm(const Eigen::VectorXd& z, const RegularizerWeights& weights,
                const IncidenceOperator& incidence);

/// Proximal mapping of scale * ||.||_phi by dual forward-backward splitting:
/// the separable part (l1, grouped l1/linf, l2) is handled by composed
/// closed-form thresholds, the graph term through its dual variable. The
/// incidence operator is normalized internally by its Frobenius norm.
/// Best-effort: returns the last iterate if the cap is reached.
Eigen::VectorXd prox_phi_norm(const Eigen::VectorXd& z, double scale,
                              const RegularizerWeights& weights,
                              const IncidenceOperator& incidence,
                              const ProxConfig& config = {});

}  // namespace localdeform
