// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "localdeform/graph.hpp"
#include "localdeform/prox.hpp"

namespace localdeform {

struct SolverConfig {
  Eigen::Index factor_count = 8;          // M
  int max_iterations = 200;
  double tolerance = 1e-6;                // relative objective change
  std::uint64_t seed = 0;
  std::optional<double> step_phi;         // empty: per-iteration Lipschitz
  std::optional<double> step_a;
  ProxConfig prox;
  int threads = 1;
};

struct SolverTrace {
  std::vector<double> objective;   // after each iteration
  std::vector<double> sparsity;    // fraction of exact zeros in the factors
  std::vector<double> seconds;     // wall clock per iteration
  bool converged = false;
};

struct FactorizationResult {
  Eigen::MatrixXd factors;         // 3N x M
  Eigen::MatrixXd coefficients;    // M x K
  SolverTrace trace;
};

/// Value of the full objective
/// ||X - Phi A||_F^2 + lambda sum_m ||Phi_m||_phi ||A_m||_a.
double objective(const Eigen::MatrixXd& data, const Eigen::MatrixXd& factors,
                 const Eigen::MatrixXd& coefficients,
                 const RegularizerWeights& weights,
                 const IncidenceOperator& incidence);

/// M distinct standard-basis columns of I_dim, chosen uniformly without
/// replacement; reproducible from the seed.
Eigen::MatrixXd init_factors(Eigen::Index dim, Eigen::Index factor_count,
                             std::uint64_t seed);

/// Gradient of the loss ||X - Phi A||_F^2 in the factors: 2 (Phi A - X) A^T.
Eigen::MatrixXd loss_gradient_factors(const Eigen::MatrixXd& data,
                                      const Eigen::MatrixXd& factors,
                                      const Eigen::MatrixXd& coefficients);

/// Gradient of the loss in the coefficients: 2 Phi^T (Phi A - X).
Eigen::MatrixXd loss_gradient_coefficients(const Eigen::MatrixXd& data,
                                           const Eigen::MatrixXd& factors,
                                           const Eigen::MatrixXd& coefficients);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration
/// (50 iterations, seeded start vector).
double spectral_norm_estimate(const Eigen::MatrixXd& symmetric);

/// Inverse-Lipschitz step sizes for the two blocks:
/// 1 / (2 sigma_max + 1e-8), capped at 1e6.
std::pair<double, double> auto_step_sizes(const Eigen::MatrixXd& factors,
                                          const Eigen::MatrixXd& coefficients);

// Mutable state threaded through bcd_step.
struct SolverState {
  const Eigen::MatrixXd* data = nullptr;
  const IncidenceOperator* incidence = nullptr;
  RegularizerWeights weights;
  Eigen::MatrixXd factors;
  Eigen::MatrixXd coefficients;
  std::optional<double> fixed_step_phi;  // empty: block Lipschitz per sweep
  std::optional<double> fixed_step_a;
  double step_phi = 0.0;  // effective steps used by the last sweep
  double step_a = 0.0;
  ProxConfig prox;
  int threads = 1;
  int iteration = 0;
};

/// One sweep of block coordinate descent: gradient + per-column proximal
/// update of the factors, then gradient + per-row proximal update of the
/// coefficients. Automatic step sizes are evaluated per block inside the
/// sweep; the coefficient step must see the updated factors, otherwise the
/// inverse-Lipschitz guarantee (and with it monotone descent) is lost.
void bcd_step(SolverState& state);

/// Full solve: trivial initialisation (identity columns, least-squares
/// coefficients), repeated bcd_step until the relative objective change
/// drops below the tolerance or the iteration cap is reached.
FactorizationResult solve(const Eigen::MatrixXd& data,
                          const IncidenceOperator& incidence,
                          const RegularizerWeights& weights,
                          const SolverConfig& config);

}  // namespace localdeform
