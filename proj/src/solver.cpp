// SPDX-License-Identifier: Apache-2.0
#include "localdeform/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "localdeform/errors.hpp"
#include "localdeform/parallel.hpp"
#include "localdeform/rng.hpp"
#include "localdeform/shape.hpp"

namespace localdeform {

double objective(const Eigen::MatrixXd& data, const Eigen::MatrixXd& factors,
                 const Eigen::MatrixXd& coefficients,
                 const RegularizerWeights& weights,
                 const IncidenceOperator& incidence) {
  if (factors.cols() != coefficients.rows() ||
      factors.rows() != data.rows() || coefficients.cols() != data.cols()) {
    throw DimensionError("objective: non-conformal factorization");
  }
  double value = (data - factors * coefficients).squaredNorm();
  for (Eigen::Index m = 0; m < factors.cols(); ++m) {
    const double factor_norm = phi_norm(factors.col(m), weights, incidence);
    const double coeff_norm = weights.lambda_a * coefficients.row(m).norm();
    value += weights.lambda * factor_norm * coeff_norm;
  }
  return value;
}

Eigen::MatrixXd init_factors(Eigen::Index dim, Eigen::Index factor_count,
                             std::uint64_t seed) {
  if (factor_count < 1 || factor_count > dim) {
    throw DimensionError("init_factors: factor count " +
                         std::to_string(factor_count) +
                         " outside [1, " + std::to_string(dim) + "]");
  }
  Rng rng(seed);
  const auto picks = rng.sample_without_replacement(
      static_cast<std::uint64_t>(dim),
      static_cast<std::uint64_t>(factor_count));
  Eigen::MatrixXd factors = Eigen::MatrixXd::Zero(dim, factor_count);
  for (Eigen::Index m = 0; m < factor_count; ++m) {
    factors(static_cast<Eigen::Index>(picks[static_cast<std::size_t>(m)]),
            m) = 1.0;
  }
  return factors;
}

double spectral_norm_estimate(const Eigen::MatrixXd& symmetric) {
  const Eigen::Index n = symmetric.rows();
  if (n == 0) return 0.0;
  // Seeded random start; a deterministic vector such as all-ones can be
  // orthogonal to the dominant eigenvector.
  Rng rng(0x5bd1e995u);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd w = symmetric * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    estimate = norm;
  }
  return estimate;
}

namespace {

double inverse_lipschitz_step(double sigma_max) {
  constexpr double delta = 1e-8;
  constexpr double cap = 1e6;
  return std::min(cap, 1.0 / (2.0 * sigma_max + delta));
}

}  // namespace

std::pair<double, double> auto_step_sizes(
    const Eigen::MatrixXd& factors, const Eigen::MatrixXd& coefficients) {
  const double sigma_a =
      spectral_norm_estimate(coefficients * coefficients.transpose());
  const double sigma_phi =
      spectral_norm_estimate(factors.transpose() * factors);
  return {inverse_lipschitz_step(sigma_a), inverse_lipschitz_step(sigma_phi)};
}

Eigen::MatrixXd loss_gradient_factors(const Eigen::MatrixXd& data,
                                      const Eigen::MatrixXd& factors,
                                      const Eigen::MatrixXd& coefficients) {
  return 2.0 * ((factors * coefficients - data) * coefficients.transpose());
}

Eigen::MatrixXd loss_gradient_coefficients(const Eigen::MatrixXd& data,
                                           const Eigen::MatrixXd& factors,
                                           const Eigen::MatrixXd& coefficients) {
  return 2.0 * (factors.transpose() * (factors * coefficients - data));
}

void bcd_step(SolverState& state) {
  const Eigen::MatrixXd& data = *state.data;
  const IncidenceOperator& incidence = *state.incidence;
  const Eigen::Index m_count = state.factors.cols();

  // Factor block: gradient step on the loss, then the proximal mapping of
  // the factor norm column by column.
  {
    state.step_phi = state.fixed_step_phi.value_or(inverse_lipschitz_step(
        spectral_norm_estimate(state.coefficients *
                               state.coefficients.transpose())));
    Eigen::MatrixXd stepped =
        state.factors -
        state.step_phi *
            loss_gradient_factors(data, state.factors, state.coefficients);
    Eigen::VectorXd coeff_norms(m_count);
    for (Eigen::Index m = 0; m < m_count; ++m) {
      coeff_norms[m] =
          state.weights.lambda_a * state.coefficients.row(m).norm();
    }
    parallel_for(0, m_count, state.threads, [&](std::int64_t m) {
      const double scale =
          state.step_phi * state.weights.lambda * coeff_norms[m];
      state.factors.col(m) = prox_phi_norm(stepped.col(m), scale,
                                           state.weights, incidence,
                                           state.prox);
    });
  }

  // Coefficient block, symmetric with the updated factors. The step size
  // must reflect the factors as they are now.
  {
    state.step_a = state.fixed_step_a.value_or(inverse_lipschitz_step(
        spectral_norm_estimate(state.factors.transpose() * state.factors)));
    Eigen::MatrixXd stepped =
        state.coefficients -
        state.step_a * loss_gradient_coefficients(data, state.factors,
                                                  state.coefficients);
    Eigen::VectorXd factor_norms(m_count);
    for (Eigen::Index m = 0; m < m_count; ++m) {
      factor_norms[m] =
          phi_norm(state.factors.col(m), state.weights, incidence);
    }
    parallel_for(0, m_count, state.threads, [&](std::int64_t m) {
      const double scale =
          state.step_a * state.weights.lambda * factor_norms[m];
      state.coefficients.row(m) =
          prox_a_norm(stepped.row(m).transpose(), scale,
                      state.weights.lambda_a)
              .transpose();
    });
  }

  ++state.iteration;
  if (!state.factors.allFinite() || !state.coefficients.allFinite()) {
    throw NumericError("bcd_step: non-finite state at iteration " +
                       std::to_string(state.iteration));
  }
}

namespace {

double zero_fraction(const Eigen::MatrixXd& factors) {
  if (factors.size() == 0) return 0.0;
  const auto zeros =
      (factors.array() == 0.0).count();
  return static_cast<double>(zeros) / static_cast<double>(factors.size());
}

}  // namespace

FactorizationResult solve(const Eigen::MatrixXd& data,
                          const IncidenceOperator& incidence,
                          const RegularizerWeights& weights,
                          const SolverConfig& config) {
  weights.validate();
  if (data.rows() != incidence.domain_dimension()) {
    throw DimensionError("solve: data rows " + std::to_string(data.rows()) +
                         " do not match graph dimension " +
                         std::to_string(incidence.domain_dimension()));
  }
  if (config.max_iterations < 1 || !(config.tolerance > 0.0)) {
    throw ValidationError("solve: bad iteration cap or tolerance");
  }

  SolverState state;
  state.data = &data;
  state.incidence = &incidence;
  state.weights = weights;
  state.prox = config.prox;
  state.threads = config.threads;
  state.factors = init_factors(data.rows(), config.factor_count, config.seed);
  // With basis-column factors and zero coefficients the first factor
  // gradient would vanish and the proximal step would annihilate the
  // factors, so the coefficients start from the least-squares fit.
  state.coefficients = fit_coefficient_matrix(state.factors, data);

  state.fixed_step_phi = config.step_phi;
  state.fixed_step_a = config.step_a;

  FactorizationResult result;
  double previous = objective(data, state.factors, state.coefficients,
                              weights, incidence);
  for (int it = 0; it < config.max_iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    bcd_step(state);
    const double current = objective(data, state.factors, state.coefficients,
                                     weights, incidence);
    const auto stop = std::chrono::steady_clock::now();
    result.trace.objective.push_back(current);
    result.trace.sparsity.push_back(zero_fraction(state.factors));
    result.trace.seconds.push_back(
        std::chrono::duration<double>(stop - start).count());
    const double denom = std::max(std::abs(previous), 1e-30);
    if (std::abs(previous - current) / denom < config.tolerance) {
      result.trace.converged = true;
      previous = current;
      break;
    }
    previous = current;
  }
  result.factors = std::move(state.factors);
  result.coefficients = std::move(state.coefficients);
  return result;
}

}  // namespace localdeform
