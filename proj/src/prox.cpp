// SPDX-License-Identifier: Apache-2.0
#include "localdeform/prox.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "localdeform/errors.hpp"

namespace localdeform {

void RegularizerWeights::validate() const {
  if (!(lambda > 0.0)) {
    throw ValidationError("RegularizerWeights: lambda must be positive");
  }
  if (!(lambda_a > 0.0)) {
    throw ValidationError("RegularizerWeights: lambda_a must be positive");
  }
  if (lambda_l1 < 0.0 || lambda_l2 < 0.0 || lambda_linf < 0.0 ||
      lambda_graph < 0.0) {
    throw ValidationError("RegularizerWeights: negative penalty weight");
  }
  if (lambda_l1 + lambda_l2 + lambda_linf + lambda_graph <= 0.0) {
    throw ValidationError(
        "RegularizerWeights: at least one factor penalty must be positive");
  }
}

RegularizerWeights default_weights(Eigen::Index n_vertices,
                                   Eigen::Index n_columns,
                                   Eigen::Index factor_count,
                                   Eigen::Index edge_count) {
  if (n_vertices <= 0 || n_columns <= 0 || factor_count <= 0) {
    throw ValidationError("default_weights: sizes must be positive");
  }
  const double n3 = 3.0 * static_cast<double>(n_vertices);
  RegularizerWeights w;
  w.lambda = 64.0 * n3 * static_cast<double>(n_columns) /
             static_cast<double>(factor_count);
  w.lambda_a = 1e-4 / std::sqrt(static_cast<double>(n_columns));
  w.lambda_l1 = 1.0 / std::sqrt(n3);
  w.lambda_l2 = 1.0 / std::sqrt(n3);
  w.lambda_linf = 2.0 / std::sqrt(static_cast<double>(n_vertices));
  w.lambda_graph =
      edge_count > 0 ? 1.0 / std::sqrt(3.0 * static_cast<double>(edge_count))
                     : 0.0;
  return w;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& y, double s) {
  if (s < 0.0) throw ValidationError("soft_threshold: negative threshold");
  return ((y.array() - s).max(0.0) - (-y.array() - s).max(0.0)).matrix();
}

Eigen::VectorXd block_soft_threshold(const Eigen::VectorXd& y, double s) {
  if (s < 0.0) {
    throw ValidationError("block_soft_threshold: negative threshold");
  }
  const double norm = y.norm();
  if (norm <= s) return Eigen::VectorXd::Zero(y.size());
  return (1.0 - s / norm) * y;
}

namespace {

// Projection of a 3-vector onto the l1 ball, specialised for the per-vertex
// groups: sorting three magnitudes explicitly avoids any allocation.
inline void project_l1_ball_3(double* v, double radius) {
  double a = std::abs(v[0]), b = std::abs(v[1]), c = std::abs(v[2]);
  if (a + b + c <= radius) return;
  // sort descending
  if (a < b) std::swap(a, b);
  if (b < c) std::swap(b, c);
  if (a < b) std::swap(a, b);
  double tau = a - radius;  // one active component
  const double tau2 = (a + b - radius) / 2.0;
  if (tau2 < b) {
    tau = tau2;
    const double tau3 = (a + b + c - radius) / 3.0;
    if (tau3 < c) tau = tau3;
  }
  for (int k = 0; k < 3; ++k) {
    const double mag = std::abs(v[k]) - tau;
    v[k] = mag > 0.0 ? (v[k] > 0.0 ? mag : -mag) : 0.0;
  }
}

}  // namespace

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& y, double radius) {
  if (radius < 0.0) throw ValidationError("project_l1_ball: negative radius");
  if (radius == 0.0) return Eigen::VectorXd::Zero(y.size());
  if (y.lpNorm<1>() <= radius) return y;

  // Duchi et al. style threshold search on the sorted magnitudes.
  std::vector<double> mags(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    mags[static_cast<std::size_t>(i)] = std::abs(y[i]);
  }
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate =
        (cumulative - radius) / static_cast<double>(j + 1);
    if (candidate < mags[j]) {
      tau = candidate;
    } else {
      break;
    }
  }
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double mag = std::abs(y[i]) - tau;
    out[i] = mag > 0.0 ? (y[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

Eigen::VectorXd project_l2_ball(const Eigen::VectorXd& y, double radius) {
  if (radius < 0.0) throw ValidationError("project_l2_ball: negative radius");
  const double norm = y.norm();
  if (norm <= radius) return y;
  return (radius / norm) * y;
}

Eigen::VectorXd prox_l1_linf_groups(const Eigen::VectorXd& y, double s,
                                    Eigen::Index n_vertices) {
  if (s < 0.0) throw ValidationError("prox_l1_linf_groups: negative scale");
  if (y.size() != 3 * n_vertices) {
    throw DimensionError("prox_l1_linf_groups: expected length " +
                         std::to_string(3 * n_vertices) + ", got " +
                         std::to_string(y.size()));
  }
  if (s == 0.0) return y;
  Eigen::VectorXd out = y;
  for (Eigen::Index i = 0; i < n_vertices; ++i) {
    double group[3] = {y[i], y[i + n_vertices], y[i + 2 * n_vertices]};
    project_l1_ball_3(group, s);
    out[i] -= group[0];
    out[i + n_vertices] -= group[1];
    out[i + 2 * n_vertices] -= group[2];
  }
  return out;
}

Eigen::VectorXd prox_a_norm(const Eigen::VectorXd& z, double scale,
                            double lambda_a) {
  if (scale < 0.0) throw ValidationError("prox_a_norm: negative scale");
  return block_soft_threshold(z, scale * lambda_a);
}

double phi_norm(const Eigen::VectorXd& z, const RegularizerWeights& weights,
                const IncidenceOperator& incidence) {
  double value = 0.0;
  if (weights.lambda_l1 > 0.0) value += weights.lambda_l1 * z.lpNorm<1>();
  if (weights.lambda_l2 > 0.0) value += weights.lambda_l2 * z.norm();
  if (weights.lambda_linf > 0.0) {
    const Eigen::Index n = z.size() / 3;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      sum += std::max({std::abs(z[i]), std::abs(z[i + n]),
                       std::abs(z[i + 2 * n])});
    }
    value += weights.lambda_linf * sum;
  }
  if (weights.lambda_graph > 0.0 && incidence.edge_count() > 0) {
    value += weights.lambda_graph * std::sqrt(
        incidence.squared_graph_energy(z));
  }
  return value;
}

namespace {

// Composed closed-form proximal mapping of the separable factor penalties
// s1 ||.||_1 + sinf ||.||_{1,inf} + s2 ||.||_2.
Eigen::VectorXd prox_separable(const Eigen::VectorXd& y, double s1,
                               double sinf, double s2,
                               Eigen::Index n_vertices) {
  Eigen::VectorXd x = s1 > 0.0 ? soft_threshold(y, s1) : y;
  if (sinf > 0.0) x = prox_l1_linf_groups(x, sinf, n_vertices);
  if (s2 > 0.0) x = block_soft_threshold(x, s2);
  return x;
}

}  // namespace

Eigen::VectorXd prox_phi_norm(const Eigen::VectorXd& z, double scale,
                              const RegularizerWeights& weights,
                              const IncidenceOperator& incidence,
                              const ProxConfig& config) {
  if (scale < 0.0) throw ValidationError("prox_phi_norm: negative scale");
  if (!(config.dual_step > 0.0 && config.dual_step < 2.0)) {
    throw ValidationError("prox_phi_norm: dual step must be in (0, 2)");
  }
  if (config.max_iterations < 1) {
    throw ValidationError("prox_phi_norm: need at least one inner iteration");
  }
  if (!z.allFinite()) throw NumericError("prox_phi_norm: non-finite input");
  if (z.size() != incidence.domain_dimension()) {
    throw DimensionError("prox_phi_norm: expected length " +
                         std::to_string(incidence.domain_dimension()) +
                         ", got " + std::to_string(z.size()));
  }
  if (scale == 0.0) return z;

  const Eigen::Index n_vertices = incidence.vertex_count();
  const double s1 = scale * weights.lambda_l1;
  const double s2 = scale * weights.lambda_l2;
  const double sinf = scale * weights.lambda_linf;
  double sg = scale * weights.lambda_graph;

  const double e_norm = incidence.frobenius_norm();
  if (sg == 0.0 || e_norm == 0.0) {
    return prox_separable(z, s1, sinf, s2, n_vertices);
  }

  // Normalise the incidence operator (homogeneity of the norm): the graph
  // weight absorbs the Frobenius norm and every application of E below is
  // rescaled by 1 / ||E||_F.
  sg *= e_norm;
  const double inv = 1.0 / e_norm;

  const double gamma = config.dual_step;
  const double beta = config.relaxation();

  Eigen::VectorXd dual = Eigen::VectorXd::Zero(incidence.range_dimension());
  Eigen::VectorXd x;
  Eigen::VectorXd x_prev;
  for (int it = 0; it < config.max_iterations; ++it) {
    x = prox_separable(z - inv * incidence.apply_transpose(dual), s1, sinf,
                       s2, n_vertices);
    if (it > 0) {
      const double change = (x - x_prev).lpNorm<Eigen::Infinity>();
      if (config.residual_trace) config.residual_trace->push_back(change);
      if (change < config.primal_tolerance) break;
    }
    x_prev = x;
    const Eigen::VectorXd ex = inv * incidence.apply(x);
    dual += beta * gamma *
            (ex - block_soft_threshold((dual + gamma * ex) / gamma,
                                       sg / gamma));
  }
  return x;
}

}  // namespace localdeform
