// SPDX-License-Identifier: Apache-2.0
#include "localdeform/factor_post.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "localdeform/errors.hpp"

namespace localdeform {

NormalizedFactors normalize_and_order(const Eigen::MatrixXd& factors,
                                      const Eigen::MatrixXd& coefficients) {
  if (factors.cols() != coefficients.rows()) {
    throw DimensionError("normalize_and_order: non-conformal factorization");
  }
  const Eigen::Index m_count = factors.cols();
  const Eigen::Index k = coefficients.cols();

  Eigen::MatrixXd scaled_factors = factors;
  Eigen::MatrixXd scaled_coeffs = coefficients;
  std::vector<bool> zero_row(static_cast<std::size_t>(m_count), false);
  for (Eigen::Index m = 0; m < m_count; ++m) {
    const Eigen::RowVectorXd row = coefficients.row(m);
    const double mean = row.mean();
    double sd = 0.0;
    if (k > 1) {
      sd = std::sqrt((row.array() - mean).square().sum() /
                     static_cast<double>(k - 1));
    }
    zero_row[static_cast<std::size_t>(m)] = row.isZero(0.0);
    if (sd > 0.0) {
      scaled_coeffs.row(m) /= sd;
      scaled_factors.col(m) *= sd;
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m_count));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> norms(static_cast<std::size_t>(m_count));
  for (Eigen::Index m = 0; m < m_count; ++m) {
    norms[static_cast<std::size_t>(m)] = scaled_factors.col(m).norm();
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     const bool za = zero_row[static_cast<std::size_t>(a)];
                     const bool zb = zero_row[static_cast<std::size_t>(b)];
                     if (za != zb) return !za;  // zero rows last
                     return norms[static_cast<std::size_t>(a)] >
                            norms[static_cast<std::size_t>(b)];
                   });

  NormalizedFactors out;
  out.factors.resize(factors.rows(), m_count);
  out.coefficients.resize(m_count, k);
  out.permutation = order;
  for (Eigen::Index m = 0; m < m_count; ++m) {
    out.factors.col(m) = scaled_factors.col(order[static_cast<std::size_t>(m)]);
    out.coefficients.row(m) =
        scaled_coeffs.row(order[static_cast<std::size_t>(m)]);
  }
  return out;
}

std::vector<Eigen::Index> active_vertices(const Eigen::VectorXd& factor,
                                          Eigen::Index n_vertices,
                                          double threshold) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n_vertices; ++i) {
    if (std::abs(factor[i]) > threshold ||
        std::abs(factor[i + n_vertices]) > threshold ||
        std::abs(factor[i + 2 * n_vertices]) > threshold) {
      active.push_back(i);
    }
  }
  return active;
}

namespace {

// Connected components by iterative depth-first search.
std::vector<int> connected_components(
    Eigen::Index n,
    const std::vector<std::vector<Eigen::Index>>& adjacency) {
  std::vector<int> component(static_cast<std::size_t>(n), -1);
  int current = 0;
  std::vector<Eigen::Index> stack;
  for (Eigen::Index start = 0; start < n; ++start) {
    if (component[static_cast<std::size_t>(start)] != -1) continue;
    stack.push_back(start);
    component[static_cast<std::size_t>(start)] = current;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v : adjacency[static_cast<std::size_t>(u)]) {
        if (component[static_cast<std::size_t>(v)] == -1) {
          component[static_cast<std::size_t>(v)] = current;
          stack.push_back(v);
        }
      }
    }
    ++current;
  }
  return component;
}

}  // namespace

SplitFactors split_factors(const Eigen::MatrixXd& factors,
                           const Eigen::MatrixXd& coefficients,
                           const VertexGraph& graph, double threshold) {
  if (factors.cols() != coefficients.rows()) {
    throw DimensionError("split_factors: non-conformal factorization");
  }
  const Eigen::Index n = graph.vertex_count;
  if (factors.rows() != 3 * n) {
    throw DimensionError("split_factors: factor rows " +
                         std::to_string(factors.rows()) +
                         " do not match 3N = " + std::to_string(3 * n));
  }

  std::vector<Eigen::MatrixXd> new_factors;
  std::vector<Eigen::Index> source;
  for (Eigen::Index m = 0; m < factors.cols(); ++m) {
    const Eigen::VectorXd column = factors.col(m);
    std::vector<bool> is_active(static_cast<std::size_t>(n), false);
    const auto active = active_vertices(column, n, threshold);
    for (Eigen::Index v : active) is_active[static_cast<std::size_t>(v)] = true;

    // Activation graph: keep an edge when either endpoint is active.
    std::vector<std::vector<Eigen::Index>> adjacency(
        static_cast<std::size_t>(n));
    for (const GraphEdge& edge : graph.edges) {
      if (is_active[static_cast<std::size_t>(edge.i)] ||
          is_active[static_cast<std::size_t>(edge.j)]) {
        adjacency[static_cast<std::size_t>(edge.i)].push_back(edge.j);
        adjacency[static_cast<std::size_t>(edge.j)].push_back(edge.i);
      }
    }
    const std::vector<int> component = connected_components(n, adjacency);
    int component_count = 0;
    for (Eigen::Index v = 0; v < n; ++v) {
      component_count =
          std::max(component_count, component[static_cast<std::size_t>(v)] + 1);
    }

    std::vector<bool> has_active(static_cast<std::size_t>(component_count),
                                 false);
    for (Eigen::Index v : active) {
      has_active[static_cast<std::size_t>(
          component[static_cast<std::size_t>(v)])] = true;
    }
    for (int c = 0; c < component_count; ++c) {
      if (!has_active[static_cast<std::size_t>(c)]) continue;
      Eigen::MatrixXd piece = Eigen::MatrixXd::Zero(3 * n, 1);
      for (Eigen::Index v = 0; v < n; ++v) {
        if (component[static_cast<std::size_t>(v)] == c) {
          piece(v, 0) = column[v];
          piece(v + n, 0) = column[v + n];
          piece(v + 2 * n, 0) = column[v + 2 * n];
        }
      }
      new_factors.push_back(std::move(piece));
      source.push_back(m);
    }
  }

  SplitFactors out;
  const Eigen::Index total = static_cast<Eigen::Index>(new_factors.size());
  out.factors.resize(3 * n, total);
  out.coefficients.resize(total, coefficients.cols());
  out.source = std::move(source);
  for (Eigen::Index c = 0; c < total; ++c) {
    out.factors.col(c) = new_factors[static_cast<std::size_t>(c)];
    out.coefficients.row(c) =
        coefficients.row(out.source[static_cast<std::size_t>(c)]);
  }
  return out;
}

void truncate_to_count(Eigen::MatrixXd& factors,
                       Eigen::MatrixXd& coefficients,
                       Eigen::Index factor_count) {
  if (factor_count < 0) {
    throw DimensionError("truncate_to_count: negative factor count");
  }
  const Eigen::Index kept = std::min(factor_count, factors.cols());
  factors = factors.leftCols(kept).eval();
  coefficients = coefficients.topRows(kept).eval();
}

}  // namespace localdeform
