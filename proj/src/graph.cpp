// SPDX-License-Identifier: Apache-2.0
#include "localdeform/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <string>

#include "localdeform/errors.hpp"
#include "localdeform/log.hpp"

namespace localdeform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_vertex(Eigen::Index v, Eigen::Index n, const char* where) {
  if (v < 0 || v >= n) {
    throw ValidationError(std::string(where) + ": vertex index " +
                          std::to_string(v) + " outside [0, " +
                          std::to_string(n) + ")");
  }
}

}  // namespace

VertexGraph make_vertex_graph(Eigen::Index vertex_count,
                              std::vector<GraphEdge> edges) {
  if (vertex_count <= 0) {
    throw ValidationError("make_vertex_graph: vertex_count must be positive");
  }
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
  for (auto& edge : edges) {
    check_vertex(edge.i, vertex_count, "make_vertex_graph");
    check_vertex(edge.j, vertex_count, "make_vertex_graph");
    if (edge.i == edge.j) {
      throw ValidationError("make_vertex_graph: self-edge at vertex " +
                            std::to_string(edge.i));
    }
    if (edge.i > edge.j) std::swap(edge.i, edge.j);
    if (!(edge.weight > 0.0)) {
      throw ValidationError("make_vertex_graph: non-positive weight on edge (" +
                            std::to_string(edge.i) + ", " +
                            std::to_string(edge.j) + ")");
    }
    if (!seen.insert({edge.i, edge.j}).second) {
      throw ValidationError("make_vertex_graph: duplicate edge (" +
                            std::to_string(edge.i) + ", " +
                            std::to_string(edge.j) + ")");
    }
  }
  VertexGraph graph;
  graph.vertex_count = vertex_count;
  graph.edges = std::move(edges);
  return graph;
}

IncidenceOperator::IncidenceOperator(const VertexGraph& graph)
    : vertex_count_(graph.vertex_count) {
  const Eigen::Index m = graph.edge_count();
  base_.resize(m, vertex_count_);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * m));
  double sq_sum = 0.0;
  for (Eigen::Index p = 0; p < m; ++p) {
    const GraphEdge& edge = graph.edges[static_cast<std::size_t>(p)];
    const double root = std::sqrt(edge.weight);
    // Sign convention: + at the smaller endpoint. Only ||Ez|| is ever used,
    // a fixed orientation keeps results reproducible.
    triplets.emplace_back(p, edge.i, root);
    triplets.emplace_back(p, edge.j, -root);
    sq_sum += 2.0 * edge.weight;
  }
  base_.setFromTriplets(triplets.begin(), triplets.end());
  frobenius_norm_ = std::sqrt(3.0 * sq_sum);
}

Eigen::VectorXd IncidenceOperator::apply(const Eigen::VectorXd& z) const {
  if (z.size() != domain_dimension()) {
    throw DimensionError("IncidenceOperator::apply: expected length " +
                         std::to_string(domain_dimension()) + ", got " +
                         std::to_string(z.size()));
  }
  const Eigen::Index n = vertex_count_;
  const Eigen::Index m = base_.rows();
  Eigen::VectorXd out(3 * m);
  for (int block = 0; block < 3; ++block) {
    out.segment(block * m, m) = base_ * z.segment(block * n, n);
  }
  return out;
}

Eigen::VectorXd IncidenceOperator::apply_transpose(
    const Eigen::VectorXd& w) const {
  if (w.size() != range_dimension()) {
    throw DimensionError(
        "IncidenceOperator::apply_transpose: expected length " +
        std::to_string(range_dimension()) + ", got " +
        std::to_string(w.size()));
  }
  const Eigen::Index n = vertex_count_;
  const Eigen::Index m = base_.rows();
  Eigen::VectorXd out(3 * n);
  for (int block = 0; block < 3; ++block) {
    out.segment(block * n, n) = base_.transpose() * w.segment(block * m, m);
  }
  return out;
}

double IncidenceOperator::squared_graph_energy(
    const Eigen::VectorXd& z) const {
  return apply(z).squaredNorm();
}

Eigen::MatrixXd euclidean_distances(const Eigen::MatrixXd& positions) {
  if (positions.cols() != 3) {
    throw DimensionError("euclidean_distances: positions must be Nx3");
  }
  const Eigen::Index n = positions.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (positions.row(i) - positions.row(j)).norm();
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

Eigen::MatrixXd geodesic_distances(
    Eigen::Index vertex_count,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
    const std::vector<double>& lengths) {
  if (edges.size() != lengths.size()) {
    throw DimensionError("geodesic_distances: edges and lengths differ");
  }
  std::vector<std::vector<std::pair<Eigen::Index, double>>> adjacency(
      static_cast<std::size_t>(vertex_count));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    check_vertex(i, vertex_count, "geodesic_distances");
    check_vertex(j, vertex_count, "geodesic_distances");
    if (!(lengths[e] >= 0.0)) {
      throw ValidationError("geodesic_distances: negative edge length");
    }
    adjacency[static_cast<std::size_t>(i)].push_back({j, lengths[e]});
    adjacency[static_cast<std::size_t>(j)].push_back({i, lengths[e]});
  }

  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(vertex_count, vertex_count,
                                                   kInf);
  using Item = std::pair<double, Eigen::Index>;
  for (Eigen::Index source = 0; source < vertex_count; ++source) {
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    dist(source, source) = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > dist(source, u)) continue;
      for (const auto& [v, len] : adjacency[static_cast<std::size_t>(u)]) {
        const double candidate = d + len;
        if (candidate < dist(source, v)) {
          dist(source, v) = candidate;
          queue.push({candidate, v});
        }
      }
    }
  }
  // Enforce exact symmetry (Dijkstra already is, up to identical arithmetic).
  for (Eigen::Index i = 0; i < vertex_count; ++i) {
    for (Eigen::Index j = i + 1; j < vertex_count; ++j) {
      const double d = std::min(dist(i, j), dist(j, i));
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

Eigen::MatrixXd geodesic_distances(
    const Eigen::MatrixXd& positions,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges) {
  std::vector<double> lengths;
  lengths.reserve(edges.size());
  for (const auto& [i, j] : edges) {
    check_vertex(i, positions.rows(), "geodesic_distances");
    check_vertex(j, positions.rows(), "geodesic_distances");
    lengths.push_back((positions.row(i) - positions.row(j)).norm());
  }
  return geodesic_distances(positions.rows(), edges, lengths);
}

double mean_neighbor_distance(
    const Eigen::MatrixXd& d_euc,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges) {
  if (edges.empty()) {
    throw ValidationError("mean_neighbor_distance: no edges");
  }
  double sum = 0.0;
  for (const auto& [i, j] : edges) sum += d_euc(i, j);
  return sum / static_cast<double>(edges.size());
}

VertexGraph weights_from_topology(
    const Eigen::MatrixXd& d_euc,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
    double theta, double mean_dist) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ValidationError("weights_from_topology: theta must be in (0, 1)");
  }
  if (!(mean_dist > 0.0)) {
    throw ValidationError("weights_from_topology: mean distance must be > 0");
  }
  std::vector<GraphEdge> kept;
  kept.reserve(edges.size());
  for (const auto& [i, j] : edges) {
    const double ratio = d_euc(i, j) / mean_dist;
    const double weight = std::exp(-ratio * ratio);
    if (weight >= theta) kept.push_back({i, j, weight});
  }
  if (kept.empty()) {
    log_warning(
        "weights_from_topology: all edges below threshold; the smoothness "
        "term will vanish");
  }
  return make_vertex_graph(d_euc.rows(), std::move(kept));
}

VertexGraph weights_from_topology(
    const Eigen::MatrixXd& d_euc,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
    double theta) {
  return weights_from_topology(d_euc, edges, theta,
                               mean_neighbor_distance(d_euc, edges));
}

namespace {

// Per-part mean neighbour distance: topology edges with both endpoints in
// the part.
std::vector<double> part_neighbor_distances(
    const PartDecomposition& decomposition, const Eigen::MatrixXd& d_euc,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& topology_edges,
    const std::vector<int>& part_of) {
  const std::size_t n_parts = decomposition.parts.size();
  std::vector<double> sums(n_parts, 0.0);
  std::vector<std::size_t> counts(n_parts, 0);
  for (const auto& [i, j] : topology_edges) {
    const int p = part_of[static_cast<std::size_t>(i)];
    if (p >= 0 && p == part_of[static_cast<std::size_t>(j)]) {
      sums[static_cast<std::size_t>(p)] += d_euc(i, j);
      counts[static_cast<std::size_t>(p)] += 1;
    }
  }
  std::vector<double> means(n_parts, 0.0);
  for (std::size_t p = 0; p < n_parts; ++p) {
    if (counts[p] == 0) {
      throw ValidationError(
          "composite_part_weights: part " + std::to_string(p) +
          " has no interior topology edges; cannot normalize distances");
    }
    means[p] = sums[p] / static_cast<double>(counts[p]);
  }
  return means;
}

std::vector<int> build_part_lookup(const PartDecomposition& decomposition,
                                   Eigen::Index vertex_count) {
  std::vector<int> part_of(static_cast<std::size_t>(vertex_count), -1);
  for (std::size_t p = 0; p < decomposition.parts.size(); ++p) {
    for (Eigen::Index v : decomposition.parts[p]) {
      check_vertex(v, vertex_count, "composite_part_weights");
      auto& slot = part_of[static_cast<std::size_t>(v)];
      if (slot != -1) {
        throw ValidationError("composite_part_weights: vertex " +
                              std::to_string(v) + " appears in parts " +
                              std::to_string(slot) + " and " +
                              std::to_string(p));
      }
      slot = static_cast<int>(p);
    }
  }
  for (Eigen::Index v = 0; v < vertex_count; ++v) {
    if (part_of[static_cast<std::size_t>(v)] == -1) {
      throw ValidationError("composite_part_weights: vertex " +
                            std::to_string(v) + " not covered by any part");
    }
  }
  return part_of;
}

}  // namespace

Eigen::MatrixXd normalized_part_distances(
    const PartDecomposition& decomposition, const DistanceMatrices& distances,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& topology_edges) {
  const Eigen::Index n = distances.euclidean.rows();
  const std::vector<int> part_of = build_part_lookup(decomposition, n);
  const std::vector<double> mean_dist = part_neighbor_distances(
      decomposition, distances.euclidean, topology_edges, part_of);

  Eigen::MatrixXd dbs = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [a, b] : decomposition.part_edges) {
    if (a >= decomposition.parts.size() || b >= decomposition.parts.size()) {
      throw ValidationError("composite_part_weights: part edge out of range");
    }
    if (a == b) continue;
    const auto& ga = decomposition.parts[a];
    const auto& gb = decomposition.parts[b];
    double d_min = kInf;
    for (Eigen::Index i : ga) {
      for (Eigen::Index j : gb) {
        d_min = std::min(d_min, distances.euclidean(i, j));
      }
    }
    const double norm = 2.0 / (mean_dist[a] + mean_dist[b]);
    for (Eigen::Index i : ga) {
      for (Eigen::Index j : gb) {
        const double value = norm * (distances.euclidean(i, j) - d_min);
        dbs(i, j) = value;
        dbs(j, i) = value;
      }
    }
  }
  return dbs;
}

VertexGraph composite_part_weights(
    const PartDecomposition& decomposition, const DistanceMatrices& distances,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& topology_edges,
    double alpha_d, double theta) {
  if (!(alpha_d >= 0.0 && alpha_d <= 1.0)) {
    throw ValidationError("composite_part_weights: alpha_d must be in [0,1]");
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ValidationError("composite_part_weights: theta must be in (0, 1)");
  }
  const Eigen::Index n = distances.euclidean.rows();
  const std::vector<int> part_of = build_part_lookup(decomposition, n);
  const std::vector<double> mean_dist = part_neighbor_distances(
      decomposition, distances.euclidean, topology_edges, part_of);

  std::vector<GraphEdge> kept;

  // Within-part affinity from normalized geodesic distances. A pair in the
  // same part that is geodesically disconnected contributes nothing.
  for (std::size_t p = 0; p < decomposition.parts.size(); ++p) {
    const auto& part = decomposition.parts[p];
    for (std::size_t a = 0; a < part.size(); ++a) {
      for (std::size_t b = a + 1; b < part.size(); ++b) {
        const Eigen::Index i = part[a];
        const Eigen::Index j = part[b];
        const double geo = distances.geodesic(i, j);
        if (!std::isfinite(geo)) continue;
        const double scaled = geo / mean_dist[p];
        const double weight = alpha_d * std::exp(-scaled * scaled);
        if (weight >= theta) {
          kept.push_back({std::min(i, j), std::max(i, j), weight});
        }
      }
    }
  }

  // Cross-part affinity only between related parts.
  std::set<std::pair<std::size_t, std::size_t>> seen_pairs;
  for (auto [a, b] : decomposition.part_edges) {
    if (a >= decomposition.parts.size() || b >= decomposition.parts.size()) {
      throw ValidationError("composite_part_weights: part edge out of range");
    }
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen_pairs.insert({a, b}).second) continue;
    const auto& ga = decomposition.parts[a];
    const auto& gb = decomposition.parts[b];
    double d_min = kInf;
    for (Eigen::Index i : ga) {
      for (Eigen::Index j : gb) {
        d_min = std::min(d_min, distances.euclidean(i, j));
      }
    }
    const double norm = 2.0 / (mean_dist[a] + mean_dist[b]);
    for (Eigen::Index i : ga) {
      for (Eigen::Index j : gb) {
        const double dbs = norm * (distances.euclidean(i, j) - d_min);
        const double weight = (1.0 - alpha_d) * std::exp(-dbs * dbs);
        if (weight >= theta) {
          kept.push_back({std::min(i, j), std::max(i, j), weight});
        }
      }
    }
  }

  if (kept.empty()) {
    log_warning("composite_part_weights: empty edge set after thresholding");
  }
  return make_vertex_graph(n, std::move(kept));
}

}  // namespace localdeform
