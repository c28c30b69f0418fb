// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <utility>
#include <vector>

namespace localdeform {

struct GraphEdge {
  Eigen::Index i = 0;  // smaller endpoint
  Eigen::Index j = 0;  // larger endpoint
  double weight = 1.0;
};

// Weighted undirected vertex graph. Edges are stored once with i < j,
// no self-edges, strictly positive weights.
struct VertexGraph {
  Eigen::Index vertex_count = 0;
  std::vector<GraphEdge> edges;

  Eigen::Index edge_count() const {
    return static_cast<Eigen::Index>(edges.size());
  }
};

/// Canonicalize and validate an edge list: orient each pair with the smaller
/// index first, reject self-edges, duplicates and non-positive weights.
VertexGraph make_vertex_graph(Eigen::Index vertex_count,
                              std::vector<GraphEdge> edges);

// Weighted incidence operator. The base matrix has one row per edge with
// entries +sqrt(w) at the smaller endpoint and -sqrt(w) at the larger one;
// the full operator acts block-wise on the x, y and z sections of a
// 3N vector, so that squared_graph_energy equals the weighted sum of squared
// neighbour differences over all three coordinate blocks.
class IncidenceOperator {
 public:
  IncidenceOperator() = default;
  explicit IncidenceOperator(const VertexGraph& graph);

  Eigen::Index vertex_count() const { return vertex_count_; }
  Eigen::Index edge_count() const { return base_.rows(); }

  /// Rows of the full operator: 3 |E|.
  Eigen::Index range_dimension() const { return 3 * base_.rows(); }
  /// Columns of the full operator: 3 N.
  Eigen::Index domain_dimension() const { return 3 * vertex_count_; }

  const Eigen::SparseMatrix<double>& base() const { return base_; }

  /// Frobenius norm of the full 3|E| x 3N operator.
  double frobenius_norm() const { return frobenius_norm_; }

  /// Apply the full operator to a 3N vector.
  Eigen::VectorXd apply(const Eigen::VectorXd& z) const;

  /// Apply the transpose to a 3|E| vector.
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& w) const;

  /// || E z ||_2^2, the graph smoothness energy of z.
  double squared_graph_energy(const Eigen::VectorXd& z) const;

 private:
  Eigen::Index vertex_count_ = 0;
  Eigen::SparseMatrix<double> base_;  // |E| x N
  double frobenius_norm_ = 0.0;
};

inline IncidenceOperator build_incidence(const VertexGraph& graph) {
  return IncidenceOperator(graph);
}

/// Pairwise Euclidean distances between the rows of an N x 3 matrix.
Eigen::MatrixXd euclidean_distances(const Eigen::MatrixXd& positions);

/// All-pairs shortest-path distances over the given edges with explicit
/// lengths (Dijkstra per source). Disconnected pairs are +infinity.
Eigen::MatrixXd geodesic_distances(
    Eigen::Index vertex_count,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
    const std::vector<double>& lengths);

/// Convenience overload: edge lengths taken as Euclidean distances between
/// the endpoint rows of positions (N x 3).
Eigen::MatrixXd geodesic_distances(
    const Eigen::MatrixXd& positions,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges);

/// Mean Euclidean distance between topological neighbours.
double mean_neighbor_distance(
    const Eigen::MatrixXd& d_euc,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges);

/// Gaussian edge weights over a mesh topology:
/// w_e = exp(-(d_euc(i,j) / mean_dist)^2), edges with w_e < theta dropped.
VertexGraph weights_from_topology(
    const Eigen::MatrixXd& d_euc,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
    double theta, double mean_dist);

/// Same, with mean_dist computed from the topology itself.
VertexGraph weights_from_topology(
    const Eigen::MatrixXd& d_euc,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
    double theta = 0.1);

// Distance matrices shared by the composite weight construction and the
// kernelized covariance.
struct DistanceMatrices {
  Eigen::MatrixXd euclidean;  // N x N
  Eigen::MatrixXd geodesic;   // N x N, +inf across components
};

// Input for composite_part_weights: a partition of the vertices into named
// parts plus a relation graph between parts (pairs of part indices whose
// deformations may influence each other).
struct PartDecomposition {
  std::vector<std::vector<Eigen::Index>> parts;
  std::vector<std::pair<std::size_t, std::size_t>> part_edges;
};

/// Affinity graph for multi-part shapes. Within a part the weight is
/// alpha_d * exp(-(geodesic / mean neighbour distance)^2); across related
/// parts it is (1 - alpha_d) * exp(-dbs^2) with dbs the normalized excess
/// Euclidean distance over the closest cross-part pair. Unrelated part pairs
/// contribute no edges. Weights below theta are dropped.
VertexGraph composite_part_weights(
    const PartDecomposition& decomposition, const DistanceMatrices& distances,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& topology_edges,
    double alpha_d = 0.5, double theta = 0.1);

/// The normalized cross-part distance blocks used by composite_part_weights,
/// exposed for inspection: entry (i, j) is defined for i, j in related parts
/// and zero elsewhere.
Eigen::MatrixXd normalized_part_distances(
    const PartDecomposition& decomposition, const DistanceMatrices& distances,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& topology_edges);

}  // namespace localdeform
