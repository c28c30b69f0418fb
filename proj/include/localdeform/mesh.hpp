// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <array>
#include <utility>
#include <vector>

namespace localdeform {

// Triangle mesh: vertex positions plus faces. The face list defines the
// topology graph used for weights, geodesics and hop distances.
struct TriangleMesh {
  Eigen::MatrixXd vertices;                        // N x 3
  std::vector<std::array<Eigen::Index, 3>> faces;  // 0-based indices

  Eigen::Index vertex_count() const { return vertices.rows(); }

  /// Unique undirected edges (i < j) induced by the faces.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> unique_edges() const;
};

/// Planar grid of width x height vertices at unit spacing (z = 0), each cell
/// split into two triangles.
TriangleMesh grid_mesh(Eigen::Index width, Eigen::Index height);

/// Unit icosphere with the given number of subdivision passes
/// (0 -> icosahedron with 12 vertices).
TriangleMesh icosphere_mesh(int subdivisions);

/// Unweighted hop distances from a source vertex over the mesh edges
/// (breadth-first search); unreachable vertices get -1.
std::vector<int> hop_distances(
    Eigen::Index vertex_count,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
    Eigen::Index source);

}  // namespace localdeform
