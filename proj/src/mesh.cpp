// SPDX-License-Identifier: Apache-2.0
#include "localdeform/mesh.hpp"

#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <string>

#include "localdeform/errors.hpp"

namespace localdeform {

std::vector<std::pair<Eigen::Index, Eigen::Index>> TriangleMesh::unique_edges()
    const {
  std::set<std::pair<Eigen::Index, Eigen::Index>> edges;
  for (const auto& face : faces) {
    for (int c = 0; c < 3; ++c) {
      Eigen::Index a = face[static_cast<std::size_t>(c)];
      Eigen::Index b = face[static_cast<std::size_t>((c + 1) % 3)];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
    }
  }
  return {edges.begin(), edges.end()};
}

TriangleMesh grid_mesh(Eigen::Index width, Eigen::Index height) {
  if (width < 2 || height < 2) {
    throw ValidationError("grid_mesh: need at least a 2x2 grid");
  }
  TriangleMesh mesh;
  mesh.vertices.resize(width * height, 3);
  for (Eigen::Index row = 0; row < height; ++row) {
    for (Eigen::Index col = 0; col < width; ++col) {
      const Eigen::Index v = row * width + col;
      mesh.vertices(v, 0) = static_cast<double>(col);
      mesh.vertices(v, 1) = static_cast<double>(row);
      mesh.vertices(v, 2) = 0.0;
    }
  }
  for (Eigen::Index row = 0; row + 1 < height; ++row) {
    for (Eigen::Index col = 0; col + 1 < width; ++col) {
      const Eigen::Index v00 = row * width + col;
      const Eigen::Index v10 = v00 + 1;
      const Eigen::Index v01 = v00 + width;
      const Eigen::Index v11 = v01 + 1;
      mesh.faces.push_back({v00, v10, v01});
      mesh.faces.push_back({v10, v11, v01});
    }
  }
  return mesh;
}

TriangleMesh icosphere_mesh(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 6) {
    throw ValidationError("icosphere_mesh: subdivisions outside [0, 6]");
  }
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::array<double, 3>> points = {
      {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<std::array<Eigen::Index, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  auto normalize = [](std::array<double, 3> p) {
    const double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    return std::array<double, 3>{p[0] / norm, p[1] / norm, p[2] / norm};
  };
  for (auto& p : points) p = normalize(p);

  for (int pass = 0; pass < subdivisions; ++pass) {
    std::map<std::pair<Eigen::Index, Eigen::Index>, Eigen::Index> midpoints;
    auto midpoint = [&](Eigen::Index a, Eigen::Index b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      const auto& pa = points[static_cast<std::size_t>(a)];
      const auto& pb = points[static_cast<std::size_t>(b)];
      points.push_back(normalize({(pa[0] + pb[0]) / 2.0,
                                  (pa[1] + pb[1]) / 2.0,
                                  (pa[2] + pb[2]) / 2.0}));
      const auto index = static_cast<Eigen::Index>(points.size() - 1);
      midpoints.emplace(key, index);
      return index;
    };
    std::vector<std::array<Eigen::Index, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const Eigen::Index ab = midpoint(f[0], f[1]);
      const Eigen::Index bc = midpoint(f[1], f[2]);
      const Eigen::Index ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    mesh.vertices(static_cast<Eigen::Index>(i), 0) = points[i][0];
    mesh.vertices(static_cast<Eigen::Index>(i), 1) = points[i][1];
    mesh.vertices(static_cast<Eigen::Index>(i), 2) = points[i][2];
  }
  mesh.faces = std::move(faces);
  return mesh;
}

std::vector<int> hop_distances(
    Eigen::Index vertex_count,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges,
    Eigen::Index source) {
  std::vector<std::vector<Eigen::Index>> adjacency(
      static_cast<std::size_t>(vertex_count));
  for (const auto& [i, j] : edges) {
    adjacency[static_cast<std::size_t>(i)].push_back(j);
    adjacency[static_cast<std::size_t>(j)].push_back(i);
  }
  std::vector<int> dist(static_cast<std::size_t>(vertex_count), -1);
  std::queue<Eigen::Index> queue;
  dist[static_cast<std::size_t>(source)] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const Eigen::Index u = queue.front();
    queue.pop();
    for (Eigen::Index v : adjacency[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] == -1) {
        dist[static_cast<std::size_t>(v)] =
            dist[static_cast<std::size_t>(u)] + 1;
        queue.push(v);
      }
    }
  }
  return dist;
}

}  // namespace localdeform
