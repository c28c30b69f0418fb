// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "localdeform/mesh.hpp"

namespace localdeform {

enum class BaseMeshKind { Grid, Icosphere };

struct SyntheticSpec {
  BaseMeshKind base = BaseMeshKind::Grid;
  Eigen::Index grid_width = 20;
  Eigen::Index grid_height = 20;
  int icosphere_subdivisions = 2;
  Eigen::Index region_count = 4;     // R
  int region_radius = 3;             // hops
  double amplitude_min = 1.0;        // per-region bump amplitude range
  double amplitude_max = 1.0;
  Eigen::Index shape_count = 30;     // K
  double noise_sigma = 0.01;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  TriangleMesh base;                               // mean mesh and topology
  std::vector<Eigen::MatrixXd> shapes;             // K shapes, N x 3
  std::vector<std::vector<Eigen::Index>> masks;    // planted region vertices
  Eigen::MatrixXd bumps;                           // 3N x R displacement basis
};

/// Plant R smooth local bumps on the base mesh and draw K samples
/// base + sum_r alpha_{k,r} bump_r + noise with standard-normal weights.
/// Bump r displaces the vertices within region_radius hops of a seed vertex
/// along the surface normal with cosine falloff; regions are kept at least
/// three hops apart. Fully deterministic for a fixed spec.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace localdeform
