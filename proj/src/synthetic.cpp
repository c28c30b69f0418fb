// SPDX-License-Identifier: Apache-2.0
#include "localdeform/synthetic.hpp"

#include <cmath>
#include <string>

#include "localdeform/errors.hpp"
#include "localdeform/rng.hpp"
#include "localdeform/shape.hpp"

namespace localdeform {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd vertex_normals(const SyntheticSpec& spec,
                               const TriangleMesh& mesh) {
  const Eigen::Index n = mesh.vertex_count();
  Eigen::MatrixXd normals(n, 3);
  if (spec.base == BaseMeshKind::Grid) {
    normals.col(0).setZero();
    normals.col(1).setZero();
    normals.col(2).setOnes();
  } else {
    for (Eigen::Index v = 0; v < n; ++v) {
      normals.row(v) = mesh.vertices.row(v).normalized();
    }
  }
  return normals;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.region_count < 1) {
    throw ValidationError("generate_synthetic: need at least one region");
  }
  if (spec.shape_count < 2) {
    throw ValidationError("generate_synthetic: need at least two shapes");
  }
  if (spec.region_radius < 1) {
    throw ValidationError("generate_synthetic: region radius must be >= 1");
  }
  if (spec.noise_sigma < 0.0) {
    throw ValidationError("generate_synthetic: negative noise level");
  }
  if (!(spec.amplitude_min > 0.0) || spec.amplitude_max < spec.amplitude_min) {
    throw ValidationError("generate_synthetic: bad amplitude range");
  }

  SyntheticData data;
  data.base = spec.base == BaseMeshKind::Grid
                  ? grid_mesh(spec.grid_width, spec.grid_height)
                  : icosphere_mesh(spec.icosphere_subdivisions);
  const Eigen::Index n = data.base.vertex_count();
  const auto edges = data.base.unique_edges();
  const Eigen::MatrixXd normals = vertex_normals(spec, data.base);

  Rng rng(spec.seed);

  // Seed vertices by rejection: regions of the given hop radius must stay
  // pairwise separated by at least two inactive hops (distance >= 3 between
  // the masks, so seeds need >= 2 * radius + 3).
  const int min_seed_distance = 2 * spec.region_radius + 3;
  std::vector<Eigen::Index> seeds;
  std::vector<std::vector<int>> seed_hops;
  int attempts = 0;
  const int max_attempts = 2000 * static_cast<int>(spec.region_count);
  while (static_cast<Eigen::Index>(seeds.size()) < spec.region_count) {
    if (++attempts > max_attempts) {
      throw ValidationError(
          "generate_synthetic: could not place " +
          std::to_string(spec.region_count) +
          " regions of radius " + std::to_string(spec.region_radius) +
          " without overlap; reduce the count or radius");
    }
    const auto candidate =
        static_cast<Eigen::Index>(rng.uniform_index(
            static_cast<std::uint64_t>(n)));
    bool ok = true;
    for (const auto& hops : seed_hops) {
      const int d = hops[static_cast<std::size_t>(candidate)];
      if (d >= 0 && d < min_seed_distance) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    seeds.push_back(candidate);
    seed_hops.push_back(hop_distances(n, edges, candidate));
  }

  // Smooth bump per region: cosine falloff of the hop distance along the
  // vertex normal. The falloff stays strictly positive on the mask.
  data.bumps = Eigen::MatrixXd::Zero(3 * n, spec.region_count);
  data.masks.resize(static_cast<std::size_t>(spec.region_count));
  for (Eigen::Index r = 0; r < spec.region_count; ++r) {
    const double amplitude = rng.uniform(spec.amplitude_min,
                                         spec.amplitude_max);
    const auto& hops = seed_hops[static_cast<std::size_t>(r)];
    for (Eigen::Index v = 0; v < n; ++v) {
      const int d = hops[static_cast<std::size_t>(v)];
      if (d < 0 || d > spec.region_radius) continue;
      data.masks[static_cast<std::size_t>(r)].push_back(v);
      const double falloff =
          0.5 * (1.0 + std::cos(kPi * static_cast<double>(d) /
                                static_cast<double>(spec.region_radius + 1)));
      const double magnitude = amplitude * falloff;
      data.bumps(v, r) = magnitude * normals(v, 0);
      data.bumps(v + n, r) = magnitude * normals(v, 1);
      data.bumps(v + 2 * n, r) = magnitude * normals(v, 2);
    }
  }

  Eigen::MatrixXd weights(spec.shape_count, spec.region_count);
  for (Eigen::Index k = 0; k < spec.shape_count; ++k) {
    for (Eigen::Index r = 0; r < spec.region_count; ++r) {
      weights(k, r) = rng.normal();
    }
  }

  const Eigen::VectorXd base_stack = vectorize(data.base.vertices);
  data.shapes.reserve(static_cast<std::size_t>(spec.shape_count));
  for (Eigen::Index k = 0; k < spec.shape_count; ++k) {
    Eigen::VectorXd stack =
        base_stack + data.bumps * weights.row(k).transpose();
    if (spec.noise_sigma > 0.0) {
      for (Eigen::Index i = 0; i < stack.size(); ++i) {
        stack[i] += spec.noise_sigma * rng.normal();
      }
    }
    data.shapes.push_back(devectorize(stack));
  }
  return data;
}

}  // namespace localdeform
