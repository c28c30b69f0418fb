// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "localdeform/errors.hpp"
#include "localdeform/mesh.hpp"
#include "localdeform/solver.hpp"
#include "localdeform/shape.hpp"
#include "localdeform/synthetic.hpp"
#include "oracles.hpp"

using namespace localdeform;

namespace {

struct Problem {
  Eigen::MatrixXd data;
  VertexGraph graph;
  IncidenceOperator incidence;
  RegularizerWeights weights;
};

// Small random factorization problem over a random vertex graph.
Problem random_problem(Rng& rng, Eigen::Index n_vertices, Eigen::Index k) {
  Problem problem;
  std::vector<GraphEdge> edges;
  for (Eigen::Index i = 0; i < n_vertices; ++i) {
    for (Eigen::Index j = i + 1; j < n_vertices; ++j) {
      if (rng.uniform() < 0.5) edges.push_back({i, j, 0.2 + rng.uniform()});
    }
  }
  problem.graph = make_vertex_graph(n_vertices, std::move(edges));
  problem.incidence = IncidenceOperator(problem.graph);
  problem.data = oracles::random_matrix(rng, 3 * n_vertices, k);
  problem.weights.lambda = 0.5;
  problem.weights.lambda_a = 0.3;
  problem.weights.lambda_l1 = 0.2;
  problem.weights.lambda_l2 = 0.15;
  problem.weights.lambda_linf = 0.1;
  problem.weights.lambda_graph = 0.25;
  return problem;
}

// Planted-bump data prepared for the solver, together with its graph.
struct SyntheticProblem {
  ShapeSet set;
  VertexGraph graph;
  IncidenceOperator incidence;
  RegularizerWeights weights;
};

SyntheticProblem synthetic_problem(std::uint64_t seed, Eigen::Index grid = 7,
                                   Eigen::Index shapes = 8,
                                   Eigen::Index factors = 4) {
  SyntheticSpec spec;
  spec.grid_width = grid;
  spec.grid_height = grid;
  spec.region_count = 2;
  spec.region_radius = 1;
  spec.shape_count = shapes;
  spec.noise_sigma = 0.02;
  spec.seed = seed;
  const SyntheticData data = generate_synthetic(spec);
  SyntheticProblem problem;
  problem.set = prepare_shape_set(data.shapes);
  const auto topo = data.base.unique_edges();
  problem.graph = weights_from_topology(
      euclidean_distances(data.base.vertices), topo, 0.1);
  problem.incidence = IncidenceOperator(problem.graph);
  problem.weights =
      default_weights(problem.set.vertex_count, problem.set.shape_count,
                      factors, problem.graph.edge_count());
  return problem;
}

}  // namespace

TEST_SUITE("bcd-solver") {

TEST_CASE("objective at the zero factorization is the data energy") {
  Rng rng(201);
  const Problem problem = random_problem(rng, 4, 5);
  const Eigen::MatrixXd zero_phi = Eigen::MatrixXd::Zero(12, 3);
  const Eigen::MatrixXd zero_a = Eigen::MatrixXd::Zero(3, 5);
  CHECK(objective(problem.data, zero_phi, zero_a, problem.weights,
                  problem.incidence) ==
        doctest::Approx(problem.data.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("objective with an exact fit reduces to the l2-l2 penalty") {
  Rng rng(203);
  const Eigen::Index n = 4;
  Problem problem = random_problem(rng, n, 5);
  problem.weights.lambda_l1 = 0.0;
  problem.weights.lambda_linf = 0.0;
  problem.weights.lambda_graph = 0.0;
  const Eigen::MatrixXd factors = oracles::random_matrix(rng, 3 * n, 3);
  const Eigen::MatrixXd coefficients = oracles::random_matrix(rng, 3, 5);
  const Eigen::MatrixXd fitted = factors * coefficients;
  double expected = 0.0;
  for (Eigen::Index m = 0; m < 3; ++m) {
    expected += problem.weights.lambda * problem.weights.lambda_l2 *
                problem.weights.lambda_a * factors.col(m).norm() *
                coefficients.row(m).norm();
  }
  CHECK(objective(fitted, factors, coefficients, problem.weights,
                  problem.incidence) == doctest::Approx(expected));
}

TEST_CASE("objective matches a term-by-term recomputation") {
  Rng rng(207);
  const Eigen::Index n = 5, m = 3, k = 4;
  const Problem problem = random_problem(rng, n, k);
  const Eigen::MatrixXd factors = oracles::random_matrix(rng, 3 * n, m);
  const Eigen::MatrixXd coefficients = oracles::random_matrix(rng, m, k);

  double expected = (problem.data - factors * coefficients).squaredNorm();
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::VectorXd col = factors.col(c);
    double l1 = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) l1 += std::abs(col[i]);
    double group = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      group += std::max({std::abs(col[i]), std::abs(col[i + n]),
                         std::abs(col[i + 2 * n])});
    }
    const double phi =
        problem.weights.lambda_l1 * l1 + problem.weights.lambda_l2 * col.norm() +
        problem.weights.lambda_linf * group +
        problem.weights.lambda_graph *
            std::sqrt(oracles::graph_energy_direct(problem.graph, col));
    expected += problem.weights.lambda * phi * problem.weights.lambda_a *
                coefficients.row(c).norm();
  }
  CHECK(objective(problem.data, factors, coefficients, problem.weights,
                  problem.incidence) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("init_factors draws distinct identity columns") {
  const Eigen::MatrixXd full = init_factors(6, 6, 9);
  // a permutation of the identity: orthogonal with unit column sums
  CHECK((full.transpose() * full - Eigen::MatrixXd::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  const Eigen::MatrixXd a = init_factors(40, 7, 123);
  const Eigen::MatrixXd b = init_factors(40, 7, 123);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd c = init_factors(40, 7, 124);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
  for (Eigen::Index m = 0; m < 7; ++m) CHECK(a.col(m).sum() == 1.0);

  CHECK_THROWS_AS(init_factors(5, 6, 0), DimensionError);
}

TEST_CASE("auto step sizes") {
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 4);
  const auto [step_phi_id, step_a_id] = auto_step_sizes(identity, identity);
  CHECK(step_phi_id == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(step_a_id == doctest::Approx(0.5).epsilon(1e-6));
  const auto [step_phi_zero, step_a_zero] = auto_step_sizes(zero, zero);
  CHECK(step_phi_zero == doctest::Approx(1e6));
  CHECK(step_a_zero == doctest::Approx(1e6));
}

TEST_CASE("power iteration tracks a dense eigensolve within 1%") {
  Rng rng(211);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd raw = oracles::random_matrix(rng, 10, 10);
    const Eigen::MatrixXd psd = raw * raw.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(psd);
    const double truth = eig.eigenvalues().maxCoeff();
    CHECK(spectral_norm_estimate(psd) ==
          doctest::Approx(truth).epsilon(0.01));
  }
}

TEST_CASE("loss gradients match central finite differences") {
  Rng rng(223);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index n3 = 9, m = 4, k = 3;
    const Eigen::MatrixXd data = oracles::random_matrix(rng, n3, k);
    const Eigen::MatrixXd factors = oracles::random_matrix(rng, n3, m);
    const Eigen::MatrixXd coefficients = oracles::random_matrix(rng, m, k);
    auto loss = [&](const Eigen::MatrixXd& phi, const Eigen::MatrixXd& a) {
      return (data - phi * a).squaredNorm();
    };

    const Eigen::MatrixXd grad_phi =
        loss_gradient_factors(data, factors, coefficients);
    Eigen::MatrixXd fd_phi(n3, m);
    const double h = 1e-6;
    for (Eigen::Index r = 0; r < n3; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) {
        Eigen::MatrixXd hi = factors, lo = factors;
        hi(r, c) += h;
        lo(r, c) -= h;
        fd_phi(r, c) = (loss(hi, coefficients) - loss(lo, coefficients)) /
                       (2.0 * h);
      }
    }
    CHECK((grad_phi - fd_phi).norm() / fd_phi.norm() < 1e-5);

    const Eigen::MatrixXd grad_a =
        loss_gradient_coefficients(data, factors, coefficients);
    Eigen::MatrixXd fd_a(m, k);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::MatrixXd hi = coefficients, lo = coefficients;
        hi(r, c) += h;
        lo(r, c) -= h;
        fd_a(r, c) = (loss(factors, hi) - loss(factors, lo)) / (2.0 * h);
      }
    }
    CHECK((grad_a - fd_a).norm() / fd_a.norm() < 1e-5);
  }
}

TEST_CASE("zero data: the penalty annihilates the factorization") {
  // Note a BCD fixed-point subtlety: once one block of a factor reaches
  // exact zero, the partner block freezes (its loss gradient and proximal
  // scale both vanish), so the collapse shows in the per-factor penalty
  // products and the objective rather than in both matrices at once.
  Rng rng(227);
  Problem problem = random_problem(rng, 4, 3);
  problem.data.setZero();
  problem.weights.lambda = 600.0;
  problem.weights.lambda_a = 0.1;

  SolverState state;
  state.data = &problem.data;
  state.incidence = &problem.incidence;
  state.weights = problem.weights;
  state.factors = oracles::random_matrix(rng, 12, 3);
  state.coefficients = oracles::random_matrix(rng, 3, 3);
  for (int it = 0; it < 10; ++it) bcd_step(state);

  CHECK((state.factors * state.coefficients).norm() < 1e-10);
  CHECK(objective(problem.data, state.factors, state.coefficients,
                  problem.weights, problem.incidence) < 1e-10);
  for (Eigen::Index m = 0; m < 3; ++m) {
    const double product =
        phi_norm(state.factors.col(m), problem.weights, problem.incidence) *
        state.coefficients.row(m).norm();
    CHECK(product < 1e-10);
  }
}

TEST_CASE("vanishing penalty recovers an exact rank-2 fit") {
  Rng rng(229);
  const Eigen::Index n = 4, k = 6;
  Problem problem = random_problem(rng, n, k);
  const Eigen::MatrixXd left = oracles::random_matrix(rng, 3 * n, 2);
  const Eigen::MatrixXd right = oracles::random_matrix(rng, 2, k);
  problem.data = left * right;
  problem.weights.lambda = 1e-10;

  SolverConfig config;
  config.factor_count = 2;
  config.max_iterations = 4000;
  config.tolerance = 1e-16;
  config.seed = 3;
  const FactorizationResult result =
      solve(problem.data, problem.incidence, problem.weights, config);
  const double fit =
      (problem.data - result.factors * result.coefficients).norm() /
      problem.data.norm();
  CHECK(fit < 1e-6);
}

TEST_CASE("a single step never increases the objective") {
  Rng rng(233);
  for (int rep = 0; rep < 5; ++rep) {
    const Problem problem = random_problem(rng, 5, 4);
    SolverState state;
    state.data = &problem.data;
    state.incidence = &problem.incidence;
    state.weights = problem.weights;
    state.factors = init_factors(15, 3, rep);
    state.coefficients = fit_coefficient_matrix(state.factors, problem.data);
    const double before = objective(problem.data, state.factors,
                                    state.coefficients, problem.weights,
                                    problem.incidence);
    bcd_step(state);
    const double after = objective(problem.data, state.factors,
                                   state.coefficients, problem.weights,
                                   problem.incidence);
    CHECK(after <= before + 1e-8);
  }
}

TEST_CASE("objective trace is monotone on synthetic problems") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const SyntheticProblem problem = synthetic_problem(seed);
    SolverConfig config;
    config.factor_count = 4;
    config.max_iterations = 60;
    config.tolerance = 1e-12;
    config.seed = seed;
    const FactorizationResult result =
        solve(problem.set.data, problem.incidence, problem.weights, config);
    for (std::size_t t = 1; t < result.trace.objective.size(); ++t) {
      CHECK(result.trace.objective[t] <=
            result.trace.objective[t - 1] + 1e-8);
    }
  }
}

TEST_CASE("factor sparsity appears and grows with the l1 weight") {
  const SyntheticProblem base = synthetic_problem(5);
  SolverConfig config;
  config.factor_count = 4;
  config.max_iterations = 40;
  config.tolerance = 1e-12;
  config.seed = 11;
  double previous_fraction = -1.0;
  for (double boost : {0.1, 1.0, 10.0}) {
    RegularizerWeights weights = base.weights;
    weights.lambda_l1 *= boost;
    const FactorizationResult result =
        solve(base.set.data, base.incidence, weights, config);
    const double fraction =
        static_cast<double>((result.factors.array() == 0.0).count()) /
        static_cast<double>(result.factors.size());
    CHECK(fraction > 0.0);
    CHECK(fraction + 1e-12 >= previous_fraction);
    previous_fraction = fraction;
  }
}

TEST_CASE("final objective is stable across 100 initialization seeds") {
  // Data-dominant regime (K well above the planted rank): all restarts land
  // on near-congruent objective values.
  SyntheticSpec spec;
  spec.grid_width = 12;
  spec.grid_height = 12;
  spec.region_count = 2;
  spec.region_radius = 2;
  spec.shape_count = 30;
  spec.noise_sigma = 0.01;
  spec.seed = 3;
  const SyntheticData data = generate_synthetic(spec);
  const ShapeSet set = prepare_shape_set(data.shapes);
  const auto topo = data.base.unique_edges();
  const VertexGraph graph = weights_from_topology(
      euclidean_distances(data.base.vertices), topo, 0.1);
  const IncidenceOperator incidence(graph);
  const RegularizerWeights weights = default_weights(
      set.vertex_count, set.shape_count, 5, graph.edge_count());

  SolverConfig config;
  config.factor_count = 5;
  config.max_iterations = 300;
  config.tolerance = 1e-8;
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    config.seed = seed;
    const FactorizationResult result =
        solve(set.data, incidence, weights, config);
    const double final_objective = result.trace.objective.back();
    lowest = std::min(lowest, final_objective);
    highest = std::max(highest, final_objective);
  }
  CHECK((highest - lowest) / lowest < 0.05);
}

TEST_CASE("results are bit-identical for any thread count") {
  const SyntheticProblem problem = synthetic_problem(13);
  SolverConfig config;
  config.factor_count = 4;
  config.max_iterations = 25;
  config.tolerance = 1e-12;
  config.seed = 5;
  config.threads = 1;
  const FactorizationResult serial =
      solve(problem.set.data, problem.incidence, problem.weights, config);
  config.threads = 4;
  const FactorizationResult threaded =
      solve(problem.set.data, problem.incidence, problem.weights, config);
  CHECK((serial.factors - threaded.factors).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.coefficients - threaded.coefficients).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("solver validates inputs") {
  Rng rng(239);
  const Problem problem = random_problem(rng, 4, 3);
  SolverConfig config;
  config.factor_count = 2;
  RegularizerWeights bad = problem.weights;
  bad.lambda_a = 0.0;
  CHECK_THROWS_AS(solve(problem.data, problem.incidence, bad, config),
                  ValidationError);
  CHECK_THROWS_AS(
      solve(Eigen::MatrixXd::Zero(7, 3), problem.incidence, problem.weights,
            config),
      DimensionError);
}

}  // TEST_SUITE
