// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared-library surface exactly as an external client would:
// through localdeform.h only.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "localdeform.h"

namespace {

std::string temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "localdeform_capi_test";
  std::filesystem::create_directories(dir);
  return dir.string();
}

struct SyntheticFixture {
  ldm_synthetic_result* data = nullptr;

  SyntheticFixture() {
    ldm_synthetic_spec spec;
    ldm_synthetic_spec_init(&spec);
    spec.grid_width = 8;
    spec.grid_height = 8;
    spec.region_count = 2;
    spec.region_radius = 1;
    spec.shape_count = 10;
    spec.noise_sigma = 0.02;
    spec.seed = 11;
    REQUIRE(ldm_synthetic_generate(&spec, &data) == LDM_OK);
  }
  ~SyntheticFixture() { ldm_synthetic_destroy(data); }
};

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("status names and version") {
  CHECK(std::string(ldm_version()) == "1.0.0");
  CHECK(std::string(ldm_status_name(LDM_OK)) == "ok");
  CHECK(std::string(ldm_status_name(LDM_ERROR_IO)) == "io failure");
}

TEST_CASE("null arguments are rejected with a message") {
  CHECK(ldm_mesh_load_obj(nullptr, nullptr) == LDM_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(ldm_last_error()) > 0);
}

TEST_CASE("missing files surface as io errors") {
  ldm_mesh* mesh = nullptr;
  CHECK(ldm_mesh_load_obj("/nonexistent/nope.obj", &mesh) == LDM_ERROR_IO);
  CHECK(mesh == nullptr);
}

TEST_CASE("synthetic generation and file round trips") {
  SyntheticFixture fixture;
  const ldm_mesh* mesh = ldm_synthetic_mesh(fixture.data);
  const ldm_shape_set* shapes = ldm_synthetic_shapes(fixture.data);
  REQUIRE(mesh != nullptr);
  REQUIRE(shapes != nullptr);
  CHECK(ldm_mesh_vertex_count(mesh) == 64);
  CHECK(ldm_shape_set_shape_count(shapes) == 10);
  CHECK(ldm_synthetic_region_count(fixture.data) == 2);
  const int64_t size0 = ldm_synthetic_region_size(fixture.data, 0);
  CHECK(size0 > 0);
  std::vector<int64_t> vertices(static_cast<std::size_t>(size0));
  CHECK(ldm_synthetic_region_vertices(fixture.data, 0, vertices.data()) ==
        LDM_OK);

  const std::string dir = temp_dir();
  CHECK(ldm_mesh_save_obj(mesh, (dir + "/mesh.obj").c_str()) == LDM_OK);
  CHECK(ldm_shape_set_save_csv(shapes, (dir + "/shapes.csv").c_str()) ==
        LDM_OK);
  CHECK(ldm_synthetic_save_masks(fixture.data, (dir + "/masks.txt").c_str()) ==
        LDM_OK);

  ldm_mesh* mesh_back = nullptr;
  REQUIRE(ldm_mesh_load_obj((dir + "/mesh.obj").c_str(), &mesh_back) ==
          LDM_OK);
  CHECK(ldm_mesh_vertex_count(mesh_back) == 64);
  CHECK(ldm_mesh_face_count(mesh_back) == ldm_mesh_face_count(mesh));
  ldm_mesh_destroy(mesh_back);

  ldm_shape_set* shapes_back = nullptr;
  REQUIRE(ldm_shape_set_load_csv((dir + "/shapes.csv").c_str(),
                                 &shapes_back) == LDM_OK);
  CHECK(ldm_shape_set_vertex_count(shapes_back) == 64);
  CHECK(ldm_shape_set_scale(shapes_back) ==
        doctest::Approx(ldm_shape_set_scale(shapes)).epsilon(1e-12));
  ldm_shape_set_destroy(shapes_back);
}

TEST_CASE("shape sets load from per-shape obj files") {
  const std::string dir = temp_dir();
  const char* contents[2] = {
      "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 3\n",
      "v 0 0 0.2\nv 1.1 0 0\nv 0 0.9 0\nv 0 0 1.3\nf 1 2 3\n"};
  std::vector<std::string> paths;
  for (int k = 0; k < 2; ++k) {
    paths.push_back(dir + "/shape_" + std::to_string(k) + ".obj");
    std::ofstream out(paths.back());
    out << contents[k];
  }
  const char* raw[2] = {paths[0].c_str(), paths[1].c_str()};
  ldm_shape_set* set = nullptr;
  REQUIRE(ldm_shape_set_load_obj_files(raw, 2, &set) == LDM_OK);
  CHECK(ldm_shape_set_vertex_count(set) == 4);
  CHECK(ldm_shape_set_shape_count(set) == 2);
  std::vector<double> mean(12);
  CHECK(ldm_shape_set_mean(set, mean.data()) == LDM_OK);
  CHECK(mean[1] == doctest::Approx(1.05));  // x of the second vertex
  ldm_shape_set_destroy(set);
}

TEST_CASE("training, model access and persistence") {
  SyntheticFixture fixture;
  const ldm_mesh* mesh = ldm_synthetic_mesh(fixture.data);
  const ldm_shape_set* shapes = ldm_synthetic_shapes(fixture.data);

  ldm_graph* graph = nullptr;
  REQUIRE(ldm_graph_build(mesh, shapes, 0.1, &graph) == LDM_OK);
  CHECK(ldm_graph_edge_count(graph) > 0);

  const std::string graph_path = temp_dir() + "/graph.csv";
  CHECK(ldm_graph_save_csv(graph, graph_path.c_str()) == LDM_OK);
  ldm_graph* graph_back = nullptr;
  REQUIRE(ldm_graph_load_csv(graph_path.c_str(),
                             ldm_graph_vertex_count(graph),
                             &graph_back) == LDM_OK);
  CHECK(ldm_graph_edge_count(graph_back) == ldm_graph_edge_count(graph));
  ldm_graph_destroy(graph_back);

  ldm_weights weights;
  ldm_weights_init(&weights);
  ldm_solver_params params;
  ldm_solver_params_init(&params);
  params.factor_count = 4;
  params.max_iterations = 60;
  params.seed = 3;

  ldm_model* model = nullptr;
  REQUIRE(ldm_train(shapes, graph, &weights, &params, mesh, &model) == LDM_OK);
  const int64_t m = ldm_model_factor_count(model);
  const int64_t dim = ldm_model_point_dimension(model);
  CHECK(m >= 1);
  CHECK(m <= 4);
  CHECK(dim == 3 * 64);
  CHECK(ldm_model_scale(model) > 0.0);

  std::vector<double> factors(static_cast<std::size_t>(dim * m));
  std::vector<double> mean(static_cast<std::size_t>(dim));
  CHECK(ldm_model_factors(model, factors.data()) == LDM_OK);
  CHECK(ldm_model_mean(model, mean.data()) == LDM_OK);

  // deform with zero weights reproduces the mean
  std::vector<double> alpha(static_cast<std::size_t>(m), 0.0);
  std::vector<double> shape(static_cast<std::size_t>(dim));
  CHECK(ldm_model_deform(model, alpha.data(), m, 1, shape.data()) == LDM_OK);
  for (int64_t i = 0; i < dim; ++i) {
    CHECK(shape[static_cast<std::size_t>(i)] ==
          doctest::Approx(mean[static_cast<std::size_t>(i)]));
  }

  // fitting the mean shape gives (near) zero weights
  std::vector<double> fitted(static_cast<std::size_t>(m), 1.0);
  CHECK(ldm_model_fit(model, mean.data(), dim, fitted.data()) == LDM_OK);
  for (double v : fitted) CHECK(std::abs(v) < 1e-10);

  CHECK(ldm_model_set_config_json(model, "{\"version\":1}") == LDM_OK);
  const std::string model_dir = temp_dir() + "/model";
  CHECK(ldm_model_save(model, model_dir.c_str()) == LDM_OK);

  ldm_model* model_back = nullptr;
  REQUIRE(ldm_model_load(model_dir.c_str(), &model_back) == LDM_OK);
  CHECK(ldm_model_factor_count(model_back) == m);
  std::vector<double> factors_back(static_cast<std::size_t>(dim * m));
  CHECK(ldm_model_factors(model_back, factors_back.data()) == LDM_OK);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    CHECK(factors_back[i] == factors[i]);
  }

  // OBJ export of the mean (alpha = 0) carries the topology
  const std::string obj_path = temp_dir() + "/factor.obj";
  CHECK(ldm_model_export_obj(model, 1, 0.0, obj_path.c_str()) == LDM_OK);
  ldm_mesh* exported = nullptr;
  REQUIRE(ldm_mesh_load_obj(obj_path.c_str(), &exported) == LDM_OK);
  CHECK(ldm_mesh_vertex_count(exported) == 64);
  CHECK(ldm_mesh_face_count(exported) == ldm_mesh_face_count(mesh));
  ldm_mesh_destroy(exported);
  CHECK(ldm_model_export_obj(model, 99, 0.5, obj_path.c_str()) ==
        LDM_ERROR_INVALID_ARGUMENT);

  ldm_model_destroy(model_back);
  ldm_model_destroy(model);
  ldm_graph_destroy(graph);
}

TEST_CASE("evaluation through the shared library") {
  SyntheticFixture fixture;
  const ldm_mesh* mesh = ldm_synthetic_mesh(fixture.data);
  const ldm_shape_set* shapes = ldm_synthetic_shapes(fixture.data);
  ldm_graph* graph = nullptr;
  REQUIRE(ldm_graph_build(mesh, shapes, 0.1, &graph) == LDM_OK);

  ldm_weights weights;
  ldm_weights_init(&weights);
  ldm_solver_params params;
  ldm_solver_params_init(&params);
  params.factor_count = 3;
  params.max_iterations = 30;
  ldm_model* model = nullptr;
  REQUIRE(ldm_train(shapes, graph, &weights, &params, nullptr, &model) ==
          LDM_OK);

  ldm_eval_params eval_params;
  ldm_eval_params_init(&eval_params);
  eval_params.specificity_samples = 5;
  eval_params.folds = 5;
  eval_params.sparse_fraction = 0.25;
  eval_params.seed = 9;

  ldm_report* report = nullptr;
  REQUIRE(ldm_evaluate(model, shapes, graph, &weights, &params, &eval_params,
                       &report) == LDM_OK);
  double means[8] = {};
  CHECK(ldm_report_means(report, means) == LDM_OK);
  for (double v : means) CHECK(v >= 0.0);
  CHECK(means[1] >= means[0]);  // max >= avg for reconstruction

  const std::string report_dir = temp_dir() + "/report";
  CHECK(ldm_report_save(report, report_dir.c_str()) == LDM_OK);
  CHECK(std::filesystem::exists(report_dir + "/scores_long.csv"));
  CHECK(std::filesystem::exists(report_dir + "/summary.csv"));

  ldm_report_destroy(report);
  ldm_model_destroy(model);
  ldm_graph_destroy(graph);
}

TEST_CASE("parameter search over the kernel bandwidth") {
  SyntheticFixture fixture;
  const ldm_mesh* mesh = ldm_synthetic_mesh(fixture.data);
  const ldm_shape_set* shapes = ldm_synthetic_shapes(fixture.data);
  ldm_graph* graph = nullptr;
  REQUIRE(ldm_graph_build(mesh, shapes, 0.1, &graph) == LDM_OK);

  ldm_weights weights;
  ldm_weights_init(&weights);
  ldm_solver_params params;
  ldm_solver_params_init(&params);
  params.factor_count = 3;
  params.max_iterations = 15;
  params.kernelized = 1;
  ldm_eval_params eval_params;
  ldm_eval_params_init(&eval_params);
  eval_params.specificity_samples = 3;
  eval_params.folds = 5;
  eval_params.sparse_fraction = 0.3;

  ldm_search_result* result = nullptr;
  REQUIRE(ldm_parameter_search(shapes, graph, &weights, &params, &eval_params,
                               2, 17, &result) == LDM_OK);
  CHECK(ldm_search_run_count(result) == 2);
  const int64_t best = ldm_search_best_index(result);
  CHECK(best >= 0);
  CHECK(best < 2);
  const double bandwidth = ldm_search_best_bandwidth(result);
  CHECK(bandwidth > 0.1 - 1e-9);
  CHECK(bandwidth < 1.0 + 1e-9);
  double scores[16] = {};
  CHECK(ldm_search_scores(result, scores) == LDM_OK);
  double bandwidths[2] = {};
  CHECK(ldm_search_bandwidths(result, bandwidths) == LDM_OK);
  CHECK(bandwidths[static_cast<std::size_t>(best)] == bandwidth);

  const std::string csv = temp_dir() + "/search.csv";
  CHECK(ldm_search_save_csv(result, csv.c_str()) == LDM_OK);
  CHECK(std::filesystem::exists(csv));

  ldm_search_destroy(result);
  ldm_graph_destroy(graph);
}

}  // TEST_SUITE
