// SPDX-License-Identifier: Apache-2.0
#include "localdeform.h"

#include <cstring>
#include <memory>
#include <fstream>
#include <string>
#include <utility>

#include "localdeform/errors.hpp"
#include "localdeform/evaluate.hpp"
#include "localdeform/graph.hpp"
#include "localdeform/io.hpp"
#include "localdeform/mesh.hpp"
#include "localdeform/pipeline.hpp"
#include "localdeform/shape.hpp"
#include "localdeform/synthetic.hpp"

namespace ld = localdeform;

// ---------------------------------------------------------------- handles

struct ldm_mesh {
  ld::TriangleMesh mesh;
};

struct ldm_shape_set {
  ld::ShapeSet set;
};

struct ldm_graph {
  ld::VertexGraph graph;
};

struct ldm_model {
  ld::ModelBundle bundle;
};

struct ldm_report {
  ld::ScoreReport report;
};

struct ldm_synthetic_result {
  ld::SyntheticData data;
  ldm_mesh mesh_view;
  ldm_shape_set shapes_view;
};

struct ldm_search_result {
  ld::ParameterSearchResult result;
};

// ------------------------------------------------------------- error glue

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
ldm_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return LDM_OK;
  } catch (const ld::DimensionError& e) {
    set_error(e.what());
    return LDM_ERROR_DIMENSION;
  } catch (const ld::DegenerateInputError& e) {
    set_error(e.what());
    return LDM_ERROR_DEGENERATE_INPUT;
  } catch (const ld::NumericError& e) {
    set_error(e.what());
    return LDM_ERROR_NUMERIC;
  } catch (const ld::IoError& e) {
    set_error(e.what());
    return LDM_ERROR_IO;
  } catch (const ld::ValidationError& e) {
    set_error(e.what());
    return LDM_ERROR_INVALID_ARGUMENT;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return LDM_ERROR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return LDM_ERROR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return LDM_ERROR_INTERNAL;
  }
}

ldm_status invalid(const char* message) {
  set_error(message);
  return LDM_ERROR_INVALID_ARGUMENT;
}

ld::SolverConfig to_solver_config(const ldm_solver_params& params) {
  ld::SolverConfig config;
  config.factor_count = params.factor_count;
  config.max_iterations = static_cast<int>(params.max_iterations);
  config.tolerance = params.tolerance;
  config.seed = params.seed;
  if (params.step_factors > 0.0) config.step_phi = params.step_factors;
  if (params.step_coefficients > 0.0) {
    config.step_a = params.step_coefficients;
  }
  config.prox.dual_step = params.prox_dual_step;
  config.prox.epsilon = params.prox_epsilon;
  config.prox.max_iterations = static_cast<int>(params.prox_max_iterations);
  config.prox.primal_tolerance = params.prox_tolerance;
  config.threads = params.threads;
  return config;
}

ld::TrainOptions to_train_options(const ldm_weights& weights,
                                  const ldm_solver_params& params) {
  ld::TrainOptions options;
  options.solver = to_solver_config(params);
  options.weights.lambda = weights.lambda;
  options.weights.lambda_a = weights.lambda_a;
  options.weights.lambda_l1 = weights.lambda_l1;
  options.weights.lambda_l2 = weights.lambda_l2;
  options.weights.lambda_linf = weights.lambda_linf;
  options.weights.lambda_graph = weights.lambda_graph;
  options.kernelized = params.kernelized != 0;
  options.kernel.bandwidth = params.kernel_bandwidth;
  options.kernel.use_kernel = params.kernelized != 0;
  options.split_threshold = params.split_threshold;
  return options;
}

ld::EvalConfig to_eval_config(const ldm_eval_params& params) {
  ld::EvalConfig config;
  config.specificity_samples = static_cast<int>(params.specificity_samples);
  config.folds = static_cast<int>(params.folds);
  config.sparse_fraction = params.sparse_fraction;
  config.seed = params.seed;
  config.disjoint_folds = params.disjoint_folds != 0;
  return config;
}

ld::TrainerFn make_trainer(const ld::VertexGraph& graph,
                           const ld::TrainOptions& options) {
  return [&graph, options](const ld::ShapeSet& fold) {
    return ld::train_model(fold, graph, options).model.factors;
  };
}

}  // namespace

// ------------------------------------------------------------------ misc

const char* ldm_version(void) { return "1.0.0"; }

const char* ldm_status_name(ldm_status status) {
  switch (status) {
    case LDM_OK:
      return "ok";
    case LDM_ERROR_INVALID_ARGUMENT:
      return "invalid argument";
    case LDM_ERROR_DIMENSION:
      return "dimension mismatch";
    case LDM_ERROR_DEGENERATE_INPUT:
      return "degenerate input";
    case LDM_ERROR_NUMERIC:
      return "numeric failure";
    case LDM_ERROR_IO:
      return "io failure";
    case LDM_ERROR_INTERNAL:
      return "internal error";
  }
  return "unknown";
}

const char* ldm_last_error(void) { return g_last_error.c_str(); }

// ---------------------------------------------------------------- meshes

ldm_status ldm_mesh_load_obj(const char* path, ldm_mesh** out) {
  if (!path || !out) return invalid("ldm_mesh_load_obj: null argument");
  return guarded([&] {
    auto handle = std::make_unique<ldm_mesh>();
    handle->mesh = ld::load_obj(path);
    *out = handle.release();
  });
}

ldm_status ldm_mesh_save_obj(const ldm_mesh* mesh, const char* path) {
  if (!mesh || !path) return invalid("ldm_mesh_save_obj: null argument");
  return guarded([&] { ld::save_obj(path, mesh->mesh); });
}

int64_t ldm_mesh_vertex_count(const ldm_mesh* mesh) {
  return mesh ? mesh->mesh.vertex_count() : 0;
}

int64_t ldm_mesh_face_count(const ldm_mesh* mesh) {
  return mesh ? static_cast<int64_t>(mesh->mesh.faces.size()) : 0;
}

void ldm_mesh_destroy(ldm_mesh* mesh) { delete mesh; }

// ------------------------------------------------------------ shape sets

ldm_status ldm_shape_set_create(const double* coords, int64_t n_vertices,
                                int64_t n_shapes, ldm_shape_set** out) {
  if (!coords || !out) return invalid("ldm_shape_set_create: null argument");
  return guarded([&] {
    std::vector<Eigen::MatrixXd> shapes;
    shapes.reserve(static_cast<std::size_t>(n_shapes));
    for (int64_t k = 0; k < n_shapes; ++k) {
      shapes.emplace_back(Eigen::Map<const Eigen::MatrixXd>(
          coords + k * n_vertices * 3, n_vertices, 3));
    }
    auto handle = std::make_unique<ldm_shape_set>();
    handle->set = ld::prepare_shape_set(shapes);
    *out = handle.release();
  });
}

ldm_status ldm_shape_set_load_csv(const char* path, ldm_shape_set** out) {
  if (!path || !out) return invalid("ldm_shape_set_load_csv: null argument");
  return guarded([&] {
    const Eigen::MatrixXd matrix = ld::load_csv_matrix(path);
    auto handle = std::make_unique<ldm_shape_set>();
    handle->set = ld::prepare_shape_set(ld::shapes_from_matrix(matrix));
    *out = handle.release();
  });
}

ldm_status ldm_shape_set_load_obj_files(const char* const* paths,
                                        int64_t n_paths,
                                        ldm_shape_set** out) {
  if (!paths || !out) {
    return invalid("ldm_shape_set_load_obj_files: null argument");
  }
  return guarded([&] {
    std::vector<Eigen::MatrixXd> shapes;
    shapes.reserve(static_cast<std::size_t>(n_paths));
    for (int64_t i = 0; i < n_paths; ++i) {
      if (!paths[i]) throw ld::ValidationError("null path in list");
      shapes.push_back(ld::load_obj(paths[i]).vertices);
    }
    auto handle = std::make_unique<ldm_shape_set>();
    handle->set = ld::prepare_shape_set(shapes);
    *out = handle.release();
  });
}

ldm_status ldm_shape_set_save_csv(const ldm_shape_set* set,
                                  const char* path) {
  if (!set || !path) return invalid("ldm_shape_set_save_csv: null argument");
  return guarded(
      [&] { ld::save_csv_matrix(path, ld::shapes_to_matrix(set->set.shapes)); });
}

int64_t ldm_shape_set_vertex_count(const ldm_shape_set* set) {
  return set ? set->set.vertex_count : 0;
}

int64_t ldm_shape_set_shape_count(const ldm_shape_set* set) {
  return set ? set->set.shape_count : 0;
}

double ldm_shape_set_scale(const ldm_shape_set* set) {
  return set ? set->set.scale : 0.0;
}

ldm_status ldm_shape_set_mean(const ldm_shape_set* set, double* out) {
  if (!set || !out) return invalid("ldm_shape_set_mean: null argument");
  return guarded([&] {
    const Eigen::VectorXd mean = ld::vectorize(set->set.mean_shape);
    std::memcpy(out, mean.data(), sizeof(double) * mean.size());
  });
}

void ldm_shape_set_destroy(ldm_shape_set* set) { delete set; }

// ---------------------------------------------------------------- graphs

ldm_status ldm_graph_build(const ldm_mesh* topology,
                           const ldm_shape_set* shapes, double theta,
                           ldm_graph** out) {
  if (!topology || !shapes || !out) {
    return invalid("ldm_graph_build: null argument");
  }
  return guarded([&] {
    if (topology->mesh.vertex_count() != shapes->set.vertex_count) {
      throw ld::DimensionError("graph topology and shapes disagree on N");
    }
    const Eigen::MatrixXd d_euc =
        ld::euclidean_distances(shapes->set.mean_shape);
    auto handle = std::make_unique<ldm_graph>();
    handle->graph = ld::weights_from_topology(
        d_euc, topology->mesh.unique_edges(), theta > 0.0 ? theta : 0.1);
    *out = handle.release();
  });
}

ldm_status ldm_graph_build_parts(const ldm_mesh* topology,
                                 const ldm_shape_set* shapes,
                                 const char* parts_path,
                                 const char* part_edges_path, double alpha_d,
                                 double theta, ldm_graph** out) {
  if (!topology || !shapes || !parts_path || !part_edges_path || !out) {
    return invalid("ldm_graph_build_parts: null argument");
  }
  return guarded([&] {
    if (topology->mesh.vertex_count() != shapes->set.vertex_count) {
      throw ld::DimensionError("graph topology and shapes disagree on N");
    }
    ld::PartDecomposition decomposition;
    decomposition.parts = ld::load_parts(parts_path);
    decomposition.part_edges = ld::load_part_edges(part_edges_path);
    const auto edges = topology->mesh.unique_edges();
    ld::DistanceMatrices distances;
    distances.euclidean = ld::euclidean_distances(shapes->set.mean_shape);
    distances.geodesic =
        ld::geodesic_distances(shapes->set.mean_shape, edges);
    auto handle = std::make_unique<ldm_graph>();
    handle->graph = ld::composite_part_weights(
        decomposition, distances, edges, alpha_d > 0.0 ? alpha_d : 0.5,
        theta > 0.0 ? theta : 0.1);
    *out = handle.release();
  });
}

ldm_status ldm_graph_load_csv(const char* path, int64_t vertex_count,
                              ldm_graph** out) {
  if (!path || !out) return invalid("ldm_graph_load_csv: null argument");
  return guarded([&] {
    auto handle = std::make_unique<ldm_graph>();
    handle->graph = ld::load_graph_csv(path, vertex_count);
    *out = handle.release();
  });
}

ldm_status ldm_graph_save_csv(const ldm_graph* graph, const char* path) {
  if (!graph || !path) return invalid("ldm_graph_save_csv: null argument");
  return guarded([&] { ld::save_graph_csv(path, graph->graph); });
}

int64_t ldm_graph_vertex_count(const ldm_graph* graph) {
  return graph ? graph->graph.vertex_count : 0;
}

int64_t ldm_graph_edge_count(const ldm_graph* graph) {
  return graph ? graph->graph.edge_count() : 0;
}

void ldm_graph_destroy(ldm_graph* graph) { delete graph; }

// -------------------------------------------------------------- training

void ldm_weights_init(ldm_weights* weights) {
  if (!weights) return;
  weights->lambda = -1.0;
  weights->lambda_a = -1.0;
  weights->lambda_l1 = -1.0;
  weights->lambda_l2 = -1.0;
  weights->lambda_linf = -1.0;
  weights->lambda_graph = -1.0;
}

ldm_status ldm_weights_defaults(int64_t n_vertices, int64_t n_columns,
                                int64_t factor_count, int64_t edge_count,
                                ldm_weights* out) {
  if (!out) return invalid("ldm_weights_defaults: null argument");
  return guarded([&] {
    const ld::RegularizerWeights defaults =
        ld::default_weights(n_vertices, n_columns, factor_count, edge_count);
    out->lambda = defaults.lambda;
    out->lambda_a = defaults.lambda_a;
    out->lambda_l1 = defaults.lambda_l1;
    out->lambda_l2 = defaults.lambda_l2;
    out->lambda_linf = defaults.lambda_linf;
    out->lambda_graph = defaults.lambda_graph;
  });
}

void ldm_solver_params_init(ldm_solver_params* params) {
  if (!params) return;
  params->factor_count = 8;
  params->max_iterations = 200;
  params->tolerance = 1e-6;
  params->seed = 0;
  params->step_factors = 0.0;
  params->step_coefficients = 0.0;
  params->prox_dual_step = 1.999;
  params->prox_epsilon = 1e-4;
  params->prox_max_iterations = 20;
  params->prox_tolerance = 1e-8;
  params->kernelized = 0;
  params->kernel_bandwidth = 0.2;
  params->threads = 1;
  params->split_threshold = 0.0;
}

ldm_status ldm_train(const ldm_shape_set* shapes, const ldm_graph* graph,
                     const ldm_weights* weights,
                     const ldm_solver_params* params,
                     const ldm_mesh* topology, ldm_model** out) {
  if (!shapes || !graph || !weights || !params || !out) {
    return invalid("ldm_train: null argument");
  }
  return guarded([&] {
    const ld::TrainOptions options = to_train_options(*weights, *params);
    ld::TrainedModel trained =
        ld::train_model(shapes->set, graph->graph, options);
    auto handle = std::make_unique<ldm_model>();
    handle->bundle.model = std::move(trained.model);
    handle->bundle.trace = std::move(trained.trace);
    if (topology) {
      ld::TriangleMesh mean_mesh = topology->mesh;
      if (mean_mesh.vertex_count() != shapes->set.vertex_count) {
        throw ld::DimensionError("ldm_train: topology does not match N");
      }
      mean_mesh.vertices = shapes->set.mean_shape;
      handle->bundle.mean_mesh = std::move(mean_mesh);
    }
    *out = handle.release();
  });
}

// ---------------------------------------------------------------- models

int64_t ldm_model_factor_count(const ldm_model* model) {
  return model ? model->bundle.model.factor_count() : 0;
}

int64_t ldm_model_point_dimension(const ldm_model* model) {
  return model ? model->bundle.model.point_dimension() : 0;
}

int64_t ldm_model_shape_count(const ldm_model* model) {
  return model ? model->bundle.model.coefficients.cols() : 0;
}

double ldm_model_scale(const ldm_model* model) {
  return model ? model->bundle.model.scale : 0.0;
}

ldm_status ldm_model_factors(const ldm_model* model, double* out) {
  if (!model || !out) return invalid("ldm_model_factors: null argument");
  return guarded([&] {
    const auto& factors = model->bundle.model.factors;
    std::memcpy(out, factors.data(), sizeof(double) * factors.size());
  });
}

ldm_status ldm_model_coefficients(const ldm_model* model, double* out) {
  if (!model || !out) return invalid("ldm_model_coefficients: null argument");
  return guarded([&] {
    const auto& coeffs = model->bundle.model.coefficients;
    std::memcpy(out, coeffs.data(), sizeof(double) * coeffs.size());
  });
}

ldm_status ldm_model_mean(const ldm_model* model, double* out) {
  if (!model || !out) return invalid("ldm_model_mean: null argument");
  return guarded([&] {
    const auto& mean = model->bundle.model.mean;
    std::memcpy(out, mean.data(), sizeof(double) * mean.size());
  });
}

ldm_status ldm_model_deform(const ldm_model* model, const double* alpha,
                            int64_t alpha_len, int denormalize, double* out) {
  if (!model || !alpha || !out) {
    return invalid("ldm_model_deform: null argument");
  }
  return guarded([&] {
    const Eigen::Map<const Eigen::VectorXd> weights(alpha, alpha_len);
    const Eigen::VectorXd shape =
        ld::deform(model->bundle.model, weights, denormalize != 0);
    std::memcpy(out, shape.data(), sizeof(double) * shape.size());
  });
}

ldm_status ldm_model_fit(const ldm_model* model, const double* shape,
                         int64_t shape_len, double* alpha_out) {
  if (!model || !shape || !alpha_out) {
    return invalid("ldm_model_fit: null argument");
  }
  return guarded([&] {
    const auto& m = model->bundle.model;
    if (shape_len != m.point_dimension()) {
      throw ld::DimensionError("ldm_model_fit: shape length mismatch");
    }
    const Eigen::Map<const Eigen::VectorXd> x(shape, shape_len);
    const Eigen::VectorXd deviation = (x - m.mean) / m.scale;
    const Eigen::VectorXd alpha = ld::fit_coefficients(m.factors, deviation);
    std::memcpy(alpha_out, alpha.data(), sizeof(double) * alpha.size());
  });
}

ldm_status ldm_model_export_obj(const ldm_model* model, int64_t factor,
                                double alpha, const char* path) {
  if (!model || !path) return invalid("ldm_model_export_obj: null argument");
  return guarded([&] {
    const auto& m = model->bundle.model;
    if (factor < 1 || factor > m.factor_count()) {
      throw ld::ValidationError("ldm_model_export_obj: factor index " +
                                std::to_string(factor) + " outside [1, " +
                                std::to_string(m.factor_count()) + "]");
    }
    Eigen::VectorXd alpha_vec = Eigen::VectorXd::Zero(m.factor_count());
    alpha_vec[factor - 1] = alpha;
    const Eigen::VectorXd shape = ld::deform(m, alpha_vec, true);
    ld::TriangleMesh mesh;
    mesh.vertices = ld::devectorize(shape);
    if (model->bundle.mean_mesh) {
      mesh.faces = model->bundle.mean_mesh->faces;
    }
    ld::save_obj(path, mesh);
  });
}

ldm_status ldm_model_save(const ldm_model* model, const char* dir) {
  if (!model || !dir) return invalid("ldm_model_save: null argument");
  return guarded([&] { ld::save_model(dir, model->bundle); });
}

ldm_status ldm_model_load(const char* dir, ldm_model** out) {
  if (!dir || !out) return invalid("ldm_model_load: null argument");
  return guarded([&] {
    auto handle = std::make_unique<ldm_model>();
    handle->bundle = ld::load_model(dir);
    *out = handle.release();
  });
}

ldm_status ldm_model_set_config_json(ldm_model* model, const char* json) {
  if (!model || !json) {
    return invalid("ldm_model_set_config_json: null argument");
  }
  return guarded([&] { model->bundle.config_json = json; });
}

void ldm_model_destroy(ldm_model* model) { delete model; }

// ------------------------------------------------------------ evaluation

void ldm_eval_params_init(ldm_eval_params* params) {
  if (!params) return;
  params->specificity_samples = 100;
  params->folds = 5;
  params->sparse_fraction = 0.05;
  params->seed = 0;
  params->disjoint_folds = 1;
}

ldm_status ldm_evaluate(const ldm_model* model, const ldm_shape_set* shapes,
                        const ldm_graph* graph, const ldm_weights* weights,
                        const ldm_solver_params* solver_params,
                        const ldm_eval_params* eval_params,
                        ldm_report** out) {
  if (!model || !shapes || !graph || !weights || !solver_params ||
      !eval_params || !out) {
    return invalid("ldm_evaluate: null argument");
  }
  return guarded([&] {
    const ld::TrainOptions options =
        to_train_options(*weights, *solver_params);
    auto handle = std::make_unique<ldm_report>();
    handle->report = ld::evaluate_model(
        model->bundle.model, shapes->set,
        make_trainer(graph->graph, options), to_eval_config(*eval_params));
    *out = handle.release();
  });
}

ldm_status ldm_report_means(const ldm_report* report, double out[8]) {
  if (!report || !out) return invalid("ldm_report_means: null argument");
  return guarded([&] {
    const auto means = report->report.means();
    for (std::size_t i = 0; i < 8; ++i) out[i] = means[i];
  });
}

ldm_status ldm_report_save(const ldm_report* report, const char* dir) {
  if (!report || !dir) return invalid("ldm_report_save: null argument");
  return guarded([&] { ld::save_report(dir, report->report); });
}

void ldm_report_destroy(ldm_report* report) { delete report; }

// -------------------------------------------------------- synthetic data

void ldm_synthetic_spec_init(ldm_synthetic_spec* spec) {
  if (!spec) return;
  spec->grid = 1;
  spec->grid_width = 20;
  spec->grid_height = 20;
  spec->icosphere_subdivisions = 2;
  spec->region_count = 4;
  spec->region_radius = 3;
  spec->amplitude_min = 1.0;
  spec->amplitude_max = 1.0;
  spec->shape_count = 30;
  spec->noise_sigma = 0.01;
  spec->seed = 0;
}

ldm_status ldm_synthetic_generate(const ldm_synthetic_spec* spec,
                                  ldm_synthetic_result** out) {
  if (!spec || !out) return invalid("ldm_synthetic_generate: null argument");
  return guarded([&] {
    ld::SyntheticSpec core_spec;
    core_spec.base = spec->grid != 0 ? ld::BaseMeshKind::Grid
                                     : ld::BaseMeshKind::Icosphere;
    core_spec.grid_width = spec->grid_width;
    core_spec.grid_height = spec->grid_height;
    core_spec.icosphere_subdivisions =
        static_cast<int>(spec->icosphere_subdivisions);
    core_spec.region_count = spec->region_count;
    core_spec.region_radius = static_cast<int>(spec->region_radius);
    core_spec.amplitude_min = spec->amplitude_min;
    core_spec.amplitude_max = spec->amplitude_max;
    core_spec.shape_count = spec->shape_count;
    core_spec.noise_sigma = spec->noise_sigma;
    core_spec.seed = spec->seed;

    auto handle = std::make_unique<ldm_synthetic_result>();
    handle->data = ld::generate_synthetic(core_spec);
    handle->mesh_view.mesh = handle->data.base;
    handle->shapes_view.set = ld::prepare_shape_set(handle->data.shapes);
    *out = handle.release();
  });
}

const ldm_mesh* ldm_synthetic_mesh(const ldm_synthetic_result* data) {
  return data ? &data->mesh_view : nullptr;
}

const ldm_shape_set* ldm_synthetic_shapes(const ldm_synthetic_result* data) {
  return data ? &data->shapes_view : nullptr;
}

int64_t ldm_synthetic_region_count(const ldm_synthetic_result* data) {
  return data ? static_cast<int64_t>(data->data.masks.size()) : 0;
}

int64_t ldm_synthetic_region_size(const ldm_synthetic_result* data,
                                  int64_t region) {
  if (!data || region < 0 ||
      region >= static_cast<int64_t>(data->data.masks.size())) {
    return 0;
  }
  return static_cast<int64_t>(
      data->data.masks[static_cast<std::size_t>(region)].size());
}

ldm_status ldm_synthetic_region_vertices(const ldm_synthetic_result* data,
                                         int64_t region, int64_t* out) {
  if (!data || !out) {
    return invalid("ldm_synthetic_region_vertices: null argument");
  }
  return guarded([&] {
    if (region < 0 ||
        region >= static_cast<int64_t>(data->data.masks.size())) {
      throw ld::ValidationError("region index out of range");
    }
    const auto& mask = data->data.masks[static_cast<std::size_t>(region)];
    for (std::size_t i = 0; i < mask.size(); ++i) {
      out[i] = static_cast<int64_t>(mask[i]);
    }
  });
}

ldm_status ldm_synthetic_save_masks(const ldm_synthetic_result* data,
                                    const char* path) {
  if (!data || !path) {
    return invalid("ldm_synthetic_save_masks: null argument");
  }
  return guarded([&] { ld::save_masks(path, data->data.masks); });
}

void ldm_synthetic_destroy(ldm_synthetic_result* data) { delete data; }

// ------------------------------------------------------ parameter search

ldm_status ldm_parameter_search(const ldm_shape_set* shapes,
                                const ldm_graph* graph,
                                const ldm_weights* weights,
                                const ldm_solver_params* solver_params,
                                const ldm_eval_params* eval_params,
                                int64_t n_runs, uint64_t seed,
                                ldm_search_result** out) {
  if (!shapes || !graph || !weights || !solver_params || !eval_params ||
      !out) {
    return invalid("ldm_parameter_search: null argument");
  }
  return guarded([&] {
    const ld::TrainOptions base_options =
        to_train_options(*weights, *solver_params);
    const ld::EvalConfig eval_config = to_eval_config(*eval_params);
    auto runner = [&](double bandwidth) {
      ld::TrainOptions options = base_options;
      options.kernel.bandwidth = bandwidth;
      const ld::TrainedModel trained =
          ld::train_model(shapes->set, graph->graph, options);
      const ld::ScoreReport report = ld::evaluate_model(
          trained.model, shapes->set, make_trainer(graph->graph, options),
          eval_config);
      return report.means();
    };
    auto handle = std::make_unique<ldm_search_result>();
    handle->result = ld::parameter_search(runner, static_cast<int>(n_runs),
                                          seed);
    *out = handle.release();
  });
}

int64_t ldm_search_run_count(const ldm_search_result* result) {
  return result ? result->result.scores.rows() : 0;
}

int64_t ldm_search_best_index(const ldm_search_result* result) {
  return result ? result->result.best_index : -1;
}

double ldm_search_best_bandwidth(const ldm_search_result* result) {
  return result ? result->result.best_bandwidth : 0.0;
}

ldm_status ldm_search_scores(const ldm_search_result* result, double* out) {
  if (!result || !out) return invalid("ldm_search_scores: null argument");
  return guarded([&] {
    const auto& scores = result->result.scores;
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
      for (Eigen::Index c = 0; c < 8; ++c) {
        out[r * 8 + c] = scores(r, c);
      }
    }
  });
}

ldm_status ldm_search_bandwidths(const ldm_search_result* result,
                                 double* out) {
  if (!result || !out) return invalid("ldm_search_bandwidths: null argument");
  return guarded([&] {
    const auto& bandwidths = result->result.bandwidths;
    for (std::size_t i = 0; i < bandwidths.size(); ++i) out[i] = bandwidths[i];
  });
}

ldm_status ldm_search_save_csv(const ldm_search_result* result,
                               const char* path) {
  if (!result || !path) return invalid("ldm_search_save_csv: null argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw ld::IoError(std::string("cannot open for writing: ") + path);
    out << "run,bandwidth,reconstruction_avg,reconstruction_max,"
           "specificity_avg,specificity_max,generalisation_avg,"
           "generalisation_max,sparse_reconstruction_avg,"
           "sparse_reconstruction_max,selected\n";
    const auto& res = result->result;
    for (Eigen::Index r = 0; r < res.scores.rows(); ++r) {
      out << r + 1 << ','
          << ld::format_double(res.bandwidths[static_cast<std::size_t>(r)]);
      for (Eigen::Index c = 0; c < 8; ++c) {
        out << ',' << ld::format_double(res.scores(r, c));
      }
      out << ',' << (r == res.best_index ? 1 : 0) << '\n';
    }
    if (!out) throw ld::IoError(std::string("failed writing ") + path);
  });
}

void ldm_search_destroy(ldm_search_result* result) { delete result; }
