// SPDX-License-Identifier: Apache-2.0
//
// Batch command-line front end. Everything goes through the shared-library
// C interface; configuration lives in versioned JSON files.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "localdeform.h"

namespace {

using nlohmann::json;

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void fail(ldm_status status, const std::string& context) {
  throw CliError(context + ": " + ldm_status_name(status) + ": " +
                 ldm_last_error());
}

void check(ldm_status status, const std::string& context) {
  if (status != LDM_OK) fail(status, context);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open config file: " + path);
  try {
    json parsed;
    in >> parsed;
    return parsed;
  } catch (const json::exception& e) {
    throw CliError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

void check_keys(const json& object, const std::string& where,
                const std::vector<std::string>& allowed) {
  if (!object.is_object()) {
    throw CliError(where + ": expected a JSON object");
  }
  for (const auto& [key, value] : object.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw CliError(where + ": unknown field '" + key + "'");
    }
  }
}

template <typename T>
T field_or(const json& object, const std::string& key, T fallback) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw CliError("field '" + key + "' has the wrong type");
  }
}

// "auto" (or absence) maps onto the negative auto-resolution marker.
double weight_field(const json& object, const std::string& key) {
  if (!object.contains(key)) return -1.0;
  const json& value = object.at(key);
  if (value.is_string()) {
    if (value.get<std::string>() == "auto") return -1.0;
    throw CliError("field '" + key + "' must be a number or \"auto\"");
  }
  if (!value.is_number()) {
    throw CliError("field '" + key + "' must be a number or \"auto\"");
  }
  return value.get<double>();
}

struct SolverSettings {
  ldm_weights weights{};
  ldm_solver_params params{};
  double graph_theta = 0.1;
  double graph_alpha_d = 0.5;
  json echo;
};

SolverSettings parse_solver_config(const json& config,
                                   const std::string& where) {
  check_keys(config, where,
             {"version", "factor_count", "max_iterations", "tolerance",
              "seed", "threads", "kernelized", "kernel_bandwidth", "weights",
              "steps", "prox", "graph", "split_threshold"});
  const int version = field_or<int>(config, "version", 1);
  if (version != 1) {
    throw CliError(where + ": unsupported config version " +
                   std::to_string(version));
  }
  SolverSettings settings;
  ldm_weights_init(&settings.weights);
  ldm_solver_params_init(&settings.params);

  settings.params.factor_count =
      field_or<int64_t>(config, "factor_count", settings.params.factor_count);
  settings.params.max_iterations = field_or<int64_t>(
      config, "max_iterations", settings.params.max_iterations);
  settings.params.tolerance =
      field_or<double>(config, "tolerance", settings.params.tolerance);
  settings.params.seed =
      field_or<uint64_t>(config, "seed", settings.params.seed);
  settings.params.threads =
      field_or<int>(config, "threads", settings.params.threads);
  settings.params.kernelized =
      field_or<bool>(config, "kernelized", false) ? 1 : 0;
  settings.params.kernel_bandwidth = field_or<double>(
      config, "kernel_bandwidth", settings.params.kernel_bandwidth);
  settings.params.split_threshold = field_or<double>(
      config, "split_threshold", settings.params.split_threshold);

  if (config.contains("weights")) {
    const json& weights = config.at("weights");
    check_keys(weights, where + ".weights",
               {"lambda", "lambda_a", "lambda_l1", "lambda_l2", "lambda_linf",
                "lambda_graph"});
    settings.weights.lambda = weight_field(weights, "lambda");
    settings.weights.lambda_a = weight_field(weights, "lambda_a");
    settings.weights.lambda_l1 = weight_field(weights, "lambda_l1");
    settings.weights.lambda_l2 = weight_field(weights, "lambda_l2");
    settings.weights.lambda_linf = weight_field(weights, "lambda_linf");
    settings.weights.lambda_graph = weight_field(weights, "lambda_graph");
  }
  if (config.contains("steps")) {
    const json& steps = config.at("steps");
    check_keys(steps, where + ".steps", {"factors", "coefficients"});
    settings.params.step_factors = weight_field(steps, "factors");
    settings.params.step_coefficients = weight_field(steps, "coefficients");
    if (settings.params.step_factors < 0.0) settings.params.step_factors = 0.0;
    if (settings.params.step_coefficients < 0.0) {
      settings.params.step_coefficients = 0.0;
    }
  }
  if (config.contains("prox")) {
    const json& prox = config.at("prox");
    check_keys(prox, where + ".prox",
               {"dual_step", "epsilon", "max_iterations", "tolerance"});
    settings.params.prox_dual_step =
        field_or<double>(prox, "dual_step", settings.params.prox_dual_step);
    settings.params.prox_epsilon =
        field_or<double>(prox, "epsilon", settings.params.prox_epsilon);
    settings.params.prox_max_iterations = field_or<int64_t>(
        prox, "max_iterations", settings.params.prox_max_iterations);
    settings.params.prox_tolerance =
        field_or<double>(prox, "tolerance", settings.params.prox_tolerance);
  }
  if (config.contains("graph")) {
    const json& graph = config.at("graph");
    check_keys(graph, where + ".graph", {"theta", "alpha_d"});
    settings.graph_theta = field_or<double>(graph, "theta", 0.1);
    settings.graph_alpha_d = field_or<double>(graph, "alpha_d", 0.5);
  }
  settings.echo = config;
  settings.echo["version"] = 1;
  return settings;
}

json solver_settings_echo(const SolverSettings& settings) {
  json echo = settings.echo;
  echo["factor_count"] = settings.params.factor_count;
  echo["max_iterations"] = settings.params.max_iterations;
  echo["tolerance"] = settings.params.tolerance;
  echo["seed"] = settings.params.seed;
  echo["threads"] = settings.params.threads;
  echo["kernelized"] = settings.params.kernelized != 0;
  echo["kernel_bandwidth"] = settings.params.kernel_bandwidth;
  return echo;
}

struct EvalSettings {
  ldm_eval_params params{};
  std::optional<json> trainer;
  json echo;
};

EvalSettings parse_eval_config(const json& config, const std::string& where) {
  check_keys(config, where,
             {"version", "specificity_samples", "folds", "sparse_fraction",
              "seed", "disjoint_folds", "trainer"});
  const int version = field_or<int>(config, "version", 1);
  if (version != 1) {
    throw CliError(where + ": unsupported config version " +
                   std::to_string(version));
  }
  EvalSettings settings;
  ldm_eval_params_init(&settings.params);
  settings.params.specificity_samples = field_or<int64_t>(
      config, "specificity_samples", settings.params.specificity_samples);
  settings.params.folds =
      field_or<int64_t>(config, "folds", settings.params.folds);
  settings.params.sparse_fraction = field_or<double>(
      config, "sparse_fraction", settings.params.sparse_fraction);
  settings.params.seed =
      field_or<uint64_t>(config, "seed", settings.params.seed);
  settings.params.disjoint_folds =
      field_or<bool>(config, "disjoint_folds", true) ? 1 : 0;
  if (config.contains("trainer")) settings.trainer = config.at("trainer");
  settings.echo = config;
  settings.echo["version"] = 1;
  return settings;
}

// RAII wrappers for the C handles used by the driver.
template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { Destroy(ptr); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  T** slot() { return &ptr; }
  T* get() const { return ptr; }
  explicit operator bool() const { return ptr != nullptr; }
};

using MeshHandle = Handle<ldm_mesh, ldm_mesh_destroy>;
using ShapesHandle = Handle<ldm_shape_set, ldm_shape_set_destroy>;
using GraphHandle = Handle<ldm_graph, ldm_graph_destroy>;
using ModelHandle = Handle<ldm_model, ldm_model_destroy>;
using ReportHandle = Handle<ldm_report, ldm_report_destroy>;
using SyntheticHandle = Handle<ldm_synthetic_result, ldm_synthetic_destroy>;
using SearchHandle = Handle<ldm_search_result, ldm_search_destroy>;

int threads_from_environment() {
  const char* env = std::getenv("LOCALDEFORM_THREADS");
  if (!env) return 0;
  const long value = std::strtol(env, nullptr, 10);
  return value > 0 ? static_cast<int>(value) : 0;
}

// ------------------------------------------------------------------- gen

int run_gen(const std::string& spec_path, const std::string& out_dir,
            std::optional<uint64_t> seed) {
  ldm_synthetic_spec spec;
  ldm_synthetic_spec_init(&spec);
  json echo;
  if (!spec_path.empty()) {
    const json config = load_json(spec_path);
    check_keys(config, spec_path,
               {"version", "base", "grid_width", "grid_height",
                "icosphere_subdivisions", "regions", "region_radius",
                "amplitude_min", "amplitude_max", "shapes", "noise_sigma",
                "seed"});
    const std::string base = field_or<std::string>(config, "base", "grid");
    if (base == "grid") {
      spec.grid = 1;
    } else if (base == "icosphere") {
      spec.grid = 0;
    } else {
      throw CliError("field 'base' must be \"grid\" or \"icosphere\"");
    }
    spec.grid_width = field_or<int64_t>(config, "grid_width", spec.grid_width);
    spec.grid_height =
        field_or<int64_t>(config, "grid_height", spec.grid_height);
    spec.icosphere_subdivisions = field_or<int64_t>(
        config, "icosphere_subdivisions", spec.icosphere_subdivisions);
    spec.region_count = field_or<int64_t>(config, "regions", spec.region_count);
    spec.region_radius =
        field_or<int64_t>(config, "region_radius", spec.region_radius);
    spec.amplitude_min =
        field_or<double>(config, "amplitude_min", spec.amplitude_min);
    spec.amplitude_max =
        field_or<double>(config, "amplitude_max", spec.amplitude_max);
    spec.shape_count = field_or<int64_t>(config, "shapes", spec.shape_count);
    spec.noise_sigma =
        field_or<double>(config, "noise_sigma", spec.noise_sigma);
    spec.seed = field_or<uint64_t>(config, "seed", spec.seed);
    echo = config;
  }
  if (seed) spec.seed = *seed;

  SyntheticHandle data;
  check(ldm_synthetic_generate(&spec, data.slot()), "gen");

  std::filesystem::create_directories(out_dir);
  check(ldm_mesh_save_obj(ldm_synthetic_mesh(data.get()),
                          (out_dir + "/mesh.obj").c_str()),
        "gen: mesh.obj");
  check(ldm_shape_set_save_csv(ldm_synthetic_shapes(data.get()),
                               (out_dir + "/shapes.csv").c_str()),
        "gen: shapes.csv");
  check(ldm_synthetic_save_masks(data.get(),
                                 (out_dir + "/masks.txt").c_str()),
        "gen: masks.txt");

  echo["version"] = 1;
  echo["base"] = spec.grid ? "grid" : "icosphere";
  echo["seed"] = spec.seed;
  echo["shapes"] = spec.shape_count;
  echo["regions"] = spec.region_count;
  echo["vertex_count"] =
      ldm_mesh_vertex_count(ldm_synthetic_mesh(data.get()));
  write_text(out_dir + "/meta.json", echo.dump(2));
  std::printf("gen: %lld shapes over %lld vertices, %lld regions -> %s\n",
              static_cast<long long>(spec.shape_count),
              static_cast<long long>(
                  ldm_mesh_vertex_count(ldm_synthetic_mesh(data.get()))),
              static_cast<long long>(spec.region_count), out_dir.c_str());
  return 0;
}

// ------------------------------------------------------- shared loaders

void load_data_dir(const std::string& data_dir, MeshHandle& mesh,
                   ShapesHandle& shapes) {
  const std::string mesh_path = data_dir + "/mesh.obj";
  const std::string shapes_path = data_dir + "/shapes.csv";
  check(ldm_mesh_load_obj(mesh_path.c_str(), mesh.slot()), mesh_path);
  if (std::filesystem::exists(shapes_path)) {
    check(ldm_shape_set_load_csv(shapes_path.c_str(), shapes.slot()),
          shapes_path);
  } else {
    // alternative layout: one OBJ per shape, shape_*.obj in name order
    std::vector<std::string> obj_paths;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("shape_", 0) == 0 && entry.path().extension() == ".obj") {
        obj_paths.push_back(entry.path().string());
      }
    }
    if (obj_paths.empty()) {
      throw CliError(data_dir + ": neither shapes.csv nor shape_*.obj found");
    }
    std::sort(obj_paths.begin(), obj_paths.end());
    std::vector<const char*> raw;
    raw.reserve(obj_paths.size());
    for (const auto& path : obj_paths) raw.push_back(path.c_str());
    check(ldm_shape_set_load_obj_files(raw.data(),
                                       static_cast<int64_t>(raw.size()),
                                       shapes.slot()),
          data_dir + "/shape_*.obj");
  }
  if (ldm_mesh_vertex_count(mesh.get()) !=
      ldm_shape_set_vertex_count(shapes.get())) {
    throw CliError(data_dir +
                   ": the mesh and the shapes disagree on the vertex count");
  }
}

void build_graph(const SolverSettings& settings, const MeshHandle& mesh,
                 const ShapesHandle& shapes, const std::string& graph_csv,
                 const std::string& parts, const std::string& parts_graph,
                 GraphHandle& graph) {
  if (!graph_csv.empty()) {
    check(ldm_graph_load_csv(graph_csv.c_str(),
                             ldm_shape_set_vertex_count(shapes.get()),
                             graph.slot()),
          graph_csv);
    return;
  }
  if (!parts.empty() || !parts_graph.empty()) {
    if (parts.empty() || parts_graph.empty()) {
      throw CliError("--parts and --parts-graph must be given together");
    }
    check(ldm_graph_build_parts(mesh.get(), shapes.get(), parts.c_str(),
                                parts_graph.c_str(), settings.graph_alpha_d,
                                settings.graph_theta, graph.slot()),
          "graph (parts)");
    return;
  }
  check(ldm_graph_build(mesh.get(), shapes.get(), settings.graph_theta,
                        graph.slot()),
        "graph");
}

// ----------------------------------------------------------------- train

int run_train(const std::string& data_dir, const std::string& config_path,
              const std::string& out_dir, bool kernelized,
              std::optional<uint64_t> seed, int threads,
              const std::string& graph_csv, const std::string& parts,
              const std::string& parts_graph) {
  SolverSettings settings = config_path.empty()
                                ? parse_solver_config(json::object(), "train")
                                : parse_solver_config(load_json(config_path),
                                                      config_path);
  if (kernelized) settings.params.kernelized = 1;
  if (seed) settings.params.seed = *seed;
  if (threads > 0) {
    settings.params.threads = threads;
  } else if (threads_from_environment() > 0) {
    settings.params.threads = threads_from_environment();
  }

  MeshHandle mesh;
  ShapesHandle shapes;
  load_data_dir(data_dir, mesh, shapes);
  GraphHandle graph;
  build_graph(settings, mesh, shapes, graph_csv, parts, parts_graph, graph);

  ModelHandle model;
  check(ldm_train(shapes.get(), graph.get(), &settings.weights,
                  &settings.params, mesh.get(), model.slot()),
        "train");
  check(ldm_model_set_config_json(model.get(),
                                  solver_settings_echo(settings).dump(2)
                                      .c_str()),
        "train: config echo");
  check(ldm_model_save(model.get(), out_dir.c_str()), out_dir);
  check(ldm_graph_save_csv(graph.get(), (out_dir + "/graph.csv").c_str()),
        "train: graph.csv");
  std::printf("train: %lld factors over %lld vertices -> %s\n",
              static_cast<long long>(ldm_model_factor_count(model.get())),
              static_cast<long long>(
                  ldm_shape_set_vertex_count(shapes.get())),
              out_dir.c_str());
  return 0;
}

// ------------------------------------------------------------------ eval

int run_eval(const std::string& model_dir, const std::string& data_dir,
             const std::string& config_path, const std::string& out_dir,
             std::optional<uint64_t> seed) {
  EvalSettings eval = config_path.empty()
                          ? parse_eval_config(json::object(), "eval")
                          : parse_eval_config(load_json(config_path),
                                              config_path);
  if (seed) eval.params.seed = *seed;

  ModelHandle model;
  check(ldm_model_load(model_dir.c_str(), model.slot()), model_dir);

  MeshHandle mesh;
  ShapesHandle shapes;
  load_data_dir(data_dir, mesh, shapes);

  // Fold retraining settings: the eval config's "trainer" object wins, then
  // the configuration stored with the model, then defaults.
  SolverSettings trainer = parse_solver_config(json::object(), "eval");
  if (eval.trainer) {
    trainer = parse_solver_config(*eval.trainer, config_path + ".trainer");
  } else if (std::filesystem::exists(model_dir + "/config.json")) {
    trainer = parse_solver_config(load_json(model_dir + "/config.json"),
                                  model_dir + "/config.json");
  }

  GraphHandle graph;
  if (std::filesystem::exists(model_dir + "/graph.csv")) {
    check(ldm_graph_load_csv((model_dir + "/graph.csv").c_str(),
                             ldm_shape_set_vertex_count(shapes.get()),
                             graph.slot()),
          model_dir + "/graph.csv");
  } else {
    build_graph(trainer, mesh, shapes, "", "", "", graph);
  }

  ReportHandle report;
  check(ldm_evaluate(model.get(), shapes.get(), graph.get(), &trainer.weights,
                     &trainer.params, &eval.params, report.slot()),
        "eval");
  check(ldm_report_save(report.get(), out_dir.c_str()), out_dir);

  json meta = eval.echo;
  meta["seed"] = eval.params.seed;
  meta["model"] = model_dir;
  write_text(out_dir + "/meta.json", meta.dump(2));

  double means[8] = {};
  check(ldm_report_means(report.get(), means), "eval: means");
  static const char* kNames[8] = {
      "reconstruction_avg", "reconstruction_max", "specificity_avg",
      "specificity_max",    "generalisation_avg", "generalisation_max",
      "sparse_reconstruction_avg", "sparse_reconstruction_max"};
  for (int i = 0; i < 8; ++i) {
    std::printf("eval: %s mean %.*g\n", kNames[i], 10, means[i]);
  }
  return 0;
}

// ---------------------------------------------------------------- search

int run_search(const std::string& data_dir, int64_t samples, uint64_t seed,
               const std::string& config_path,
               const std::string& eval_config_path, bool kernelized,
               const std::string& out_dir) {
  SolverSettings settings = config_path.empty()
                                ? parse_solver_config(json::object(), "search")
                                : parse_solver_config(load_json(config_path),
                                                      config_path);
  if (kernelized) settings.params.kernelized = 1;
  EvalSettings eval =
      eval_config_path.empty()
          ? parse_eval_config(json::object(), "search")
          : parse_eval_config(load_json(eval_config_path), eval_config_path);

  MeshHandle mesh;
  ShapesHandle shapes;
  load_data_dir(data_dir, mesh, shapes);
  GraphHandle graph;
  build_graph(settings, mesh, shapes, "", "", "", graph);

  SearchHandle result;
  check(ldm_parameter_search(shapes.get(), graph.get(), &settings.weights,
                             &settings.params, &eval.params, samples, seed,
                             result.slot()),
        "search");

  const int64_t best = ldm_search_best_index(result.get());
  std::printf("search: %lld runs, best run %lld with bandwidth %.10g\n",
              static_cast<long long>(ldm_search_run_count(result.get())),
              static_cast<long long>(best + 1),
              ldm_search_best_bandwidth(result.get()));
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    check(ldm_search_save_csv(result.get(),
                              (out_dir + "/search.csv").c_str()),
          "search: search.csv");
    json meta;
    meta["version"] = 1;
    meta["samples"] = samples;
    meta["seed"] = seed;
    meta["best_run"] = best + 1;
    meta["best_bandwidth"] = ldm_search_best_bandwidth(result.get());
    meta["kernelized"] = settings.params.kernelized != 0;
    write_text(out_dir + "/best.json", meta.dump(2));
  }
  return 0;
}

// ----------------------------------------------------------- export-mesh

int run_export_mesh(const std::string& model_dir, int64_t factor,
                    double alpha, const std::string& out_path) {
  ModelHandle model;
  check(ldm_model_load(model_dir.c_str(), model.slot()), model_dir);
  check(ldm_model_export_obj(model.get(), factor, alpha, out_path.c_str()),
        out_path);
  std::printf("export-mesh: factor %lld at alpha %.10g -> %s\n",
              static_cast<long long>(factor), alpha, out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-support linear shape deformation models"};
  app.require_subcommand(1);

  std::string spec_path, data_dir, config_path, eval_config_path, out_dir;
  std::string model_dir, graph_csv, parts_path, parts_graph_path, out_path;
  bool kernelized = false;
  int threads = 0;
  int64_t samples = 10;
  int64_t factor = 1;
  double alpha = 0.0;
  uint64_t seed_value = 0;
  bool seed_given = false;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic shape set");
  gen->add_option("--spec", spec_path, "Synthetic spec JSON");
  gen->add_option("--out", out_dir, "Output data directory")->required();
  gen->add_option("--seed", seed_value, "Override the spec seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });

  auto* train = app.add_subcommand("train", "Train a deformation model");
  train->add_option("--data", data_dir, "Data directory from gen")
      ->required();
  train->add_option("--config", config_path, "Solver config JSON");
  train->add_option("--out", out_dir, "Output model directory")->required();
  train->add_flag("--kernelized", kernelized,
                  "Factorize the kernelized covariance");
  train->add_option("--seed", seed_value, "Override the config seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  train->add_option("--threads", threads,
                    "Worker threads (default 1; LOCALDEFORM_THREADS)");
  train->add_option("--graph", graph_csv, "Use a precomputed edge-list CSV");
  train->add_option("--parts", parts_path, "Part decomposition file");
  train->add_option("--parts-graph", parts_graph_path,
                    "Part relation edges CSV");

  auto* eval = app.add_subcommand("eval", "Evaluate a trained model");
  eval->add_option("--model", model_dir, "Model directory")->required();
  eval->add_option("--data", data_dir, "Data directory")->required();
  eval->add_option("--config", eval_config_path, "Eval config JSON");
  eval->add_option("--out", out_dir, "Report directory")->required();
  eval->add_option("--seed", seed_value, "Override the config seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });

  auto* search =
      app.add_subcommand("search", "Random-sampling parameter search");
  search->add_option("--data", data_dir, "Data directory")->required();
  search->add_option("--samples", samples, "Number of random draws")
      ->required();
  search->add_option("--seed", seed_value, "Sampling seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  search->add_option("--config", config_path, "Solver config JSON");
  search->add_option("--eval-config", eval_config_path, "Eval config JSON");
  search->add_flag("--kernelized", kernelized,
                   "Factorize the kernelized covariance");
  search->add_option("--out", out_dir, "Optional output directory");

  auto* export_mesh =
      app.add_subcommand("export-mesh", "Write mean + alpha * factor as OBJ");
  export_mesh->add_option("--model", model_dir, "Model directory")
      ->required();
  export_mesh->add_option("--factor", factor, "Factor index (1-based)")
      ->required();
  export_mesh->add_option("--alpha", alpha, "Deformation weight")->required();
  export_mesh->add_option("--out", out_path, "Output OBJ path")->required();

  CLI11_PARSE(app, argc, argv);

  const std::optional<uint64_t> seed =
      seed_given ? std::optional<uint64_t>(seed_value) : std::nullopt;
  try {
    if (gen->parsed()) return run_gen(spec_path, out_dir, seed);
    if (train->parsed()) {
      return run_train(data_dir, config_path, out_dir, kernelized, seed,
                       threads, graph_csv, parts_path, parts_graph_path);
    }
    if (eval->parsed()) {
      return run_eval(model_dir, data_dir, eval_config_path, out_dir, seed);
    }
    if (search->parsed()) {
      return run_search(data_dir, samples, seed.value_or(0), config_path,
                        eval_config_path, kernelized, out_dir);
    }
    if (export_mesh->parsed()) {
      return run_export_mesh(model_dir, factor, alpha, out_path);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
