// SPDX-License-Identifier: Apache-2.0
#include "localdeform/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "localdeform/errors.hpp"

namespace localdeform {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

double parse_double(const std::string& token, const std::string& path) {
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw IoError(path + ": cannot parse number '" + token + "'");
  }
}

long parse_long(const std::string& token, const std::string& path) {
  try {
    std::size_t used = 0;
    const long value = std::stol(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw IoError(path + ": cannot parse integer '" + token + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(line);
  std::string token;
  while (std::getline(stream, token, sep)) out.push_back(token);
  return out;
}

std::string format_sig9(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::array<double, 3>> vertices;
  TriangleMesh mesh;
  std::string line;
  Eigen::Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream stream(line);
    std::string tag;
    stream >> tag;
    if (tag == "v") {
      std::array<double, 3> p{};
      if (!(stream >> p[0] >> p[1] >> p[2])) {
        throw IoError(path + ":" + std::to_string(line_no) +
                      ": malformed vertex line");
      }
      vertices.push_back(p);
    } else if (tag == "f") {
      std::array<long, 3> f{};
      if (!(stream >> f[0] >> f[1] >> f[2])) {
        throw IoError(path + ":" + std::to_string(line_no) +
                      ": malformed face line (triangles only)");
      }
      for (long idx : f) {
        if (idx < 1 || static_cast<std::size_t>(idx) > vertices.size()) {
          throw IoError(path + ":" + std::to_string(line_no) +
                        ": face index out of range");
        }
      }
      mesh.faces.push_back({static_cast<Eigen::Index>(f[0] - 1),
                            static_cast<Eigen::Index>(f[1] - 1),
                            static_cast<Eigen::Index>(f[2] - 1)});
    }
    // other OBJ elements are ignored
  }
  if (vertices.empty()) throw IoError(path + ": no vertices");
  mesh.vertices.resize(static_cast<Eigen::Index>(vertices.size()), 3);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      mesh.vertices(static_cast<Eigen::Index>(i), c) =
          vertices[i][static_cast<std::size_t>(c)];
    }
  }
  return mesh;
}

void save_obj(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out = open_output(path);
  for (Eigen::Index v = 0; v < mesh.vertex_count(); ++v) {
    out << "v " << format_sig9(mesh.vertices(v, 0)) << ' '
        << format_sig9(mesh.vertices(v, 1)) << ' '
        << format_sig9(mesh.vertices(v, 2)) << '\n';
  }
  for (const auto& face : mesh.faces) {
    out << "f " << face[0] + 1 << ' ' << face[1] + 1 << ' ' << face[2] + 1
        << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

Eigen::MatrixXd load_csv_matrix(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tokens = split(line, ',');
    std::vector<double> row;
    row.reserve(tokens.size());
    for (const auto& token : tokens) row.push_back(parse_double(token, path));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": empty matrix");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return out;
}

void save_csv_matrix(const std::string& path, const Eigen::MatrixXd& matrix) {
  std::ofstream out = open_output(path);
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(matrix(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

std::vector<Eigen::MatrixXd> shapes_from_matrix(const Eigen::MatrixXd& data) {
  if (data.rows() % 3 != 0) {
    throw DimensionError("shapes_from_matrix: row count not divisible by 3");
  }
  std::vector<Eigen::MatrixXd> shapes;
  shapes.reserve(static_cast<std::size_t>(data.cols()));
  for (Eigen::Index k = 0; k < data.cols(); ++k) {
    shapes.push_back(devectorize(data.col(k)));
  }
  return shapes;
}

Eigen::MatrixXd shapes_to_matrix(const std::vector<Eigen::MatrixXd>& shapes) {
  if (shapes.empty()) throw DimensionError("shapes_to_matrix: no shapes");
  Eigen::MatrixXd out(3 * shapes.front().rows(),
                      static_cast<Eigen::Index>(shapes.size()));
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = vectorize(shapes[k]);
  }
  return out;
}

void save_graph_csv(const std::string& path, const VertexGraph& graph) {
  std::ofstream out = open_output(path);
  for (const GraphEdge& edge : graph.edges) {
    out << edge.i + 1 << ',' << edge.j + 1 << ','
        << format_double(edge.weight) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

VertexGraph load_graph_csv(const std::string& path,
                           Eigen::Index vertex_count) {
  std::ifstream in = open_input(path);
  std::vector<GraphEdge> edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tokens = split(line, ',');
    if (tokens.size() != 3) {
      throw IoError(path + ": expected 'i,j,weight' lines");
    }
    GraphEdge edge;
    edge.i = parse_long(tokens[0], path) - 1;
    edge.j = parse_long(tokens[1], path) - 1;
    edge.weight = parse_double(tokens[2], path);
    edges.push_back(edge);
  }
  return make_vertex_graph(vertex_count, std::move(edges));
}

std::vector<std::vector<Eigen::Index>> load_parts(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<Eigen::Index>> parts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream stream(line);
    std::vector<Eigen::Index> part;
    long index = 0;
    while (stream >> index) {
      if (index < 1) throw IoError(path + ": vertex indices are 1-based");
      part.push_back(static_cast<Eigen::Index>(index - 1));
    }
    if (!stream.eof()) throw IoError(path + ": malformed part line");
    if (!part.empty()) parts.push_back(std::move(part));
  }
  if (parts.empty()) throw IoError(path + ": no parts");
  return parts;
}

std::vector<std::pair<std::size_t, std::size_t>> load_part_edges(
    const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tokens = split(line, ',');
    if (tokens.size() != 2) throw IoError(path + ": expected 'a,b' lines");
    const long a = parse_long(tokens[0], path);
    const long b = parse_long(tokens[1], path);
    if (a < 1 || b < 1) throw IoError(path + ": part indices are 1-based");
    edges.emplace_back(static_cast<std::size_t>(a - 1),
                       static_cast<std::size_t>(b - 1));
  }
  return edges;
}

void save_masks(const std::string& path,
                const std::vector<std::vector<Eigen::Index>>& masks) {
  std::ofstream out = open_output(path);
  for (const auto& mask : masks) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (i > 0) out << ' ';
      out << mask[i] + 1;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

std::vector<std::vector<Eigen::Index>> load_masks(const std::string& path) {
  return load_parts(path);
}

void save_model(const std::string& directory, const ModelBundle& bundle) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path dir(directory);
  save_csv_matrix((dir / "phi.csv").string(), bundle.model.factors);
  save_csv_matrix((dir / "coeffs.csv").string(), bundle.model.coefficients);
  save_csv_matrix((dir / "mean.csv").string(), bundle.model.mean);

  nlohmann::json meta;
  meta["version"] = 1;
  meta["vertex_count"] = bundle.model.point_dimension() / 3;
  meta["factor_count"] = bundle.model.factor_count();
  meta["shape_count"] = bundle.model.coefficients.cols();
  meta["scale"] = bundle.model.scale;
  std::ofstream meta_out = open_output((dir / "meta.json").string());
  meta_out << meta.dump(2) << '\n';

  std::ofstream trace_out = open_output((dir / "trace.csv").string());
  trace_out << "iteration,objective,sparsity,seconds\n";
  for (std::size_t i = 0; i < bundle.trace.objective.size(); ++i) {
    trace_out << i + 1 << ',' << format_double(bundle.trace.objective[i])
              << ',' << format_double(bundle.trace.sparsity[i]) << ','
              << format_double(bundle.trace.seconds[i]) << '\n';
  }

  if (bundle.mean_mesh) {
    save_obj((dir / "mean.obj").string(), *bundle.mean_mesh);
  }
  if (!bundle.config_json.empty()) {
    std::ofstream config_out = open_output((dir / "config.json").string());
    config_out << bundle.config_json;
    if (bundle.config_json.back() != '\n') config_out << '\n';
  }
}

ModelBundle load_model(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  ModelBundle bundle;
  bundle.model.factors = load_csv_matrix((dir / "phi.csv").string());
  bundle.model.coefficients = load_csv_matrix((dir / "coeffs.csv").string());
  const Eigen::MatrixXd mean = load_csv_matrix((dir / "mean.csv").string());
  if (mean.cols() != 1) {
    throw IoError(directory + "/mean.csv: expected a single column");
  }
  bundle.model.mean = mean.col(0);

  std::ifstream meta_in = open_input((dir / "meta.json").string());
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(directory + "/meta.json: " + e.what());
  }
  if (!meta.contains("scale")) {
    throw IoError(directory + "/meta.json: missing field 'scale'");
  }
  bundle.model.scale = meta["scale"].get<double>();

  if (fs::exists(dir / "mean.obj")) {
    bundle.mean_mesh = load_obj((dir / "mean.obj").string());
  }
  if (fs::exists(dir / "config.json")) {
    std::ifstream config_in = open_input((dir / "config.json").string());
    std::stringstream buffer;
    buffer << config_in.rdbuf();
    bundle.config_json = buffer.str();
  }
  if (bundle.model.factors.rows() != bundle.model.mean.size()) {
    throw IoError(directory + ": factor rows do not match the mean length");
  }
  if (bundle.model.factors.cols() != bundle.model.coefficients.rows()) {
    throw IoError(directory + ": factor/coefficient count mismatch");
  }
  return bundle;
}

namespace {

void append_summary_row(std::ostream& out, const MetricSamples& metric) {
  std::vector<double> sorted = metric.values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double mean = metric.mean();
  double sd = 0.0;
  if (n > 1) {
    double acc = 0.0;
    for (double v : sorted) acc += (v - mean) * (v - mean);
    sd = std::sqrt(acc / static_cast<double>(n - 1));
  }
  const double median =
      n == 0 ? 0.0
             : (n % 2 == 1 ? sorted[n / 2]
                           : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0);
  out << metric.name << ',' << n << ',' << format_double(mean) << ','
      << format_double(sd) << ',' << format_double(n ? sorted.front() : 0.0)
      << ',' << format_double(median) << ','
      << format_double(n ? sorted.back() : 0.0) << '\n';
}

}  // namespace

std::string report_long_csv(const ScoreReport& report) {
  std::ostringstream out;
  out << "method,metric,index,value\n";
  for (const MetricSamples* metric : report.all()) {
    for (std::size_t i = 0; i < metric->values.size(); ++i) {
      out << report.method << ',' << metric->name << ',' << i + 1 << ','
          << format_double(metric->values[i]) << '\n';
    }
  }
  return out.str();
}

std::string report_summary_csv(const ScoreReport& report) {
  std::ostringstream out;
  out << "method,metric,count,mean,sd,min,median,max\n";
  for (const MetricSamples* metric : report.all()) {
    out << report.method << ',';
    append_summary_row(out, *metric);
  }
  return out.str();
}

void save_report(const std::string& directory, const ScoreReport& report) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path dir(directory);
  {
    std::ofstream out = open_output((dir / "scores_long.csv").string());
    out << report_long_csv(report);
  }
  {
    std::ofstream out = open_output((dir / "summary.csv").string());
    out << report_summary_csv(report);
  }
}

}  // namespace localdeform
