// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "localdeform/evaluate.hpp"
#include "localdeform/graph.hpp"
#include "localdeform/mesh.hpp"
#include "localdeform/shape.hpp"
#include "localdeform/solver.hpp"

namespace localdeform {

// --- OBJ (subset: `v x y z` and `f i j k` lines, 1-based indices) ---

TriangleMesh load_obj(const std::string& path);
void save_obj(const std::string& path, const TriangleMesh& mesh);

// --- headerless CSV matrices ---

Eigen::MatrixXd load_csv_matrix(const std::string& path);
void save_csv_matrix(const std::string& path, const Eigen::MatrixXd& matrix);

/// Columns of a 3N x K matrix interpreted as stacked shapes.
std::vector<Eigen::MatrixXd> shapes_from_matrix(const Eigen::MatrixXd& data);

/// Stack shapes into the 3N x K matrix form.
Eigen::MatrixXd shapes_to_matrix(const std::vector<Eigen::MatrixXd>& shapes);

// --- graph edge lists (`i,j,weight`, 1-based vertex indices) ---

void save_graph_csv(const std::string& path, const VertexGraph& graph);
VertexGraph load_graph_csv(const std::string& path,
                           Eigen::Index vertex_count);

// --- part decompositions ---

/// One line per part with space-separated 1-based vertex indices.
std::vector<std::vector<Eigen::Index>> load_parts(const std::string& path);

/// Part relation edges as `a,b` lines with 1-based part indices.
std::vector<std::pair<std::size_t, std::size_t>> load_part_edges(
    const std::string& path);

// --- region masks (one line per region, 1-based vertex indices) ---

void save_masks(const std::string& path,
                const std::vector<std::vector<Eigen::Index>>& masks);
std::vector<std::vector<Eigen::Index>> load_masks(const std::string& path);

// --- trained model directories ---

struct ModelBundle {
  DeformationModel model;
  SolverTrace trace;
  std::optional<TriangleMesh> mean_mesh;  // carries faces for OBJ export
  std::string config_json;                // resolved configuration echo
};

/// Writes phi.csv, coeffs.csv, mean.csv, meta.json, trace.csv and, when the
/// bundle has topology, mean.obj into the directory (created if missing).
void save_model(const std::string& directory, const ModelBundle& bundle);
ModelBundle load_model(const std::string& directory);

// --- score reports ---

/// scores_long.csv (metric,index,value) and summary.csv with one row of
/// order statistics per metric family.
void save_report(const std::string& directory, const ScoreReport& report);

/// The exact CSV bytes that save_report writes, exposed for determinism
/// checks.
std::string report_long_csv(const ScoreReport& report);
std::string report_summary_csv(const ScoreReport& report);

/// Format a double with full round-trip precision (shared by all CSV
/// writers so outputs are byte-stable).
std::string format_double(double value);

}  // namespace localdeform
