// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "localdeform/shape.hpp"

namespace localdeform {

struct EvalConfig {
  int specificity_samples = 100;   // n_s
  int folds = 5;
  double sparse_fraction = 0.05;   // fraction of coordinate rows kept
  std::uint64_t seed = 0;
  // Disjoint fold partition by default; the literal protocol draws each
  // fold's test indices independently, which may overlap across folds.
  bool disjoint_folds = true;
};

/// Mean over vertices of the per-vertex Euclidean distance between two
/// stacked shapes of equal length 3N.
double average_error(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Maximum per-vertex Euclidean distance.
double maximum_error(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct ErrorPair {
  double avg = 0.0;
  double max = 0.0;
};

/// Both errors at once.
ErrorPair shape_errors(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// One named score distribution (per shape or per sample), as exported to
// the long-format CSV.
struct MetricSamples {
  std::string name;
  std::vector<double> values;

  double mean() const;
};

// The eight quantitative measures. All values are reported in the original
// units of the training shapes. The method label is carried into the CSV
// exports so reports from other methods can be concatenated.
struct ScoreReport {
  std::string method = "localdeform";
  MetricSamples reconstruction_avg{"reconstruction_avg", {}};
  MetricSamples reconstruction_max{"reconstruction_max", {}};
  MetricSamples specificity_avg{"specificity_avg", {}};
  MetricSamples specificity_max{"specificity_max", {}};
  MetricSamples generalisation_avg{"generalisation_avg", {}};
  MetricSamples generalisation_max{"generalisation_max", {}};
  MetricSamples sparse_reconstruction_avg{"sparse_reconstruction_avg", {}};
  MetricSamples sparse_reconstruction_max{"sparse_reconstruction_max", {}};

  std::array<const MetricSamples*, 8> all() const;
  std::array<double, 8> means() const;
};

/// Per-training-shape least-squares reconstruction errors, original units.
void reconstruction_error(const DeformationModel& model, const ShapeSet& set,
                          MetricSamples& avg_out, MetricSamples& max_out);

/// Sample covariance of the model's training coefficients (columns of A).
Eigen::MatrixXd coefficient_covariance(const Eigen::MatrixXd& coefficients);

/// Deterministic core of the specificity measure: for every coefficient
/// column, the synthesized shape's smallest average and maximum error over
/// the training shapes, in original units.
void specificity_from_samples(const DeformationModel& model,
                              const ShapeSet& set,
                              const Eigen::MatrixXd& sampled_alphas,
                              MetricSamples& avg_out, MetricSamples& max_out);

/// Specificity: distance from synthesized shapes (alpha ~ N(0, C_alpha)) to
/// the closest training shape; one value per sample for both error kinds.
void specificity(const DeformationModel& model, const ShapeSet& set,
                 int n_samples, std::uint64_t seed, MetricSamples& avg_out,
                 MetricSamples& max_out);

/// The cross-validation fold assignment used by generalisation_cv: each
/// inner vector holds the test-shape indices of one fold. Disjoint mode
/// partitions a shuffle evenly; the literal mode draws round(K / folds)
/// indices independently per fold.
std::vector<std::vector<Eigen::Index>> cv_folds(Eigen::Index shape_count,
                                                const EvalConfig& config);

// Trains factors on a subset of the shapes (a freshly prepared ShapeSet) and
// returns them in that subset's normalized space.
using TrainerFn = std::function<Eigen::MatrixXd(const ShapeSet&)>;

/// Cross-validated held-out reconstruction errors, one value per tested
/// shape. Also computes the sparse-reconstruction errors on the same folds
/// when sparse_avg/sparse_max are non-null.
void generalisation_cv(const TrainerFn& trainer, const ShapeSet& set,
                       const EvalConfig& config, MetricSamples& avg_out,
                       MetricSamples& max_out,
                       MetricSamples* sparse_avg = nullptr,
                       MetricSamples* sparse_max = nullptr);

/// Tikhonov-regularized fit from a fixed subset of coordinate rows:
/// alpha = (P^T P + G^T G)^{-1} P^T x_sub with G the Cholesky factor of the
/// coefficient covariance; errors are evaluated on the full shape.
/// basis and x live in the same (normalized) space; unit_scale converts the
/// errors to original units.
ErrorPair sparse_reconstruction_on_rows(
    const Eigen::MatrixXd& basis, const Eigen::VectorXd& x,
    const Eigen::MatrixXd& coeff_covariance,
    const std::vector<Eigen::Index>& rows, double unit_scale);

/// Same with ceil(fraction * 3N) rows drawn uniformly without replacement.
ErrorPair sparse_reconstruction(const Eigen::MatrixXd& basis,
                                const Eigen::VectorXd& x,
                                const Eigen::MatrixXd& coeff_covariance,
                                double fraction, std::uint64_t seed,
                                double unit_scale);

/// Full protocol: reconstruction and specificity on the trained model,
/// generalisation and sparse reconstruction by cross-validation with the
/// supplied trainer.
ScoreReport evaluate_model(const DeformationModel& model, const ShapeSet& set,
                           const TrainerFn& trainer, const EvalConfig& config);

struct ParameterSearchResult {
  Eigen::MatrixXd scores;             // n_r x 8, raw values
  Eigen::MatrixXd normalized_scores;  // columns mapped onto [0, 1]
  std::vector<double> bandwidths;     // sampled beta per draw
  Eigen::Index best_index = 0;
  double best_bandwidth = 0.0;
};

/// Random-sampling parameter selection: draw beta ~ 1 / U(1, 10) per run,
/// collect the 8 scores from the runner, min-max normalize each column and
/// pick the row with smallest sum (ties: lowest index). Constant columns
/// map to zero.
ParameterSearchResult parameter_search(
    const std::function<std::array<double, 8>(double bandwidth)>& runner,
    int n_runs, std::uint64_t seed);

}  // namespace localdeform
