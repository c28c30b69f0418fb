// SPDX-License-Identifier: Apache-2.0
#include "localdeform/evaluate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "localdeform/errors.hpp"
#include "localdeform/log.hpp"
#include "localdeform/rng.hpp"

namespace localdeform {

namespace {

// Compensated (Kahan) summation so that reported statistics do not depend
// on evaluation batching.
double stable_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + salt);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

double average_error(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return shape_errors(x, y).avg;
}

double maximum_error(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return shape_errors(x, y).max;
}

ErrorPair shape_errors(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() % 3 != 0) {
    throw DimensionError("shape_errors: need equal lengths divisible by 3");
  }
  const Eigen::Index n = x.size() / 3;
  std::vector<double> distances(static_cast<std::size_t>(n));
  double max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dx = x[i] - y[i];
    const double dy = x[i + n] - y[i + n];
    const double dz = x[i + 2 * n] - y[i + 2 * n];
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    distances[static_cast<std::size_t>(i)] = d;
    max = std::max(max, d);
  }
  ErrorPair out;
  out.avg = stable_sum(distances) / static_cast<double>(n);
  out.max = max;
  return out;
}

double MetricSamples::mean() const {
  if (values.empty()) return 0.0;
  return stable_sum(values) / static_cast<double>(values.size());
}

std::array<const MetricSamples*, 8> ScoreReport::all() const {
  return {&reconstruction_avg,        &reconstruction_max,
          &specificity_avg,           &specificity_max,
          &generalisation_avg,        &generalisation_max,
          &sparse_reconstruction_avg, &sparse_reconstruction_max};
}

std::array<double, 8> ScoreReport::means() const {
  std::array<double, 8> out{};
  const auto metrics = all();
  for (std::size_t i = 0; i < metrics.size(); ++i) out[i] = metrics[i]->mean();
  return out;
}

void reconstruction_error(const DeformationModel& model, const ShapeSet& set,
                          MetricSamples& avg_out, MetricSamples& max_out) {
  const Eigen::MatrixXd alphas = fit_coefficient_matrix(model.factors, set.data);
  for (Eigen::Index k = 0; k < set.shape_count; ++k) {
    const Eigen::VectorXd reconstructed = model.factors * alphas.col(k);
    const ErrorPair err = shape_errors(set.data.col(k), reconstructed);
    avg_out.values.push_back(err.avg * set.scale);
    max_out.values.push_back(err.max * set.scale);
  }
}

Eigen::MatrixXd coefficient_covariance(const Eigen::MatrixXd& coefficients) {
  const Eigen::Index k = coefficients.cols();
  if (k < 2) {
    throw DimensionError("coefficient_covariance: need at least 2 columns");
  }
  const Eigen::VectorXd mean = coefficients.rowwise().mean();
  const Eigen::MatrixXd centred = coefficients.colwise() - mean;
  return centred * centred.transpose() / static_cast<double>(k - 1);
}

namespace {

// Lower-triangular sampling factor of a covariance regularized for
// numerical definiteness.
Eigen::MatrixXd sampling_factor(const Eigen::MatrixXd& covariance) {
  const Eigen::Index m = covariance.rows();
  Eigen::MatrixXd regularized =
      covariance + 1e-10 * Eigen::MatrixXd::Identity(m, m);
  Eigen::LLT<Eigen::MatrixXd> llt(regularized);
  if (llt.info() != Eigen::Success) {
    throw NumericError("specificity: covariance factorization failed");
  }
  return llt.matrixL();
}

}  // namespace

void specificity_from_samples(const DeformationModel& model,
                              const ShapeSet& set,
                              const Eigen::MatrixXd& sampled_alphas,
                              MetricSamples& avg_out, MetricSamples& max_out) {
  if (sampled_alphas.rows() != model.factor_count()) {
    throw DimensionError("specificity: coefficient samples have " +
                         std::to_string(sampled_alphas.rows()) +
                         " rows, model has " +
                         std::to_string(model.factor_count()) + " factors");
  }
  for (Eigen::Index s = 0; s < sampled_alphas.cols(); ++s) {
    const Eigen::VectorXd sample = model.factors * sampled_alphas.col(s);
    double best_avg = std::numeric_limits<double>::infinity();
    double best_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < set.shape_count; ++k) {
      const ErrorPair err = shape_errors(sample, set.data.col(k));
      best_avg = std::min(best_avg, err.avg);
      best_max = std::min(best_max, err.max);
    }
    avg_out.values.push_back(best_avg * set.scale);
    max_out.values.push_back(best_max * set.scale);
  }
}

void specificity(const DeformationModel& model, const ShapeSet& set,
                 int n_samples, std::uint64_t seed, MetricSamples& avg_out,
                 MetricSamples& max_out) {
  if (n_samples < 1) {
    throw ValidationError("specificity: need at least one sample");
  }
  const Eigen::MatrixXd covariance =
      coefficient_covariance(model.coefficients);
  const Eigen::MatrixXd chol = sampling_factor(covariance);
  const Eigen::Index m = model.factor_count();

  Rng rng(mix_seed(seed, 0xa11ce));
  Eigen::MatrixXd alphas(m, n_samples);
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd gauss(m);
    for (Eigen::Index i = 0; i < m; ++i) gauss[i] = rng.normal();
    alphas.col(s) = chol * gauss;
  }
  specificity_from_samples(model, set, alphas, avg_out, max_out);
}

ErrorPair sparse_reconstruction_on_rows(
    const Eigen::MatrixXd& basis, const Eigen::VectorXd& x,
    const Eigen::MatrixXd& coeff_covariance,
    const std::vector<Eigen::Index>& rows, double unit_scale) {
  if (basis.rows() != x.size()) {
    throw DimensionError("sparse_reconstruction: basis and shape disagree");
  }
  if (rows.empty()) {
    throw ValidationError("sparse_reconstruction: empty row selection");
  }
  const Eigen::Index kept = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index m = basis.cols();
  if (kept < m) {
    log_warning("sparse_reconstruction: keeping " + std::to_string(kept) +
                " rows for " + std::to_string(m) +
                " coefficients; the system is underdetermined");
  }
  Eigen::MatrixXd sub_basis(kept, m);
  Eigen::VectorXd sub_x(kept);
  for (Eigen::Index r = 0; r < kept; ++r) {
    const Eigen::Index row = rows[static_cast<std::size_t>(r)];
    if (row < 0 || row >= basis.rows()) {
      throw ValidationError("sparse_reconstruction: row index out of range");
    }
    sub_basis.row(r) = basis.row(row);
    sub_x[r] = x[row];
  }

  // Tikhonov matrix from the Cholesky factorisation C = G^T G; a zero
  // covariance simply yields an unregularized fit.
  Eigen::MatrixXd tikhonov = Eigen::MatrixXd::Zero(m, m);
  if (!coeff_covariance.isZero(0.0)) {
    Eigen::LLT<Eigen::MatrixXd> llt(coeff_covariance);
    if (llt.info() != Eigen::Success) {
      llt.compute(coeff_covariance +
                  1e-10 * Eigen::MatrixXd::Identity(m, m));
      if (llt.info() != Eigen::Success) {
        throw NumericError(
            "sparse_reconstruction: covariance factorization failed after "
            "regularization");
      }
    }
    tikhonov = Eigen::MatrixXd(llt.matrixL()).transpose();
  }

  const Eigen::MatrixXd normal =
      sub_basis.transpose() * sub_basis + tikhonov.transpose() * tikhonov;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) {
    throw NumericError("sparse_reconstruction: singular system");
  }
  const Eigen::VectorXd alpha = ldlt.solve(sub_basis.transpose() * sub_x);
  if (!alpha.allFinite()) {
    throw NumericError("sparse_reconstruction: singular system");
  }

  const ErrorPair err = shape_errors(x, basis * alpha);
  return {err.avg * unit_scale, err.max * unit_scale};
}

ErrorPair sparse_reconstruction(const Eigen::MatrixXd& basis,
                                const Eigen::VectorXd& x,
                                const Eigen::MatrixXd& coeff_covariance,
                                double fraction, std::uint64_t seed,
                                double unit_scale) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValidationError("sparse_reconstruction: fraction outside (0, 1]");
  }
  const Eigen::Index total = basis.rows();
  const auto kept = static_cast<Eigen::Index>(
      std::ceil(fraction * static_cast<double>(total)));
  Rng rng(mix_seed(seed, 0x5a17));
  const auto picks = rng.sample_without_replacement(
      static_cast<std::uint64_t>(total), static_cast<std::uint64_t>(kept));
  std::vector<Eigen::Index> selected(picks.begin(), picks.end());
  std::sort(selected.begin(), selected.end());
  return sparse_reconstruction_on_rows(basis, x, coeff_covariance, selected,
                                       unit_scale);
}

std::vector<std::vector<Eigen::Index>> cv_folds(Eigen::Index k,
                                                const EvalConfig& config) {
  if (config.folds < 2) {
    throw ValidationError("generalisation_cv: need at least 2 folds");
  }
  Rng rng(mix_seed(config.seed, 0xf01d5));
  std::vector<std::vector<Eigen::Index>> folds(
      static_cast<std::size_t>(config.folds));
  if (config.disjoint_folds) {
    const auto order = rng.sample_without_replacement(
        static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(k));
    for (std::size_t p = 0; p < order.size(); ++p) {
      folds[p % static_cast<std::size_t>(config.folds)].push_back(
          static_cast<Eigen::Index>(order[p]));
    }
  } else {
    // Literal protocol: every fold draws round(K / folds) indices afresh.
    const auto per_fold = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::lround(
               static_cast<double>(k) / static_cast<double>(config.folds))));
    for (auto& fold : folds) {
      const auto picks = rng.sample_without_replacement(
          static_cast<std::uint64_t>(k),
          static_cast<std::uint64_t>(per_fold));
      fold.assign(picks.begin(), picks.end());
      std::sort(fold.begin(), fold.end());
    }
  }
  return folds;
}

void generalisation_cv(const TrainerFn& trainer, const ShapeSet& set,
                       const EvalConfig& config, MetricSamples& avg_out,
                       MetricSamples& max_out, MetricSamples* sparse_avg,
                       MetricSamples* sparse_max) {
  const auto folds = cv_folds(set.shape_count, config);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& test_indices = folds[f];
    if (test_indices.empty()) continue;
    std::vector<bool> is_test(static_cast<std::size_t>(set.shape_count),
                              false);
    for (Eigen::Index j : test_indices) {
      is_test[static_cast<std::size_t>(j)] = true;
    }
    std::vector<Eigen::MatrixXd> train_shapes;
    for (Eigen::Index k = 0; k < set.shape_count; ++k) {
      if (!is_test[static_cast<std::size_t>(k)]) {
        train_shapes.push_back(set.shapes[static_cast<std::size_t>(k)]);
      }
    }
    if (train_shapes.size() < 2) {
      throw ValidationError("generalisation_cv: fold " + std::to_string(f) +
                            " leaves fewer than 2 training shapes");
    }
    const ShapeSet fold_set = prepare_shape_set(train_shapes);
    const Eigen::MatrixXd factors = trainer(fold_set);
    if (factors.rows() != fold_set.data.rows()) {
      throw DimensionError("generalisation_cv: trainer returned " +
                           std::to_string(factors.rows()) +
                           " rows, expected " +
                           std::to_string(fold_set.data.rows()));
    }

    Eigen::MatrixXd covariance;
    if (sparse_avg != nullptr) {
      const Eigen::MatrixXd fold_coeffs =
          fit_coefficient_matrix(factors, fold_set.data);
      covariance = coefficient_covariance(fold_coeffs);
    }

    const Eigen::VectorXd fold_mean = vectorize(fold_set.mean_shape);
    for (Eigen::Index j : test_indices) {
      const Eigen::VectorXd deviation =
          (vectorize(set.shapes[static_cast<std::size_t>(j)]) - fold_mean) /
          fold_set.scale;
      const Eigen::VectorXd alpha = fit_coefficients(factors, deviation);
      const ErrorPair err = shape_errors(deviation, factors * alpha);
      avg_out.values.push_back(err.avg * fold_set.scale);
      max_out.values.push_back(err.max * fold_set.scale);

      if (sparse_avg != nullptr && sparse_max != nullptr) {
        const ErrorPair sparse = sparse_reconstruction(
            factors, deviation, covariance, config.sparse_fraction,
            mix_seed(config.seed, 0x727 + 1000 * f + static_cast<std::uint64_t>(j)),
            fold_set.scale);
        sparse_avg->values.push_back(sparse.avg);
        sparse_max->values.push_back(sparse.max);
      }
    }
  }
}

ScoreReport evaluate_model(const DeformationModel& model, const ShapeSet& set,
                           const TrainerFn& trainer,
                           const EvalConfig& config) {
  ScoreReport report;
  reconstruction_error(model, set, report.reconstruction_avg,
                       report.reconstruction_max);
  specificity(model, set, config.specificity_samples, config.seed,
              report.specificity_avg, report.specificity_max);
  generalisation_cv(trainer, set, config, report.generalisation_avg,
                    report.generalisation_max,
                    &report.sparse_reconstruction_avg,
                    &report.sparse_reconstruction_max);
  return report;
}

ParameterSearchResult parameter_search(
    const std::function<std::array<double, 8>(double bandwidth)>& runner,
    int n_runs, std::uint64_t seed) {
  if (n_runs < 1) {
    throw ValidationError("parameter_search: need at least one run");
  }
  Rng rng(mix_seed(seed, 0xbe7a));
  ParameterSearchResult result;
  result.scores.resize(n_runs, 8);
  result.bandwidths.resize(static_cast<std::size_t>(n_runs));
  for (int r = 0; r < n_runs; ++r) {
    const double bandwidth = 1.0 / rng.uniform(1.0, 10.0);
    result.bandwidths[static_cast<std::size_t>(r)] = bandwidth;
    const auto scores = runner(bandwidth);
    for (int c = 0; c < 8; ++c) result.scores(r, c) = scores[static_cast<std::size_t>(c)];
  }

  result.normalized_scores = result.scores;
  for (int c = 0; c < 8; ++c) {
    const double lo = result.scores.col(c).minCoeff();
    const double hi = result.scores.col(c).maxCoeff();
    if (hi > lo) {
      result.normalized_scores.col(c) =
          (result.scores.col(c).array() - lo) / (hi - lo);
    } else {
      result.normalized_scores.col(c).setZero();
    }
  }

  Eigen::Index best = 0;
  double best_sum = result.normalized_scores.row(0).sum();
  for (Eigen::Index r = 1; r < result.normalized_scores.rows(); ++r) {
    const double sum = result.normalized_scores.row(r).sum();
    if (sum < best_sum) {
      best_sum = sum;
      best = r;
    }
  }
  result.best_index = best;
  result.best_bandwidth = result.bandwidths[static_cast<std::size_t>(best)];
  return result;
}

}  // namespace localdeform
