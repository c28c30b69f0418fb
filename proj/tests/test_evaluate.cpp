// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "localdeform/errors.hpp"
#include "localdeform/evaluate.hpp"
#include "localdeform/pca.hpp"
#include "localdeform/shape.hpp"
#include "oracles.hpp"

using namespace localdeform;

namespace {

// Small prepared set with a model fit by PCA.
struct Fixture {
  ShapeSet set;
  DeformationModel model;
};

Fixture make_fixture(Rng& rng, Eigen::Index n, Eigen::Index k,
                     Eigen::Index m, double noise = 0.0) {
  std::vector<Eigen::MatrixXd> shapes;
  const Eigen::MatrixXd base = oracles::random_matrix(rng, n, 3, 2.0);
  const Eigen::MatrixXd dir1 = oracles::random_matrix(rng, n, 3);
  const Eigen::MatrixXd dir2 = oracles::random_matrix(rng, n, 3);
  for (Eigen::Index s = 0; s < k; ++s) {
    Eigen::MatrixXd shape =
        base + rng.normal() * dir1 + rng.normal() * dir2;
    if (noise > 0.0) shape += noise * oracles::random_matrix(rng, n, 3);
    shapes.push_back(shape);
  }
  Fixture fixture;
  fixture.set = prepare_shape_set(shapes);
  fixture.model.mean = vectorize(fixture.set.mean_shape);
  fixture.model.scale = fixture.set.scale;
  fixture.model.factors = pca(fixture.set.data, m);
  fixture.model.coefficients =
      fit_coefficient_matrix(fixture.model.factors, fixture.set.data);
  return fixture;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("error measures on frozen cases") {
  Rng rng(601);
  const Eigen::Index n = 5;
  const Eigen::VectorXd x = oracles::random_vector(rng, 3 * n);
  CHECK(average_error(x, x) == 0.0);
  CHECK(maximum_error(x, x) == 0.0);

  // every vertex shifted by (1, 0, 0)
  Eigen::VectorXd shifted = x;
  shifted.segment(0, n).array() += 1.0;
  CHECK(average_error(x, shifted) == doctest::Approx(1.0));
  CHECK(maximum_error(x, shifted) == doctest::Approx(1.0));
}

TEST_CASE("error measures match a direct per-vertex loop") {
  Rng rng(607);
  const Eigen::Index n = 5;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd x = oracles::random_vector(rng, 3 * n);
    const Eigen::VectorXd y = oracles::random_vector(rng, 3 * n);
    double sum = 0.0, top = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = std::sqrt(
          std::pow(x[i] - y[i], 2) + std::pow(x[i + n] - y[i + n], 2) +
          std::pow(x[i + 2 * n] - y[i + 2 * n], 2));
      sum += d;
      top = std::max(top, d);
    }
    CHECK(average_error(x, y) == doctest::Approx(sum / n).epsilon(1e-12));
    CHECK(maximum_error(x, y) == doctest::Approx(top).epsilon(1e-12));
    CHECK(maximum_error(x, y) + 1e-15 >= average_error(x, y));
  }
  CHECK_THROWS_AS(average_error(Eigen::VectorXd::Zero(6),
                                Eigen::VectorXd::Zero(9)),
                  DimensionError);
}

TEST_CASE("reconstruction error of an exact-rank model is zero") {
  Rng rng(611);
  const Fixture fixture = make_fixture(rng, 6, 5, 2);
  MetricSamples avg{"a", {}}, max{"m", {}};
  reconstruction_error(fixture.model, fixture.set, avg, max);
  REQUIRE(avg.values.size() == 5);
  for (double v : avg.values) CHECK(v < 1e-8);
  for (double v : max.values) CHECK(v < 1e-8);
}

TEST_CASE("reconstruction with a rank-1 basis matches the SVD residual") {
  Rng rng(613);
  const Fixture fixture = make_fixture(rng, 6, 5, 1, 0.05);
  MetricSamples avg{"a", {}}, max{"m", {}};
  reconstruction_error(fixture.model, fixture.set, avg, max);

  // oracle: residual of the best rank-1 approximation, per shape
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      fixture.set.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd rank1 = svd.singularValues()[0] * svd.matrixU().col(0) *
                          svd.matrixV().col(0).transpose();
  for (Eigen::Index k = 0; k < 5; ++k) {
    const ErrorPair expected =
        shape_errors(fixture.set.data.col(k), rank1.col(k));
    CHECK(avg.values[static_cast<std::size_t>(k)] ==
          doctest::Approx(expected.avg * fixture.set.scale).epsilon(1e-8));
    CHECK(max.values[static_cast<std::size_t>(k)] ==
          doctest::Approx(expected.max * fixture.set.scale).epsilon(1e-8));
  }
}

TEST_CASE("specificity core matches a brute-force nearest-shape loop") {
  Rng rng(617);
  const Fixture fixture = make_fixture(rng, 5, 3, 2, 0.1);
  const Eigen::MatrixXd alphas = oracles::random_matrix(rng, 2, 12);
  MetricSamples avg{"a", {}}, max{"m", {}};
  specificity_from_samples(fixture.model, fixture.set, alphas, avg, max);

  for (Eigen::Index s = 0; s < alphas.cols(); ++s) {
    const Eigen::VectorXd sample = fixture.model.factors * alphas.col(s);
    double best_avg = 1e300, best_max = 1e300;
    for (Eigen::Index k = 0; k < fixture.set.shape_count; ++k) {
      double sum = 0.0, top = 0.0;
      for (Eigen::Index i = 0; i < 5; ++i) {
        double d = 0.0;
        for (int c = 0; c < 3; ++c) {
          const double diff = sample[i + c * 5] -
                              fixture.set.data(i + c * 5, k);
          d += diff * diff;
        }
        d = std::sqrt(d);
        sum += d;
        top = std::max(top, d);
      }
      best_avg = std::min(best_avg, sum / 5.0);
      best_max = std::min(best_max, top);
    }
    CHECK(avg.values[static_cast<std::size_t>(s)] ==
          doctest::Approx(best_avg * fixture.set.scale).epsilon(1e-12));
    CHECK(max.values[static_cast<std::size_t>(s)] ==
          doctest::Approx(best_max * fixture.set.scale).epsilon(1e-12));
  }
}

TEST_CASE("specificity with a degenerate covariance stays at the mean") {
  Rng rng(619);
  Fixture fixture = make_fixture(rng, 5, 3, 2, 0.1);
  fixture.model.coefficients.setZero();  // covariance collapses to zero
  MetricSamples avg{"a", {}}, max{"m", {}};
  specificity(fixture.model, fixture.set, 20, 7, avg, max);

  double expected = 1e300;
  for (Eigen::Index k = 0; k < fixture.set.shape_count; ++k) {
    expected = std::min(
        expected, shape_errors(Eigen::VectorXd::Zero(15),
                               fixture.set.data.col(k))
                          .avg *
                      fixture.set.scale);
  }
  for (double v : avg.values) CHECK(v == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("specificity is invariant to training-shape order") {
  Rng rng(621);
  const Fixture fixture = make_fixture(rng, 5, 4, 2, 0.1);
  MetricSamples avg1{"a", {}}, max1{"m", {}};
  specificity(fixture.model, fixture.set, 15, 3, avg1, max1);

  // reorder the shapes (and the matching coefficients columns)
  std::vector<Eigen::MatrixXd> reordered = {
      fixture.set.shapes[2], fixture.set.shapes[0], fixture.set.shapes[3],
      fixture.set.shapes[1]};
  const ShapeSet permuted = prepare_shape_set(reordered);
  DeformationModel model = fixture.model;
  Eigen::MatrixXd coeffs(2, 4);
  coeffs.col(0) = fixture.model.coefficients.col(2);
  coeffs.col(1) = fixture.model.coefficients.col(0);
  coeffs.col(2) = fixture.model.coefficients.col(3);
  coeffs.col(3) = fixture.model.coefficients.col(1);
  model.coefficients = coeffs;
  MetricSamples avg2{"a", {}}, max2{"m", {}};
  specificity(model, permuted, 15, 3, avg2, max2);

  for (std::size_t s = 0; s < avg1.values.size(); ++s) {
    CHECK(avg1.values[s] == doctest::Approx(avg2.values[s]).epsilon(1e-10));
    CHECK(max1.values[s] == doctest::Approx(max2.values[s]).epsilon(1e-10));
  }
}

TEST_CASE("fold assignment covers each shape exactly once at K = folds") {
  EvalConfig config;
  config.folds = 5;
  config.seed = 9;
  const auto folds = cv_folds(5, config);
  std::set<Eigen::Index> seen;
  for (const auto& fold : folds) {
    REQUIRE(fold.size() == 1);
    seen.insert(fold.front());
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("literal fold protocol draws round(K/folds) per fold") {
  EvalConfig config;
  config.folds = 5;
  config.seed = 11;
  config.disjoint_folds = false;
  const auto folds = cv_folds(17, config);
  for (const auto& fold : folds) {
    CHECK(fold.size() == 3);  // round(17 / 5)
    std::set<Eigen::Index> unique(fold.begin(), fold.end());
    CHECK(unique.size() == fold.size());
  }
}

TEST_CASE("identity-spanning trainer generalises perfectly") {
  Rng rng(631);
  const Fixture fixture = make_fixture(rng, 4, 5, 2, 0.1);
  EvalConfig config;
  config.folds = 5;
  config.seed = 1;
  MetricSamples avg{"a", {}}, max{"m", {}};
  generalisation_cv(
      [](const ShapeSet& train) {
        return Eigen::MatrixXd(
            Eigen::MatrixXd::Identity(train.data.rows(), train.data.rows()));
      },
      fixture.set, config, avg, max);
  REQUIRE(avg.values.size() == 5);
  for (double v : avg.values) CHECK(v < 1e-10);
}

TEST_CASE("generalisation matches an independent CV loop") {
  Rng rng(641);
  const Fixture fixture = make_fixture(rng, 6, 6, 1, 0.05);
  EvalConfig config;
  config.folds = 3;
  config.seed = 17;
  auto trainer = [](const ShapeSet& train) { return pca(train.data, 1); };
  MetricSamples avg{"a", {}}, max{"m", {}};
  generalisation_cv(trainer, fixture.set, config, avg, max);

  // oracle: same folds, hand-rolled preparation / training / fitting
  const auto folds = cv_folds(fixture.set.shape_count, config);
  std::vector<double> expected_avg, expected_max;
  for (const auto& test_fold : folds) {
    std::vector<Eigen::MatrixXd> train_shapes;
    std::set<Eigen::Index> held(test_fold.begin(), test_fold.end());
    for (Eigen::Index k = 0; k < fixture.set.shape_count; ++k) {
      if (!held.count(k)) {
        train_shapes.push_back(fixture.set.shapes[static_cast<std::size_t>(k)]);
      }
    }
    const ShapeSet fold_set = prepare_shape_set(train_shapes);
    const Eigen::MatrixXd basis = trainer(fold_set);
    for (Eigen::Index j : test_fold) {
      const Eigen::VectorXd deviation =
          (vectorize(fixture.set.shapes[static_cast<std::size_t>(j)]) -
           vectorize(fold_set.mean_shape)) /
          fold_set.scale;
      const Eigen::VectorXd alpha =
          oracles::normal_equations_fit(basis, deviation);
      const ErrorPair err = shape_errors(deviation, basis * alpha);
      expected_avg.push_back(err.avg * fold_set.scale);
      expected_max.push_back(err.max * fold_set.scale);
    }
  }
  REQUIRE(avg.values.size() == expected_avg.size());
  for (std::size_t i = 0; i < expected_avg.size(); ++i) {
    CHECK(avg.values[i] == doctest::Approx(expected_avg[i]).epsilon(1e-9));
    CHECK(max.values[i] == doctest::Approx(expected_max[i]).epsilon(1e-9));
  }
}

TEST_CASE("literal fold protocol runs end to end") {
  Rng rng(642);
  const Fixture fixture = make_fixture(rng, 5, 7, 2, 0.1);
  EvalConfig config;
  config.folds = 5;
  config.seed = 23;
  config.disjoint_folds = false;  // folds may overlap across runs
  MetricSamples avg{"a", {}}, max{"m", {}};
  generalisation_cv(
      [](const ShapeSet& train) { return pca(train.data, 2); }, fixture.set,
      config, avg, max);
  // round(7/5) = 1 test shape per fold, five folds
  CHECK(avg.values.size() == 5);
  for (std::size_t i = 0; i < avg.values.size(); ++i) {
    CHECK(avg.values[i] >= 0.0);
    CHECK(max.values[i] + 1e-15 >= avg.values[i]);
  }
}

TEST_CASE("folds that leave too little training data are rejected") {
  Rng rng(643);
  const Fixture fixture = make_fixture(rng, 4, 3, 1, 0.1);
  EvalConfig config;
  config.folds = 3;  // 3 shapes, fold of 1 leaves 2 - ok; folds=2 of 2 not
  config.seed = 2;
  MetricSamples avg{"a", {}}, max{"m", {}};
  CHECK_NOTHROW(generalisation_cv(
      [](const ShapeSet& train) { return pca(train.data, 1); }, fixture.set,
      config, avg, max));

  EvalConfig bad = config;
  bad.folds = 2;  // one fold holds 2 of 3 shapes, training set of 1
  CHECK_THROWS_AS(
      generalisation_cv(
          [](const ShapeSet& train) { return pca(train.data, 1); },
          fixture.set, bad, avg, max),
      ValidationError);
}

TEST_CASE("sparse fit with all rows and no regularizer is plain least squares") {
  Rng rng(647);
  const Fixture fixture = make_fixture(rng, 6, 5, 2, 0.05);
  const Eigen::VectorXd x = fixture.set.data.col(0);
  const Eigen::MatrixXd zero_cov = Eigen::MatrixXd::Zero(2, 2);
  const ErrorPair sparse = sparse_reconstruction(
      fixture.model.factors, x, zero_cov, 1.0, 5, fixture.set.scale);
  const Eigen::VectorXd alpha =
      fit_coefficients(fixture.model.factors, x);
  const ErrorPair plain = shape_errors(x, fixture.model.factors * alpha);
  CHECK(sparse.avg ==
        doctest::Approx(plain.avg * fixture.set.scale).epsilon(1e-8));
  CHECK(sparse.max ==
        doctest::Approx(plain.max * fixture.set.scale).epsilon(1e-8));
}

TEST_CASE("orthonormal basis with identity regularizer halves the fit") {
  Rng rng(653);
  const Eigen::MatrixXd raw = oracles::random_matrix(rng, 12, 3);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  const Eigen::MatrixXd basis =
      qr.householderQ() * Eigen::MatrixXd::Identity(12, 3);
  const Eigen::VectorXd x = oracles::random_vector(rng, 12);
  const ErrorPair out = sparse_reconstruction(
      basis, x, Eigen::MatrixXd::Identity(3, 3), 1.0, 9, 1.0);
  const Eigen::VectorXd alpha = basis.transpose() * x / 2.0;
  const ErrorPair expected = shape_errors(x, basis * alpha);
  CHECK(out.avg == doctest::Approx(expected.avg).epsilon(1e-10));
  CHECK(out.max == doctest::Approx(expected.max).epsilon(1e-10));
}

TEST_CASE("sparse fit matches the stacked augmented-system oracle") {
  Rng rng(659);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index m = 3;
    const Eigen::MatrixXd basis = oracles::random_matrix(rng, 15, m);
    const Eigen::VectorXd x = oracles::random_vector(rng, 15);
    const Eigen::MatrixXd half = oracles::random_matrix(rng, m, m);
    const Eigen::MatrixXd covariance = half.transpose() * half;
    std::vector<Eigen::Index> rows = {0, 2, 3, 7, 8, 11, 14};

    const ErrorPair mine =
        sparse_reconstruction_on_rows(basis, x, covariance, rows, 1.0);

    // oracle: solve [P; G] alpha = [x_sub; 0] by QR
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    REQUIRE(llt.info() == Eigen::Success);
    const Eigen::MatrixXd tikhonov =
        Eigen::MatrixXd(llt.matrixL()).transpose();
    Eigen::MatrixXd stacked(rows.size() + m, m);
    Eigen::VectorXd rhs(rows.size() + m);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      stacked.row(static_cast<Eigen::Index>(r)) = basis.row(rows[r]);
      rhs[static_cast<Eigen::Index>(r)] = x[rows[r]];
    }
    stacked.bottomRows(m) = tikhonov;
    rhs.tail(m).setZero();
    const Eigen::VectorXd alpha = stacked.colPivHouseholderQr().solve(rhs);
    const ErrorPair expected = shape_errors(x, basis * alpha);
    CHECK(mine.avg == doctest::Approx(expected.avg).epsilon(1e-9));
    CHECK(mine.max == doctest::Approx(expected.max).epsilon(1e-9));
  }
}

TEST_CASE("sparse reconstruction approaches plain reconstruction in the fraction") {
  Rng rng(661);
  double previous = std::numeric_limits<double>::infinity();
  const Fixture fixture = make_fixture(rng, 20, 8, 3, 0.1);
  const Eigen::MatrixXd tiny_cov = 1e-12 * Eigen::MatrixXd::Identity(3, 3);
  for (double fraction : {0.25, 0.5, 1.0}) {
    double total = 0.0;
    int count = 0;
    for (Eigen::Index k = 0; k < fixture.set.shape_count; ++k) {
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        total += sparse_reconstruction(fixture.model.factors,
                                       fixture.set.data.col(k), tiny_cov,
                                       fraction, seed, fixture.set.scale)
                     .avg;
        ++count;
      }
    }
    const double mean = total / count;
    CHECK(mean <= previous + 1e-12);
    previous = mean;
  }
}

TEST_CASE("held-out errors dominate in-sample errors on average") {
  Rng rng(667);
  double insample_total = 0.0, heldout_total = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Fixture fixture = make_fixture(rng, 6, 6, 2, 0.3);
    MetricSamples ravg{"a", {}}, rmax{"m", {}};
    reconstruction_error(fixture.model, fixture.set, ravg, rmax);
    EvalConfig config;
    config.folds = 3;
    config.seed = rep;
    MetricSamples gavg{"a", {}}, gmax{"m", {}};
    generalisation_cv(
        [](const ShapeSet& train) { return pca(train.data, 2); },
        fixture.set, config, gavg, gmax);
    insample_total += ravg.mean();
    heldout_total += gavg.mean();
  }
  CHECK(heldout_total >= insample_total);
}

TEST_CASE("full evaluation produces the eight metric families") {
  Rng rng(673);
  const Fixture fixture = make_fixture(rng, 8, 6, 2, 0.1);
  EvalConfig config;
  config.specificity_samples = 10;
  config.folds = 3;
  config.sparse_fraction = 0.5;
  config.seed = 21;
  const ScoreReport report = evaluate_model(
      fixture.model, fixture.set,
      [](const ShapeSet& train) { return pca(train.data, 2); }, config);
  const auto metrics = report.all();
  CHECK(metrics.size() == 8);
  for (const MetricSamples* metric : metrics) {
    CHECK(!metric->values.empty());
    for (double v : metric->values) CHECK(v >= 0.0);
  }
  // max-type metrics dominate their avg counterparts entrywise
  for (std::size_t pair = 0; pair < 8; pair += 2) {
    const auto& avg = metrics[pair]->values;
    const auto& top = metrics[pair + 1]->values;
    REQUIRE(avg.size() == top.size());
    for (std::size_t i = 0; i < avg.size(); ++i) {
      CHECK(top[i] + 1e-12 >= avg[i]);
    }
  }
}

TEST_CASE("parameter search trivial winners") {
  int calls = 0;
  auto runner = [&calls](double) {
    ++calls;
    return std::array<double, 8>{1, 1, 1, 1, 1, 1, 1, 1};
  };
  const ParameterSearchResult single = parameter_search(runner, 1, 5);
  CHECK(single.best_index == 0);
  CHECK(calls == 1);
  CHECK(single.best_bandwidth == single.bandwidths[0]);
  CHECK(single.best_bandwidth > 0.1 - 1e-12);
  CHECK(single.best_bandwidth < 1.0);

  // a row dominating every column wins
  int row = 0;
  auto dominated = [&row](double) {
    const double base = row == 2 ? 0.0 : 1.0 + row;
    ++row;
    std::array<double, 8> out{};
    for (auto& v : out) v = base;
    return out;
  };
  const ParameterSearchResult best = parameter_search(dominated, 4, 5);
  CHECK(best.best_index == 2);
}

TEST_CASE("parameter search normalization matches a hand computation") {
  // spreadsheet-checked 4x8 score matrix
  const double raw[4][8] = {
      {1.0, 10.0, 5.0, 3.0, 2.0, 2.0, 7.0, 0.0},
      {2.0, 20.0, 5.0, 1.0, 4.0, 2.0, 3.0, 0.0},
      {3.0, 15.0, 5.0, 2.0, 6.0, 2.0, 5.0, 0.0},
      {5.0, 30.0, 5.0, 0.0, 8.0, 2.0, 1.0, 0.0}};
  int row = 0;
  auto runner = [&row, &raw](double) {
    std::array<double, 8> out{};
    for (int c = 0; c < 8; ++c) out[static_cast<std::size_t>(c)] = raw[row][c];
    ++row;
    return out;
  };
  const ParameterSearchResult result = parameter_search(runner, 4, 2);
  // hand-normalized row sums: constant columns (2, 5, 7) map to zero;
  // col0: (0, .25, .5, 1); col1: (0, .5, .25, 1); col3: (1, 1/3, 2/3, 0);
  // col4: (0, 1/3, 2/3, 1); col6: (1, 1/3, 2/3, 0)
  const double expected[4] = {0.0 + 0.0 + 1.0 + 0.0 + 1.0,
                              0.25 + 0.5 + 1.0 / 3 + 1.0 / 3 + 1.0 / 3,
                              0.5 + 0.25 + 2.0 / 3 + 2.0 / 3 + 2.0 / 3,
                              1.0 + 1.0 + 0.0 + 1.0 + 0.0};
  for (int r = 0; r < 4; ++r) {
    CHECK(result.normalized_scores.row(r).sum() ==
          doctest::Approx(expected[r]).epsilon(1e-12));
  }
  CHECK(result.best_index == 1);  // smallest hand-computed sum (1.75)
}

}  // TEST_SUITE
