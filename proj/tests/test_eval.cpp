#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qapca/eval.hpp"
#include "qapca/rng.hpp"

using namespace qapca;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

}  // namespace

TEST_CASE("gaussian toy realizations are standardized and reproducible") {
  const Matrix a = gen_gaussian_toy(50, 30, 7);
  const Matrix b = gen_gaussian_toy(50, 30, 7);
  CHECK(a == b);  // bit identical
  CHECK(gen_gaussian_toy(50, 30, 8) != a);

  CHECK(a.rowwise().mean().cwiseAbs().maxCoeff() < 1e-10);
  const Vector stds = a.array().square().rowwise().mean().sqrt();
  CHECK((stds.array() - 1.0).abs().maxCoeff() < 1e-10);

  const GaussianToy toy(20, 3);
  CHECK(toy.min_covariance_eigenvalue() >= -1e-10);
}

TEST_CASE("robust_scale matches the worked example and fixed points") {
  Matrix x(1, 5);
  x << 1, 2, 3, 4, 5;
  Matrix expected(1, 5);
  expected << -2, -1, 0, 1, 2;
  CHECK((robust_scale(x) - expected).cwiseAbs().maxCoeff() < 1e-12);

  // Constant feature: centered to all zeros.
  Matrix constant(1, 6);
  constant << 4, 4, 4, 4, 4, 4;
  CHECK(robust_scale(constant).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // Already median-centered with quartiles at +-1: unchanged.
  Matrix scaled(1, 5);
  scaled << -2, -1, 0, 1, 2;
  CHECK((robust_scale(scaled) - scaled).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("robust_scale is idempotent on symmetric data") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int half = 3 + static_cast<int>(rng.below(10));
    Matrix x(2, 2 * half);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < half; ++c) {
        const double v = rng.uniform(0.1, 5.0);
        x(r, c) = v;
        x(r, half + c) = -v;  // mirror
      }
    }
    const Matrix once = robust_scale(x);
    const Matrix twice = robust_scale(once);
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("corrupt_mislabel replaces the right number of samples") {
  Rng rng(9);
  LabeledDataset pool;
  pool.train = random_matrix(3, 30, rng);
  pool.train_labels.assign(20, "benign");
  for (int i = 0; i < 10; ++i) pool.train_labels.push_back("malignant");

  const LabeledDataset zero = corrupt_mislabel(pool, 0.0, 1, "benign");
  CHECK(zero.train.cols() == 20);
  CHECK((zero.train - pool.train.leftCols(20)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  const LabeledDataset amount = corrupt_mislabel(pool, 0.2, 1, "benign");
  CHECK(amount.train.cols() == 20);
  int replaced = 0;
  for (const auto& label : amount.train_labels) replaced += label == "malignant" ? 1 : 0;
  CHECK(replaced == 4);  // ceil(0.2 * 20)

  const LabeledDataset again = corrupt_mislabel(pool, 0.2, 1, "benign");
  CHECK(again.train == amount.train);  // same seed, same replacements
  const LabeledDataset other = corrupt_mislabel(pool, 0.2, 2, "benign");
  CHECK(other.train != amount.train);

  CHECK_THROWS_AS(corrupt_mislabel(pool, 0.9, 1, "benign"), std::invalid_argument);
}

TEST_CASE("corrupt_noise hits the stated sample count") {
  Rng rng(13);
  const Matrix x = random_matrix(4, 20, rng);
  CHECK((corrupt_noise(x, 0.0, 100.0, 3) - x).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK((corrupt_noise(x, 0.3, 0.0, 3) - x).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  const Matrix noisy = corrupt_noise(x, 0.2, 50.0, 3);
  int touched = 0;
  for (int c = 0; c < x.cols(); ++c) {
    if ((noisy.col(c) - x.col(c)).cwiseAbs().maxCoeff() > 0.0) ++touched;
  }
  CHECK(touched == 4);  // round(0.2 * 20)
}

TEST_CASE("reconstruction_error spans the unit interval") {
  const Matrix x = Matrix::Identity(2, 2);
  Matrix r(2, 1);
  r << 1, 0;
  CHECK(reconstruction_error(x, r) == doctest::Approx(0.5));

  Matrix span(2, 2);
  span << 1, 0, 0, 1;
  CHECK(reconstruction_error(x, span) == doctest::Approx(0.0));

  Matrix ortho(3, 1);
  ortho << 0, 0, 1;
  Matrix data(3, 2);
  data << 1, 0, 0, 1, 0, 0;
  CHECK(reconstruction_error(data, ortho) == doctest::Approx(1.0));

  CHECK_THROWS_AS(reconstruction_error(Matrix::Zero(2, 2), r), std::invalid_argument);
}

TEST_CASE("component_rank counts unique component images") {
  Rng rng(17);
  const Matrix x = random_matrix(4, 6, rng);
  Eigen::MatrixXi same(6, 3);
  for (int r = 0; r < 6; ++r) same.row(r).setConstant(rng.spin());
  CHECK(component_rank(x, BinaryAssignment{same}) == 1);

  // Orthogonal images by construction: X = I, B columns distinct.
  Eigen::MatrixXi distinct(3, 2);
  distinct << 1, 1, 1, -1, -1, 1;
  CHECK(component_rank(Matrix::Identity(3, 3), BinaryAssignment{distinct}) == 2);

  CHECK(component_rank(Matrix::Zero(4, 6), BinaryAssignment(6, 2)) == 0);
}

TEST_CASE("spe measures squared residuals") {
  Matrix r(2, 1);
  r << 1, 0;
  Vector in_span(2), ortho(2);
  in_span << 2, 0;
  ortho << 0, 1;
  CHECK(spe(in_span, r) == doctest::Approx(0.0));
  CHECK(spe(ortho, r) == doctest::Approx(1.0));
  Vector mixed(2);
  mixed << 3, -2;
  CHECK(spe(mixed, r) == doctest::Approx(4.0));

  // Single-column consistency with reconstruction_error numerator.
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix basis = Matrix::Identity(4, 2);
    const Vector x = random_matrix(4, 1, rng).col(0);
    const double err = reconstruction_error(x, basis) * x.squaredNorm();
    CHECK(std::abs(err - spe(x, basis)) < 1e-12);
  }
}

TEST_CASE("detection_rates computes the paper conventions") {
  DetectionCounts counts;
  counts.false_positives = 416;
  counts.faultless = 4160;
  counts.true_positives = 16000;
  counts.faulty = 16000;
  const DetectionRates r = detection_rates(counts);
  CHECK(r.fpr == doctest::Approx(0.1));
  CHECK(r.tpr == doctest::Approx(1.0));

  DetectionCounts none;
  none.faultless = 10;
  none.faulty = 10;
  CHECK(detection_rates(none).precision == 1.0);  // 0/0 convention

  DetectionCounts bad;
  bad.faultless = 0;
  bad.faulty = 5;
  CHECK_THROWS_AS(detection_rates(bad), std::invalid_argument);

  // Rates stay inside [0, 1] for any valid counts.
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    DetectionCounts c;
    c.faultless = 1 + static_cast<std::int64_t>(rng.below(1000));
    c.faulty = 1 + static_cast<std::int64_t>(rng.below(1000));
    c.false_positives = static_cast<std::int64_t>(rng.below(c.faultless + 1));
    c.true_positives = static_cast<std::int64_t>(rng.below(c.faulty + 1));
    const DetectionRates rates = detection_rates(c);
    CHECK(rates.fpr >= 0.0);
    CHECK(rates.fpr <= 1.0);
    CHECK(rates.tpr >= 0.0);
    CHECK(rates.tpr <= 1.0);
    CHECK(rates.precision >= 0.0);
    CHECK(rates.precision <= 1.0);
  }
}

TEST_CASE("threshold grid is strictly increasing with the documented span") {
  const std::vector<double> grid = detection_threshold_grid();
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(1e4));
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  // Spot checks on segment boundaries.
  CHECK(std::count_if(grid.begin(), grid.end(), [](double t) { return t < 1e-4 - 1e-12; }) == 10);
  CHECK(std::find(grid.begin(), grid.end(), 0.5) != grid.end());
  CHECK(std::find(grid.begin(), grid.end(), 300.0) != grid.end());
}

TEST_CASE("roc_prc separates the separable and anchors the areas") {
  Rng rng(23);
  std::vector<double> scores;
  std::vector<bool> faulty;
  for (int i = 0; i < 500; ++i) {
    scores.push_back(rng.uniform(0.5, 1.0));
    faulty.push_back(false);
    scores.push_back(rng.uniform(2.0, 3.0));
    faulty.push_back(true);
  }
  const RocPrcResult res = roc_prc(scores, faulty);
  CHECK(res.auroc == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.auprc > 0.99);

  // Monotone in the threshold.
  for (std::size_t i = 1; i < res.points.size(); ++i) {
    CHECK(res.points[i].fpr <= res.points[i - 1].fpr);
    CHECK(res.points[i].tpr <= res.points[i - 1].tpr);
  }
}

TEST_CASE("roc_prc gives chance area for shuffled labels") {
  Rng rng(29);
  std::vector<double> scores;
  std::vector<bool> faulty;
  for (int i = 0; i < 10000; ++i) {
    scores.push_back(rng.uniform(0.0, 5.0));
    faulty.push_back(rng.below(2) == 0);
  }
  const RocPrcResult res = roc_prc(scores, faulty);
  CHECK(std::abs(res.auroc - 0.5) < 0.05);
}

TEST_CASE("roc area is stable under rank-preserving score transforms") {
  Rng rng(31);
  std::vector<double> scores;
  std::vector<bool> faulty;
  for (int i = 0; i < 2000; ++i) {
    const bool f = rng.below(2) == 0;
    scores.push_back(f ? rng.uniform(0.5, 3.0) : rng.uniform(0.0, 2.0));
    faulty.push_back(f);
  }
  std::vector<double> transformed = scores;
  for (double& s : transformed) s = 1.05 * s + 0.01;
  const double a = roc_prc(scores, faulty).auroc;
  const double b = roc_prc(transformed, faulty).auroc;
  CHECK(std::abs(a - b) < 1e-3);
}

TEST_CASE("single-threshold grids reduce to trapezoid geometry") {
  // One threshold at 1.0: negatives at 0.5, positives at 1.5.
  const std::vector<double> grid = {1.0};
  std::vector<double> scores = {0.5, 0.5, 1.5, 1.5};
  std::vector<bool> faulty = {false, false, true, true};
  const RocPrcResult res = roc_prc(scores, faulty, grid);
  // Points: (0,1) plus anchors (0,0) and (1,1): area = 1.
  CHECK(res.auroc == doctest::Approx(1.0));

  // Threshold that nothing exceeds: point (0,0); area = 0.5 from anchors.
  const RocPrcResult none = roc_prc(scores, faulty, {2.0});
  CHECK(none.auroc == doctest::Approx(0.5));
}
