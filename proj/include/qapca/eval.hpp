#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qapca/core.hpp"
#include "qapca/linalg.hpp"
#include "qapca/rng.hpp"

namespace qapca {

/// Train/test split with optional per-sample class tags and, for fault
/// data, the sample index at which faults begin in each faulty test run.
struct LabeledDataset {
  Matrix train;  // D x N_train
  Matrix test;   // D x N_test
  std::vector<std::string> train_labels;  // empty or one per train column
  std::vector<std::string> test_labels;
  std::optional<int> fault_onset;
};

struct DetectionCounts {
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t faultless = 0;
  std::int64_t faulty = 0;
};

struct DetectionRates {
  double fpr = 0.0;
  double tpr = 0.0;
  double precision = 1.0;
};

/// Mixture of three D-dimensional Gaussians whose means and covariance
/// entries are drawn uniformly from [-1, 1]; the third covariance gets -9
/// added to every entry and is then repaired to the nearest PSD matrix.
/// One sample is a sum of one draw from each distribution.
class GaussianToy {
 public:
  GaussianToy(int d, std::uint64_t seed);

  int dim() const { return d_; }

  /// Draws n superimposed samples (not standardized).
  Matrix sample(int n, Rng& rng) const;

  /// Smallest eigenvalue across the three repaired covariances.
  double min_covariance_eigenvalue() const { return min_eig_; }

 private:
  int d_;
  std::vector<Vector> means_;
  std::vector<Matrix> cov_roots_;  // symmetric square roots
  double min_eig_ = 0.0;
};

/// One standardized realization of the toy problem: superimposed samples
/// with per-feature mean 0 and standard deviation 1.
Matrix gen_gaussian_toy(int d, int n, std::uint64_t seed);

/// Per-feature statistics used to standardize one matrix and re-apply the
/// same transform to another.
struct FeatureScaler {
  Vector shift;
  Vector scale;

  Matrix apply(const Matrix& x) const;
};

/// Zero-mean / unit-standard-deviation scaler fit on x (population std;
/// constant features are left centered).
FeatureScaler fit_standardizer(const Matrix& x);

/// Median / interquartile scaler: centers every feature on its median and
/// maps [Q1, Q3] to [-1, 1] (linear-interpolation quartiles; zero-IQR
/// features pass through centered).
FeatureScaler fit_robust_scaler(const Matrix& x);

/// fit_robust_scaler applied to x itself.
Matrix robust_scale(const Matrix& x);

/// Replaces ceil(fraction * N_target) training samples of the target class
/// with distinct samples of the other classes. Input train must carry
/// labels covering at least two classes; the output training set holds the
/// target-class columns (contaminated), the test set passes through.
LabeledDataset corrupt_mislabel(const LabeledDataset& data, double fraction, std::uint64_t seed,
                                const std::string& target_label);

/// Adds per-entry Gaussian noise of standard deviation sigma to
/// round(fraction * N) uniformly chosen samples.
Matrix corrupt_noise(const Matrix& x, double fraction, double sigma, std::uint64_t seed);

/// Normalized squared projection residual
/// ||X - R R^T X||_F^2 / ||X||_F^2. Throws std::invalid_argument on an
/// all-zero X.
double reconstruction_error(const Matrix& x_eval, const Matrix& r);

/// Numerical rank of X B at relative tolerance 1e-8: the number of unique
/// components carried by a sign assignment before orthonormalization.
int component_rank(const Matrix& x, const BinaryAssignment& b);

/// Orthonormal basis of the achieved column space of X B (left singular
/// vectors above the rank tolerance). Defined even when X B is rank
/// deficient; spans the same subspace as the nearest-orthonormal basis
/// when it is not.
Matrix achieved_basis(const Matrix& x, const BinaryAssignment& b);

/// Squared prediction error of one sample against a basis:
/// ||x - R R^T x||_2^2.
double spe(const Vector& x, const Matrix& r);

/// FPR / TPR / precision from raw counts. Precision of 0/0 is defined as 1.
DetectionRates detection_rates(const DetectionCounts& counts);

/// Detection-limit grid: piecewise-uniform thresholds from 0 to 1e4, dense
/// near zero ([0,1e-4] step 1e-5, [1e-4,1e-3] step 1e-4, [1e-3,0.5] step
/// 1e-3, [0.5,5] step 1e-2, [5,300] step 1, [300,1000] step 100,
/// [1000,1e4] step 1000), strictly increasing.
std::vector<double> detection_threshold_grid();

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
  double precision = 1.0;
};

struct RocPrcResult {
  std::vector<RocPoint> points;  // one per threshold, in grid order
  double auroc = 0.0;
  double auprc = 0.0;
};

/// Sweeps the threshold grid over scores (a sample is flagged when its
/// score exceeds the threshold) and integrates ROC / PRC areas by the
/// trapezoidal rule; the ROC is anchored at (0,0) and (1,1).
RocPrcResult roc_prc(const std::vector<double>& scores, const std::vector<bool>& faulty,
                     const std::vector<double>& grid = detection_threshold_grid());

}  // namespace qapca
