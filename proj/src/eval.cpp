#include "qapca/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qapca {

namespace {

Matrix random_entries(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

// Symmetric PSD square root after clipping negative eigenvalues to zero.
std::pair<Matrix, double> psd_root(const Matrix& candidate) {
  const Matrix sym = 0.5 * (candidate + candidate.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw SvdError("psd_root: eigensolve failed");
  Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  const Matrix root =
      eig.eigenvectors() * clipped.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
  return {root, clipped.minCoeff()};
}

double interpolated_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace

GaussianToy::GaussianToy(int d, std::uint64_t seed) : d_(d) {
  if (d < 1) throw std::invalid_argument("GaussianToy: dimension must be positive");
  Rng rng(seed);
  min_eig_ = 0.0;
  for (int g = 0; g < 3; ++g) {
    means_.push_back(random_entries(d, 1, rng).col(0));
    Matrix cov = random_entries(d, d, rng);
    if (g == 2) cov.array() -= 9.0;  // common-mode bias on the third source
    auto [root, min_eig] = psd_root(cov);
    cov_roots_.push_back(std::move(root));
    min_eig_ = std::min(min_eig_, min_eig);
  }
}

Matrix GaussianToy::sample(int n, Rng& rng) const {
  if (n < 1) throw std::invalid_argument("GaussianToy: sample count must be positive");
  Matrix out = Matrix::Zero(d_, n);
  Vector g(d_);
  for (int c = 0; c < n; ++c) {
    for (std::size_t src = 0; src < means_.size(); ++src) {
      for (int r = 0; r < d_; ++r) g(r) = rng.normal();
      out.col(c) += means_[src] + cov_roots_[src] * g;
    }
  }
  return out;
}

Matrix gen_gaussian_toy(int d, int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_gaussian_toy: need at least two samples");
  const GaussianToy toy(d, seed);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  const Matrix raw = toy.sample(n, rng);
  return fit_standardizer(raw).apply(raw);
}

Matrix FeatureScaler::apply(const Matrix& x) const {
  if (x.rows() != shift.size()) {
    throw std::invalid_argument("FeatureScaler: feature count mismatch");
  }
  Matrix out = x;
  out.colwise() -= shift;
  out.array().colwise() /= scale.array();
  return out;
}

FeatureScaler fit_standardizer(const Matrix& x) {
  if (x.cols() < 1) throw std::invalid_argument("fit_standardizer: empty matrix");
  FeatureScaler s;
  s.shift = x.rowwise().mean();
  Matrix centered = x;
  centered.colwise() -= s.shift;
  s.scale = (centered.array().square().rowwise().mean()).sqrt();
  for (Eigen::Index i = 0; i < s.scale.size(); ++i) {
    if (!(s.scale(i) > 0.0)) s.scale(i) = 1.0;  // constant feature: center only
  }
  return s;
}

FeatureScaler fit_robust_scaler(const Matrix& x) {
  if (x.cols() < 4) throw std::invalid_argument("fit_robust_scaler: need at least four samples");
  FeatureScaler s;
  s.shift = Vector(x.rows());
  s.scale = Vector(x.rows());
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[static_cast<std::size_t>(c)] = x(r, c);
    const double median = interpolated_quantile(row, 0.5);
    const double q1 = interpolated_quantile(row, 0.25);
    const double q3 = interpolated_quantile(row, 0.75);
    const double half_iqr = 0.5 * (q3 - q1);
    s.shift(r) = median;
    s.scale(r) = half_iqr > 0.0 ? half_iqr : 1.0;
  }
  return s;
}

Matrix robust_scale(const Matrix& x) { return fit_robust_scaler(x).apply(x); }

LabeledDataset corrupt_mislabel(const LabeledDataset& data, double fraction, std::uint64_t seed,
                                const std::string& target_label) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::invalid_argument("corrupt_mislabel: fraction must be in [0, 1]");
  }
  if (data.train_labels.size() != static_cast<std::size_t>(data.train.cols())) {
    throw std::invalid_argument("corrupt_mislabel: training set must be labeled");
  }
  std::vector<int> target_cols;
  std::vector<int> other_cols;
  for (int c = 0; c < data.train.cols(); ++c) {
    if (data.train_labels[static_cast<std::size_t>(c)] == target_label) {
      target_cols.push_back(c);
    } else {
      other_cols.push_back(c);
    }
  }
  if (target_cols.empty() || other_cols.empty()) {
    throw std::invalid_argument("corrupt_mislabel: need both the target class and another class");
  }

  const int n = static_cast<int>(target_cols.size());
  const int replace = static_cast<int>(std::ceil(fraction * n));
  if (replace > static_cast<int>(other_cols.size())) {
    throw std::invalid_argument("corrupt_mislabel: only " + std::to_string(other_cols.size()) +
                                " other-class samples for " + std::to_string(replace) +
                                " replacements");
  }

  LabeledDataset out;
  out.train = Matrix(data.train.rows(), n);
  out.train_labels.resize(static_cast<std::size_t>(n), target_label);
  for (int c = 0; c < n; ++c) out.train.col(c) = data.train.col(target_cols[static_cast<std::size_t>(c)]);

  Rng rng(seed);
  const auto victim = rng.sample_without_replacement(n, replace);
  const auto donor = rng.sample_without_replacement(static_cast<int>(other_cols.size()), replace);
  for (int i = 0; i < replace; ++i) {
    const int col = victim[static_cast<std::size_t>(i)];
    const int src = other_cols[static_cast<std::size_t>(donor[static_cast<std::size_t>(i)])];
    out.train.col(col) = data.train.col(src);
    out.train_labels[static_cast<std::size_t>(col)] = data.train_labels[static_cast<std::size_t>(src)];
  }
  out.test = data.test;
  out.test_labels = data.test_labels;
  out.fault_onset = data.fault_onset;
  return out;
}

Matrix corrupt_noise(const Matrix& x, double fraction, double sigma, std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::invalid_argument("corrupt_noise: fraction must be in [0, 1]");
  }
  if (sigma < 0.0) throw std::invalid_argument("corrupt_noise: sigma must be nonnegative");
  const int n = static_cast<int>(x.cols());
  const int count = static_cast<int>(std::llround(fraction * n));
  Matrix out = x;
  if (count == 0 || sigma == 0.0) return out;
  Rng rng(seed);
  auto victims = rng.sample_without_replacement(n, count);
  std::sort(victims.begin(), victims.end());
  for (const int c : victims) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) += sigma * rng.normal();
  }
  return out;
}

double reconstruction_error(const Matrix& x_eval, const Matrix& r) {
  if (r.rows() != x_eval.rows()) {
    throw std::invalid_argument("reconstruction_error: dimension mismatch");
  }
  const double denom = x_eval.squaredNorm();
  if (!(denom > 0.0)) {
    throw std::invalid_argument("reconstruction_error: evaluation data is all zero");
  }
  const Matrix residual = x_eval - r * (r.transpose() * x_eval);
  return residual.squaredNorm() / denom;
}

int component_rank(const Matrix& x, const BinaryAssignment& b) {
  if (x.cols() != b.n()) throw std::invalid_argument("component_rank: dimension mismatch");
  return numerical_rank(x * b.as_double());
}

Matrix achieved_basis(const Matrix& x, const BinaryAssignment& b) {
  const Matrix image = x * b.as_double();
  const SvdResult f = svd(image);
  const double smax = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < f.sigma.size(); ++i) {
    if (f.sigma(i) > 1e-8 * smax && f.sigma(i) > 0.0) ++rank;
  }
  return f.u.leftCols(rank);
}

double spe(const Vector& x, const Matrix& r) {
  if (r.rows() != x.size()) throw std::invalid_argument("spe: dimension mismatch");
  const Vector residual = x - r * (r.transpose() * x);
  return residual.squaredNorm();
}

DetectionRates detection_rates(const DetectionCounts& counts) {
  if (counts.faultless <= 0 || counts.faulty <= 0) {
    throw std::invalid_argument("detection_rates: totals must be positive");
  }
  if (counts.false_positives < 0 || counts.false_positives > counts.faultless ||
      counts.true_positives < 0 || counts.true_positives > counts.faulty) {
    throw std::invalid_argument("detection_rates: counts out of range");
  }
  DetectionRates out;
  out.fpr = static_cast<double>(counts.false_positives) / static_cast<double>(counts.faultless);
  out.tpr = static_cast<double>(counts.true_positives) / static_cast<double>(counts.faulty);
  const std::int64_t flagged = counts.false_positives + counts.true_positives;
  out.precision = flagged == 0
                      ? 1.0
                      : static_cast<double>(counts.true_positives) / static_cast<double>(flagged);
  return out;
}

std::vector<double> detection_threshold_grid() {
  struct Segment {
    double start, stop, step;
  };
  // Numerators/denominators are kept integral per segment so the grid is
  // reproducible to the last bit.
  static const Segment segments[] = {
      {0.0, 1e-4, 1e-5}, {1e-4, 1e-3, 1e-4}, {1e-3, 0.5, 1e-3}, {0.5, 5.0, 1e-2},
      {5.0, 300.0, 1.0}, {300.0, 1000.0, 100.0}, {1000.0, 1e4, 1000.0}};
  std::vector<double> grid;
  for (const Segment& seg : segments) {
    const auto steps = static_cast<long long>(std::llround((seg.stop - seg.start) / seg.step));
    for (long long i = 0; i <= steps; ++i) {
      const double t = seg.start + static_cast<double>(i) * seg.step;
      if (grid.empty() || t > grid.back()) grid.push_back(t);
    }
  }
  return grid;
}

RocPrcResult roc_prc(const std::vector<double>& scores, const std::vector<bool>& faulty,
                     const std::vector<double>& grid) {
  if (scores.size() != faulty.size() || scores.empty()) {
    throw std::invalid_argument("roc_prc: scores and labels must align and be nonempty");
  }
  for (const double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("roc_prc: scores must be finite");
  }
  DetectionCounts totals;
  for (const bool f : faulty) {
    if (f) {
      ++totals.faulty;
    } else {
      ++totals.faultless;
    }
  }
  if (totals.faulty == 0 || totals.faultless == 0) {
    throw std::invalid_argument("roc_prc: need both faulty and faultless samples");
  }

  // Sort scores by class so each threshold is a pair of binary searches.
  std::vector<double> pos, neg;
  pos.reserve(static_cast<std::size_t>(totals.faulty));
  neg.reserve(static_cast<std::size_t>(totals.faultless));
  for (std::size_t i = 0; i < scores.size(); ++i) (faulty[i] ? pos : neg).push_back(scores[i]);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  auto above = [](const std::vector<double>& sorted, double t) {
    return static_cast<std::int64_t>(sorted.end() -
                                     std::upper_bound(sorted.begin(), sorted.end(), t));
  };

  RocPrcResult out;
  out.points.reserve(grid.size());
  for (const double t : grid) {
    DetectionCounts c = totals;
    c.true_positives = above(pos, t);
    c.false_positives = above(neg, t);
    const DetectionRates r = detection_rates(c);
    out.points.push_back(RocPoint{t, r.fpr, r.tpr, r.precision});
  }

  // ROC area over points sorted by (FPR, TPR) with (0,0) and (1,1) anchors.
  std::vector<std::pair<double, double>> roc;
  roc.reserve(out.points.size() + 2);
  roc.emplace_back(0.0, 0.0);
  for (const RocPoint& p : out.points) roc.emplace_back(p.fpr, p.tpr);
  roc.emplace_back(1.0, 1.0);
  std::sort(roc.begin(), roc.end());
  for (std::size_t i = 1; i < roc.size(); ++i) {
    out.auroc += (roc[i].first - roc[i - 1].first) * 0.5 * (roc[i].second + roc[i - 1].second);
  }

  // PRC area over (recall, precision) sorted by recall.
  std::vector<std::pair<double, double>> prc;
  prc.reserve(out.points.size());
  for (const RocPoint& p : out.points) prc.emplace_back(p.tpr, p.precision);
  std::sort(prc.begin(), prc.end());
  for (std::size_t i = 1; i < prc.size(); ++i) {
    out.auprc += (prc[i].first - prc[i - 1].first) * 0.5 * (prc[i].second + prc[i - 1].second);
  }
  return out;
}

}  // namespace qapca
