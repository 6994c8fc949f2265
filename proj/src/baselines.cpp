#include "qapca/baselines.hpp"

#include <cmath>

#include "qapca/rng.hpp"

namespace qapca {

Matrix l2_pca(const Matrix& x, int k) {
  if (k < 1) throw std::invalid_argument("l2_pca: K must be positive");
  if (k > std::min(x.rows(), x.cols())) {
    throw std::invalid_argument("l2_pca: K exceeds min(D, N)");
  }
  const SvdResult f = svd(x);
  const double smax = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < f.sigma.size(); ++i) {
    if (f.sigma(i) > 1e-10 * smax && f.sigma(i) > 0.0) ++rank;
  }
  if (k > rank) {
    throw RankDeficientError(
        "l2_pca: requested " + std::to_string(k) + " components but data has rank " +
            std::to_string(rank),
        rank);
  }
  return f.u.leftCols(k);
}

namespace {

double nuclear_norm_of(const Matrix& image) {
  return svd(image).sigma.sum();
}

struct Restart {
  Eigen::MatrixXi b;
  double objective = 0.0;
  int flips = 0;
};

Restart run_restart(const Matrix& x, Eigen::MatrixXi b, int flip_cap) {
  const int n = static_cast<int>(b.rows());
  const int k = static_cast<int>(b.cols());
  Matrix image = x * b.cast<double>();
  double objective = nuclear_norm_of(image);

  int flips = 0;
  while (flips < flip_cap) {
    double best_gain = 0.0;
    int best_n = -1;
    int best_k = -1;
    Matrix candidate = image;
    for (int col = 0; col < k; ++col) {
      const Vector original = image.col(col);
      for (int row = 0; row < n; ++row) {
        // Flipping B(row, col) moves column col by -2 B(row,col) x_row.
        candidate.col(col) = original - 2.0 * b(row, col) * x.col(row);
        const double value = nuclear_norm_of(candidate);
        if (value - objective > best_gain) {
          best_gain = value - objective;
          best_n = row;
          best_k = col;
        }
      }
      candidate.col(col) = original;
    }
    if (best_n < 0 || best_gain <= 1e-12 * std::max(1.0, objective)) break;
    b(best_n, best_k) = -b(best_n, best_k);
    image.col(best_k) = x * b.col(best_k).cast<double>();  // fresh column, no drift
    objective = nuclear_norm_of(image);
    ++flips;
  }
  return Restart{std::move(b), objective, flips};
}

}  // namespace

L1bfResult l1_bf(const Matrix& x, int k, const L1bfConfig& config) {
  const int n = static_cast<int>(x.cols());
  if (k < 1) throw std::invalid_argument("l1_bf: K must be positive");
  if (k > std::min(x.rows(), x.cols())) throw std::invalid_argument("l1_bf: K exceeds min(D, N)");
  if (config.restarts < 1) throw std::invalid_argument("l1_bf: restarts must be positive");
  const int flip_cap = config.max_passes > 0 ? config.max_passes : 100 * n * k;

  std::optional<Restart> best;
  for (int r = 0; r < config.restarts; ++r) {
    Eigen::MatrixXi b(n, k);
    if (r == 0) {
      // Signs of the top-K right singular vectors; zeros count as +1.
      const SvdResult f = svd(x);
      for (int col = 0; col < k; ++col) {
        for (int row = 0; row < n; ++row) {
          const double v = col < f.v.cols() ? f.v(row, col) : 0.0;
          b(row, col) = v < 0.0 ? -1 : 1;
        }
      }
    } else {
      Rng rng(config.seed + static_cast<std::uint64_t>(r));
      for (int col = 0; col < k; ++col) {
        for (int row = 0; row < n; ++row) b(row, col) = rng.spin();
      }
    }
    Restart result = run_restart(x, std::move(b), flip_cap);
    if (!best || result.objective > best->objective) best = std::move(result);
  }

  BinaryAssignment assignment(best->b);
  const Matrix image = x * assignment.as_double();
  const int rank = numerical_rank(image);
  L1bfResult out{std::nullopt, std::move(assignment), rank, best->objective, best->flips};
  if (rank >= k) out.basis = nearest_orthonormal(image);
  return out;
}

}  // namespace qapca
