#include <doctest.h>

#include <cmath>

#include "qapca/baselines.hpp"
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

double brute_force_best_value(const Matrix& x) {
  const int n = static_cast<int>(x.cols());
  double best = -1.0;
  Vector b(n);
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    for (int i = 0; i < n; ++i) b(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    best = std::max(best, (x * b).squaredNorm());
  }
  return best;
}

Matrix random_orthonormal(int rows, int cols, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, cols, rng));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

}  // namespace

TEST_CASE("l2_pca recovers dominant directions") {
  Matrix diag(2, 2);
  diag << 3, 0, 0, 1;
  const Matrix r = l2_pca(diag, 1);
  CHECK(std::abs(r(0, 0)) == doctest::Approx(1.0));
  CHECK(r(1, 0) == doctest::Approx(0.0));

  Rng rng(3);
  const Matrix q = random_orthonormal(4, 4, rng);
  const Matrix full = l2_pca(q, 4);
  CHECK((full * full.transpose() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);

  // K = 1 direction equals the dominant eigenvector of the Gram oracle.
  Matrix x(2, 3);
  x << 1, 1, -1, 0, 1, 1;
  const Matrix top = l2_pca(x, 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(x * x.transpose());
  const Vector dominant = eig.eigenvectors().col(1);  // ascending order
  CHECK(std::abs(top.col(0).dot(dominant)) == doctest::Approx(1.0));
}

TEST_CASE("l2_pca rejects K beyond the data rank") {
  Matrix rank1(3, 3);
  Vector v(3);
  v << 1, 2, 3;
  rank1 << v, 2 * v, 3 * v;
  try {
    l2_pca(rank1, 2);
    FAIL("expected RankDeficientError");
  } catch (const RankDeficientError& e) {
    CHECK(e.achieved_rank == 1);
  }
  CHECK_THROWS_AS(l2_pca(rank1, 5), std::invalid_argument);
}

TEST_CASE("l2_pca reconstruction beats random rivals") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_matrix(5, 12, rng);
    const int k = 1 + static_cast<int>(rng.below(3));
    const Matrix r = l2_pca(x, k);
    const double best = (x - r * r.transpose() * x).squaredNorm();
    for (int rival = 0; rival < 10; ++rival) {
      const Matrix g = random_orthonormal(5, k, rng);
      CHECK(best <= (x - g * g.transpose() * x).squaredNorm() + 1e-9);
    }
  }
}

TEST_CASE("l1_bf solves the toy problem") {
  Matrix x(2, 3);
  x << 1, 1, -1, 0, 1, 1;
  const L1bfResult res = l1_bf(x, 1, L1bfConfig{});
  REQUIRE(!res.degenerate());
  CHECK(std::abs((*res.basis)(0, 0)) == doctest::Approx(1.0));
  CHECK((*res.basis)(1, 0) == doctest::Approx(0.0));
  CHECK(res.objective * res.objective == doctest::Approx(9.0));
  // b = +-[1,1,-1]
  const auto& b = res.assignment.values();
  CHECK(b(0, 0) == b(1, 0));
  CHECK(b(0, 0) == -b(2, 0));
}

TEST_CASE("l1_bf with restarts matches the exhaustive optimum almost always") {
  Rng rng(11);
  int hits = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(5));
    const int n = 3 + static_cast<int>(rng.below(8));  // up to 10
    const Matrix x = random_matrix(d, n, rng);
    L1bfConfig config;
    config.restarts = 8;
    config.seed = static_cast<std::uint64_t>(trial);
    const L1bfResult res = l1_bf(x, 1, config);
    const double brute = brute_force_best_value(x);
    CHECK(res.objective * res.objective <= brute + 1e-9);
    if (res.objective * res.objective >= brute - 1e-9 * std::max(1.0, brute)) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("l1_bf and l2_pca agree on clean Gaussian data") {
  Rng rng(13);
  double total_angle = 0.0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    // Anisotropic Gaussian: well-separated spectrum, no outliers.
    const int d = 5;
    const int n = 100;
    Matrix x(d, n);
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < d; ++r) {
        x(r, c) = rng.normal() * std::pow(4.0, d - r);
      }
    }
    const int k = 2;
    const Matrix l2 = l2_pca(x, k);
    const L1bfResult l1 = l1_bf(x, k, L1bfConfig{});
    REQUIRE(!l1.degenerate());
    // Largest principal angle between the two subspaces.
    const Matrix cosines = l2.transpose() * *l1.basis;
    Eigen::JacobiSVD<Matrix> svd_angles(cosines);
    const double smallest_cos = svd_angles.singularValues().minCoeff();
    total_angle += std::acos(std::min(1.0, smallest_cos));
  }
  CHECK(total_angle / trials < 0.1);
}

TEST_CASE("l1_bf objective is non-decreasing in the flip budget") {
  Rng rng(19);
  const Matrix x = random_matrix(5, 9, rng);
  double previous = -1.0;
  for (const int cap : {1, 2, 4, 8, 16, 1000}) {
    L1bfConfig config;
    config.max_passes = cap;
    const double objective = l1_bf(x, 2, config).objective;
    CHECK(objective >= previous - 1e-12);
    previous = objective;
  }
}

TEST_CASE("l1_bf restarts are deterministic") {
  Rng rng(17);
  const Matrix x = random_matrix(4, 8, rng);
  L1bfConfig config;
  config.restarts = 5;
  config.seed = 42;
  const L1bfResult a = l1_bf(x, 2, config);
  const L1bfResult b = l1_bf(x, 2, config);
  CHECK(a.assignment.values() == b.assignment.values());
  CHECK(a.objective == b.objective);
}

TEST_CASE("l1_bf surfaces rank-deficient outputs") {
  Matrix x(2, 2);
  x << 1, 1, 0, 0;  // rank 1, K = 2
  const L1bfResult res = l1_bf(x, 2, L1bfConfig{});
  CHECK(res.degenerate());
  CHECK(res.rank == 1);
}
