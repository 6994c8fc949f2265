#pragma once

#include <cstdint>
#include <optional>

#include "qapca/core.hpp"
#include "qapca/linalg.hpp"

namespace qapca {

/// Settings for the greedy bit-flipping L1 solver.
struct L1bfConfig {
  int restarts = 1;    // 32 for fault-detection parity runs
  int max_passes = 0;  // flip cap; 0 selects 100 * N * K
  std::uint64_t seed = 0;
};

/// Standard PCA: the top-K left singular vectors of X. Throws
/// RankDeficientError when K exceeds the numerical rank of X.
Matrix l2_pca(const Matrix& x, int k);

struct L1bfResult {
  std::optional<Matrix> basis;  // empty when X B is rank deficient
  BinaryAssignment assignment;
  int rank = 0;
  double objective = 0.0;  // ||X B||_* of the winning restart
  int flips = 0;           // accepted flips in the winning restart

  bool degenerate() const { return !basis.has_value(); }
};

/// Greedy L1 subspace estimation: starting from the signs of the top-K
/// right singular vectors (restart 0) or random signs (later restarts),
/// repeatedly flips the single entry of B that most increases ||X B||_*
/// until no strict improvement remains; the best restart wins.
L1bfResult l1_bf(const Matrix& x, int k, const L1bfConfig& config);

}  // namespace qapca
