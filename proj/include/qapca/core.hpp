#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qapca/embedding.hpp"
#include "qapca/ising.hpp"
#include "qapca/linalg.hpp"

namespace qapca {

/// Thrown when the epsilon bound's denominator is not positive, in which
/// case the bound is undefined.
struct BoundUndefinedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when recursive extraction runs out of data before reaching K
/// components. `achieved_rank` counts the components found.
struct DeflationError : std::runtime_error {
  int achieved_rank;
  DeflationError(const std::string& what, int rank)
      : std::runtime_error(what), achieved_rank(rank) {}
};

/// Sign matrix B in {-1,+1}^{N x K}; column k holds the spins b_k. The
/// vectorized view stacks columns: [b_1; b_2; ...; b_K].
class BinaryAssignment {
 public:
  BinaryAssignment(int n, int k);
  explicit BinaryAssignment(Eigen::MatrixXi values);

  /// Rebuilds B from its stacked spin vector.
  static BinaryAssignment from_spins(std::span<const std::int8_t> spins, int n, int k);

  int n() const { return static_cast<int>(values_.rows()); }
  int k() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXi& values() const { return values_; }
  int& at(int i, int col) { return values_(i, col); }

  Matrix as_double() const { return values_.cast<double>(); }
  SpinVector spins() const;

 private:
  Eigen::MatrixXi values_;
};

enum class SolverKind { exhaustive, sa, remote };

SolverKind solver_from_name(const std::string& name);
std::string solver_name(SolverKind kind);

/// Tuning knobs shared by the solver pipelines. `reads` of 0 selects the
/// per-algorithm default: 10 for the simultaneous solver, 5 per component
/// for the recursive one.
struct QapcaConfig {
  int k = 1;
  double epsilon = 100.0;
  int reads = 0;
  SolverKind solver = SolverKind::sa;
  CouplerBudget budget;
  std::uint64_t seed = 0;
  std::string remote_url;
  int sweeps = 1000;
  double beta_initial = 0.1;
  double beta_final = 10.0;
  /// Weight on the diagonal blocks of the multi-component coupling matrix;
  /// < 0 selects the default K.
  double diagonal_block_scale = -1.0;
  int exhaustive_cap = 25;

  int effective_reads(int algorithm_default) const {
    return reads > 0 ? reads : algorithm_default;
  }
  double effective_diagonal_scale() const {
    return diagonal_block_scale >= 0.0 ? diagonal_block_scale : static_cast<double>(k);
  }
};

/// Solver bookkeeping surfaced with every fit.
struct SolveDiagnostics {
  int kappa = 0;                // largest band offset loaded
  std::int64_t couplers = 0;    // couplings emitted
  double weight_scale = 1.0;    // factor removed by normalization
  double best_energy = 0.0;     // in unnormalized banded units
};

struct SingleResult {
  Matrix basis;  // D x 1, unit column
  BinaryAssignment assignment;
  SampleSet samples;
  SolveDiagnostics diagnostics;
};

struct RecursiveResult {
  Matrix basis;  // D x K, orthonormal columns
  BinaryAssignment assignments;  // per-stage spin vectors (over deflated data)
  std::vector<SolveDiagnostics> diagnostics;
};

/// Result of the simultaneous multi-component solve. When X B has rank
/// < K there is no unique orthonormal basis; the outcome is surfaced with
/// `basis` empty and the assignment kept so callers can lower K or raise
/// epsilon.
struct MultiResult {
  std::optional<Matrix> basis;  // D x K when full rank
  BinaryAssignment assignment;
  int rank = 0;
  SampleSet samples;
  SolveDiagnostics diagnostics;

  bool degenerate() const { return !basis.has_value(); }
};

/// Squared nuclear norm of X B, the multi-component objective.
double l1_objective(const Matrix& x, const BinaryAssignment& b);

/// One robust component: minimizes b^T (-X^T X) b over sign vectors under
/// the coupler budget and returns the normalized image X b / ||X b||.
SingleResult qapca_single(const Matrix& x, const QapcaConfig& config);

/// K components by repeated single-component extraction with nullspace
/// deflation between stages.
RecursiveResult qapca_recursive(const Matrix& x, const QapcaConfig& config);

/// K components solved simultaneously over K*N spins with the epsilon
/// cross-component penalty.
MultiResult qapca_multi(const Matrix& x, const QapcaConfig& config);

/// Upper bound on the orthogonality weight epsilon:
/// [K tr(G) - ||X B||_*^2] / [1^T G 1 - tr(G)] with G = B^T X^T X B.
/// Throws BoundUndefinedError when the denominator is not positive.
double epsilon_upper_bound(const Matrix& x, const BinaryAssignment& b);

/// Sum of cross terms b_{k1}^T X^T X b_{k2} over ordered pairs k1 != k2.
double cross_term_alignment(const Matrix& x, const BinaryAssignment& b);

/// Same sum evaluated through the eigendecomposition of X^T X
/// (z_k = Q^T b_k, then sum of z_{k1}^T Lambda z_{k2}).
double cross_term_alignment_eigen(const Matrix& x, const BinaryAssignment& b);

/// Lowest-energy spin vector of a sample set under the deterministic tie
/// rule: among minimum-energy samples, the lexicographically smallest
/// after flipping the global sign so the first spin is +1.
SpinVector select_best_spins(const SampleSet& samples);

}  // namespace qapca
