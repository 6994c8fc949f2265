#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qapca/ising.hpp"
#include "qapca/linalg.hpp"

namespace qapca {

/// Thrown when a coupling problem cannot be fit under the coupler budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hardware-style coupler budget. `c_limit` caps the number of couplings a
/// problem may emit; `n_limit` is the largest sample count that embeds
/// without banding and `chain_margin` derates it when deriving the default
/// coupler cap.
struct CouplerBudget {
  std::int64_t c_limit = 11325;
  int n_limit = 175;
  int chain_margin = 25;

  /// Budget with c_limit derived from (n_limit - chain_margin) samples at
  /// one component.
  static CouplerBudget with_limits(int n_limit, int chain_margin);
};

/// Number of couplers a full K-component embedding of an N-sample problem
/// needs: one per unique entry of the stacked upper-triangular coupling
/// matrix, (K^2 N^2 - K N)/2 + K N.
std::int64_t coupler_count(int n, int k);

/// Couplers used by the diagonal plus the off-diagonal bands at offsets
/// 1..kappa of one N x N upper-triangular block.
std::int64_t banded_coupler_count(int n, int kappa);

/// Largest band offset kappa in {0, .., N-1} whose bands (diagonal plus
/// offsets 1..kappa) fit within c_limit, floored at 2. Throws BudgetError
/// when even the superdiagonal does not fit (c_limit < 2N - 1). With
/// `blocks` > 1 every band is charged once per block.
int compute_kappa(int n, std::int64_t c_limit, int blocks = 1);

/// Banded Ising form of a symmetric coupling matrix. `max_offset` is the
/// largest off-diagonal band that was loaded (1 = superdiagonal only,
/// N-1 = full upper triangle).
struct BandedCoupling {
  int n = 0;
  int k = 1;
  int max_offset = 0;
  double epsilon = 0.0;
  double diagonal_scale = 1.0;
  std::vector<Coupling> couplings;

  std::int64_t coupler_total() const { return static_cast<std::int64_t>(couplings.size()); }

  IsingProblem problem() const { return IsingProblem(n * k, couplings); }

  /// Problem with weights rescaled so max |weight| = 1; `scale_out`
  /// receives the factor energies must be multiplied by to undo it.
  IsingProblem normalized_problem(double* scale_out) const;
};

/// Single-component banding: entry (i, j) of the symmetric matrix is kept
/// iff 0 < j - i < kappa with its own weight, the diagonal is kept at half
/// weight, everything else is dropped. kappa = N keeps the full upper
/// triangle. Throws std::invalid_argument if j is not symmetric.
BandedCoupling band_single(const Matrix& j, int kappa);

/// Multi-component banding over K*N spins. Component k_1's spins occupy
/// block [k_1*N, (k_1+1)*N). Diagonal blocks carry the band_single pattern
/// scaled by `diagonal_scale` (pass K for the default formulation);
/// off-diagonal upper blocks carry -epsilon times the same pattern.
BandedCoupling band_multi(const Matrix& j, int k, double epsilon, int kappa,
                          double diagonal_scale);

/// Index layout of a banded embedding, independent of coupling values.
struct CouplerSlot {
  int row = 0;
  int col = 0;
  int src_i = 0;
  int src_j = 0;
  bool cross_block = false;  // true for blocks with k1 != k2
  bool halved = false;       // true for within-block diagonal entries
};

struct EmbeddingLayout {
  int n = 0;
  int k = 0;
  int max_offset = 0;
  std::int64_t c_limit = 0;
  std::vector<CouplerSlot> slots;
};

/// Builds the layout for (n, k) under the budget: bands are added whole, in
/// offset order, across all blocks at once; loading stops before the first
/// band that would push the slot count past c_limit.
EmbeddingLayout build_layout(int n, int k, const CouplerBudget& budget);

/// Memoizes layouts by (n, k, c_limit). Concurrent readers are safe;
/// duplicate concurrent builds insert identical layouts.
class EmbeddingCache {
 public:
  std::shared_ptr<const EmbeddingLayout> get_or_build(int n, int k, const CouplerBudget& budget);

  std::size_t build_count() const;
  std::size_t entry_count() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::tuple<int, int, std::int64_t>, std::shared_ptr<const EmbeddingLayout>> entries_;
  std::size_t builds_ = 0;
};

/// Instantiates a layout with the weights of a concrete coupling matrix.
BandedCoupling apply_layout(const EmbeddingLayout& layout, const Matrix& j, double epsilon,
                            double diagonal_scale);

/// Budget-driven banding used by the solver pipelines: layout (optionally
/// cached) plus weights in one step.
BandedCoupling build_banded(const Matrix& j, int k, double epsilon, const CouplerBudget& budget,
                            double diagonal_scale, EmbeddingCache* cache = nullptr);

/// JSON text of a banded coupling:
/// {"N":..,"K":..,"kappa":..,"epsilon":..,"couplings":[[i,j,w],..]}.
std::string banded_to_json(const BandedCoupling& banded);

}  // namespace qapca
