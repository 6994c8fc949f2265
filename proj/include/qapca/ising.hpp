#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qapca {

using SpinVector = std::vector<std::int8_t>;  // entries are +1 or -1

/// One quadratic term w * s_i * s_j with i <= j. A diagonal term (i == j)
/// contributes the constant w to every energy.
struct Coupling {
  int i = 0;
  int j = 0;
  double weight = 0.0;
};

/// Sparse upper-triangular coupling list over `size` spins with energy
/// E(s) = sum_{(i,j,w)} w * s_i * s_j for s in {-1,+1}^size.
class IsingProblem {
 public:
  IsingProblem(int size, std::vector<Coupling> couplings);

  int size() const { return size_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }

  /// Energy of a spin assignment. Throws std::invalid_argument on a length
  /// mismatch or a non-±1 entry.
  double energy(std::span<const std::int8_t> spins) const;

  /// Largest |weight| over all couplings (0 for an empty list).
  double max_abs_weight() const;

  /// Copy with every weight multiplied by `factor`.
  IsingProblem scaled(double factor) const;

 private:
  int size_;
  std::vector<Coupling> couplings_;
};

/// Solver output: spin vectors with their energies and multiplicities,
/// sorted by ascending energy (ties by lexicographic spin order).
struct SampleSet {
  std::vector<SpinVector> samples;
  std::vector<double> energies;
  std::vector<int> occurrences;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  const SpinVector& best() const { return samples.front(); }
  double best_energy() const { return energies.front(); }

  /// Multiplies all energies by `factor` (used to undo weight rescaling).
  void rescale_energies(double factor);
};

/// Classical annealing schedule. Output is deterministic for a fixed seed:
/// read r uses its own generator seeded with seed + r, so reads can be
/// scheduled in any order without changing the result.
struct AnnealSchedule {
  int sweeps = 1000;
  double beta_initial = 0.1;
  double beta_final = 10.0;
  int reads = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Enumerates every assignment (up to global spin sign; reported samples
/// have first spin +1 and occurrences 2 for the {s, -s} pair) and returns
/// the `max_kept` lowest-energy assignments, global optimum first.
/// Refuses problems larger than `max_size` spins.
SampleSet solve_exhaustive(const IsingProblem& problem, int max_size = 25,
                           int max_kept = 64);

/// Single-spin-flip Metropolis annealing over a geometric inverse-
/// temperature ramp. Each read is an independent restart; the best
/// configuration seen during the read is reported. Identical seeds give
/// identical SampleSets.
SampleSet solve_sa(const IsingProblem& problem, const AnnealSchedule& schedule);

/// As solve_sa, and additionally records the best-so-far energy after each
/// sweep of read 0 (used to check monotone improvement).
SampleSet solve_sa_traced(const IsingProblem& problem, const AnnealSchedule& schedule,
                          std::vector<double>* best_trace);

/// Builds a sorted, deduplicated SampleSet from raw samples; energies are
/// recomputed from `problem`.
SampleSet make_sample_set(const IsingProblem& problem, std::vector<SpinVector> samples,
                          std::vector<int> occurrences);

/// Canonical representative of {s, -s}: s itself if its first spin is +1,
/// otherwise -s.
SpinVector canonical_spins(SpinVector s);

}  // namespace qapca
