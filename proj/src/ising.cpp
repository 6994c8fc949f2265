#include "qapca/ising.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qapca/rng.hpp"

namespace qapca {

namespace {

// Neighbor lists for O(1) flip deltas. Diagonal terms are constant and kept
// separately.
struct Adjacency {
  std::vector<std::vector<std::pair<int, double>>> neighbors;
  double constant = 0.0;

  explicit Adjacency(const IsingProblem& p) : neighbors(static_cast<std::size_t>(p.size())) {
    for (const Coupling& c : p.couplings()) {
      if (c.i == c.j) {
        constant += c.weight;
      } else {
        neighbors[static_cast<std::size_t>(c.i)].emplace_back(c.j, c.weight);
        neighbors[static_cast<std::size_t>(c.j)].emplace_back(c.i, c.weight);
      }
    }
  }

  // Local field h_i = sum_j w_ij s_j over off-diagonal neighbors.
  std::vector<double> fields(const SpinVector& s) const {
    std::vector<double> h(neighbors.size(), 0.0);
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      double acc = 0.0;
      for (const auto& [j, w] : neighbors[i]) acc += w * s[static_cast<std::size_t>(j)];
      h[i] = acc;
    }
    return h;
  }
};

double off_diagonal_energy(const Adjacency& adj, const SpinVector& s) {
  double e = 0.0;
  for (std::size_t i = 0; i < adj.neighbors.size(); ++i) {
    for (const auto& [j, w] : adj.neighbors[i]) {
      if (j > static_cast<int>(i)) e += w * s[i] * s[static_cast<std::size_t>(j)];
    }
  }
  return e;
}

bool lex_less(const SpinVector& a, const SpinVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

IsingProblem::IsingProblem(int size, std::vector<Coupling> couplings)
    : size_(size), couplings_(std::move(couplings)) {
  if (size_ < 1) throw std::invalid_argument("IsingProblem: size must be positive");
  std::vector<std::pair<int, int>> seen;
  seen.reserve(couplings_.size());
  for (const Coupling& c : couplings_) {
    if (c.i < 0 || c.j < 0 || c.i >= size_ || c.j >= size_) {
      throw std::invalid_argument("IsingProblem: coupling index out of range");
    }
    if (c.i > c.j) throw std::invalid_argument("IsingProblem: couplings must have i <= j");
    if (!std::isfinite(c.weight)) {
      throw std::invalid_argument("IsingProblem: coupling weight is not finite");
    }
    seen.emplace_back(c.i, c.j);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw std::invalid_argument("IsingProblem: duplicate coupling pair");
  }
}

double IsingProblem::energy(std::span<const std::int8_t> spins) const {
  if (static_cast<int>(spins.size()) != size_) {
    throw std::invalid_argument("energy: spin vector length " + std::to_string(spins.size()) +
                                " does not match problem size " + std::to_string(size_));
  }
  for (const std::int8_t s : spins) {
    if (s != 1 && s != -1) throw std::invalid_argument("energy: spins must be +1 or -1");
  }
  double e = 0.0;
  for (const Coupling& c : couplings_) {
    e += c.weight * spins[static_cast<std::size_t>(c.i)] * spins[static_cast<std::size_t>(c.j)];
  }
  return e;
}

double IsingProblem::max_abs_weight() const {
  double m = 0.0;
  for (const Coupling& c : couplings_) m = std::max(m, std::abs(c.weight));
  return m;
}

IsingProblem IsingProblem::scaled(double factor) const {
  std::vector<Coupling> scaled = couplings_;
  for (Coupling& c : scaled) c.weight *= factor;
  return IsingProblem(size_, std::move(scaled));
}

void SampleSet::rescale_energies(double factor) {
  for (double& e : energies) e *= factor;
}

void AnnealSchedule::validate() const {
  if (sweeps < 1) throw std::invalid_argument("AnnealSchedule: sweeps must be positive");
  if (reads < 1) throw std::invalid_argument("AnnealSchedule: reads must be positive");
  if (!(beta_initial > 0.0) || !(beta_final > beta_initial)) {
    throw std::invalid_argument(
        "AnnealSchedule: inverse temperatures must satisfy 0 < initial < final");
  }
}

SpinVector canonical_spins(SpinVector s) {
  if (!s.empty() && s.front() == -1) {
    for (std::int8_t& v : s) v = static_cast<std::int8_t>(-v);
  }
  return s;
}

SampleSet make_sample_set(const IsingProblem& problem, std::vector<SpinVector> samples,
                          std::vector<int> occurrences) {
  if (samples.size() != occurrences.size()) {
    throw std::invalid_argument("make_sample_set: samples/occurrences length mismatch");
  }
  std::map<SpinVector, int> merged;
  for (std::size_t i = 0; i < samples.size(); ++i) merged[samples[i]] += occurrences[i];

  struct Entry {
    double energy;
    SpinVector spins;
    int count;
  };
  std::vector<Entry> entries;
  entries.reserve(merged.size());
  for (auto& [spins, count] : merged) {
    entries.push_back(Entry{problem.energy(spins), spins, count});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return lex_less(a.spins, b.spins);
  });

  SampleSet out;
  out.samples.reserve(entries.size());
  out.energies.reserve(entries.size());
  out.occurrences.reserve(entries.size());
  for (Entry& e : entries) {
    out.samples.push_back(std::move(e.spins));
    out.energies.push_back(e.energy);
    out.occurrences.push_back(e.count);
  }
  return out;
}

SampleSet solve_exhaustive(const IsingProblem& problem, int max_size, int max_kept) {
  const int m = problem.size();
  if (m > max_size) {
    throw std::invalid_argument("solve_exhaustive: problem size " + std::to_string(m) +
                                " exceeds cap " + std::to_string(max_size));
  }
  if (max_kept < 1) throw std::invalid_argument("solve_exhaustive: max_kept must be positive");

  const Adjacency adj(problem);

  // Enumerate the half-space with spin 0 fixed to +1; energies are invariant
  // under global sign flip, so this covers every energy level.
  SpinVector spins(static_cast<std::size_t>(m), 1);
  std::vector<double> h = adj.fields(spins);
  double energy = off_diagonal_energy(adj, spins) + adj.constant;

  struct Entry {
    double energy;
    SpinVector spins;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return lex_less(a.spins, b.spins);
  };
  // Max-heap of the kept (lowest-energy) entries; top is the worst kept.
  std::vector<Entry> heap;
  heap.reserve(static_cast<std::size_t>(max_kept) + 1);
  auto consider = [&](double e, const SpinVector& s) {
    if (static_cast<int>(heap.size()) < max_kept) {
      heap.push_back(Entry{e, s});
      std::push_heap(heap.begin(), heap.end(), worse);
    } else if (e < heap.front().energy ||
               (e == heap.front().energy && lex_less(s, heap.front().spins))) {
      std::pop_heap(heap.begin(), heap.end(), worse);
      heap.back() = Entry{e, s};
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  };

  consider(energy, spins);
  const std::uint64_t states = m > 1 ? (1ull << (m - 1)) : 1ull;
  for (std::uint64_t g = 1; g < states; ++g) {
    // Gray-code step: flip the spin indexed by the lowest set bit (offset by
    // one since spin 0 stays fixed).
    const int flip = 1 + __builtin_ctzll(g);
    const std::size_t fi = static_cast<std::size_t>(flip);
    energy += -2.0 * spins[fi] * h[fi];
    spins[fi] = static_cast<std::int8_t>(-spins[fi]);
    for (const auto& [j, w] : adj.neighbors[fi]) {
      h[static_cast<std::size_t>(j)] += 2.0 * w * spins[fi];
    }
    // Periodically resynchronize against accumulated rounding.
    if ((g & 0xffffull) == 0) {
      energy = off_diagonal_energy(adj, spins) + adj.constant;
    }
    consider(energy, spins);
  }

  std::vector<SpinVector> samples;
  samples.reserve(heap.size());
  for (Entry& e : heap) samples.push_back(std::move(e.spins));
  // Each reported sample stands for the pair {s, -s}.
  std::vector<int> occurrences(samples.size(), 2);
  return make_sample_set(problem, std::move(samples), std::move(occurrences));
}

namespace {

SampleSet solve_sa_impl(const IsingProblem& problem, const AnnealSchedule& schedule,
                        std::vector<double>* best_trace) {
  schedule.validate();
  const int m = problem.size();
  const Adjacency adj(problem);
  const double ratio =
      schedule.sweeps > 1
          ? std::pow(schedule.beta_final / schedule.beta_initial, 1.0 / (schedule.sweeps - 1))
          : 1.0;

  std::vector<SpinVector> best_per_read;
  best_per_read.reserve(static_cast<std::size_t>(schedule.reads));

  for (int read = 0; read < schedule.reads; ++read) {
    Rng rng(schedule.seed + static_cast<std::uint64_t>(read));
    SpinVector spins(static_cast<std::size_t>(m));
    for (std::int8_t& s : spins) s = static_cast<std::int8_t>(rng.spin());
    std::vector<double> h = adj.fields(spins);
    double energy = off_diagonal_energy(adj, spins);

    SpinVector best = spins;
    double best_energy = energy;
    double beta = schedule.beta_initial;

    for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
      for (int step = 0; step < m; ++step) {
        const std::size_t i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m)));
        const double delta = -2.0 * spins[i] * h[i];
        if (delta <= 0.0 || rng.uniform() < std::exp(-beta * delta)) {
          energy += delta;
          spins[i] = static_cast<std::int8_t>(-spins[i]);
          for (const auto& [j, w] : adj.neighbors[i]) {
            h[static_cast<std::size_t>(j)] += 2.0 * w * spins[i];
          }
          if (energy < best_energy) {
            best_energy = energy;
            best = spins;
          }
        }
      }
      if (best_trace && read == 0) best_trace->push_back(best_energy);
      beta *= ratio;
    }
    best_per_read.push_back(std::move(best));
  }

  std::vector<int> occurrences(best_per_read.size(), 1);
  return make_sample_set(problem, std::move(best_per_read), std::move(occurrences));
}

}  // namespace

SampleSet solve_sa(const IsingProblem& problem, const AnnealSchedule& schedule) {
  return solve_sa_impl(problem, schedule, nullptr);
}

SampleSet solve_sa_traced(const IsingProblem& problem, const AnnealSchedule& schedule,
                          std::vector<double>* best_trace) {
  return solve_sa_impl(problem, schedule, best_trace);
}

}  // namespace qapca
