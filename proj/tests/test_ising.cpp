#include <doctest.h>

#include <algorithm>

#include "qapca/ising.hpp"
#include "qapca/rng.hpp"

using namespace qapca;

namespace {

// Brute-force oracle: full 2^M enumeration straight from the coupling list.
std::pair<SpinVector, double> brute_force_min(const IsingProblem& p) {
  const int m = p.size();
  SpinVector best;
  double best_energy = 0.0;
  SpinVector s(static_cast<std::size_t>(m));
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    for (int i = 0; i < m; ++i) s[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? 1 : -1;
    const double e = p.energy(s);
    if (best.empty() || e < best_energy) {
      best = s;
      best_energy = e;
    }
  }
  return {best, best_energy};
}

IsingProblem random_problem(int m, Rng& rng, bool with_diagonal = true) {
  std::vector<Coupling> couplings;
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      if (i == j && !with_diagonal) continue;
      couplings.push_back(Coupling{i, j, rng.uniform(-1.0, 1.0)});
    }
  }
  return IsingProblem(m, std::move(couplings));
}

}  // namespace

TEST_CASE("energy evaluates the coupling list") {
  const IsingProblem pair(2, {{0, 1, -1.0}});
  CHECK(pair.energy(SpinVector{1, 1}) == doctest::Approx(-1.0));

  // Full quadratic form of J = -[[1,1],[1,1]] (diagonal kept whole).
  const IsingProblem quad(2, {{0, 0, -1.0}, {1, 1, -1.0}, {0, 1, -2.0}});
  CHECK(quad.energy(SpinVector{1, 1}) == doctest::Approx(-4.0));
  CHECK(quad.energy(SpinVector{1, -1}) == doctest::Approx(0.0));

  CHECK_THROWS_AS(quad.energy(SpinVector{1}), std::invalid_argument);
  CHECK_THROWS_AS(quad.energy(SpinVector{1, 0}), std::invalid_argument);
}

TEST_CASE("problem validation rejects bad coupling lists") {
  CHECK_THROWS_AS(IsingProblem(2, {{1, 0, 1.0}}), std::invalid_argument);   // i > j
  CHECK_THROWS_AS(IsingProblem(2, {{0, 2, 1.0}}), std::invalid_argument);   // out of range
  CHECK_THROWS_AS(IsingProblem(2, {{0, 1, 1.0}, {0, 1, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(IsingProblem(2, {{0, 1, std::nan("")}}), std::invalid_argument);
}

TEST_CASE("energy is invariant under global sign flip") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(8));
    const IsingProblem p = random_problem(m, rng);
    SpinVector s(static_cast<std::size_t>(m));
    for (auto& v : s) v = static_cast<std::int8_t>(rng.spin());
    SpinVector neg = s;
    for (auto& v : neg) v = static_cast<std::int8_t>(-v);
    CHECK(p.energy(s) == doctest::Approx(p.energy(neg)));
  }
}

TEST_CASE("solve_exhaustive finds the hand-checked optima") {
  // J = -gram([[1,1],[0,0]]) as a full quadratic form.
  const IsingProblem p1(2, {{0, 0, -1.0}, {1, 1, -1.0}, {0, 1, -2.0}});
  const SampleSet s1 = solve_exhaustive(p1);
  CHECK(s1.best_energy() == doctest::Approx(-4.0));
  CHECK(s1.best() == SpinVector{1, 1});
  CHECK(s1.occurrences.front() == 2);

  // All-zero couplings: every assignment is optimal at energy 0.
  const IsingProblem p2(3, {{0, 1, 0.0}});
  const SampleSet s2 = solve_exhaustive(p2);
  CHECK(s2.best_energy() == doctest::Approx(0.0));

  // J = -gram([[1,1,-1],[0,1,1]]): optimum +-[1,1,-1] at energy -9.
  const IsingProblem p3(3, {{0, 0, -1.0}, {1, 1, -2.0}, {2, 2, -2.0},
                            {0, 1, -2.0}, {0, 2, 2.0}, {1, 2, 0.0}});
  const SampleSet s3 = solve_exhaustive(p3);
  CHECK(s3.best_energy() == doctest::Approx(-9.0));
  CHECK(s3.best() == SpinVector{1, 1, -1});

  CHECK_THROWS_AS(solve_exhaustive(IsingProblem(30, {}), 25), std::invalid_argument);
}

TEST_CASE("solve_exhaustive agrees with the brute-force oracle") {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(10));
    const IsingProblem p = random_problem(m, rng);
    const auto [best, best_energy] = brute_force_min(p);
    const SampleSet solved = solve_exhaustive(p);
    CHECK(solved.best_energy() == doctest::Approx(best_energy).epsilon(1e-12));
    CHECK(canonical_spins(solved.best()) == canonical_spins(best));
    // Ascending energies.
    CHECK(std::is_sorted(solved.energies.begin(), solved.energies.end()));
  }
}

TEST_CASE("diagonal terms shift energies without moving the argmin") {
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(8));
    const IsingProblem with_diag = random_problem(m, rng);
    std::vector<Coupling> off;
    double shift = 0.0;
    for (const Coupling& c : with_diag.couplings()) {
      if (c.i == c.j) {
        shift += c.weight;
      } else {
        off.push_back(c);
      }
    }
    const IsingProblem without_diag(m, std::move(off));
    const SampleSet a = solve_exhaustive(with_diag);
    const SampleSet b = solve_exhaustive(without_diag);
    CHECK(a.best() == b.best());
    CHECK(a.best_energy() == doctest::Approx(b.best_energy() + shift));
  }
}

TEST_CASE("solve_sa is deterministic and monotone within a read") {
  Rng rng(21);
  const IsingProblem p = random_problem(12, rng);
  AnnealSchedule schedule;
  schedule.seed = 99;

  const SampleSet a = solve_sa(p, schedule);
  const SampleSet b = solve_sa(p, schedule);
  CHECK(a.samples == b.samples);
  CHECK(a.energies == b.energies);
  CHECK(a.occurrences == b.occurrences);

  std::vector<double> trace;
  solve_sa_traced(p, schedule, &trace);
  CHECK(trace.size() == static_cast<std::size_t>(schedule.sweeps));
  CHECK(std::is_sorted(trace.rbegin(), trace.rend()));  // non-increasing
}

TEST_CASE("solve_sa finds the exhaustive optimum on small problems") {
  Rng rng(31);
  int hits = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const IsingProblem p = random_problem(2 + static_cast<int>(rng.below(19)), rng);
    AnnealSchedule schedule;
    schedule.seed = static_cast<std::uint64_t>(trial);
    const double exact = solve_exhaustive(p).best_energy();
    const double annealed = solve_sa(p, schedule).best_energy();
    CHECK(annealed >= exact - 1e-9);
    if (annealed <= exact + 1e-9) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("solve_sa solves the ferromagnetic chain and zero couplings") {
  const int m = 50;
  std::vector<Coupling> chain;
  for (int i = 0; i + 1 < m; ++i) chain.push_back(Coupling{i, i + 1, -1.0});
  AnnealSchedule schedule;
  schedule.seed = 4;
  const SampleSet solved = solve_sa(IsingProblem(m, std::move(chain)), schedule);
  CHECK(solved.best_energy() == doctest::Approx(-(m - 1)));

  const SampleSet zero = solve_sa(IsingProblem(3, {}), schedule);
  CHECK(zero.best_energy() == doctest::Approx(0.0));
}

TEST_CASE("sample sets deduplicate and validate consistently") {
  const IsingProblem p(2, {{0, 1, 1.0}});
  SampleSet set = make_sample_set(p, {{1, -1}, {1, -1}, {1, 1}}, {1, 2, 1});
  CHECK(set.size() == 2);
  CHECK(set.best() == SpinVector{1, -1});
  CHECK(set.occurrences.front() == 3);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(set.energies[i] == doctest::Approx(p.energy(set.samples[i])));
  }
}
