#include "qapca/core.hpp"

#include <algorithm>
#include <cmath>

#include "qapca/remote.hpp"

namespace qapca {

BinaryAssignment::BinaryAssignment(int n, int k) : values_(Eigen::MatrixXi::Ones(n, k)) {
  if (n < 1 || k < 1) throw std::invalid_argument("BinaryAssignment: N and K must be positive");
}

BinaryAssignment::BinaryAssignment(Eigen::MatrixXi values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw std::invalid_argument("BinaryAssignment: N and K must be positive");
  }
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      if (values_(r, c) != 1 && values_(r, c) != -1) {
        throw std::invalid_argument("BinaryAssignment: entries must be +1 or -1");
      }
    }
  }
}

BinaryAssignment BinaryAssignment::from_spins(std::span<const std::int8_t> spins, int n, int k) {
  if (static_cast<int>(spins.size()) != n * k) {
    throw std::invalid_argument("BinaryAssignment: spin vector length must be N*K");
  }
  Eigen::MatrixXi values(n, k);
  for (int col = 0; col < k; ++col) {
    for (int i = 0; i < n; ++i) {
      values(i, col) = spins[static_cast<std::size_t>(col * n + i)];
    }
  }
  return BinaryAssignment(std::move(values));
}

SpinVector BinaryAssignment::spins() const {
  SpinVector out(static_cast<std::size_t>(n()) * static_cast<std::size_t>(k()));
  for (int col = 0; col < k(); ++col) {
    for (int i = 0; i < n(); ++i) {
      out[static_cast<std::size_t>(col * n() + i)] = static_cast<std::int8_t>(values_(i, col));
    }
  }
  return out;
}

SolverKind solver_from_name(const std::string& name) {
  if (name == "exhaustive") return SolverKind::exhaustive;
  if (name == "sa") return SolverKind::sa;
  if (name == "remote") return SolverKind::remote;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::exhaustive: return "exhaustive";
    case SolverKind::sa: return "sa";
    case SolverKind::remote: return "remote";
  }
  return "?";
}

SpinVector select_best_spins(const SampleSet& samples) {
  if (samples.empty()) throw std::invalid_argument("select_best_spins: empty sample set");
  const double best_energy = samples.energies.front();
  SpinVector best;
  for (std::size_t i = 0; i < samples.size() && samples.energies[i] == best_energy; ++i) {
    SpinVector candidate = canonical_spins(samples.samples[i]);
    if (best.empty() || std::lexicographical_compare(candidate.begin(), candidate.end(),
                                                     best.begin(), best.end())) {
      best = std::move(candidate);
    }
  }
  return best;
}

namespace {

struct SolveOutput {
  SampleSet samples;
  SolveDiagnostics diagnostics;
};

SolveOutput solve_banded(const BandedCoupling& banded, const QapcaConfig& config, int reads,
                         std::uint64_t seed) {
  double scale = 1.0;
  const IsingProblem problem = banded.normalized_problem(&scale);

  SampleSet samples;
  switch (config.solver) {
    case SolverKind::exhaustive:
      samples = solve_exhaustive(problem, config.exhaustive_cap);
      break;
    case SolverKind::sa: {
      AnnealSchedule schedule;
      schedule.sweeps = config.sweeps;
      schedule.beta_initial = config.beta_initial;
      schedule.beta_final = config.beta_final;
      schedule.reads = reads;
      schedule.seed = seed;
      samples = solve_sa(problem, schedule);
      break;
    }
    case SolverKind::remote:
      samples = solve_remote(problem, config.remote_url, reads, seed);
      break;
  }
  samples.rescale_energies(scale);

  SolveOutput out;
  out.diagnostics.kappa = banded.max_offset;
  out.diagnostics.couplers = banded.coupler_total();
  out.diagnostics.weight_scale = scale;
  out.diagnostics.best_energy = samples.best_energy();
  out.samples = std::move(samples);
  return out;
}

BinaryAssignment column_assignment(const SpinVector& spins, int n) {
  return BinaryAssignment::from_spins(spins, n, 1);
}

}  // namespace

double l1_objective(const Matrix& x, const BinaryAssignment& b) {
  if (x.cols() != b.n()) throw std::invalid_argument("l1_objective: dimension mismatch");
  const double nn = nuclear_norm(x * b.as_double());
  return nn * nn;
}

SingleResult qapca_single(const Matrix& x, const QapcaConfig& config) {
  const int n = static_cast<int>(x.cols());
  if (n < 2) throw std::invalid_argument("qapca_single: need at least two samples");

  const Matrix coupling = -gram(x);
  static EmbeddingCache shared_cache;
  const BandedCoupling banded = build_banded(coupling, 1, 0.0, config.budget, 1.0, &shared_cache);
  SolveOutput solved = solve_banded(banded, config, config.effective_reads(10), config.seed);

  const SpinVector best = select_best_spins(solved.samples);
  BinaryAssignment assignment = column_assignment(best, n);
  const Matrix image = x * assignment.as_double();
  Matrix basis = nearest_orthonormal(image);  // throws RankDeficientError on X b = 0

  return SingleResult{std::move(basis), std::move(assignment), std::move(solved.samples),
                      solved.diagnostics};
}

RecursiveResult qapca_recursive(const Matrix& x, const QapcaConfig& config) {
  const int d = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  if (config.k < 1) throw std::invalid_argument("qapca_recursive: K must be positive");
  if (config.k > std::min(d, n)) {
    throw std::invalid_argument("qapca_recursive: K exceeds min(D, N)");
  }

  QapcaConfig stage = config;
  stage.k = 1;
  stage.reads = config.effective_reads(5);

  RecursiveResult out{Matrix(d, config.k), BinaryAssignment(n, config.k), {}};
  const double base_norm = x.norm();
  Matrix deflated = x;
  for (int comp = 0; comp < config.k; ++comp) {
    if (deflated.norm() <= 1e-10 * std::max(1.0, base_norm)) {
      throw DeflationError("qapca_recursive: data exhausted after " + std::to_string(comp) +
                               " of " + std::to_string(config.k) + " components",
                           comp);
    }
    stage.seed = config.seed + static_cast<std::uint64_t>(comp);
    SingleResult res = [&] {
      try {
        return qapca_single(deflated, stage);
      } catch (const RankDeficientError&) {
        throw DeflationError("qapca_recursive: component image vanished after " +
                                 std::to_string(comp) + " of " + std::to_string(config.k) +
                                 " components",
                             comp);
      }
    }();
    out.basis.col(comp) = res.basis.col(0);
    for (int i = 0; i < n; ++i) out.assignments.at(i, comp) = res.assignment.values()(i, 0);
    out.diagnostics.push_back(res.diagnostics);
    deflated = nullspace_project(deflated, res.basis.col(0));
  }
  return out;
}

MultiResult qapca_multi(const Matrix& x, const QapcaConfig& config) {
  const int n = static_cast<int>(x.cols());
  if (config.k < 1) throw std::invalid_argument("qapca_multi: K must be positive");
  if (config.epsilon < 0.0) throw std::invalid_argument("qapca_multi: epsilon must be nonnegative");

  if (config.k == 1) {
    // No cross blocks exist; identical to the single-component solve.
    SingleResult single = qapca_single(x, config);
    return MultiResult{std::move(single.basis), std::move(single.assignment), 1,
                       std::move(single.samples), single.diagnostics};
  }
  if (n < 2) throw std::invalid_argument("qapca_multi: need at least two samples");

  const Matrix coupling = -gram(x);
  static EmbeddingCache shared_cache;
  const BandedCoupling banded = build_banded(coupling, config.k, config.epsilon, config.budget,
                                             config.effective_diagonal_scale(), &shared_cache);
  SolveOutput solved = solve_banded(banded, config, config.effective_reads(10), config.seed);

  const SpinVector best = select_best_spins(solved.samples);
  BinaryAssignment assignment = BinaryAssignment::from_spins(best, n, config.k);
  const Matrix image = x * assignment.as_double();
  const int rank = numerical_rank(image);

  MultiResult out{std::nullopt, std::move(assignment), rank, std::move(solved.samples),
                  solved.diagnostics};
  if (rank >= config.k) out.basis = nearest_orthonormal(image);
  return out;
}

double epsilon_upper_bound(const Matrix& x, const BinaryAssignment& b) {
  if (x.cols() != b.n()) throw std::invalid_argument("epsilon_upper_bound: dimension mismatch");
  const Matrix bd = b.as_double();
  const Matrix g = bd.transpose() * gram(x) * bd;  // B^T X^T X B
  const double trace = g.trace();
  const double total = g.sum();  // 1^T G 1
  const double nn = nuclear_norm(x * bd);
  const double numerator = b.k() * trace - nn * nn;
  const double denominator = total - trace;
  if (!(denominator > 0.0)) {
    throw BoundUndefinedError("epsilon_upper_bound: cross-term sum is not positive (" +
                              std::to_string(denominator) + ")");
  }
  return numerator / denominator;
}

double cross_term_alignment(const Matrix& x, const BinaryAssignment& b) {
  const Matrix bd = b.as_double();
  const Matrix g = bd.transpose() * gram(x) * bd;
  return g.sum() - g.trace();
}

double cross_term_alignment_eigen(const Matrix& x, const BinaryAssignment& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram(x));
  if (eig.info() != Eigen::Success) throw SvdError("cross_term_alignment: eigensolve failed");
  const Matrix z = eig.eigenvectors().transpose() * b.as_double();  // columns z_k
  const Vector lambda = eig.eigenvalues();
  double total = 0.0;
  for (int k1 = 0; k1 < b.k(); ++k1) {
    for (int k2 = 0; k2 < b.k(); ++k2) {
      if (k1 == k2) continue;
      total += (z.col(k1).array() * lambda.array() * z.col(k2).array()).sum();
    }
  }
  return total;
}

}  // namespace qapca
