#include "qapca/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <json.hpp>

namespace qapca {

namespace {

void require_symmetric(const Matrix& j) {
  if (j.rows() != j.cols()) throw std::invalid_argument("banding: matrix must be square");
  if ((j - j.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("banding: matrix must be symmetric within 1e-10");
  }
}

double slot_weight(const CouplerSlot& slot, const Matrix& j, double epsilon,
                   double diagonal_scale) {
  double w = j(slot.src_i, slot.src_j);
  if (slot.halved) w *= 0.5;
  w *= slot.cross_block ? -epsilon : diagonal_scale;
  return w;
}

}  // namespace

CouplerBudget CouplerBudget::with_limits(int n_limit, int chain_margin) {
  if (n_limit <= chain_margin) {
    throw std::invalid_argument("CouplerBudget: n_limit must exceed chain_margin");
  }
  CouplerBudget b;
  b.n_limit = n_limit;
  b.chain_margin = chain_margin;
  b.c_limit = coupler_count(n_limit - chain_margin, 1);
  return b;
}

std::int64_t coupler_count(int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("coupler_count: N and K must be positive");
  const std::int64_t kn = static_cast<std::int64_t>(k) * n;
  return (kn * kn - kn) / 2 + kn;
}

std::int64_t banded_coupler_count(int n, int kappa) {
  // Diagonal (offset 0) plus offsets 1..kappa: sum of (n - d).
  std::int64_t total = 0;
  for (int d = 0; d <= kappa && d < n; ++d) total += n - d;
  return total;
}

int compute_kappa(int n, std::int64_t c_limit, int blocks) {
  if (n < 1) throw std::invalid_argument("compute_kappa: N must be positive");
  if (blocks < 1) throw std::invalid_argument("compute_kappa: blocks must be positive");
  const std::int64_t superdiag_cost =
      static_cast<std::int64_t>(blocks) * (2 * static_cast<std::int64_t>(n) - 1);
  if (c_limit < superdiag_cost) {
    throw BudgetError("compute_kappa: budget " + std::to_string(c_limit) +
                      " cannot hold the diagonal plus superdiagonal (" +
                      std::to_string(superdiag_cost) + " couplers)");
  }
  int best = 0;
  for (int kappa = 0; kappa < n; ++kappa) {
    if (blocks * banded_coupler_count(n, kappa) <= c_limit) best = kappa;
  }
  return std::max(best, 2);
}

IsingProblem BandedCoupling::normalized_problem(double* scale_out) const {
  IsingProblem p = problem();
  const double scale = p.max_abs_weight();
  if (scale_out) *scale_out = scale > 0.0 ? scale : 1.0;
  if (scale > 0.0) return p.scaled(1.0 / scale);
  return p;
}

BandedCoupling band_single(const Matrix& j, int kappa) {
  return band_multi(j, 1, 0.0, kappa, 1.0);
}

BandedCoupling band_multi(const Matrix& j, int k, double epsilon, int kappa,
                          double diagonal_scale) {
  require_symmetric(j);
  if (k < 1) throw std::invalid_argument("banding: K must be positive");
  if (kappa < 1) throw std::invalid_argument("banding: kappa must be positive");
  if (epsilon < 0.0) throw std::invalid_argument("banding: epsilon must be nonnegative");
  const int n = static_cast<int>(j.rows());

  BandedCoupling out;
  out.n = n;
  out.k = k;
  out.max_offset = std::min(kappa - 1, n - 1);
  out.epsilon = epsilon;
  out.diagonal_scale = diagonal_scale;
  for (int k1 = 0; k1 < k; ++k1) {
    for (int k2 = k1; k2 < k; ++k2) {
      const bool cross = k1 != k2;
      const double factor = cross ? -epsilon : diagonal_scale;
      for (int i = 0; i < n; ++i) {
        out.couplings.push_back(Coupling{k1 * n + i, k2 * n + i, factor * 0.5 * j(i, i)});
        for (int col = i + 1; col < n && col - i < kappa; ++col) {
          out.couplings.push_back(Coupling{k1 * n + i, k2 * n + col, factor * j(i, col)});
        }
      }
    }
  }
  return out;
}

EmbeddingLayout build_layout(int n, int k, const CouplerBudget& budget) {
  if (n < 1 || k < 1) throw std::invalid_argument("build_layout: N and K must be positive");
  if (budget.c_limit < n) {
    throw BudgetError("build_layout: c_limit below N; diagonal alone does not fit");
  }
  const int blocks = k * (k + 1) / 2;
  const int kappa = n > 1 ? compute_kappa(n, budget.c_limit, blocks) : 0;

  EmbeddingLayout layout;
  layout.n = n;
  layout.k = k;
  layout.c_limit = budget.c_limit;
  layout.max_offset = 0;

  // Bands are added whole, in offset order, across every block at once;
  // stop before the first band that would exceed the budget.
  std::int64_t used = 0;
  for (int d = 0; d <= kappa && d < n; ++d) {
    const std::int64_t band_cost = static_cast<std::int64_t>(blocks) * (n - d);
    if (used + band_cost > budget.c_limit) break;
    used += band_cost;
    layout.max_offset = d;
    for (int k1 = 0; k1 < k; ++k1) {
      for (int k2 = k1; k2 < k; ++k2) {
        for (int i = 0; i + d < n; ++i) {
          CouplerSlot slot;
          slot.row = k1 * n + i;
          slot.col = k2 * n + i + d;
          slot.src_i = i;
          slot.src_j = i + d;
          slot.cross_block = k1 != k2;
          slot.halved = d == 0;
          layout.slots.push_back(slot);
        }
      }
    }
  }
  return layout;
}

std::shared_ptr<const EmbeddingLayout> EmbeddingCache::get_or_build(int n, int k,
                                                                    const CouplerBudget& budget) {
  const auto key = std::make_tuple(n, k, budget.c_limit);
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  auto layout = std::make_shared<const EmbeddingLayout>(build_layout(n, k, budget));
  std::unique_lock lock(mutex_);
  ++builds_;
  auto [it, inserted] = entries_.emplace(key, layout);
  return it->second;
}

std::size_t EmbeddingCache::build_count() const {
  std::shared_lock lock(mutex_);
  return builds_;
}

std::size_t EmbeddingCache::entry_count() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

BandedCoupling apply_layout(const EmbeddingLayout& layout, const Matrix& j, double epsilon,
                            double diagonal_scale) {
  require_symmetric(j);
  if (static_cast<int>(j.rows()) != layout.n) {
    throw std::invalid_argument("apply_layout: matrix size does not match layout");
  }
  BandedCoupling out;
  out.n = layout.n;
  out.k = layout.k;
  out.max_offset = layout.max_offset;
  out.epsilon = epsilon;
  out.diagonal_scale = diagonal_scale;
  out.couplings.reserve(layout.slots.size());
  for (const CouplerSlot& slot : layout.slots) {
    out.couplings.push_back(Coupling{slot.row, slot.col, slot_weight(slot, j, epsilon, diagonal_scale)});
  }
  return out;
}

BandedCoupling build_banded(const Matrix& j, int k, double epsilon, const CouplerBudget& budget,
                            double diagonal_scale, EmbeddingCache* cache) {
  const int n = static_cast<int>(j.rows());
  if (cache) {
    auto layout = cache->get_or_build(n, k, budget);
    return apply_layout(*layout, j, epsilon, diagonal_scale);
  }
  return apply_layout(build_layout(n, k, budget), j, epsilon, diagonal_scale);
}

std::string banded_to_json(const BandedCoupling& banded) {
  nlohmann::json doc;
  doc["N"] = banded.n;
  doc["K"] = banded.k;
  doc["kappa"] = banded.max_offset;
  doc["epsilon"] = banded.epsilon;
  nlohmann::json list = nlohmann::json::array();
  for (const Coupling& c : banded.couplings) {
    list.push_back(nlohmann::json::array({c.i, c.j, c.weight}));
  }
  doc["couplings"] = std::move(list);
  return doc.dump();
}

}  // namespace qapca
