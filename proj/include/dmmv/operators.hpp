// Destroy and repair operators.
//
// A destroy operator only selects variables and remembers their levels; the
// solution keeps those levels in its residual until a repair reassigns them.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "dmmv/core.hpp"
#include "dmmv/parallel.hpp"

namespace dmmv {

struct DestroySet {
  std::vector<std::size_t> removed;
  std::vector<std::size_t> saved_idx;
};

struct ImpactScores {
  std::vector<double> d;
  double alpha = 0.0;
};

enum class DestroyOp { random = 0, worst_remove = 1 };
enum class RepairOp { random = 0, greedy = 1 };

inline const char* name(DestroyOp op) { return op == DestroyOp::random ? "random" : "worst"; }
inline const char* name(RepairOp op) { return op == RepairOp::random ? "random" : "greedy"; }

// max(1, round(rate * n)), never more than n.
inline std::size_t removal_count(std::size_t n, double destroy_rate) {
  const auto r = static_cast<std::size_t>(std::llround(destroy_rate * static_cast<double>(n)));
  return std::min(n, std::max<std::size_t>(1, r));
}

namespace detail {

inline DestroySet record(const Solution& sol, std::vector<std::size_t> removed) {
  DestroySet out;
  out.saved_idx.reserve(removed.size());
  for (std::size_t j : removed) out.saved_idx.push_back(sol.idx[j]);
  out.removed = std::move(removed);
  return out;
}

}  // namespace detail

inline DestroySet random_destroy(const Solution& sol, std::size_t r, Rng& rng) {
  const std::size_t n = sol.idx.size();
  if (r < 1 || r > n) throw Error("random_destroy: removal count must be in [1, n]");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates: the first r slots are a uniform r-subset.
  for (std::size_t p = 0; p < r; ++p) {
    std::uniform_int_distribution<std::size_t> pick(p, n - 1);
    std::swap(pool[p], pool[pick(rng)]);
  }
  pool.resize(r);
  return detail::record(sol, std::move(pool));
}

// d_j = sum_k |s_k| exp(-alpha R_j^k) / sum_k |s_k| with the row slack
// R_j^k = (t - |s_k|) / |a_kj|. Rows where a_kj = 0 contribute nothing.
inline ImpactScores impact_scores(const Instance& inst, const Solution& sol, double alpha,
                                  std::size_t workers = 1) {
  ImpactScores out;
  out.alpha = alpha;
  out.d.assign(inst.n(), 0.0);
  const double t = sol.objective;
  double total = 0.0;
  for (double s : sol.residual) total += std::abs(s);
  if (total <= 0.0) return out;

  parallel_blocks(inst.n(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t j = begin; j < end; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < inst.m(); ++k) {
        const double a = inst.a(k, j);
        if (a == 0.0) continue;
        const double abs_s = std::abs(sol.residual[k]);
        if (abs_s == 0.0) continue;
        const double slack = std::max(0.0, t - abs_s) / std::abs(a);
        acc += abs_s * std::exp(-alpha * slack);
      }
      out.d[j] = acc / total;
    }
  });
  return out;
}

// Weighted sampling without replacement, renormalising after each draw.
// Falls back to uniform draws once the remaining weight is exhausted.
inline std::vector<std::size_t> sample_without_replacement(std::vector<double> weights, std::size_t r,
                                                           Rng& rng) {
  const std::size_t n = weights.size();
  if (r < 1 || r > n) throw Error("sample_without_replacement: count must be in [1, n]");
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(n, false);
  chosen.reserve(r);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (chosen.size() < r) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (!taken[j]) total += weights[j];
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j] || weights[j] <= 0.0) continue;
        acc += weights[j];
        pick = j;
        if (target < acc) break;
      }
    } else {
      std::vector<std::size_t> rest;
      for (std::size_t j = 0; j < n; ++j)
        if (!taken[j]) rest.push_back(j);
      std::uniform_int_distribution<std::size_t> any(0, rest.size() - 1);
      pick = rest[any(rng)];
    }
    taken[pick] = true;
    chosen.push_back(pick);
  }
  return chosen;
}

inline DestroySet worst_remove_destroy(const Instance& inst, const Solution& sol, std::size_t r,
                                       double alpha, Rng& rng, std::size_t workers = 1) {
  if (r < 1 || r > inst.n()) throw Error("worst_remove_destroy: removal count must be in [1, n]");
  auto scores = impact_scores(inst, sol, alpha, workers);
  const double total = std::accumulate(scores.d.begin(), scores.d.end(), 0.0);
  if (!(total > 0.0)) return random_destroy(sol, r, rng);
  return detail::record(sol, sample_without_replacement(std::move(scores.d), r, rng));
}

// Each removed variable goes to one of the two levels nearest its old value,
// with probability 1/2 each.
inline void random_repair_in_place(const Instance& inst, Solution& sol, const DestroySet& destroyed,
                                   Rng& rng) {
  const ValueSet& values = inst.values();
  if (values.size() < 2) return;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t p = 0; p < destroyed.removed.size(); ++p) {
    const auto [first, second] = values.two_nearest(values[destroyed.saved_idx[p]]);
    shift_in_place(inst, sol, destroyed.removed[p], coin(rng) ? second : first);
  }
}

inline Solution random_repair(const Instance& inst, Solution sol, const DestroySet& destroyed, Rng& rng) {
  random_repair_in_place(inst, sol, destroyed, rng);
  return sol;
}

// Removed variables in ascending index order, each set to whichever of its
// two nearest levels gives the smaller worst-case error (ties: lower level).
inline void greedy_repair_in_place(const Instance& inst, Solution& sol, const DestroySet& destroyed) {
  const ValueSet& values = inst.values();
  if (values.size() < 2) return;
  std::vector<std::size_t> order(destroyed.removed.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return destroyed.removed[a] < destroyed.removed[b]; });
  for (std::size_t p : order) {
    const std::size_t j = destroyed.removed[p];
    auto [first, second] = values.two_nearest(values[destroyed.saved_idx[p]]);
    if (second < first) std::swap(first, second);
    const double t_first = shifted_objective(inst, sol, j, first);
    const double t_second = shifted_objective(inst, sol, j, second);
    shift_in_place(inst, sol, j, t_second < t_first ? second : first);
  }
}

inline Solution greedy_repair(const Instance& inst, Solution sol, const DestroySet& destroyed) {
  greedy_repair_in_place(inst, sol, destroyed);
  return sol;
}

}  // namespace dmmv
