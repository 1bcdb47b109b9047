// Local search moves: the 1-OPT level sweep and the filtered swap move.
//
// A swap of x_i > x_j (delta = x_i - x_j) changes the residual by
// delta * (a_j - a_i), so it strictly lowers t exactly when, for every row k,
//
//     (-t - s_k) / delta  <  a_kj - a_ki  <  (t - s_k) / delta.
//
// Two cheaper tests sit in front of that check. The candidate filter looks
// only at the k_eps rows with the largest |s_k|, where one side of the
// inequality is nearly tight; it is necessary, never sufficient. The row
// screen skips any row whose interval already contains the whole range
// [rowmin - rowmax, rowmax - rowmin] of possible column differences.

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "dmmv/core.hpp"
#include "dmmv/parallel.hpp"

namespace dmmv {

struct SwapCandidate {
  std::size_t i = 0;
  std::size_t j = 0;
  double delta = 0.0;
  double predicted_t = std::numeric_limits<double>::infinity();
};

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct FilterConfig {
  std::size_t k_eps = 100;
  std::size_t max_candidates = 5000;
  std::size_t workers = 1;
  // Break ties in t' by the smaller ||s'||_2 before falling back to (i, j).
  bool l2_tiebreak = false;
  // Skip rows that the row screen proves harmless.
  bool use_screen = true;
};

inline constexpr int kMaxOneOptSweeps = 10;
inline constexpr int kMaxSwapRounds = 20;

inline SwapCandidate make_candidate(const Instance& inst, const Solution& sol, std::size_t i, std::size_t j) {
  if (i == j) throw Error("swap candidate needs i != j");
  const double delta = inst.values()[sol.idx[i]] - inst.values()[sol.idx[j]];
  if (!(delta > 0.0)) throw Error("swap candidate needs x_i > x_j");
  return SwapCandidate{i, j, delta, std::numeric_limits<double>::infinity()};
}

// Strict-improvement predicate for swapping cand.i and cand.j. Rows passing
// the screen are not evaluated; their indices go to `skipped` if given.
inline bool is_improving(const Instance& inst, const Solution& sol, const SwapCandidate& cand,
                         const RowScreen* screen = nullptr, std::vector<std::size_t>* skipped = nullptr) {
  const double t = sol.objective;
  const double delta = cand.delta;
  const Matrix& a = inst.A();
  for (std::size_t k = 0; k < inst.m(); ++k) {
    const double s = sol.residual[k];
    const double lo = (-t - s) / delta;
    const double hi = (t - s) / delta;
    if (screen && lo < screen->a_minus[k] && screen->a_plus[k] < hi) {
      if (skipped) skipped->push_back(k);
      continue;
    }
    const double diff = a(k, cand.j) - a(k, cand.i);
    if (!(lo < diff && diff < hi)) return false;
  }
  return true;
}

// ||s + delta (a_j - a_i)||_inf, optionally with the squared l2 norm.
inline double swapped_objective(const Instance& inst, const Solution& sol, const SwapCandidate& cand,
                                double* l2_sq = nullptr) {
  const Matrix& a = inst.A();
  double t = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < inst.m(); ++k) {
    const double s = sol.residual[k] + cand.delta * (a(k, cand.j) - a(k, cand.i));
    t = std::max(t, std::abs(s));
    acc += s * s;
  }
  if (l2_sq) *l2_sq = acc;
  return t;
}

// Rows of largest |s_k|, ties by lower row index.
inline std::vector<std::size_t> largest_residual_rows(const Solution& sol, std::size_t count) {
  std::vector<std::size_t> rows(sol.residual.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  count = std::min(count, rows.size());
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(count), rows.end(),
                    [&](std::size_t x, std::size_t y) {
                      const double ax = std::abs(sol.residual[x]);
                      const double ay = std::abs(sol.residual[y]);
                      return ax != ay ? ax > ay : x < y;
                    });
  rows.resize(count);
  return rows;
}

// Ordered pairs (i, j), x_i > x_j, that pass the necessary condition on the
// k_eps largest-residual rows. Sorted by descending delta then (i, j) and
// truncated to max_candidates.
inline std::vector<SwapCandidate> find_candidates(const Instance& inst, const Solution& sol,
                                                  const FilterConfig& cfg) {
  if (cfg.k_eps < 1) throw Error("k_eps must be at least 1");
  const std::size_t n = inst.n();
  const double t = sol.objective;
  const auto rows = largest_residual_rows(sol, cfg.k_eps);
  const std::size_t kr = rows.size();

  // Selected rows copied column-major so a pair reads two contiguous blocks.
  std::vector<double> cols(n * kr);
  std::vector<double> signed_slack(kr);
  std::vector<int> sign(kr);
  for (std::size_t r = 0; r < kr; ++r) {
    const std::size_t k = rows[r];
    const double s = sol.residual[k];
    sign[r] = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
    signed_slack[r] = t - std::abs(s);
    for (std::size_t j = 0; j < n; ++j) cols[j * kr + r] = inst.a(k, j);
  }

  const ValueSet& values = inst.values();
  std::vector<std::vector<SwapCandidate>> found(std::max<std::size_t>(1, cfg.workers));
  parallel_blocks(n, cfg.workers, [&](std::size_t begin, std::size_t end, std::size_t w) {
    auto& out = found[w];
    for (std::size_t i = begin; i < end; ++i) {
      const double* ci = cols.data() + i * kr;
      for (std::size_t j = 0; j < n; ++j) {
        if (sol.idx[j] >= sol.idx[i]) continue;
        const double delta = values[sol.idx[i]] - values[sol.idx[j]];
        const double* cj = cols.data() + j * kr;
        bool keep = true;
        for (std::size_t r = 0; r < kr && keep; ++r) {
          const double diff = cj[r] - ci[r];
          if (sign[r] > 0) {
            keep = diff < signed_slack[r] / delta;
          } else if (sign[r] < 0) {
            keep = diff > -signed_slack[r] / delta;
          }
        }
        if (keep) out.push_back(SwapCandidate{i, j, delta, std::numeric_limits<double>::infinity()});
      }
    }
  });

  std::vector<SwapCandidate> all;
  for (auto& part : found) all.insert(all.end(), part.begin(), part.end());
  std::sort(all.begin(), all.end(), [](const SwapCandidate& x, const SwapCandidate& y) {
    if (x.delta != y.delta) return x.delta > y.delta;
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  if (all.size() > cfg.max_candidates) all.resize(cfg.max_candidates);
  return all;
}

// Best strictly improving swap among the filtered candidates, or none.
// The winner minimises t', then (with l2_tiebreak) ||s'||_2, then (i, j);
// the result does not depend on the worker count.
inline std::optional<SwapCandidate> best_swap(const Instance& inst, const RowScreen& screen,
                                              const Solution& sol, const FilterConfig& cfg) {
  if (sol.objective <= 0.0) return std::nullopt;
  const auto cands = find_candidates(inst, sol, cfg);
  if (cands.empty()) return std::nullopt;

  struct Best {
    std::optional<SwapCandidate> cand;
    double l2_sq = std::numeric_limits<double>::infinity();
  };
  auto better = [&](const SwapCandidate& c, double l2, const Best& b) {
    if (!b.cand) return true;
    if (c.predicted_t != b.cand->predicted_t) return c.predicted_t < b.cand->predicted_t;
    if (cfg.l2_tiebreak && l2 != b.l2_sq) return l2 < b.l2_sq;
    return std::tie(c.i, c.j) < std::tie(b.cand->i, b.cand->j);
  };

  const RowScreen* scr = cfg.use_screen ? &screen : nullptr;
  std::vector<Best> partial(std::max<std::size_t>(1, cfg.workers));
  parallel_blocks(cands.size(), cfg.workers, [&](std::size_t begin, std::size_t end, std::size_t w) {
    Best& local = partial[w];
    for (std::size_t c = begin; c < end; ++c) {
      if (!is_improving(inst, sol, cands[c], scr)) continue;
      SwapCandidate cand = cands[c];
      double l2 = 0.0;
      cand.predicted_t = swapped_objective(inst, sol, cand, &l2);
      if (!(cand.predicted_t < sol.objective)) continue;
      if (better(cand, l2, local)) local = Best{cand, l2};
    }
  });

  Best winner;
  for (const auto& p : partial)
    if (p.cand && better(*p.cand, p.l2_sq, winner)) winner = p;
  return winner.cand;
}

inline std::optional<SwapCandidate> best_swap(const Instance& inst, const Solution& sol, const FilterConfig& cfg) {
  const auto screen = row_screen(inst);
  return best_swap(inst, screen, sol, cfg);
}

// Sweeps variables in index order, moving each to the better adjacent level
// when that strictly lowers t. Returns the number of moves applied.
inline int one_opt_in_place(const Instance& inst, Solution& sol) {
  const std::size_t levels = inst.values().size();
  int moves = 0;
  for (int sweep = 0; sweep < kMaxOneOptSweeps; ++sweep) {
    bool changed = false;
    for (std::size_t j = 0; j < inst.n(); ++j) {
      const std::size_t cur = sol.idx[j];
      double best_t = sol.objective;
      std::size_t best_level = cur;
      if (cur > 0) {
        const double tt = shifted_objective(inst, sol, j, cur - 1);
        if (tt < best_t) {
          best_t = tt;
          best_level = cur - 1;
        }
      }
      if (cur + 1 < levels) {
        const double tt = shifted_objective(inst, sol, j, cur + 1);
        if (tt < best_t) {
          best_t = tt;
          best_level = cur + 1;
        }
      }
      if (best_level != cur) {
        shift_in_place(inst, sol, j, best_level);
        changed = true;
        ++moves;
      }
    }
    if (!changed) break;
  }
  return moves;
}

inline Solution one_opt(const Instance& inst, Solution sol) {
  one_opt_in_place(inst, sol);
  return sol;
}

// Applies best swaps until none improves; returns the number applied.
inline int swap_descent_in_place(const Instance& inst, const RowScreen& screen, Solution& sol,
                                 const FilterConfig& cfg, int max_rounds = kMaxSwapRounds) {
  int applied = 0;
  for (int round = 0; round < max_rounds; ++round) {
    const auto best = best_swap(inst, screen, sol, cfg);
    if (!best) break;
    swap_in_place(inst, sol, best->i, best->j);
    ++applied;
  }
  return applied;
}

// 1-OPT, then alternating best swap and 1-OPT until no swap improves or the
// round cap is hit. The objective never increases.
inline void local_search_in_place(const Instance& inst, const RowScreen& screen, Solution& sol,
                                  const FilterConfig& cfg) {
  one_opt_in_place(inst, sol);
  for (int round = 0; round < kMaxSwapRounds; ++round) {
    if (sol.objective <= kZeroObjective) break;
    const auto best = best_swap(inst, screen, sol, cfg);
    if (!best) break;
    swap_in_place(inst, sol, best->i, best->j);
    one_opt_in_place(inst, sol);
  }
}

inline Solution local_search(const Instance& inst, Solution sol, const FilterConfig& cfg) {
  const auto screen = row_screen(inst);
  local_search_in_place(inst, screen, sol, cfg);
  return sol;
}

}  // namespace dmmv
