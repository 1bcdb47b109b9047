// Exact reference solvers for small instances.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dmmv/core.hpp"
#include "dmmv/localsearch.hpp"
#include "dmmv/parallel.hpp"

namespace dmmv {

class BudgetError : public Error {
 public:
  BudgetError(double required, double budget)
      : Error("enumeration needs " + format(required) + " assignments but the budget is " + format(budget)),
        required_(required) {}

  double required() const noexcept { return required_; }

 private:
  static std::string format(double v) {
    if (v < 1e15) return std::to_string(static_cast<unsigned long long>(v));
    return std::to_string(v);
  }
  double required_;
};

struct OracleResult {
  std::vector<std::size_t> best_x;
  double best_t = std::numeric_limits<double>::infinity();
  std::size_t enumerated = 0;
};

struct OracleOptions {
  double budget = 1e7;
  // Cut subtrees whose residual interval bound already reaches the incumbent.
  bool prune = false;
  std::size_t workers = 1;
};

// |V|^n, saturating at infinity.
inline double assignment_count(const Instance& inst) {
  return std::pow(static_cast<double>(inst.values().size()), static_cast<double>(inst.n()));
}

namespace detail {

struct Enumerator {
  const Instance& inst;
  bool prune;
  // suffix_lo[j*m + k] bounds sum_{j' >= j} a_kj' x_j' from below, suffix_hi from above.
  std::vector<double> suffix_lo;
  std::vector<double> suffix_hi;
  std::vector<std::vector<double>> partial;  // partial residual per depth
  std::vector<std::size_t> idx;
  OracleResult best;

  Enumerator(const Instance& in, bool pr) : inst(in), prune(pr) {
    const std::size_t m = inst.m();
    const std::size_t n = inst.n();
    const double vmin = inst.values().min();
    const double vmax = inst.values().max();
    if (prune) {
      suffix_lo.assign((n + 1) * m, 0.0);
      suffix_hi.assign((n + 1) * m, 0.0);
      for (std::size_t j = n; j-- > 0;) {
        for (std::size_t k = 0; k < m; ++k) {
          const double p = inst.a(k, j) * vmin;
          const double q = inst.a(k, j) * vmax;
          suffix_lo[j * m + k] = suffix_lo[(j + 1) * m + k] + std::min(p, q);
          suffix_hi[j * m + k] = suffix_hi[(j + 1) * m + k] + std::max(p, q);
        }
      }
    }
    partial.assign(n + 1, std::vector<double>(m));
    for (std::size_t k = 0; k < m; ++k) partial[0][k] = -inst.b()[k];
    idx.assign(n, 0);
  }

  double bound(std::size_t depth) const {
    const std::size_t m = inst.m();
    double lb = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double lo = partial[depth][k] + suffix_lo[depth * m + k];
      const double hi = partial[depth][k] + suffix_hi[depth * m + k];
      lb = std::max(lb, std::max(lo, -hi));
    }
    return lb;
  }

  void descend(std::size_t depth) {
    const std::size_t n = inst.n();
    if (depth == n) {
      ++best.enumerated;
      const double t = max_abs(partial[n]);
      if (t < best.best_t) {
        best.best_t = t;
        best.best_x = idx;
      }
      return;
    }
    if (prune && !best.best_x.empty() && bound(depth) >= best.best_t) return;
    for (std::size_t v = 0; v < inst.values().size(); ++v) assign(depth, v);
  }

  void assign(std::size_t depth, std::size_t level) {
    const double x = inst.values()[level];
    const auto& from = partial[depth];
    auto& to = partial[depth + 1];
    for (std::size_t k = 0; k < inst.m(); ++k) to[k] = from[k] + inst.a(k, depth) * x;
    idx[depth] = level;
    descend(depth + 1);
  }
};

}  // namespace detail

// Global optimum by enumeration in lexicographic (mixed-radix) order; ties
// resolve to the lexicographically smallest assignment. Refuses before any
// work when |V|^n exceeds the budget.
inline OracleResult brute_force(const Instance& inst, const OracleOptions& opt = {}) {
  const double required = assignment_count(inst);
  if (required > opt.budget) throw BudgetError(required, opt.budget);

  const std::size_t first_levels = inst.values().size();
  std::vector<OracleResult> parts(first_levels);
  // Each block fixes a range of levels for variable 0.
  parallel_blocks(first_levels, opt.workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t v = begin; v < end; ++v) {
      detail::Enumerator e(inst, opt.prune);
      e.assign(0, v);
      parts[v] = std::move(e.best);
    }
  });

  OracleResult out;
  out.best_t = std::numeric_limits<double>::infinity();
  for (auto& p : parts) {
    out.enumerated += p.enumerated;
    if (!p.best_x.empty() && p.best_t < out.best_t) {
      out.best_t = p.best_t;
      out.best_x = p.best_x;
    }
  }
  out.best_t = compute_residual(inst, out.best_x).objective;
  return out;
}

struct SwapCheckEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double exact_t = 0.0;
  bool exact_improving = false;
  bool predicted_improving = false;
  // |t' - t| within 1e-12: floating rounding may legitimately flip the verdict.
  bool boundary = false;
};

struct SwapCheckReport {
  double t = 0.0;
  std::vector<SwapCheckEntry> entries;
  std::vector<std::size_t> discrepancies;  // positions in entries, boundary cases excluded
  std::vector<std::size_t> boundary_cases;
};

inline constexpr double kBoundaryBand = 1e-12;

// Compares the swap predicate against the exact post-swap objective for every
// ordered pair with x_i > x_j.
inline SwapCheckReport exhaustive_swap_check(const Instance& inst, const Solution& sol,
                                             const RowScreen* screen = nullptr) {
  if (inst.n() > 64) throw Error("exhaustive_swap_check is limited to n <= 64");
  SwapCheckReport report;
  report.t = sol.objective;
  for (std::size_t i = 0; i < inst.n(); ++i) {
    for (std::size_t j = 0; j < inst.n(); ++j) {
      if (sol.idx[i] <= sol.idx[j]) continue;
      const auto cand = make_candidate(inst, sol, i, j);
      const Solution swapped = apply_swap(inst, sol, i, j);
      SwapCheckEntry e;
      e.i = i;
      e.j = j;
      e.exact_t = swapped.objective;
      e.exact_improving = swapped.objective < sol.objective;
      e.predicted_improving = is_improving(inst, sol, cand, screen);
      e.boundary = std::abs(swapped.objective - sol.objective) <= kBoundaryBand;
      const std::size_t pos = report.entries.size();
      report.entries.push_back(e);
      if (e.boundary) {
        report.boundary_cases.push_back(pos);
      } else if (e.exact_improving != e.predicted_improving) {
        report.discrepancies.push_back(pos);
      }
    }
  }
  return report;
}

}  // namespace dmmv
