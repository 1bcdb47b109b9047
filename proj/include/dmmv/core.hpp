// Problem and solution representations for the Discrete Min-Max Violation
// problem  min_{x in V^n} ||Ax - b||_inf, plus the incremental residual
// identities that every search move relies on.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dmmv {

// Every randomised operation draws from this engine; seeds fix all results.
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a vector or matrix has the wrong extent. `dimension` names it.
class DimensionError : public Error {
 public:
  DimensionError(std::string dimension, std::size_t expected, std::size_t got)
      : Error("dimension mismatch in " + dimension + ": expected " +
              std::to_string(expected) + ", got " + std::to_string(got)),
        dimension_(std::move(dimension)) {}

  const std::string& dimension() const noexcept { return dimension_; }

 private:
  std::string dimension_;
};

// Residuals are recomputed from scratch after this many incremental updates.
inline constexpr std::size_t kRecomputeInterval = 1000;

// Objectives at or below this are treated as an exact fit.
inline constexpr double kZeroObjective = 1e-12;

// Sorted, duplicate-free finite alphabet of allowed variable values.
class ValueSet {
 public:
  ValueSet() = default;

  explicit ValueSet(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw Error("value set must not be empty");
    for (std::size_t v = 0; v < levels_.size(); ++v) {
      if (!std::isfinite(levels_[v])) throw Error("value set levels must be finite");
      if (v > 0 && !(levels_[v - 1] < levels_[v]))
        throw Error("value set levels must be strictly increasing");
    }
  }

  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t v) const { return levels_[v]; }
  std::span<const double> levels() const noexcept { return levels_; }
  double min() const { return levels_.front(); }
  double max() const { return levels_.back(); }

  // Index of the level closest to v; exact midpoints go to the lower level.
  std::size_t nearest(double v) const {
    auto it = std::lower_bound(levels_.begin(), levels_.end(), v);
    if (it == levels_.begin()) return 0;
    if (it == levels_.end()) return levels_.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - levels_.begin());
    const std::size_t lo = hi - 1;
    return (v - levels_[lo] <= levels_[hi] - v) ? lo : hi;
  }

  // The two distinct levels closest to v, ordered by distance then by value.
  std::pair<std::size_t, std::size_t> two_nearest(double v) const {
    if (levels_.size() < 2) throw Error("two_nearest needs at least two levels");
    const std::size_t first = nearest(v);
    // The runner-up is adjacent to the winner.
    std::size_t second;
    if (first == 0) {
      second = 1;
    } else if (first + 1 == levels_.size()) {
      second = first - 1;
    } else {
      const double below = std::abs(v - levels_[first - 1]);
      const double above = std::abs(levels_[first + 1] - v);
      second = (below <= above) ? first - 1 : first + 1;
    }
    return {first, second};
  }

  bool operator==(const ValueSet&) const = default;

 private:
  std::vector<double> levels_;
};

inline std::size_t round_to_nearest(const ValueSet& values, double v) {
  return values.nearest(v);
}

inline std::pair<std::size_t, std::size_t> two_nearest(const ValueSet& values, double v) {
  return values.two_nearest(v);
}

// Dense row-major matrix. Columns are strided views.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw DimensionError("matrix data", rows_ * cols_, data_.size());
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A DMMV instance: matrix A (m x n), target b (m), alphabet V, and an
// optional continuous reference point used as warm start.
class Instance {
 public:
  Instance(Matrix a, std::vector<double> b, ValueSet values,
           std::optional<std::vector<double>> continuous_init = std::nullopt)
      : a_(std::move(a)), b_(std::move(b)), values_(std::move(values)),
        init_(std::move(continuous_init)) {
    if (a_.rows() == 0) throw Error("instance needs at least one row");
    if (a_.cols() == 0) throw Error("instance needs at least one column");
    if (b_.size() != a_.rows()) throw DimensionError("b", a_.rows(), b_.size());
    if (values_.size() == 0) throw Error("instance needs a non-empty value set");
    for (double v : a_.data())
      if (!std::isfinite(v)) throw Error("matrix entries must be finite");
    for (double v : b_)
      if (!std::isfinite(v)) throw Error("target entries must be finite");
    if (init_) {
      if (init_->size() != a_.cols()) throw DimensionError("continuous_init", a_.cols(), init_->size());
      for (double v : *init_)
        if (!std::isfinite(v)) throw Error("continuous_init entries must be finite");
    }
  }

  std::size_t m() const noexcept { return a_.rows(); }
  std::size_t n() const noexcept { return a_.cols(); }
  const Matrix& A() const noexcept { return a_; }
  double a(std::size_t k, std::size_t j) const { return a_(k, j); }
  std::span<const double> b() const noexcept { return b_; }
  const ValueSet& values() const noexcept { return values_; }
  const std::optional<std::vector<double>>& continuous_init() const noexcept { return init_; }

  bool operator==(const Instance&) const = default;

 private:
  Matrix a_;
  std::vector<double> b_;
  ValueSet values_;
  std::optional<std::vector<double>> init_;
};

// Assignment as level indices, with cached residual s = Ax - b and t = ||s||_inf.
struct Solution {
  std::vector<std::size_t> idx;
  std::vector<double> residual;
  double objective = 0.0;
  // Incremental updates applied since the last full recompute.
  std::size_t pending_updates = 0;

  bool same_assignment(const Solution& other) const { return idx == other.idx; }
};

// Per-row swap screen: a_plus = rowmax - rowmin, a_minus = -a_plus.
struct RowScreen {
  std::vector<double> a_minus;
  std::vector<double> a_plus;
};

// max_k |s_k|, scanned in row order.
inline double max_abs(std::span<const double> s) {
  double t = 0.0;
  for (double v : s) t = std::max(t, std::abs(v));
  return t;
}

// Position of the first entry attaining max |s_k|.
inline std::size_t argmax_abs(std::span<const double> s) {
  std::size_t best = 0;
  double t = -1.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (std::abs(s[k]) > t) {
      t = std::abs(s[k]);
      best = k;
    }
  }
  return best;
}

inline double l2_norm(std::span<const double> s) {
  double acc = 0.0;
  for (double v : s) acc += v * v;
  return std::sqrt(acc);
}

inline void check_assignment(const Instance& inst, std::span<const std::size_t> idx) {
  if (idx.size() != inst.n()) throw DimensionError("assignment length n", inst.n(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j)
    if (idx[j] >= inst.values().size())
      throw Error("level index " + std::to_string(idx[j]) + " of variable " + std::to_string(j) +
                  " is out of range");
}

struct Residual {
  std::vector<double> residual;
  double objective = 0.0;
};

// s = A x - b and t = ||s||_inf for x_j = levels[idx_j].
inline Residual compute_residual(const Instance& inst, std::span<const std::size_t> idx) {
  check_assignment(inst, idx);
  const auto& levels = inst.values();
  Residual out;
  out.residual.resize(inst.m());
  for (std::size_t k = 0; k < inst.m(); ++k) {
    const auto row = inst.A().row(k);
    double acc = 0.0;
    for (std::size_t j = 0; j < inst.n(); ++j) acc += row[j] * levels[idx[j]];
    out.residual[k] = acc - inst.b()[k];
  }
  out.objective = max_abs(out.residual);
  return out;
}

inline Solution make_solution(const Instance& inst, std::vector<std::size_t> idx) {
  auto r = compute_residual(inst, idx);
  return Solution{std::move(idx), std::move(r.residual), r.objective, 0};
}

inline void recompute(const Instance& inst, Solution& sol) {
  auto r = compute_residual(inst, sol.idx);
  sol.residual = std::move(r.residual);
  sol.objective = r.objective;
  sol.pending_updates = 0;
}

inline std::vector<double> assignment_values(const Instance& inst, const Solution& sol) {
  std::vector<double> x(sol.idx.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = inst.values()[sol.idx[j]];
  return x;
}

namespace detail {

inline void note_update(const Instance& inst, Solution& sol) {
  if (++sol.pending_updates >= kRecomputeInterval) {
    recompute(inst, sol);
  } else {
    sol.objective = max_abs(sol.residual);
  }
}

}  // namespace detail

// In-place swap of x_i and x_j: s' = s + (x_i - x_j)(a_j - a_i).
inline void swap_in_place(const Instance& inst, Solution& sol, std::size_t i, std::size_t j) {
  if (i >= inst.n() || j >= inst.n()) throw Error("swap index out of range");
  if (i == j) throw Error("swap requires two distinct variables");
  if (sol.idx[i] == sol.idx[j]) throw Error("swap of equal values is a no-op");
  const double delta = inst.values()[sol.idx[i]] - inst.values()[sol.idx[j]];
  const Matrix& a = inst.A();
  for (std::size_t k = 0; k < inst.m(); ++k) sol.residual[k] += delta * (a(k, j) - a(k, i));
  std::swap(sol.idx[i], sol.idx[j]);
  detail::note_update(inst, sol);
}

inline Solution apply_swap(const Instance& inst, Solution sol, std::size_t i, std::size_t j) {
  swap_in_place(inst, sol, i, j);
  return sol;
}

// In-place move of x_j to a new level: s' = s + (x_j' - x_j) a_j.
inline void shift_in_place(const Instance& inst, Solution& sol, std::size_t j, std::size_t new_level) {
  if (j >= inst.n()) throw Error("shift index out of range");
  if (new_level >= inst.values().size())
    throw Error("level index " + std::to_string(new_level) + " is out of range");
  if (sol.idx[j] == new_level) return;
  const double step = inst.values()[new_level] - inst.values()[sol.idx[j]];
  const Matrix& a = inst.A();
  for (std::size_t k = 0; k < inst.m(); ++k) sol.residual[k] += step * a(k, j);
  sol.idx[j] = new_level;
  detail::note_update(inst, sol);
}

inline Solution apply_shift(const Instance& inst, Solution sol, std::size_t j, std::size_t new_level) {
  shift_in_place(inst, sol, j, new_level);
  return sol;
}

// ||s + (x_j' - x_j) a_j||_inf without modifying the solution.
inline double shifted_objective(const Instance& inst, const Solution& sol, std::size_t j,
                                std::size_t new_level) {
  const double step = inst.values()[new_level] - inst.values()[sol.idx[j]];
  const Matrix& a = inst.A();
  double t = 0.0;
  for (std::size_t k = 0; k < inst.m(); ++k) t = std::max(t, std::abs(sol.residual[k] + step * a(k, j)));
  return t;
}

inline RowScreen row_screen(const Instance& inst) {
  RowScreen screen;
  screen.a_minus.resize(inst.m());
  screen.a_plus.resize(inst.m());
  for (std::size_t k = 0; k < inst.m(); ++k) {
    const auto row = inst.A().row(k);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    screen.a_plus[k] = *hi - *lo;
    screen.a_minus[k] = -screen.a_plus[k];
  }
  return screen;
}

}  // namespace dmmv
