// Adaptive large neighbourhood search driver: roulette-wheel choice of a
// destroy/repair pair, local search, acceptance, best tracking and adaptive
// weight updates.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dmmv/core.hpp"
#include "dmmv/localsearch.hpp"
#include "dmmv/operators.hpp"

namespace dmmv {

inline constexpr std::size_t kOperatorPairs = 4;

inline DestroyOp destroy_of(std::size_t pair) { return static_cast<DestroyOp>(pair / 2); }
inline RepairOp repair_of(std::size_t pair) { return static_cast<RepairOp>(pair % 2); }
inline std::string pair_name(std::size_t pair) {
  return std::string(name(destroy_of(pair))) + "+" + name(repair_of(pair));
}

struct SolverConfig {
  double destroy_rate = 0.005;
  double alpha = 0.3;
  std::size_t k_eps = 100;
  std::size_t max_candidates = 5000;
  std::size_t max_iters = 1000;
  double time_limit = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  double sigma1 = 3.0;
  double sigma2 = 2.0;
  double sigma3 = 1.0;
  double decay = 0.8;
  std::size_t segment = 50;
  double weight_floor = 1e-3;
  bool l2_tiebreak = true;
  std::size_t workers = 1;

  void validate() const {
    if (!(destroy_rate > 0.0 && destroy_rate <= 1.0)) throw Error("destroy_rate must be in (0, 1]");
    if (!(alpha >= 0.0)) throw Error("alpha must be non-negative");
    if (k_eps < 1) throw Error("k_eps must be at least 1");
    if (!(sigma1 >= sigma2 && sigma2 >= sigma3 && sigma3 >= 0.0))
      throw Error("rewards must satisfy sigma1 >= sigma2 >= sigma3 >= 0");
    if (!(decay > 0.0 && decay <= 1.0)) throw Error("decay must be in (0, 1]");
    if (segment < 1) throw Error("segment length must be at least 1");
    if (!(weight_floor > 0.0)) throw Error("weight floor must be positive");
    if (workers < 1) throw Error("workers must be at least 1");
  }

  FilterConfig filter() const {
    FilterConfig f;
    f.k_eps = k_eps;
    f.max_candidates = max_candidates;
    f.workers = workers;
    return f;
  }
};

enum class Outcome { new_best, improved, accepted, rejected };

inline const char* name(Outcome o) {
  switch (o) {
    case Outcome::new_best: return "new_best";
    case Outcome::improved: return "improved";
    case Outcome::accepted: return "accepted";
    case Outcome::rejected: return "rejected";
  }
  return "?";
}

struct OperatorBank {
  std::array<double, kOperatorPairs> weights{1.0, 1.0, 1.0, 1.0};
  std::array<double, kOperatorPairs> scores{};
  std::array<std::size_t, kOperatorPairs> uses{};  // within the current segment
  std::size_t iterations = 0;

  std::array<double, kOperatorPairs> probabilities() const {
    double total = 0.0;
    for (double w : weights) total += w;
    std::array<double, kOperatorPairs> p{};
    for (std::size_t q = 0; q < kOperatorPairs; ++q) p[q] = weights[q] / total;
    return p;
  }
};

inline std::size_t select_operators(const OperatorBank& bank, Rng& rng) {
  double total = 0.0;
  for (double w : bank.weights) total += w;
  const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (std::size_t q = 0; q < kOperatorPairs; ++q) {
    acc += bank.weights[q];
    if (target < acc) return q;
  }
  return kOperatorPairs - 1;
}

// Credits `pair` for `outcome`. At the end of each segment the weights move
// toward the average reward per use: w <- decay w + (1 - decay) score/uses.
inline void update_weights(OperatorBank& bank, std::size_t pair, Outcome outcome, const SolverConfig& cfg) {
  double reward = 0.0;
  switch (outcome) {
    case Outcome::new_best: reward = cfg.sigma1; break;
    case Outcome::improved: reward = cfg.sigma2; break;
    case Outcome::accepted: reward = cfg.sigma3; break;
    case Outcome::rejected: reward = 0.0; break;
  }
  bank.scores[pair] += reward;
  bank.uses[pair] += 1;
  bank.iterations += 1;
  if (bank.iterations % cfg.segment != 0) return;
  for (std::size_t q = 0; q < kOperatorPairs; ++q) {
    const double avg = bank.uses[q] ? bank.scores[q] / static_cast<double>(bank.uses[q]) : 0.0;
    // Unused pairs keep their weight.
    if (bank.uses[q]) bank.weights[q] = cfg.decay * bank.weights[q] + (1.0 - cfg.decay) * avg;
    bank.weights[q] = std::max(bank.weights[q], cfg.weight_floor);
    bank.scores[q] = 0.0;
    bank.uses[q] = 0;
  }
}

inline bool accept(const Solution& current, const Solution& candidate, const SolverConfig& cfg) {
  if (candidate.objective < current.objective) return true;
  return cfg.l2_tiebreak && candidate.objective <= current.objective + 1e-12 &&
         l2_norm(candidate.residual) < l2_norm(current.residual);
}

inline std::vector<std::size_t> round_all(const ValueSet& values, const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) idx[j] = values.nearest(x[j]);
  return idx;
}

// Unconstrained least squares via (A^T A + 1e-8 I) x = A^T b.
inline std::vector<double> least_squares_start(const Instance& inst) {
  const Eigen::Index m = static_cast<Eigen::Index>(inst.m());
  const Eigen::Index n = static_cast<Eigen::Index>(inst.n());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      inst.A().data().data(), m, n);
  Eigen::Map<const Eigen::VectorXd> b(inst.b().data(), m);
  Eigen::MatrixXd gram = a.transpose() * a;
  gram.diagonal().array() += 1e-8;
  const Eigen::VectorXd rhs = a.transpose() * b;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw Error("normal equations factorisation failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) throw Error("normal equations solve failed");
  return {x.data(), x.data() + n};
}

// Rounds the instance's continuous reference point, or a least-squares
// solution when none is supplied. A failed solve falls back to the level
// nearest zero everywhere and sets `warning`.
inline Solution initial_solution(const Instance& inst, std::string* warning = nullptr) {
  if (inst.continuous_init()) return make_solution(inst, round_all(inst.values(), *inst.continuous_init()));
  try {
    return make_solution(inst, round_all(inst.values(), least_squares_start(inst)));
  } catch (const Error& e) {
    if (warning) *warning = std::string(e.what()) + "; starting from the level nearest zero";
    return make_solution(inst, std::vector<std::size_t>(inst.n(), inst.values().nearest(0.0)));
  }
}

struct TraceEntry {
  std::size_t iteration = 0;
  double current_t = 0.0;
  double best_t = 0.0;
  std::size_t pair = 0;
  bool accepted = false;
  Outcome outcome = Outcome::rejected;
};

struct OperatorStats {
  std::size_t selected = 0;
  std::size_t accepted = 0;
  std::size_t new_best = 0;
};

struct SolveReport {
  Solution best;
  double initial_objective = 0.0;
  std::vector<TraceEntry> trace;
  double wall_time = 0.0;
  std::size_t iterations = 0;
  std::array<OperatorStats, kOperatorPairs> operator_stats{};
  OperatorBank final_bank;
  std::string stop_reason;
  std::string warning;
};

inline SolveReport solve(const Instance& inst, const SolverConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  SolveReport report;
  const RowScreen screen = row_screen(inst);
  const FilterConfig filter = cfg.filter();
  const std::size_t removals = removal_count(inst.n(), cfg.destroy_rate);
  Rng rng(cfg.seed);
  OperatorBank bank;

  Solution current = initial_solution(inst, &report.warning);
  Solution best = current;
  report.initial_objective = current.objective;
  report.stop_reason = "max_iters";

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    if (best.objective <= kZeroObjective) {
      report.stop_reason = "optimal";
      break;
    }
    if (elapsed() >= cfg.time_limit) {
      report.stop_reason = "time_limit";
      break;
    }

    const std::size_t pair = select_operators(bank, rng);
    const DestroySet removed = destroy_of(pair) == DestroyOp::random
                                   ? random_destroy(current, removals, rng)
                                   : worst_remove_destroy(inst, current, removals, cfg.alpha, rng, cfg.workers);
    Solution candidate = current;
    if (repair_of(pair) == RepairOp::random) {
      random_repair_in_place(inst, candidate, removed, rng);
    } else {
      greedy_repair_in_place(inst, candidate, removed);
    }
    local_search_in_place(inst, screen, candidate, filter);

    Outcome outcome = Outcome::rejected;
    const bool accepted = accept(current, candidate, cfg);
    if (accepted) {
      if (candidate.objective < best.objective) {
        outcome = Outcome::new_best;
      } else if (candidate.objective < current.objective) {
        outcome = Outcome::improved;
      } else {
        outcome = Outcome::accepted;
      }
      current = std::move(candidate);
      if (outcome == Outcome::new_best) best = current;
    }
    update_weights(bank, pair, outcome, cfg);

    auto& stats = report.operator_stats[pair];
    stats.selected += 1;
    stats.accepted += accepted ? 1 : 0;
    stats.new_best += outcome == Outcome::new_best ? 1 : 0;
    report.trace.push_back(TraceEntry{iter, current.objective, best.objective, pair, accepted, outcome});
    report.iterations = iter + 1;
  }
  if (best.objective <= kZeroObjective) report.stop_reason = "optimal";

  // Report the exact residual, not the incrementally maintained one.
  recompute(inst, best);
  report.best = std::move(best);
  report.final_bank = bank;
  report.wall_time = elapsed();
  return report;
}

}  // namespace dmmv
