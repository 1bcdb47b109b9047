#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dmmv/localsearch.hpp"
#include "test_support.hpp"

using namespace dmmv;
using dmmv::testing::random_assignment;
using dmmv::testing::random_instance;
using dmmv::testing::reference_residual;

namespace {

// Objective after swapping i and j, computed from scratch.
double exact_swapped_t(const Instance& inst, const Solution& sol, std::size_t i, std::size_t j) {
  auto idx = sol.idx;
  std::swap(idx[i], idx[j]);
  double t = 0.0;
  for (double s : reference_residual(inst, idx)) t = std::max(t, std::abs(s));
  return t;
}

Solution start(const Instance& inst, Rng& rng) { return make_solution(inst, random_assignment(inst, rng)); }

FilterConfig unlimited(const Instance& inst) {
  FilterConfig cfg;
  cfg.k_eps = inst.m();
  cfg.max_candidates = kUnbounded;
  return cfg;
}

}  // namespace

TEST(OneOpt, FixedPointUnchanged) {
  Matrix a(1, 1);
  a(0, 0) = 1.0;
  const Instance inst(a, {1.0}, ValueSet({0.0, 1.0}));
  const auto sol = make_solution(inst, {1});
  const auto out = one_opt(inst, sol);
  EXPECT_EQ(out.idx, sol.idx);
  EXPECT_EQ(out.objective, 0.0);
}

TEST(OneOpt, WalksAdjacentLevels) {
  Matrix a(1, 1);
  a(0, 0) = 1.0;
  const Instance inst(a, {0.9}, ValueSet({0.0, 0.5, 1.0}));
  auto sol = make_solution(inst, {0});
  EXPECT_DOUBLE_EQ(sol.objective, 0.9);
  EXPECT_EQ(one_opt_in_place(inst, sol), 2);
  EXPECT_EQ(sol.idx[0], 2u);
  EXPECT_NEAR(sol.objective, 0.1, 1e-15);
}

TEST(OneOpt, NeverIncreasesObjective) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = start(inst, rng);
    const auto out = one_opt(inst, sol);
    EXPECT_LE(out.objective, sol.objective);
  }
}

TEST(IsImproving, ZeroRowPassesTrivially) {
  Matrix a(2, 2);
  a(0, 0) = a(0, 1) = 0.3;  // a_ki = a_kj, so the swap leaves s_0 alone
  a(1, 0) = 1.0;
  a(1, 1) = 0.6;
  const Instance inst(a, {0.0, 0.5}, ValueSet({0.0, 1.0}));
  const auto sol = make_solution(inst, {1, 0});  // s = [0.3, 0.5]
  const auto cand = make_candidate(inst, sol, 0, 1);
  EXPECT_TRUE(is_improving(inst, sol, cand));
  EXPECT_NEAR(swapped_objective(inst, sol, cand), 0.3, 1e-15);
}

TEST(IsImproving, CandidateValidation) {
  Matrix a(1, 2);
  const Instance inst(a, {0.0}, ValueSet({0.0, 1.0}));
  const auto sol = make_solution(inst, {0, 1});
  EXPECT_THROW(make_candidate(inst, sol, 0, 0), Error);
  EXPECT_THROW(make_candidate(inst, sol, 0, 1), Error);
  EXPECT_NO_THROW(make_candidate(inst, sol, 1, 0));
}

TEST(IsImproving, MatchesExactPostSwapObjective) {
  Rng rng(2);
  std::size_t pairs = 0, boundary = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = start(inst, rng);
    const auto screen = row_screen(inst);
    for (std::size_t i = 0; i < inst.n(); ++i) {
      for (std::size_t j = 0; j < inst.n(); ++j) {
        if (i == j || !(inst.values()[sol.idx[i]] > inst.values()[sol.idx[j]])) continue;
        const auto cand = make_candidate(inst, sol, i, j);
        const double exact = apply_swap(inst, sol, i, j).objective;
        if (std::abs(exact - sol.objective) <= 1e-12) {
          ++boundary;
          continue;
        }
        ++pairs;
        EXPECT_EQ(is_improving(inst, sol, cand), exact < sol.objective);
        EXPECT_EQ(is_improving(inst, sol, cand, &screen), is_improving(inst, sol, cand));
      }
    }
  }
  EXPECT_GT(pairs, 1000u);
  RecordProperty("boundary_cases", static_cast<int>(boundary));
}

TEST(RowScreen, SkippedRowsSatisfyTheRowInequality) {
  Rng rng(3);
  std::size_t skipped_total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = start(inst, rng);
    const auto screen = row_screen(inst);
    for (std::size_t i = 0; i < inst.n(); ++i) {
      for (std::size_t j = 0; j < inst.n(); ++j) {
        if (i == j || !(inst.values()[sol.idx[i]] > inst.values()[sol.idx[j]])) continue;
        const auto cand = make_candidate(inst, sol, i, j);
        std::vector<std::size_t> skipped;
        is_improving(inst, sol, cand, &screen, &skipped);
        skipped_total += skipped.size();
        for (std::size_t k : skipped) {
          const double lo = (-sol.objective - sol.residual[k]) / cand.delta;
          const double hi = (sol.objective - sol.residual[k]) / cand.delta;
          const double diff = inst.a(k, j) - inst.a(k, i);
          EXPECT_TRUE(lo < diff && diff < hi);
        }
      }
    }
  }
  EXPECT_GT(skipped_total, 0u);
}

TEST(FindCandidates, TwoVariablesGiveAtMostOne) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, {1, 10, 2, 2, 2, 4});
    auto sol = make_solution(inst, {0, 1});
    const auto cands = find_candidates(inst, sol, FilterConfig{});
    ASSERT_LE(cands.size(), 1u);
    if (!cands.empty()) {
      EXPECT_EQ(cands[0].i, 1u);
      EXPECT_EQ(cands[0].j, 0u);
    }
  }
}

TEST(FindCandidates, EqualValuesGiveNone) {
  Rng rng(5);
  const auto inst = random_instance(rng);
  const auto sol = make_solution(inst, std::vector<std::size_t>(inst.n(), 1));
  EXPECT_TRUE(find_candidates(inst, sol, FilterConfig{}).empty());
}

TEST(FindCandidates, RejectsZeroRowBudget) {
  Rng rng(5);
  const auto inst = random_instance(rng);
  FilterConfig cfg;
  cfg.k_eps = 0;
  EXPECT_THROW(find_candidates(inst, start(inst, rng), cfg), Error);
}

TEST(FindCandidates, NeverDropsAnImprovingSwap) {
  Rng rng(6);
  std::size_t improving = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = start(inst, rng);
    for (std::size_t k_eps : {std::size_t{1}, std::size_t{3}, inst.m()}) {
      FilterConfig cfg = unlimited(inst);
      cfg.k_eps = k_eps;
      const auto cands = find_candidates(inst, sol, cfg);
      for (std::size_t i = 0; i < inst.n(); ++i) {
        for (std::size_t j = 0; j < inst.n(); ++j) {
          if (i == j || !(inst.values()[sol.idx[i]] > inst.values()[sol.idx[j]])) continue;
          if (!(exact_swapped_t(inst, sol, i, j) < sol.objective - 1e-12)) continue;
          ++improving;
          const bool listed = std::any_of(cands.begin(), cands.end(),
                                          [&](const SwapCandidate& c) { return c.i == i && c.j == j; });
          EXPECT_TRUE(listed) << "trial " << trial << " pair " << i << ',' << j;
        }
      }
    }
  }
  EXPECT_GT(improving, 100u);
}

TEST(FindCandidates, OrderedByDeltaAndCapped) {
  Rng rng(7);
  const auto inst = random_instance(rng, {3, 3, 10, 10, 5, 5});
  const auto sol = start(inst, rng);
  FilterConfig cfg = unlimited(inst);
  const auto all = find_candidates(inst, sol, cfg);
  for (std::size_t c = 1; c < all.size(); ++c) EXPECT_GE(all[c - 1].delta, all[c].delta);
  cfg.max_candidates = 3;
  const auto capped = find_candidates(inst, sol, cfg);
  ASSERT_EQ(capped.size(), std::min<std::size_t>(3, all.size()));
  for (std::size_t c = 0; c < capped.size(); ++c) {
    EXPECT_EQ(capped[c].i, all[c].i);
    EXPECT_EQ(capped[c].j, all[c].j);
  }
}

TEST(BestSwap, MatchesExhaustiveMinimum) {
  Rng rng(8);
  int found = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng, {1, 15, 2, 8, 2, 5});
    const auto sol = start(inst, rng);
    double best = sol.objective;
    for (std::size_t i = 0; i < inst.n(); ++i)
      for (std::size_t j = 0; j < inst.n(); ++j)
        if (i != j && inst.values()[sol.idx[i]] > inst.values()[sol.idx[j]])
          best = std::min(best, exact_swapped_t(inst, sol, i, j));
    const auto got = best_swap(inst, sol, unlimited(inst));
    if (best < sol.objective - 1e-12) {
      ASSERT_TRUE(got.has_value()) << trial;
      EXPECT_NEAR(got->predicted_t, best, 1e-12);
      EXPECT_LT(got->predicted_t, sol.objective);
      EXPECT_NEAR(apply_swap(inst, sol, got->i, got->j).objective, got->predicted_t, 1e-12);
      ++found;
    } else if (best >= sol.objective) {
      EXPECT_FALSE(got.has_value());
    }
  }
  EXPECT_GT(found, 50);
}

TEST(BestSwap, IndependentOfWorkerCount) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng, {20, 40, 30, 60, 3, 6});
    const auto sol = start(inst, rng);
    FilterConfig one;
    FilterConfig four;
    four.workers = 4;
    const auto a = best_swap(inst, sol, one);
    const auto b = best_swap(inst, sol, four);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_EQ(a->i, b->i);
      EXPECT_EQ(a->j, b->j);
      EXPECT_EQ(a->predicted_t, b->predicted_t);
    }
  }
}

TEST(BestSwap, ScreenDoesNotChangeTheResult) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = start(inst, rng);
    FilterConfig on = unlimited(inst);
    FilterConfig off = on;
    off.use_screen = false;
    const auto a = best_swap(inst, sol, on);
    const auto b = best_swap(inst, sol, off);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_EQ(a->i, b->i);
      EXPECT_EQ(a->j, b->j);
    }
  }
}

TEST(LocalSearch, FixedPointUnchanged) {
  Matrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  const Instance inst(a, {2.0}, ValueSet({0.0, 1.0}));
  const auto sol = make_solution(inst, {0, 1});
  const auto out = local_search(inst, sol, FilterConfig{});
  EXPECT_EQ(out.idx, sol.idx);
}

// The combined pipeline always dominates 1-OPT alone. Against swaps alone it
// can land in a different local optimum, so that side is compared on average.
TEST(LocalSearch, AblationAgainstSingleMoves) {
  Rng rng(11);
  double both_sum = 0.0, swaps_sum = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = start(inst, rng);
    const auto screen = row_screen(inst);
    const FilterConfig cfg = unlimited(inst);

    const auto only_one_opt = one_opt(inst, sol);
    auto only_swaps = sol;
    swap_descent_in_place(inst, screen, only_swaps, cfg);
    const auto both = local_search(inst, sol, cfg);

    EXPECT_LE(both.objective, sol.objective);
    EXPECT_LE(only_swaps.objective, sol.objective);
    EXPECT_LE(both.objective, only_one_opt.objective);
    both_sum += both.objective;
    swaps_sum += only_swaps.objective;
  }
  EXPECT_LE(both_sum, swaps_sum);
}

TEST(LocalSearch, SwapsStrictlyDecrease) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, {5, 20, 5, 10, 3, 5});
    auto sol = start(inst, rng);
    const auto screen = row_screen(inst);
    const FilterConfig cfg;
    for (int round = 0; round < kMaxSwapRounds; ++round) {
      const double before = sol.objective;
      const auto best = best_swap(inst, screen, sol, cfg);
      if (!best) break;
      swap_in_place(inst, sol, best->i, best->j);
      EXPECT_LT(sol.objective, before);
    }
  }
}
