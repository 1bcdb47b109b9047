#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "dmmv/operators.hpp"
#include "test_support.hpp"

using namespace dmmv;
using dmmv::testing::literal_impact_scores;
using dmmv::testing::max_deviation;
using dmmv::testing::random_assignment;
using dmmv::testing::random_instance;
using dmmv::testing::reference_residual;
using dmmv::testing::within_three_sigma;

namespace {

void expect_valid(const Instance& inst, const Solution& sol) {
  for (std::size_t v : sol.idx) EXPECT_LT(v, inst.values().size());
  EXPECT_LE(max_deviation(sol.residual, reference_residual(inst, sol.idx)), 1e-9);
}

}  // namespace

TEST(RemovalCount, RoundsAndClamps) {
  EXPECT_EQ(removal_count(10, 0.005), 1u);
  EXPECT_EQ(removal_count(1000, 0.005), 5u);
  EXPECT_EQ(removal_count(4, 1.0), 4u);
  EXPECT_EQ(removal_count(1, 0.5), 1u);
}

TEST(RandomDestroy, SingleVariable) {
  Rng rng(1);
  Solution sol{{3}, {}, 0.0, 0};
  const auto set = random_destroy(sol, 1, rng);
  EXPECT_EQ(set.removed, std::vector<std::size_t>{0});
  EXPECT_EQ(set.saved_idx, std::vector<std::size_t>{3});
  EXPECT_THROW(random_destroy(sol, 2, rng), Error);
  EXPECT_THROW(random_destroy(sol, 0, rng), Error);
}

TEST(RandomDestroy, DeterministicAndDistinct) {
  Solution sol{std::vector<std::size_t>(30, 0), {}, 0.0, 0};
  Rng a(77), b(77);
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = random_destroy(sol, 7, a);
    const auto y = random_destroy(sol, 7, b);
    EXPECT_EQ(x.removed, y.removed);
    EXPECT_EQ(std::set<std::size_t>(x.removed.begin(), x.removed.end()).size(), 7u);
  }
}

TEST(RandomDestroy, UniformFrequencies) {
  Solution sol{std::vector<std::size_t>(10, 0), {}, 0.0, 0};
  Rng rng(2024);
  const std::size_t draws = 10000;
  std::vector<std::size_t> count(10, 0);
  for (std::size_t d = 0; d < draws; ++d)
    for (std::size_t j : random_destroy(sol, 2, rng).removed) ++count[j];
  for (std::size_t j = 0; j < 10; ++j) EXPECT_TRUE(within_three_sigma(count[j], draws, 0.2)) << j << ' ' << count[j];
}

TEST(ImpactScores, SingleRowAtTheMaximum) {
  Matrix a(1, 2);
  a(0, 0) = a(0, 1) = 1.0;
  const Instance inst(a, {-0.5}, ValueSet({0.0, 1.0}));
  const auto sol = make_solution(inst, {0, 0});
  const auto d = impact_scores(inst, sol, 0.3);
  EXPECT_EQ(d.d, (std::vector<double>{1.0, 1.0}));
}

TEST(ImpactScores, ZeroColumnScoresZero) {
  Matrix a(3, 3);
  a(0, 0) = 1.0;
  a(1, 0) = -2.0;
  a(2, 2) = 0.5;
  const Instance inst(a, {0.3, 0.1, -0.7}, ValueSet({0.0, 1.0}));
  const auto d = impact_scores(inst, make_solution(inst, {1, 1, 0}), 0.3);
  EXPECT_EQ(d.d[1], 0.0);
  EXPECT_GT(d.d[0], 0.0);
}

TEST(ImpactScores, ClosedFormMatchesLiteralBounds) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng, {6, 6, 4, 4, 2, 5});
    const auto idx = random_assignment(inst, rng);
    const auto sol = make_solution(inst, idx);
    if (sol.objective == 0.0) continue;
    for (double alpha : {0.0, 0.3, 2.0}) {
      const auto closed = impact_scores(inst, sol, alpha);
      const auto literal = literal_impact_scores(inst, idx, alpha);
      EXPECT_LE(max_deviation(closed.d, literal), 1e-10);
      for (double v : closed.d) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-15);
      }
    }
  }
}

TEST(ImpactScores, WorkerCountDoesNotMatter) {
  Rng rng(8);
  const auto inst = random_instance(rng, {30, 30, 40, 40, 3, 3});
  const auto sol = make_solution(inst, random_assignment(inst, rng));
  EXPECT_EQ(impact_scores(inst, sol, 0.3, 1).d, impact_scores(inst, sol, 0.3, 4).d);
}

TEST(WorstRemove, OneHotAlwaysChosen) {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto picks = sample_without_replacement({0.0, 0.0, 1.0, 0.0}, 1, rng);
    EXPECT_EQ(picks, std::vector<std::size_t>{2});
  }
  // Once the weight is used up the rest are uniform.
  const auto two = sample_without_replacement({0.0, 1.0, 0.0}, 2, rng);
  EXPECT_EQ(two[0], 1u);
  EXPECT_NE(two[1], 1u);
}

TEST(WorstRemove, ProportionalFrequencies) {
  Rng rng(99);
  const std::vector<double> w{0.7, 0.2, 0.1};
  const std::size_t draws = 10000;
  std::vector<std::size_t> count(3, 0);
  for (std::size_t d = 0; d < draws; ++d) ++count[sample_without_replacement(w, 1, rng)[0]];
  for (std::size_t j = 0; j < 3; ++j) EXPECT_TRUE(within_three_sigma(count[j], draws, w[j])) << j;
}

TEST(WorstRemove, WithoutReplacementSecondDraw) {
  // P(second = 1 | first = 0) = 0.2 / 0.3.
  Rng rng(5);
  const std::vector<double> w{0.7, 0.2, 0.1};
  std::size_t first0 = 0, then1 = 0;
  for (int d = 0; d < 20000; ++d) {
    const auto p = sample_without_replacement(w, 2, rng);
    EXPECT_NE(p[0], p[1]);
    if (p[0] == 0) {
      ++first0;
      if (p[1] == 1) ++then1;
    }
  }
  EXPECT_TRUE(within_three_sigma(then1, first0, 2.0 / 3.0));
}

TEST(WorstRemove, FallsBackWhenScoresVanish) {
  Matrix a(1, 3);
  a(0, 0) = a(0, 1) = a(0, 2) = 1.0;
  const Instance inst(a, {1.0}, ValueSet({0.0, 1.0}));
  const auto sol = make_solution(inst, {1, 0, 0});  // exact fit, all d_j = 0
  Rng rng(4);
  const auto set = worst_remove_destroy(inst, sol, 2, 0.3, rng);
  EXPECT_EQ(set.removed.size(), 2u);
  EXPECT_NE(set.removed[0], set.removed[1]);
}

TEST(WorstRemove, PrefersHighImpactVariables) {
  Rng rng(10);
  const auto inst = random_instance(rng, {20, 20, 8, 8, 3, 3});
  const auto sol = make_solution(inst, random_assignment(inst, rng));
  const auto d = impact_scores(inst, sol, 0.3).d;
  const double total = std::accumulate(d.begin(), d.end(), 0.0);
  std::vector<std::size_t> count(inst.n(), 0);
  const std::size_t draws = 10000;
  for (std::size_t q = 0; q < draws; ++q) ++count[worst_remove_destroy(inst, sol, 1, 0.3, rng).removed[0]];
  for (std::size_t j = 0; j < inst.n(); ++j) EXPECT_TRUE(within_three_sigma(count[j], draws, d[j] / total)) << j;
}

TEST(RandomRepair, LandsOnTheTwoNearestLevels) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng);
    auto sol = make_solution(inst, random_assignment(inst, rng));
    const auto set = random_destroy(sol, std::min<std::size_t>(3, inst.n()), rng);
    const auto out = random_repair(inst, sol, set, rng);
    expect_valid(inst, out);
    for (std::size_t p = 0; p < set.removed.size(); ++p) {
      const auto [near0, near1] = inst.values().two_nearest(inst.values()[set.saved_idx[p]]);
      EXPECT_EQ(near0, set.saved_idx[p]);  // the old level itself is one of the two
      const std::size_t got = out.idx[set.removed[p]];
      EXPECT_TRUE(got == near0 || got == near1);
    }
  }
}

TEST(RandomRepair, BinaryLevelsFlipHalfTheTime) {
  Matrix a(1, 1);
  a(0, 0) = 1.0;
  const Instance inst(a, {0.0}, ValueSet({0.0, 1.0}));
  const auto sol = make_solution(inst, {0});
  Rng rng(31);
  std::size_t ones = 0;
  const std::size_t draws = 4000;
  for (std::size_t d = 0; d < draws; ++d) ones += random_repair(inst, sol, random_destroy(sol, 1, rng), rng).idx[0];
  EXPECT_TRUE(within_three_sigma(ones, draws, 0.5));
}

TEST(GreedyRepair, HandExample) {
  Matrix a(1, 1);
  a(0, 0) = 1.0;
  const Instance inst(a, {0.4}, ValueSet({0.0, 1.0}));
  const auto sol = make_solution(inst, {0});
  const DestroySet set{{0}, {0}};
  const auto out = greedy_repair(inst, sol, set);
  EXPECT_EQ(out.idx[0], 0u);
  EXPECT_DOUBLE_EQ(out.objective, 0.4);
  // Starting from level 1 the greedy choice is still level 0.
  const auto from_one = greedy_repair(inst, make_solution(inst, {1}), DestroySet{{0}, {1}});
  EXPECT_EQ(from_one.idx[0], 0u);
}

TEST(GreedyRepair, TieGoesToLowerLevel) {
  Matrix a(1, 1);
  a(0, 0) = 1.0;
  const Instance inst(a, {0.5}, ValueSet({0.0, 1.0}));
  const auto out = greedy_repair(inst, make_solution(inst, {1}), DestroySet{{0}, {1}});
  EXPECT_EQ(out.idx[0], 0u);
}

TEST(GreedyRepair, PerVariableOptimumAmongTwoCandidates) {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng);
    const auto sol = make_solution(inst, random_assignment(inst, rng));
    const auto set = random_destroy(sol, 1, rng);
    const auto out = greedy_repair(inst, sol, set);
    expect_valid(inst, out);
    const auto [c0, c1] = inst.values().two_nearest(inst.values()[set.saved_idx[0]]);
    const double t0 = apply_shift(inst, sol, set.removed[0], c0).objective;
    const double t1 = apply_shift(inst, sol, set.removed[0], c1).objective;
    EXPECT_LE(out.objective, std::min(t0, t1) + 1e-12);
  }
}

TEST(GreedyRepair, NoWorseThanRandomOnAverage) {
  Rng gen(15);
  int not_worse = 0;
  const int instances = 30;
  for (int trial = 0; trial < instances; ++trial) {
    const auto inst = random_instance(gen, {10, 20, 6, 10, 3, 5});
    const auto sol = make_solution(inst, random_assignment(inst, gen));
    double greedy_sum = 0.0, random_sum = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
      Rng rng(static_cast<std::uint64_t>(seed));
      const auto set = random_destroy(sol, std::min<std::size_t>(3, inst.n()), rng);
      greedy_sum += greedy_repair(inst, sol, set).objective;
      random_sum += random_repair(inst, sol, set, rng).objective;
    }
    if (greedy_sum <= random_sum + 1e-9) ++not_worse;
  }
  EXPECT_EQ(not_worse, instances);
}

TEST(Repairs, DeterministicForFixedSeed) {
  Rng g(16);
  const auto inst = random_instance(g, {10, 10, 8, 8, 4, 4});
  const auto sol = make_solution(inst, random_assignment(inst, g));
  Rng a(5), b(5);
  const auto sa = random_destroy(sol, 4, a);
  const auto sb = random_destroy(sol, 4, b);
  EXPECT_EQ(random_repair(inst, sol, sa, a).idx, random_repair(inst, sol, sb, b).idx);
}
