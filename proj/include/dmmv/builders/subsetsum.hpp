// Subset-sum as a one-row DMMV instance: A = [a_1 .. a_n], b = [S],
// V = {0, 1}. A subset summing to S exists iff the optimum is zero.

#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "dmmv/core.hpp"

namespace dmmv::subsetsum {

struct SubsetSumSpec {
  std::vector<std::int64_t> weights;
  std::int64_t target = 0;
};

inline Instance build_subsetsum(const SubsetSumSpec& spec) {
  if (spec.weights.empty()) throw Error("subset-sum needs at least one weight");
  if (spec.target < 0) throw Error("subset-sum target must be non-negative");
  Matrix a(1, spec.weights.size());
  for (std::size_t j = 0; j < spec.weights.size(); ++j) {
    if (spec.weights[j] <= 0) throw Error("subset-sum weights must be positive");
    a(0, j) = static_cast<double>(spec.weights[j]);
  }
  return Instance(std::move(a), {static_cast<double>(spec.target)}, ValueSet({0.0, 1.0}));
}

// Random weights in [1, max_weight] and the sum of a random non-empty subset.
// `planted` receives the subset's indicator.
inline SubsetSumSpec planted(std::size_t n, std::int64_t max_weight, Rng& rng,
                             std::vector<std::size_t>* planted_x = nullptr) {
  if (n < 1 || max_weight < 1) throw Error("planted subset-sum needs n >= 1 and max_weight >= 1");
  std::uniform_int_distribution<std::int64_t> weight(1, max_weight);
  std::bernoulli_distribution coin(0.5);
  SubsetSumSpec spec;
  std::vector<std::size_t> x(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    spec.weights.push_back(weight(rng));
    x[j] = coin(rng) ? 1 : 0;
  }
  if (std::all_of(x.begin(), x.end(), [](std::size_t v) { return v == 0; })) x[0] = 1;
  for (std::size_t j = 0; j < n; ++j) spec.target += x[j] ? spec.weights[j] : 0;
  if (planted_x) *planted_x = std::move(x);
  return spec;
}

// Dynamic-programming decision: does some subset sum exactly to target?
inline bool has_subset_with_sum(const std::vector<std::int64_t>& weights, std::int64_t target) {
  if (target < 0) return false;
  std::vector<bool> reach(static_cast<std::size_t>(target) + 1, false);
  reach[0] = true;
  for (std::int64_t w : weights) {
    if (w > target) continue;
    for (std::int64_t s = target; s >= w; --s)
      if (reach[static_cast<std::size_t>(s - w)]) reach[static_cast<std::size_t>(s)] = true;
  }
  return reach[static_cast<std::size_t>(target)];
}

}  // namespace dmmv::subsetsum
