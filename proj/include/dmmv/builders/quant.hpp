// Row-wise weight quantization on synthetic calibration data: for one weight
// row w and calibration matrix X, find q in Q^d minimising ||X q - X w||_inf.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dmmv/core.hpp"

namespace dmmv::quant {

struct QuantSpec {
  std::size_t dim = 64;     // d
  std::size_t calib = 256;  // m
  int bits = 3;
  double weight_scale = 1.0;
  std::uint64_t seed = 0;
};

struct QuantProblem {
  Instance instance;
  std::vector<double> weights;  // the full-precision row
};

// 2^bits evenly spaced levels spanning [lo, hi].
inline ValueSet uniform_grid(double lo, double hi, int bits) {
  if (bits < 1 || bits > 16) throw Error("quantization bits must be in [1, 16]");
  const std::size_t count = std::size_t{1} << bits;
  std::vector<double> levels(count);
  for (std::size_t v = 0; v < count; ++v)
    levels[v] = (v + 1 == count) ? hi : lo + (hi - lo) * static_cast<double>(v) / static_cast<double>(count - 1);
  return ValueSet(std::move(levels));
}

inline QuantProblem build_quant(const QuantSpec& spec) {
  if (spec.dim < 1 || spec.calib < 1) throw Error("quantization needs dim >= 1 and calib >= 1");
  if (!(spec.weight_scale > 0.0)) throw Error("weight scale must be positive");
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(spec.calib, spec.dim);
  for (std::size_t r = 0; r < spec.calib; ++r)
    for (std::size_t c = 0; c < spec.dim; ++c) x(r, c) = normal(rng);
  std::vector<double> w(spec.dim);
  for (auto& v : w) v = spec.weight_scale * normal(rng);

  std::vector<double> b(spec.calib);
  for (std::size_t r = 0; r < spec.calib; ++r) {
    const auto row = x.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < spec.dim; ++c) acc += row[c] * w[c];
    b[r] = acc;
  }
  double lo = *std::min_element(w.begin(), w.end());
  double hi = *std::max_element(w.begin(), w.end());
  // One weight has no range to span; centre a grid of width 2*scale on it.
  if (!(hi > lo)) {
    lo -= spec.weight_scale;
    hi += spec.weight_scale;
  }
  Instance inst(std::move(x), std::move(b), uniform_grid(lo, hi, spec.bits), w);
  return QuantProblem{std::move(inst), std::move(w)};
}

}  // namespace dmmv::quant
