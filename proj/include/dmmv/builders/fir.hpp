// Fixed-point FIR filter design as a DMMV instance.
//
// Rows are frequency grid points w_j over the union of the specified bands,
// columns are cosine terms, b_j is the desired gain, and the alphabet is the
// p-bit fixed-point set {k / 2^(p-1) : -2^(p-1) <= k < 2^(p-1)}.
//
// Two parameterisations are available:
//   free       x = [h_0 .. h_N],            A_jk = cos(k w_j)
//   symmetric  x_k = h_{N/2-k} = h_{N/2+k},  A_jk = c_k cos(k w_j), c_0 = 1, c_k = 2
// The symmetric form is the amplitude response of a type-I linear-phase filter.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

#include "dmmv/core.hpp"

namespace dmmv::fir {

struct Band {
  double lo = 0.0;  // radians
  double hi = 0.0;
  double desired = 0.0;
  double weight = 1.0;
};

struct FirSpec {
  std::size_t order = 0;  // N
  int bits = 8;           // p
  std::vector<Band> bands;
  double gain = 1.0;      // K
  std::size_t grid_mult = 16;
  bool symmetric = false;

  std::size_t variables() const { return symmetric ? order / 2 + 1 : order + 1; }
  std::size_t grid_size() const { return grid_mult * order; }
};

struct Grid {
  std::vector<double> omega;
  std::vector<double> desired;
  std::vector<double> weight;
};

inline ValueSet fixed_point_levels(int bits) {
  if (bits < 1 || bits > 24) throw Error("fixed-point bits must be in [1, 24]");
  const long half = 1L << (bits - 1);
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(2 * half));
  for (long k = -half; k < half; ++k) levels.push_back(static_cast<double>(k) / static_cast<double>(half));
  return ValueSet(std::move(levels));
}

inline void validate(const FirSpec& spec) {
  if (spec.order < 1) throw Error("FIR order must be at least 1");
  if (spec.symmetric && spec.order % 2 != 0) throw Error("symmetric FIR design needs an even order");
  if (spec.bands.empty()) throw Error("FIR design needs at least one band");
  if (spec.grid_mult < 1) throw Error("grid multiplier must be at least 1");
  for (std::size_t q = 0; q < spec.bands.size(); ++q) {
    const Band& band = spec.bands[q];
    if (!(band.lo >= 0.0 && band.hi <= std::numbers::pi && band.lo < band.hi))
      throw Error("band " + std::to_string(q) + " must satisfy 0 <= lo < hi <= pi");
    if (!(band.weight > 0.0)) throw Error("band weights must be positive");
    if (q > 0 && !(band.lo > spec.bands[q - 1].hi)) throw Error("bands must be ordered and disjoint");
  }
  if (spec.grid_size() < 2 * spec.bands.size()) throw Error("grid too small for two points per band");
}

// Grid points allotted to each band in proportion to its length, at least
// two each, summing to grid_size (largest-remainder rounding).
inline std::vector<std::size_t> band_point_counts(const FirSpec& spec) {
  const std::size_t m = spec.grid_size();
  const std::size_t nb = spec.bands.size();
  double total = 0.0;
  for (const auto& band : spec.bands) total += band.hi - band.lo;
  std::vector<std::size_t> counts(nb, 2);
  std::size_t left = m - 2 * nb;
  std::vector<double> share(nb);
  std::size_t given = 0;
  for (std::size_t q = 0; q < nb; ++q) {
    share[q] = static_cast<double>(left) * (spec.bands[q].hi - spec.bands[q].lo) / total;
    const auto whole = static_cast<std::size_t>(std::floor(share[q]));
    counts[q] += whole;
    given += whole;
    share[q] -= static_cast<double>(whole);
  }
  std::vector<std::size_t> order(nb);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return share[x] > share[y]; });
  for (std::size_t r = 0; given < left; ++r, ++given) counts[order[r % nb]] += 1;
  return counts;
}

inline Grid make_grid(const FirSpec& spec) {
  validate(spec);
  const auto counts = band_point_counts(spec);
  Grid grid;
  for (std::size_t q = 0; q < spec.bands.size(); ++q) {
    const Band& band = spec.bands[q];
    const std::size_t c = counts[q];
    for (std::size_t p = 0; p < c; ++p) {
      const double w = (p + 1 == c) ? band.hi
                                    : band.lo + (band.hi - band.lo) * static_cast<double>(p) /
                                                    static_cast<double>(c - 1);
      grid.omega.push_back(w);
      grid.desired.push_back(spec.gain * band.desired);
      grid.weight.push_back(band.weight);
    }
  }
  return grid;
}

inline Matrix cosine_matrix(const FirSpec& spec, const std::vector<double>& omega) {
  const std::size_t n = spec.variables();
  Matrix a(omega.size(), n);
  for (std::size_t j = 0; j < omega.size(); ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double c = (spec.symmetric && k > 0) ? 2.0 : 1.0;
      a(j, k) = c * std::cos(static_cast<double>(k) * omega[j]);
    }
  }
  return a;
}

// argmin_x sum_j w_j ((A x)_j - b_j)^2 by column-pivoted QR.
inline std::vector<double> weighted_least_squares(const Matrix& a, const std::vector<double>& b,
                                                  const std::vector<double>& weight) {
  const auto m = static_cast<Eigen::Index>(a.rows());
  const auto n = static_cast<Eigen::Index>(a.cols());
  Eigen::MatrixXd wa(m, n);
  Eigen::VectorXd wb(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double s = std::sqrt(weight[static_cast<std::size_t>(j)]);
    for (Eigen::Index k = 0; k < n; ++k) wa(j, k) = s * a(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
    wb(j) = s * b[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd x = wa.colPivHouseholderQr().solve(wb);
  return {x.data(), x.data() + n};
}

inline Instance build_fir(const FirSpec& spec) {
  const Grid grid = make_grid(spec);
  Matrix a = cosine_matrix(spec, grid.omega);
  auto init = weighted_least_squares(a, grid.desired, grid.weight);
  return Instance(std::move(a), grid.desired, fixed_point_levels(spec.bits), std::move(init));
}

// Full impulse response h_0..h_N from the design variables.
inline std::vector<double> impulse_response(const FirSpec& spec, const std::vector<double>& x) {
  if (x.size() != spec.variables()) throw DimensionError("FIR coefficients", spec.variables(), x.size());
  if (!spec.symmetric) return x;
  const std::size_t half = spec.order / 2;
  std::vector<double> h(spec.order + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    h[half - k] = x[k];
    h[half + k] = x[k];
  }
  return h;
}

// Worst deviation of the achieved response from the desired response on the grid.
inline double ripple(const Instance&, const Solution& sol) { return sol.objective; }

// Direct-form convolution y[n] = sum_k h_k x[n-k] with zero history.
inline std::vector<double> apply_fir(const std::vector<double>& coeffs, const std::vector<double>& signal) {
  std::vector<double> y(signal.size(), 0.0);
  for (std::size_t t = 0; t < signal.size(); ++t) {
    double acc = 0.0;
    const std::size_t taps = std::min(coeffs.size(), t + 1);
    for (std::size_t k = 0; k < taps; ++k) acc += coeffs[k] * signal[t - k];
    y[t] = acc;
  }
  return y;
}

// Low-pass with passband [0, wp] at gain 1 and stopband [ws, pi] at 0.
inline FirSpec lowpass(std::size_t order, int bits, double wp, double ws, bool symmetric = false) {
  FirSpec spec;
  spec.order = order;
  spec.bits = bits;
  spec.symmetric = symmetric;
  spec.bands = {Band{0.0, wp, 1.0, 1.0}, Band{ws, std::numbers::pi, 0.0, 1.0}};
  return spec;
}

// Band-stop: gain 0 on [wp1, wp2], 1 on [0, ws1] and [ws2, pi].
inline FirSpec bandstop(std::size_t order, int bits, double ws1, double wp1, double wp2, double ws2,
                        bool symmetric = false) {
  FirSpec spec;
  spec.order = order;
  spec.bits = bits;
  spec.symmetric = symmetric;
  spec.bands = {Band{0.0, ws1, 1.0, 1.0}, Band{wp1, wp2, 0.0, 1.0}, Band{ws2, std::numbers::pi, 1.0, 1.0}};
  return spec;
}

}  // namespace dmmv::fir
