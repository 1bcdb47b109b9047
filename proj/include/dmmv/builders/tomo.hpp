// Parallel-beam discrete tomography instances, SIRT warm start, and MAE.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dmmv/core.hpp"

namespace dmmv::tomo {

enum class PhantomKind { disk, squares, checker };

inline PhantomKind parse_phantom(const std::string& s) {
  if (s == "disk") return PhantomKind::disk;
  if (s == "squares") return PhantomKind::squares;
  if (s == "checker") return PhantomKind::checker;
  throw Error("unknown phantom kind '" + s + "' (expected disk, squares or checker)");
}

// Row-major side x side image of gray-level indices in [0, levels).
using Image = std::vector<std::size_t>;

inline Image build_phantom(PhantomKind kind, std::size_t side, std::size_t levels = 2) {
  if (side < 8) throw Error("phantom side must be at least 8");
  if (levels < 2) throw Error("phantom needs at least two gray levels");
  Image img(side * side, 0);
  const double c = (static_cast<double>(side) - 1.0) / 2.0;
  const double radius = static_cast<double>(side) / 3.0;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t col = 0; col < side; ++col) {
      std::size_t v = 0;
      switch (kind) {
        case PhantomKind::disk: {
          // Concentric rings, outermost at level 1.
          const double dist = std::hypot(static_cast<double>(r) - c, static_cast<double>(col) - c);
          if (dist <= radius) {
            const auto ring = static_cast<std::size_t>(dist / radius * static_cast<double>(levels - 1));
            v = levels - 1 - std::min(ring, levels - 2);
          }
          break;
        }
        case PhantomKind::squares: {
          const std::size_t q = side / 8;
          const bool a = r >= q && r < 4 * q && col >= q && col < 4 * q;
          const bool b = r >= 5 * q && r < 7 * q && col >= 3 * q && col < 7 * q;
          const bool d = r >= 2 * q && r < 3 * q && col >= 5 * q && col < 7 * q;
          if (a) v = 1;
          if (b) v = std::min<std::size_t>(2, levels - 1);
          if (d) v = levels - 1;
          break;
        }
        case PhantomKind::checker: {
          const std::size_t block = std::max<std::size_t>(1, side / 8);
          v = ((r / block) + (col / block)) % levels;
          break;
        }
      }
      img[r * side + col] = v;
    }
  }
  return img;
}

// Intersection lengths of one ray with the pixel grid. The image occupies
// [-side/2, side/2]^2 with row 0 at the top; the ray is the line at signed
// offset u from the centre with direction (cos theta, sin theta).
inline void trace_ray(std::size_t side, double theta, double u, std::span<double> row) {
  const double h = static_cast<double>(side) / 2.0;
  const double dx = std::cos(theta);
  const double dy = std::sin(theta);
  const double px = -std::sin(theta) * u;
  const double py = std::cos(theta) * u;
  constexpr double eps = 1e-12;

  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  auto clip = [&](double p, double d) {
    if (std::abs(d) < eps) return p >= -h && p <= h;
    double a = (-h - p) / d;
    double b = (h - p) / d;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    return true;
  };
  if (!clip(px, dx) || !clip(py, dy) || !(t1 - t0 > eps)) return;

  std::vector<double> ts{t0, t1};
  for (std::size_t g = 0; g <= side; ++g) {
    const double line = -h + static_cast<double>(g);
    if (std::abs(dx) >= eps) {
      const double t = (line - px) / dx;
      if (t > t0 && t < t1) ts.push_back(t);
    }
    if (std::abs(dy) >= eps) {
      const double t = (line - py) / dy;
      if (t > t0 && t < t1) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
    const double len = ts[q + 1] - ts[q];
    if (len <= eps) continue;
    const double tm = 0.5 * (ts[q] + ts[q + 1]);
    const double x = px + tm * dx;
    const double y = py + tm * dy;
    const auto col = static_cast<long>(std::floor(x + h));
    const auto r = static_cast<long>(std::floor(h - y));
    const auto s = static_cast<long>(side);
    if (col < 0 || col >= s || r < 0 || r >= s) continue;
    row[static_cast<std::size_t>(r) * side + static_cast<std::size_t>(col)] += len;
  }
}

// Projection matrix: angles a*pi/n_angles, `side` detectors at unit spacing.
// Rays that miss the image are dropped.
inline Matrix projection_matrix(std::size_t side, std::size_t n_angles) {
  if (n_angles < 1) throw Error("need at least one projection angle");
  const std::size_t n = side * side;
  std::vector<double> data;
  std::vector<double> row(n);
  std::size_t rows = 0;
  for (std::size_t a = 0; a < n_angles; ++a) {
    const double theta = std::numbers::pi * static_cast<double>(a) / static_cast<double>(n_angles);
    for (std::size_t d = 0; d < side; ++d) {
      std::fill(row.begin(), row.end(), 0.0);
      const double u = static_cast<double>(d) - (static_cast<double>(side) - 1.0) / 2.0;
      trace_ray(side, theta, u, row);
      double sum = 0.0;
      for (double v : row) sum += v;
      if (sum <= 0.0) continue;
      data.insert(data.end(), row.begin(), row.end());
      ++rows;
    }
  }
  return Matrix(rows, n, std::move(data));
}

inline double max_row_sum(const Matrix& a) {
  double best = 0.0;
  for (std::size_t k = 0; k < a.rows(); ++k) {
    double s = 0.0;
    for (double v : a.row(k)) s += v;
    best = std::max(best, s);
  }
  return best;
}

// x <- clamp(x + C A^T R (b - A x)) from x = 0, C and R the inverse column
// and row sums.
inline std::vector<double> sirt(const Matrix& a, std::span<const double> b, std::size_t iters,
                                std::optional<std::pair<double, double>> clamp = std::nullopt) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw DimensionError("SIRT right-hand side", m, b.size());
  std::vector<double> inv_row(m, 0.0);
  std::vector<double> inv_col(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a(k, j);
      if (v < 0.0) throw Error("SIRT needs a non-negative matrix");
      inv_row[k] += v;
      inv_col[j] += v;
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (inv_row[k] <= 0.0) throw Error("SIRT: row " + std::to_string(k) + " is all zero");
    inv_row[k] = 1.0 / inv_row[k];
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (inv_col[j] <= 0.0) throw Error("SIRT: column " + std::to_string(j) + " is all zero");
    inv_col[j] = 1.0 / inv_col[j];
  }

  std::vector<double> x(n, 0.0);
  std::vector<double> r(m);
  std::vector<double> g(n);
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto row = a.row(k);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
      r[k] = (b[k] - acc) * inv_row[k];
    }
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const auto row = a.row(k);
      for (std::size_t j = 0; j < n; ++j) g[j] += row[j] * r[k];
    }
    for (std::size_t j = 0; j < n; ++j) {
      x[j] += inv_col[j] * g[j];
      if (clamp) x[j] = std::clamp(x[j], clamp->first, clamp->second);
    }
  }
  return x;
}

inline double mae(std::span<const double> reconstruction, std::span<const double> truth) {
  if (reconstruction.size() != truth.size())
    throw DimensionError("MAE image length", truth.size(), reconstruction.size());
  if (truth.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) acc += std::abs(reconstruction[i] - truth[i]);
  return acc / static_cast<double>(truth.size());
}

struct TomoSpec {
  std::size_t side = 32;
  ValueSet gray_levels{std::vector<double>{0.0, 1.0}};
  std::size_t n_angles = 16;
  double noise = 0.0;  // half-width of the uniform noise
  // Interpret `noise` as a fraction of the largest row sum of A.
  bool noise_relative = false;
  std::uint64_t seed = 0;
  PhantomKind phantom = PhantomKind::disk;
  std::size_t sirt_iters = 1000;
};

struct TomoProblem {
  Instance instance;
  Image truth;                      // gray-level indices
  std::vector<double> truth_values;  // gray-level values
  double noise_half_width = 0.0;
};

inline std::vector<double> image_values(const ValueSet& levels, const Image& img) {
  std::vector<double> v(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) v[i] = levels[img[i]];
  return v;
}

inline TomoProblem build_tomo(const TomoSpec& spec, std::optional<Image> truth = std::nullopt) {
  if (!(spec.noise >= 0.0)) throw Error("noise half-width must be non-negative");
  Matrix a = projection_matrix(spec.side, spec.n_angles);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.rows(); ++k) sum += a(k, j);
    if (sum <= 0.0) throw Error("pixel " + std::to_string(j) + " is not hit by any ray");
  }
  Image img = truth ? std::move(*truth) : build_phantom(spec.phantom, spec.side, spec.gray_levels.size());
  if (img.size() != spec.side * spec.side) throw DimensionError("ground-truth image", spec.side * spec.side, img.size());
  for (std::size_t v : img)
    if (v >= spec.gray_levels.size()) throw Error("ground-truth pixel outside the gray-level set");
  const auto x = image_values(spec.gray_levels, img);

  const double eta = spec.noise_relative ? spec.noise * max_row_sum(a) : spec.noise;
  std::vector<double> b(a.rows());
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> noise(-eta, eta);
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto row = a.row(k);
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * x[j];
    b[k] = acc + (eta > 0.0 ? noise(rng) : 0.0);
  }
  auto init = sirt(a, b, spec.sirt_iters, std::pair{spec.gray_levels.min(), spec.gray_levels.max()});
  Instance inst(std::move(a), std::move(b), spec.gray_levels, std::move(init));
  return TomoProblem{std::move(inst), std::move(img), x, eta};
}

}  // namespace dmmv::tomo
