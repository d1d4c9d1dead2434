// Copyright (c) 2026 hnerf contributors
// SPDX-License-Identifier: Apache-2.0
//
// Scene parameterization and ray sampling: normalization, the contraction
// that squeezes unbounded space into a ball of radius 1+b, and the
// linear/inverse-distance sampling split between foreground and background.
#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "hnerf/common.hpp"
#include "hnerf/rng.hpp"

namespace hnerf {

struct SceneBounds {
  Vec3 center{0, 0, 0};
  double bound = 1.0;        // half-extent of the foreground region, world units
  double bg_size = 1.0;      // b: controls how much of the ball the background gets
  double p_norm = 2.0;
  double altitude_min = 0.0;  // camera altitude band, world units
  double altitude_max = 1.0;

  void validate() const {
    if (!(bound > 0)) fail_validation("scene bounds: bound must be > 0");
    if (!(bg_size > 0)) fail_validation("scene bounds: bg_size must be > 0");
    if (!(p_norm >= 1)) fail_validation("scene bounds: p_norm must be >= 1");
    if (!(altitude_min < altitude_max))
      fail_validation("scene bounds: altitude range must be non-empty");
  }

  // Far plane stands in for infinity; the contraction maps everything past it
  // to within ~1e-3 of the limit sphere, so the truncation is invisible.
  double far_plane() const { return 1e3 * bound; }
  double contraction_radius() const { return 1.0 + bg_size; }
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
  double t_near = 0;
  double t_far = 0;

  void validate() const {
    if (std::abs(norm(dir) - 1.0) > 1e-6) fail_validation("ray: direction must be unit length");
    if (!(t_near >= 0 && t_near < t_far)) fail_validation("ray: need 0 <= t_near < t_far");
  }
};

enum class Region : uint8_t { Foreground, Background };

struct SampleSet {
  std::vector<double> t;                // strictly increasing, world units
  std::vector<Vec3> positions;          // contracted-space positions
  std::vector<double> deltas;           // interval lengths; last one is kLastDelta
  std::vector<Region> regions;

  size_t size() const { return t.size(); }
};

// Closes the compositing sum: any nonzero density at the final sample absorbs
// all remaining transmittance.
inline constexpr double kLastDelta = 1e10;

inline Vec3 normalize_point(const Vec3& x_world, const SceneBounds& bounds) {
  return (x_world - bounds.center) / bounds.bound;
}

// Identity inside the unit p-ball, radial squash onto radius < 1+b outside.
inline Vec3 contract(const Vec3& x_norm, double p, double b) {
  double n = lp_norm(x_norm, p);
  if (n <= 1.0) return x_norm;
  return (1.0 + b - b / n) * (x_norm / n);
}

inline Vec3 contract(const Vec3& x_norm, const SceneBounds& bounds) {
  return contract(x_norm, bounds.p_norm, bounds.bg_size);
}

// Entry/exit distances of the ray segment inside the normalized-space unit
// ball, clamped to [t_near, t_far]. Empty optional when the ray misses.
inline std::optional<std::pair<double, double>> foreground_span(const Ray& ray,
                                                                const SceneBounds& bounds) {
  Vec3 o = (ray.origin - bounds.center) / bounds.bound;
  Vec3 d = ray.dir / bounds.bound;
  double a = dot(d, d);
  double b = 2.0 * dot(o, d);
  double c = dot(o, o) - 1.0;
  double disc = b * b - 4.0 * a * c;
  if (disc <= 0) return std::nullopt;
  double sq = std::sqrt(disc);
  double t0 = (-b - sq) / (2 * a);
  double t1 = (-b + sq) / (2 * a);
  double lo = std::max(t0, ray.t_near);
  double hi = std::min(t1, ray.t_far);
  if (!(lo < hi)) return std::nullopt;
  return std::make_pair(lo, hi);
}

// n distances uniformly spaced over the foreground segment. Without jitter
// this is an inclusive linspace (n == 1 degenerates to the midpoint); with
// jitter each value is drawn uniformly within its stratum.
inline std::optional<std::vector<double>> sample_foreground(const Ray& ray,
                                                            const SceneBounds& bounds, int n,
                                                            Rng* jitter = nullptr) {
  if (n < 1) fail_validation("sample_foreground: n must be >= 1");
  auto span = foreground_span(ray, bounds);
  if (!span) return std::nullopt;
  auto [lo, hi] = *span;
  std::vector<double> out(n);
  if (jitter) {
    double w = (hi - lo) / n;
    for (int k = 0; k < n; ++k) out[k] = lo + (k + jitter->uniform()) * w;
  } else if (n == 1) {
    out[0] = 0.5 * (lo + hi);
  } else {
    double w = (hi - lo) / (n - 1);
    for (int k = 0; k < n; ++k) out[k] = lo + k * w;
    out[n - 1] = hi;
  }
  return out;
}

// Background samples between t_exit and t_far, uniform in inverse distance:
// s in (0, 1], t = 1 / ((1-s)/t_exit + s/t_far).
inline std::vector<double> sample_background(double t_exit, double t_far, int n,
                                             Rng* jitter = nullptr) {
  if (n < 1) fail_validation("sample_background: n must be >= 1");
  if (!(t_exit > 0 && t_exit < t_far)) fail_validation("sample_background: need 0 < t_exit < t_far");
  std::vector<double> out(n);
  double inv_exit = 1.0 / t_exit;
  double inv_far = 1.0 / t_far;
  for (int k = 0; k < n; ++k) {
    double u = jitter ? 1.0 - jitter->uniform() : 1.0;  // u in (0,1]; 1 reproduces the plain grid
    double s = (k + u) / n;
    out[k] = 1.0 / (inv_exit + s * (inv_far - inv_exit));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<double> sample_background(const Ray& ray, const SceneBounds& bounds, int n,
                                             Rng* jitter = nullptr) {
  auto span = foreground_span(ray, bounds);
  // Rays that never enter the foreground treat the whole range as background.
  double t_exit = span ? span->second : ray.t_near;
  return sample_background(t_exit, ray.t_far, n, jitter);
}

// Inverse-CDF resampling from the piecewise-constant PDF that weights induce
// over the coarse intervals (interval i carries weights[i]); falls back to a
// uniform draw over the span when all weights vanish.
inline std::vector<double> resample_fine(const std::vector<double>& t_coarse,
                                         const std::vector<double>& weights, int n, Rng& rng,
                                         bool stratified = true) {
  if (t_coarse.size() != weights.size())
    fail_runtime("resample_fine: weights and t_coarse must have equal length");
  if (t_coarse.size() < 2) fail_runtime("resample_fine: need at least two coarse samples");
  const size_t m = t_coarse.size() - 1;  // interval count

  std::vector<double> cdf(m + 1, 0.0);
  double total = 0;
  for (size_t i = 0; i < m; ++i) {
    total += std::max(0.0, weights[i]);
    cdf[i + 1] = total;
  }

  std::vector<double> out(n);
  if (total <= 0) {
    double lo = t_coarse.front(), hi = t_coarse.back();
    for (int k = 0; k < n; ++k) {
      double u = stratified ? (k + rng.uniform()) / n : (k + 0.5) / n;
      out[k] = lo + u * (hi - lo);
    }
    return out;
  }

  for (size_t i = 0; i <= m; ++i) cdf[i] /= total;
  for (int k = 0; k < n; ++k) {
    double u = stratified ? (k + rng.uniform()) / n : (k + 0.5) / n;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    size_t j = std::min<size_t>(std::max<ptrdiff_t>(0, it - cdf.begin() - 1), m - 1);
    double denom = cdf[j + 1] - cdf[j];
    double frac = denom > 0 ? (u - cdf[j]) / denom : 0.5;
    out[k] = t_coarse[j] + frac * (t_coarse[j + 1] - t_coarse[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Merge foreground/background distances into one ordered sample set with
// contracted positions, region tags, and compositing intervals.
inline SampleSet build_sample_set(const Ray& ray, const SceneBounds& bounds,
                                  const std::vector<double>& t_fg,
                                  const std::vector<double>& t_bg) {
  SampleSet s;
  s.t.resize(t_fg.size() + t_bg.size());
  if (s.t.empty()) fail_runtime("build_sample_set: no samples on ray");
  std::merge(t_fg.begin(), t_fg.end(), t_bg.begin(), t_bg.end(), s.t.begin());

  const size_t n = s.t.size();
  s.positions.resize(n);
  s.deltas.resize(n);
  s.regions.resize(n);
  for (size_t i = 0; i < n; ++i) {
    Vec3 xn = normalize_point(ray.origin + s.t[i] * ray.dir, bounds);
    double pn = lp_norm(xn, bounds.p_norm);
    // boundary tolerance keeps samples placed exactly at the computed ball
    // exit from flapping between regions
    s.regions[i] = pn <= 1.0 + 1e-9 ? Region::Foreground : Region::Background;
    s.positions[i] = contract(xn, bounds);
    s.deltas[i] = i + 1 < n ? s.t[i + 1] - s.t[i] : kLastDelta;
  }
  return s;
}

}  // namespace hnerf
