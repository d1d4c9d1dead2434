// Copyright (c) 2026 hnerf contributors
// SPDX-License-Identifier: Apache-2.0
//
// Trainable feature encoders. A multi-resolution hash-grid covers the whole
// contracted volume; three orthogonal multi-resolution dense 2D planes add
// structured high-resolution features; the hybrid concatenates both.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hnerf/common.hpp"
#include "hnerf/rng.hpp"

namespace hnerf {

struct HashGridConfig {
  int levels = 16;
  int64_t table_size = int64_t(1) << 19;  // power of two
  int feat_dim = 2;
  int res_min = 16;
  int res_max = 2048;
  double domain_radius = 2.0;  // contracted space lives in [-r, r]^3

  // N_l = floor(res_min * g^l) with g chosen so the top level lands exactly
  // on res_max.
  std::vector<int> level_resolutions() const {
    std::vector<int> res(levels);
    if (levels == 1) {
      res[0] = res_min;
      return res;
    }
    double g = std::exp(std::log(double(res_max) / res_min) / (levels - 1));
    for (int l = 0; l < levels; ++l)
      res[l] = int(std::floor(res_min * std::pow(g, l) + 1e-6));
    return res;
  }

  int output_dim() const { return levels * feat_dim; }

  void validate() const {
    if (levels < 1) fail_validation("hash grid: levels must be >= 1");
    if (table_size < 1 || (table_size & (table_size - 1)) != 0)
      fail_validation("hash grid: table_size must be a power of two");
    if (feat_dim < 1) fail_validation("hash grid: feat_dim must be >= 1");
    if (res_min < 1 || res_max < res_min) fail_validation("hash grid: bad resolution range");
    if (levels > 1 && res_max == res_min)
      fail_validation("hash grid: res_max must exceed res_min for multiple levels");
  }
};

// Levels whose full dense grid fits the table budget are indexed directly;
// only the fine levels hash.
inline int64_t hash_table_entries(int resolution, int64_t table_size) {
  int64_t dense = int64_t(resolution + 1) * (resolution + 1) * (resolution + 1);
  return std::min(dense, table_size);
}

inline int64_t hash_index(int x, int y, int z, int resolution, int64_t table_size) {
  int64_t side = resolution + 1;
  if (side * side * side <= table_size) {
    return x + side * (y + side * z);  // row-major, x fastest
  }
  uint32_t h = uint32_t(x) * 1u ^ uint32_t(y) * 2654435761u ^ uint32_t(z) * 805459861u;
  return int64_t(h & uint32_t(table_size - 1));
}

struct PlaneSetConfig {
  std::vector<int> resolutions = {128, 256, 512, 1024};
  int feat_dim = 2;
  double vertical_scale = 1.0;  // stretches the altitude axis of XZ/YZ planes
  double domain_radius = 2.0;

  int output_dim() const { return 3 * int(resolutions.size()) * feat_dim; }

  void validate() const {
    if (resolutions.empty()) fail_validation("plane set: need at least one resolution");
    for (int r : resolutions)
      if (r < 1) fail_validation("plane set: resolutions must be >= 1");
    if (feat_dim < 1) fail_validation("plane set: feat_dim must be >= 1");
    if (!(vertical_scale >= 1.0)) fail_validation("plane set: vertical_scale must be >= 1");
  }
};

namespace detail {

// Maps a contracted coordinate in [-r, r] to the unit interval, with a small
// tolerance for accumulated floating-point drift at the rim.
inline double to_unit(double v, double radius) {
  double u = (v / radius + 1.0) * 0.5;
  if (u < 0.0 || u > 1.0) {
    if (u < -1e-6 || u > 1.0 + 1e-6) fail_runtime("encoder: query outside contracted domain");
    u = u < 0.0 ? 0.0 : 1.0;
  }
  return u;
}

struct CellCoord {
  int i;       // lower lattice coordinate, in [0, N-1]
  double f;    // fractional offset in [0, 1]
};

inline CellCoord locate(double unit, int resolution) {
  double pos = unit * resolution;
  int i = int(pos);
  if (i >= resolution) i = resolution - 1;  // unit == 1 interpolates at the top node
  return {i, pos - i};
}

}  // namespace detail

template <class S>
struct HashGrid {
  HashGridConfig config;
  std::vector<int> resolutions;
  std::vector<int64_t> level_offset;  // entry offset per level, plus total at the end
  std::vector<S> table;               // flat [entry][feat]

  explicit HashGrid(const HashGridConfig& cfg = {}) : config(cfg) {
    config.validate();
    resolutions = config.level_resolutions();
    level_offset.resize(config.levels + 1, 0);
    for (int l = 0; l < config.levels; ++l)
      level_offset[l + 1] = level_offset[l] + hash_table_entries(resolutions[l], config.table_size);
    table.assign(size_t(level_offset.back()) * config.feat_dim, S(0));
  }

  int64_t param_count() const { return level_offset.back() * config.feat_dim; }
  int output_dim() const { return config.output_dim(); }

  void init(Rng& rng, double scale = 1e-4) {
    for (auto& v : table) v = S(rng.uniform(-scale, scale));
  }

  // Trilinear interpolation of the 8 surrounding entries per level,
  // concatenated over levels into `out` (length levels * feat_dim).
  void encode(const Vec3& x_c, S* out) const {
    const int F = config.feat_dim;
    double ux = detail::to_unit(x_c.x, config.domain_radius);
    double uy = detail::to_unit(x_c.y, config.domain_radius);
    double uz = detail::to_unit(x_c.z, config.domain_radius);
    for (int l = 0; l < config.levels; ++l) {
      int N = resolutions[l];
      auto cx = detail::locate(ux, N);
      auto cy = detail::locate(uy, N);
      auto cz = detail::locate(uz, N);
      S* dst = out + size_t(l) * F;
      for (int c = 0; c < F; ++c) dst[c] = S(0);
      const S* tab = table.data() + size_t(level_offset[l]) * F;
      for (int corner = 0; corner < 8; ++corner) {
        int dx = corner & 1, dy = (corner >> 1) & 1, dz = corner >> 2;
        double w = (dx ? cx.f : 1 - cx.f) * (dy ? cy.f : 1 - cy.f) * (dz ? cz.f : 1 - cz.f);
        int64_t idx = hash_index(cx.i + dx, cy.i + dy, cz.i + dz, N, config.table_size);
        const S* src = tab + size_t(idx) * F;
        S ws = S(w);
        for (int c = 0; c < F; ++c) dst[c] += ws * src[c];
      }
    }
  }

  // Adjoint of encode: scatter-add d_feature through the interpolation
  // weights into a gradient table of identical shape.
  void encode_backward(const Vec3& x_c, const S* d_feature, HashGrid& grad) const {
    const int F = config.feat_dim;
    double ux = detail::to_unit(x_c.x, config.domain_radius);
    double uy = detail::to_unit(x_c.y, config.domain_radius);
    double uz = detail::to_unit(x_c.z, config.domain_radius);
    for (int l = 0; l < config.levels; ++l) {
      int N = resolutions[l];
      auto cx = detail::locate(ux, N);
      auto cy = detail::locate(uy, N);
      auto cz = detail::locate(uz, N);
      const S* adj = d_feature + size_t(l) * F;
      S* gtab = grad.table.data() + size_t(level_offset[l]) * F;
      for (int corner = 0; corner < 8; ++corner) {
        int dx = corner & 1, dy = (corner >> 1) & 1, dz = corner >> 2;
        double w = (dx ? cx.f : 1 - cx.f) * (dy ? cy.f : 1 - cy.f) * (dz ? cz.f : 1 - cz.f);
        int64_t idx = hash_index(cx.i + dx, cy.i + dy, cz.i + dz, N, config.table_size);
        S* g = gtab + size_t(idx) * F;
        S ws = S(w);
        for (int c = 0; c < F; ++c) g[c] += ws * adj[c];
      }
    }
  }
};

// Three orthogonally placed dense 2D feature planes per level. A query drops
// the orthogonal coordinate of each orientation and reads the plane with
// bilinear interpolation; features are concatenated orientation-major.
template <class S>
struct PlaneSet {
  PlaneSetConfig config;
  std::vector<int64_t> grid_offset;  // per (orientation, level), plus total
  std::vector<S> table;

  explicit PlaneSet(const PlaneSetConfig& cfg = {}) : config(cfg) {
    config.validate();
    const int L = int(config.resolutions.size());
    grid_offset.resize(3 * L + 1, 0);
    for (int o = 0; o < 3; ++o)
      for (int l = 0; l < L; ++l) {
        int64_t side = config.resolutions[l] + 1;
        grid_offset[o * L + l + 1] = grid_offset[o * L + l] + side * side;
      }
    table.assign(size_t(grid_offset.back()) * config.feat_dim, S(0));
  }

  int64_t param_count() const { return grid_offset.back() * config.feat_dim; }
  int output_dim() const { return config.output_dim(); }

  void init(Rng& rng, double scale = 1e-4) {
    for (auto& v : table) v = S(rng.uniform(-scale, scale));
  }

  // Orientation o drops one axis: 0 = XY (drops z), 1 = XZ (drops y),
  // 2 = YZ (drops x). The altitude (z) coordinate of the vertical planes is
  // stretched by vertical_scale before the unit mapping.
  std::pair<double, double> plane_uv(const Vec3& x_c, int o) const {
    const double r = config.domain_radius;
    const double s = config.vertical_scale;
    auto unit_clamped = [&](double v) {
      double u = (v / r + 1.0) * 0.5;
      return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
    };
    switch (o) {
      case 0: return {detail::to_unit(x_c.x, r), detail::to_unit(x_c.y, r)};
      case 1: return {detail::to_unit(x_c.x, r), unit_clamped(x_c.z * s)};
      default: return {detail::to_unit(x_c.y, r), unit_clamped(x_c.z * s)};
    }
  }

  void encode(const Vec3& x_c, S* out) const {
    const int F = config.feat_dim;
    const int L = int(config.resolutions.size());
    for (int o = 0; o < 3; ++o) {
      auto [u, v] = plane_uv(x_c, o);
      for (int l = 0; l < L; ++l) {
        int N = config.resolutions[l];
        auto cu = detail::locate(u, N);
        auto cv = detail::locate(v, N);
        S* dst = out + size_t(o * L + l) * F;
        for (int c = 0; c < F; ++c) dst[c] = S(0);
        const S* tab = table.data() + size_t(grid_offset[o * L + l]) * F;
        int64_t side = N + 1;
        for (int corner = 0; corner < 4; ++corner) {
          int du = corner & 1, dv = corner >> 1;
          double w = (du ? cu.f : 1 - cu.f) * (dv ? cv.f : 1 - cv.f);
          int64_t idx = (cu.i + du) + side * (cv.i + dv);
          const S* src = tab + size_t(idx) * F;
          S ws = S(w);
          for (int c = 0; c < F; ++c) dst[c] += ws * src[c];
        }
      }
    }
  }

  void encode_backward(const Vec3& x_c, const S* d_feature, PlaneSet& grad) const {
    const int F = config.feat_dim;
    const int L = int(config.resolutions.size());
    for (int o = 0; o < 3; ++o) {
      auto [u, v] = plane_uv(x_c, o);
      for (int l = 0; l < L; ++l) {
        int N = config.resolutions[l];
        auto cu = detail::locate(u, N);
        auto cv = detail::locate(v, N);
        const S* adj = d_feature + size_t(o * L + l) * F;
        S* gtab = grad.table.data() + size_t(grid_offset[o * L + l]) * F;
        int64_t side = N + 1;
        for (int corner = 0; corner < 4; ++corner) {
          int du = corner & 1, dv = corner >> 1;
          double w = (du ? cu.f : 1 - cu.f) * (dv ? cv.f : 1 - cv.f);
          int64_t idx = (cu.i + du) + side * (cv.i + dv);
          S* g = gtab + size_t(idx) * F;
          S ws = S(w);
          for (int c = 0; c < F; ++c) g[c] += ws * adj[c];
        }
      }
    }
  }
};

enum class EncoderKind { Hybrid, HashOnly, PlaneOnly };

inline std::string to_string(EncoderKind k) {
  switch (k) {
    case EncoderKind::Hybrid: return "hybrid";
    case EncoderKind::HashOnly: return "hash-only";
    default: return "plane-only";
  }
}

inline EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "hybrid") return EncoderKind::Hybrid;
  if (s == "hash-only") return EncoderKind::HashOnly;
  if (s == "plane-only") return EncoderKind::PlaneOnly;
  fail_validation("unknown encoder kind: " + s);
}

namespace detail {
// Placeholder configs so the unused half of a hash-only / plane-only encoder
// does not allocate real tables.
inline HashGridConfig empty_grid_config() {
  HashGridConfig c;
  c.levels = 1;
  c.table_size = 1;
  c.feat_dim = 1;
  c.res_min = c.res_max = 1;
  return c;
}
inline PlaneSetConfig empty_plane_config() {
  PlaneSetConfig c;
  c.resolutions = {1};
  c.feat_dim = 1;
  return c;
}
}  // namespace detail

// Hybrid feature: [hash-grid levels ; plane features], either part optional.
template <class S>
struct FeatureEncoder {
  EncoderKind kind = EncoderKind::Hybrid;
  HashGrid<S> grid;
  PlaneSet<S> planes;

  FeatureEncoder(EncoderKind k, const HashGridConfig& gc, const PlaneSetConfig& pc)
      : kind(k),
        grid(k != EncoderKind::PlaneOnly ? gc : detail::empty_grid_config()),
        planes(k != EncoderKind::HashOnly ? pc : detail::empty_plane_config()) {}

  bool has_grid() const { return kind != EncoderKind::PlaneOnly; }
  bool has_planes() const { return kind != EncoderKind::HashOnly; }

  int grid_dim() const { return has_grid() ? grid.output_dim() : 0; }
  int plane_dim() const { return has_planes() ? planes.output_dim() : 0; }
  int output_dim() const { return grid_dim() + plane_dim(); }

  int64_t param_count() const {
    return (has_grid() ? grid.param_count() : 0) + (has_planes() ? planes.param_count() : 0);
  }

  void init(Rng& rng, double scale = 1e-4) {
    if (has_grid()) grid.init(rng, scale);
    if (has_planes()) planes.init(rng, scale);
  }

  void encode(const Vec3& x_c, S* out) const {
    if (has_grid()) grid.encode(x_c, out);
    if (has_planes()) planes.encode(x_c, out + grid_dim());
  }

  void encode_backward(const Vec3& x_c, const S* d_feature, FeatureEncoder& grads) const {
    if (has_grid()) grid.encode_backward(x_c, d_feature, grads.grid);
    if (has_planes()) planes.encode_backward(x_c, d_feature + grid_dim(), grads.planes);
  }
};

}  // namespace hnerf
