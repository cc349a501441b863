#pragma once

#include <array>
#include <cmath>
#include <span>

#include "divideline/error.hpp"
#include "divideline/geodata.hpp"

namespace divideline {

using vec2 = std::array<double, 2>;

inline double dot(const vec2& a, const vec2& b) noexcept { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const vec2& a) noexcept { return std::hypot(a[0], a[1]); }

/// Per-axis z-score transform of (lon, lat).
struct standardizer {
  vec2 mean{0.0, 0.0};
  vec2 sd{1.0, 1.0};

  vec2 apply(const geo_point& p) const noexcept { return {(p.lon - mean[0]) / sd[0], (p.lat - mean[1]) / sd[1]}; }
  geo_point invert(const vec2& z) const noexcept { return {z[0] * sd[0] + mean[0], z[1] * sd[1] + mean[1]}; }

  static standardizer identity() noexcept { return {}; }

  friend bool operator==(const standardizer&, const standardizer&) = default;
};

/// Mean and population standard deviation per axis (two-pass).
inline standardizer fit_standardizer(std::span<const geo_point> points) {
  if (points.size() < 2) throw error(errc::zero_variance, "need at least 2 points");
  const auto n = static_cast<double>(points.size());
  vec2 mean{0.0, 0.0};
  for (const auto& p : points) {
    mean[0] += p.lon;
    mean[1] += p.lat;
  }
  mean[0] /= n;
  mean[1] /= n;
  vec2 ss{0.0, 0.0};
  for (const auto& p : points) {
    ss[0] += (p.lon - mean[0]) * (p.lon - mean[0]);
    ss[1] += (p.lat - mean[1]) * (p.lat - mean[1]);
  }
  const vec2 sd{std::sqrt(ss[0] / n), std::sqrt(ss[1] / n)};
  if (!(sd[0] > 0.0) || !(sd[1] > 0.0)) throw error(errc::zero_variance, "an axis has zero variance");
  return {mean, sd};
}

inline standardizer fit_standardizer(std::span<const labeled_point> points) {
  std::vector<geo_point> raw;
  raw.reserve(points.size());
  for (const auto& p : points) raw.push_back(p.point);
  return fit_standardizer(std::span<const geo_point>(raw));
}

/// Linear decision boundary in standardized space. decision() > 0 means the
/// north class.
struct hyperplane {
  vec2 w{0.0, 1.0};
  double b = 0.0;
  standardizer scale;

  double decision(const geo_point& p) const noexcept { return dot(w, scale.apply(p)) + b; }
  brand_class classify(const geo_point& p) const noexcept {
    return decision(p) >= 0.0 ? brand_class::north : brand_class::south;
  }
};

}  // namespace divideline
