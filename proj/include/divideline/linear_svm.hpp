#pragma once

// Soft-margin linear SVM on standardized coordinates, trained by SMO on the
// dual, plus ensemble averaging of resample-trained hyperplanes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "divideline/error.hpp"
#include "divideline/evaluate.hpp"
#include "divideline/geodata.hpp"
#include "divideline/hyperplane.hpp"
#include "divideline/parallel.hpp"
#include "divideline/resample.hpp"

namespace divideline {

struct svm_config {
  double c = 1.0;
  double tol = 1e-4;
  /// Iteration cap is max_passes * sample size.
  std::size_t max_passes = 1000;
};

struct svm_fit {
  hyperplane plane;
  bool converged = true;
  std::size_t iterations = 0;
  std::size_t support_vectors = 0;
};

/// Solves min 1/2 a'Qa - e'a s.t. y'a = 0, 0 <= a <= c with a linear kernel,
/// selecting working pairs by the second-order rule. The weight vector is
/// kept explicitly, so each iteration is O(n).
inline svm_fit train_svm(std::span<const labeled_point> sample, const standardizer& scale, const svm_config& cfg) {
  if (!(cfg.c > 0.0) || !(cfg.tol > 0.0)) throw error(errc::invalid_argument, "svm needs c > 0 and tol > 0");
  const std::size_t n = sample.size();
  std::vector<vec2> x(n);
  std::vector<double> y(n);
  bool has_pos = false, has_neg = false;
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = scale.apply(sample[k].point);
    y[k] = sign_of(sample[k].label);
    (y[k] > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw error(errc::empty_class, "svm training needs both classes");

  constexpr double tau = 1e-12;
  const double c = cfg.c;
  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  vec2 w{0.0, 0.0};
  const std::size_t max_iter = std::max<std::size_t>(cfg.max_passes * n, 1000);

  svm_fit fit;
  fit.converged = false;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    for (std::size_t t = 0; t < n; ++t) grad[t] = y[t] * dot(w, x[t]) - 1.0;

    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (alpha[t] < c && -grad[t] >= gmax) gmax = -grad[t], i = t;
      } else {
        if (alpha[t] > 0 && grad[t] >= gmax) gmax = grad[t], i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n && i < n; ++t) {
      double grad_diff;
      if (y[t] > 0) {
        if (!(alpha[t] > 0)) continue;
        gmax2 = std::max(gmax2, grad[t]);
        grad_diff = gmax + grad[t];
      } else {
        if (!(alpha[t] < c)) continue;
        gmax2 = std::max(gmax2, -grad[t]);
        grad_diff = gmax - grad[t];
      }
      if (grad_diff > 0) {
        const vec2 d{x[i][0] - x[t][0], x[i][1] - x[t][1]};
        const double quad = std::max(dot(d, d), tau);
        const double obj = -(grad_diff * grad_diff) / quad;
        if (obj <= best_obj) best_obj = obj, j = t;
      }
    }
    if (i == n || j == n || gmax + gmax2 < cfg.tol) {
      fit.converged = true;
      break;
    }

    const double old_i = alpha[i], old_j = alpha[j];
    const vec2 d{x[i][0] - x[j][0], x[i][1] - x[j][1]};
    const double quad = std::max(dot(d, d), tau);
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = diff;
      } else {
        if (alpha[i] < 0) alpha[i] = 0, alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) alpha[i] = c, alpha[j] = c - diff;
      } else {
        if (alpha[j] > c) alpha[j] = c, alpha[i] = c + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) alpha[i] = c, alpha[j] = sum - c;
      } else {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) alpha[j] = c, alpha[i] = sum - c;
      } else {
        if (alpha[i] < 0) alpha[i] = 0, alpha[j] = sum;
      }
    }
    const double di = (alpha[i] - old_i) * y[i];
    const double dj = (alpha[j] - old_j) * y[j];
    w[0] += di * x[i][0] + dj * x[j][0];
    w[1] += di * x[i][1] + dj * x[j][1];
  }
  fit.iterations = iter;

  for (std::size_t t = 0; t < n; ++t) grad[t] = y[t] * dot(w, x[t]) - 1.0;
  // Offset: mean over free multipliers, else midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
    if (alpha[t] > 0) ++fit.support_vectors;
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

  const double len = norm(w);
  if (!(len > 1e-12) || !std::isfinite(len))
    throw error(errc::degenerate_hyperplane, "solver returned a zero weight vector");
  hyperplane h{{w[0] / len, w[1] / len}, -rho / len, scale};

  double pos = 0.0, neg = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double f = dot(h.w, x[t]) + h.b;
    (y[t] > 0 ? pos : neg) += f;
    ++(y[t] > 0 ? n_pos : n_neg);
  }
  if (pos / static_cast<double>(n_pos) < neg / static_cast<double>(n_neg)) {
    h.w = {-h.w[0], -h.w[1]};
    h.b = -h.b;
  }
  fit.plane = h;
  return fit;
}

inline svm_fit train_svm(const balanced_sample& sample, const standardizer& scale, const svm_config& cfg) {
  return train_svm(std::span<const labeled_point>(sample.points), scale, cfg);
}

/// Sign-aligns every plane to the first, averages the unit normals and
/// offsets, and rescales so the averaged decision function has a unit normal.
inline hyperplane average_hyperplane(std::span<const hyperplane> planes) {
  if (planes.empty()) throw error(errc::empty_ensemble, "no hyperplanes to average");
  const auto& first = planes.front();
  compensated_sum w0, w1, bsum;
  for (const auto& h : planes) {
    if (!(h.scale == first.scale))
      throw error(errc::invalid_argument, "hyperplanes to average must share one standardizer");
    const double s = dot(h.w, first.w) < 0.0 ? -1.0 : 1.0;
    w0.add(s * h.w[0]);
    w1.add(s * h.w[1]);
    bsum.add(s * h.b);
  }
  const auto n = static_cast<double>(planes.size());
  const vec2 mean_w{w0.value() / n, w1.value() / n};
  const double len = norm(mean_w);
  if (len < 1e-6) throw error(errc::cancellation_degenerate, "averaged normal vanishes");
  return {{mean_w[0] / len, mean_w[1] / len}, bsum.value() / n / len, first.scale};
}

struct svm_result {
  hyperplane plane;
  /// Mean over resamples of each member's test accuracy.
  double mean_accuracy = 0.0;
  /// Test accuracy of the averaged hyperplane.
  double averaged_model_accuracy = 0.0;
  std::vector<double> per_resample_accuracy;
  std::size_t non_converged = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

/// One split; every resample index trains on a balanced subsample of the
/// training set; member planes are averaged.
inline svm_result svm_pipeline(const store_dataset& dataset, const resample_plan& plan, const split_spec& spec,
                               const svm_config& cfg, unsigned threads = 1) {
  if (plan.n_resamples < 1) throw error(errc::invalid_argument, "n_resamples must be >= 1");
  const auto [train, test] = split(dataset, spec);
  if (test.points.empty()) throw error(errc::test_set_empty, "split left no test points");
  const standardizer scale = fit_standardizer(std::span<const labeled_point>(train.points));

  std::vector<svm_fit> fits(plan.n_resamples);
  parallel_for(plan.n_resamples, threads, [&](std::size_t k) {
    fits[k] = train_svm(make_balanced_sample(train, k, plan), scale, cfg);
  });

  svm_result out;
  out.train_size = train.points.size();
  out.test_size = test.points.size();
  std::vector<hyperplane> planes;
  planes.reserve(fits.size());
  compensated_sum acc;
  for (const auto& f : fits) {
    planes.push_back(f.plane);
    const double a = svm_accuracy(f.plane, test);
    out.per_resample_accuracy.push_back(a);
    acc.add(a);
    if (!f.converged) ++out.non_converged;
  }
  out.plane = average_hyperplane(planes);
  out.mean_accuracy = acc.value() / static_cast<double>(fits.size());
  out.averaged_model_accuracy = svm_accuracy(out.plane, test);
  return out;
}

/// Zero level set of the decision function in (lon, lat), clipped to the
/// box. Returns the two border points of the segment.
inline polyline hyperplane_to_polyline(const hyperplane& h, const bbox& box) {
  // a*lon + c*lat + d = 0
  const double a = h.w[0] / h.scale.sd[0];
  const double c = h.w[1] / h.scale.sd[1];
  const double d = h.b - a * h.scale.mean[0] - c * h.scale.mean[1];
  if (!(std::abs(a) + std::abs(c) > 0.0)) throw error(errc::degenerate_hyperplane, "zero normal");

  std::vector<geo_point> hits;
  auto add = [&](geo_point p) {
    for (const auto& q : hits)
      if (q == p) return;
    hits.push_back(p);
  };
  if (c != 0.0) {
    for (const double lon : {box.lon_min, box.lon_max}) {
      const double lat = -(a * lon + d) / c;
      if (lat >= box.lat_min && lat <= box.lat_max) add({lon, lat});
    }
  }
  if (a != 0.0) {
    for (const double lat : {box.lat_min, box.lat_max}) {
      const double lon = -(c * lat + d) / a;
      if (lon >= box.lon_min && lon <= box.lon_max) add({lon, lat});
    }
  }
  if (hits.size() < 2) throw error(errc::no_intersection, "dividing line misses the bounding box");
  // Corner hits can produce near-duplicates; keep the farthest pair.
  std::size_t bi = 0, bj = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < hits.size(); ++i)
    for (std::size_t j = i + 1; j < hits.size(); ++j) {
      const double dd = std::hypot(hits[i].lon - hits[j].lon, hits[i].lat - hits[j].lat);
      if (dd > best) best = dd, bi = i, bj = j;
    }
  if (!(best > 0.0)) throw error(errc::no_intersection, "dividing line only touches the bounding box");
  geo_point p = hits[bi], q = hits[bj];
  if (q.lon < p.lon || (q.lon == p.lon && q.lat < p.lat)) std::swap(p, q);
  return {{p, q}};
}

inline polyline hyperplane_to_polyline(const hyperplane& h, const grid& g) { return hyperplane_to_polyline(h, g.box); }

}  // namespace divideline
