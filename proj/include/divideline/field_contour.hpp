#pragma once

// Ensemble-averaged prediction maps over a grid and their level-set contours.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "divideline/error.hpp"
#include "divideline/evaluate.hpp"
#include "divideline/geodata.hpp"
#include "divideline/hyperplane.hpp"
#include "divideline/mlp_regressor.hpp"
#include "divideline/parallel.hpp"
#include "divideline/resample.hpp"

namespace divideline {

/// Grid values, NaN on out-of-mask nodes; indexed like grid::index.
struct scalar_field {
  grid nodes;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const noexcept { return values[nodes.index(i, j)]; }
};

/// Network predictions on every in-mask node.
inline std::vector<double> evaluate_on_grid(const network& net, const grid& g) {
  std::vector<double> out(g.size(), std::numeric_limits<double>::quiet_NaN());
  detail::workspace ws(net);
  for (std::size_t j = 0; j < g.n_lat; ++j)
    for (std::size_t i = 0; i < g.n_lon; ++i)
      if (g.inside(i, j)) out[g.index(i, j)] = detail::run_forward(net, g.node(i, j), ws);
  return out;
}

namespace detail {

/// Element-wise mean of `count` vectors produced by member(k). Members are
/// built in parallel in fixed-size chunks and summed in index order, so the
/// result does not depend on the worker count. Memory stays at one chunk.
template <typename Member>
std::vector<double> ordered_mean(std::size_t count, std::size_t length, unsigned threads, Member&& member) {
  constexpr std::size_t chunk = 32;
  std::vector<compensated_sum> acc(length);
  std::vector<std::vector<double>> batch;
  for (std::size_t start = 0; start < count; start += chunk) {
    const std::size_t m = std::min(chunk, count - start);
    batch.assign(m, {});
    parallel_for(m, threads, [&](std::size_t k) { batch[k] = member(start + k); });
    for (const auto& v : batch)
      for (std::size_t n = 0; n < length; ++n) acc[n].add(v[n]);
  }
  std::vector<double> mean(length);
  for (std::size_t n = 0; n < length; ++n) mean[n] = acc[n].value() / static_cast<double>(count);
  return mean;
}

inline std::vector<sample_target> to_targets(std::span<const labeled_point> points) {
  std::vector<sample_target> out;
  out.reserve(points.size());
  // South brand -> 1, north brand -> 0.
  for (const auto& p : points) out.push_back({p.point, p.label == brand_class::south ? 1.0 : 0.0});
  return out;
}

}  // namespace detail

struct brand_field_result {
  scalar_field field;
  /// Mean over members of each member's test classification accuracy.
  double mean_accuracy = 0.0;
  /// Accuracy of the ensemble-mean prediction on the test set.
  double averaged_model_accuracy = 0.0;
  std::vector<double> per_resample_accuracy;
  standardizer scale;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  /// Trained members, kept only when requested.
  std::vector<network> members;
};

/// For every resample index: balanced subsample of the training split,
/// targets 1 (south) / 0 (north), train a network and evaluate it on the
/// grid. The field is the mean over members.
inline brand_field_result brand_field(const store_dataset& dataset, const grid& g, const resample_plan& plan,
                                      const split_spec& spec, const network_arch& arch, const train_config& cfg,
                                      unsigned threads = 1, bool keep_members = false) {
  if (plan.n_resamples < 1) throw error(errc::invalid_argument, "n_resamples must be >= 1");
  validate(arch);
  const auto [train_set, test_set] = split(dataset, spec);
  if (test_set.points.empty()) throw error(errc::test_set_empty, "split left no test points");
  const standardizer scale = fit_standardizer(std::span<const labeled_point>(train_set.points));
  const auto test_targets = detail::to_targets(test_set.points);

  brand_field_result out;
  out.scale = scale;
  out.train_size = train_set.points.size();
  out.test_size = test_set.points.size();
  out.per_resample_accuracy.assign(plan.n_resamples, 0.0);
  if (keep_members) out.members.resize(plan.n_resamples);

  const std::size_t cells = g.size();
  const std::size_t n_test = test_targets.size();
  // Each member contributes its grid values followed by its test predictions.
  const auto mean = detail::ordered_mean(plan.n_resamples, cells + n_test, threads, [&](std::size_t k) {
    const auto sample = make_balanced_sample(train_set, k, plan);
    const auto data = detail::to_targets(sample.points);
    network net = init_network(arch, cfg.reseed_per_index ? stream_seed(cfg.seed, stream::init, k) : cfg.seed);
    net.input_scale = scale;
    net = train(std::move(net), data, cfg);
    out.per_resample_accuracy[k] = classify_accuracy(net, test_targets);
    std::vector<double> v = evaluate_on_grid(net, g);
    v.reserve(cells + n_test);
    for (const auto& t : test_targets) v.push_back(forward(net, t.point));
    if (keep_members) out.members[k] = std::move(net);
    return v;
  });

  out.field.nodes = g;
  out.field.values.assign(mean.begin(), mean.begin() + static_cast<std::ptrdiff_t>(cells));
  std::size_t correct = 0;
  for (std::size_t t = 0; t < n_test; ++t)
    correct += ((mean[cells + t] >= 0.5 ? 1.0 : 0.0) == test_targets[t].target) ? 1 : 0;
  out.averaged_model_accuracy = static_cast<double>(correct) / static_cast<double>(n_test);
  compensated_sum acc;
  for (const auto a : out.per_resample_accuracy) acc.add(a);
  out.mean_accuracy = acc.value() / static_cast<double>(plan.n_resamples);
  return out;
}

// ---------------------------------------------------------------------------
// Income map

struct minmax_scaling {
  std::vector<double> scaled;
  double lo = 0.0;
  double hi = 1.0;

  double apply(double v) const noexcept { return (v - lo) / (hi - lo); }
  double invert(double s) const noexcept { return lo + s * (hi - lo); }
};

/// Affine map sending the minimum to 0 and the maximum to 1.
inline minmax_scaling scale_minmax(std::span<const double> values) {
  if (values.empty()) throw error(errc::all_equal, "no values to scale");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  minmax_scaling s;
  s.lo = *lo_it;
  s.hi = *hi_it;
  if (!(s.hi > s.lo)) throw error(errc::all_equal, "all values equal; cannot scale");
  s.scaled.reserve(values.size());
  for (const auto v : values) s.scaled.push_back(v == s.hi ? 1.0 : s.apply(v));
  return s;
}

struct gdhi_field_result {
  scalar_field field;
  /// Contour level: the national mean on the scaled axis.
  double level = 0.0;
  /// Mean over members of 1 - mean |prediction - target| on scaled test targets.
  double score = 0.0;
  /// Mean over members of the coefficient of determination on the test set.
  double r2 = 0.0;
  std::vector<double> per_member_score;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

/// Scales income to [0, 1], holds out a test share of regions, trains
/// `n_members` networks from different seeds on the rest and averages their
/// grid predictions.
inline gdhi_field_result gdhi_field(const income_dataset& income, const grid& g, const network_arch& arch,
                                    const train_config& cfg, std::size_t n_members = 10, double train_fraction = 0.8,
                                    std::uint64_t split_seed = 0, unsigned threads = 1) {
  if (income.records.size() < 5)
    throw error(errc::test_set_empty, "need at least 5 income records for a holdout split");
  if (n_members < 1) throw error(errc::invalid_argument, "n_members must be >= 1");
  validate(arch);
  std::vector<double> raw;
  for (const auto& r : income.records) raw.push_back(r.gdhi);
  const auto scaling = scale_minmax(raw);

  const auto parts = split_indices(income.records.size(), train_fraction, split_seed);
  if (parts.test.empty()) throw error(errc::test_set_empty, "split left no test regions");
  std::vector<sample_target> train_data, test_data;
  std::vector<geo_point> train_points;
  for (const auto k : parts.train) {
    train_data.push_back({income.records[k].centroid, scaling.scaled[k]});
    train_points.push_back(income.records[k].centroid);
  }
  for (const auto k : parts.test) test_data.push_back({income.records[k].centroid, scaling.scaled[k]});
  const standardizer scale = fit_standardizer(std::span<const geo_point>(train_points));

  gdhi_field_result out;
  out.lo = scaling.lo;
  out.hi = scaling.hi;
  out.level = scaling.apply(income.national_mean);
  out.train_size = train_data.size();
  out.test_size = test_data.size();
  out.per_member_score.assign(n_members, 0.0);
  std::vector<double> member_r2(n_members, 0.0);

  double test_mean = 0.0;
  for (const auto& t : test_data) test_mean += t.target;
  test_mean /= static_cast<double>(test_data.size());

  const auto mean = detail::ordered_mean(n_members, g.size(), threads, [&](std::size_t k) {
    network net = init_network(arch, stream_seed(cfg.seed, stream::init, k));
    net.input_scale = scale;
    net = train(std::move(net), train_data, cfg);
    double abs_err = 0.0, ss_res = 0.0, ss_tot = 0.0;
    for (const auto& t : test_data) {
      const double e = forward(net, t.point) - t.target;
      abs_err += std::abs(e);
      ss_res += e * e;
      ss_tot += (t.target - test_mean) * (t.target - test_mean);
    }
    out.per_member_score[k] = 1.0 - abs_err / static_cast<double>(test_data.size());
    member_r2[k] = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : std::numeric_limits<double>::quiet_NaN();
    return evaluate_on_grid(net, g);
  });

  out.field = {g, mean};
  compensated_sum score, r2;
  for (std::size_t k = 0; k < n_members; ++k) {
    score.add(out.per_member_score[k]);
    r2.add(member_r2[k]);
  }
  out.score = score.value() / static_cast<double>(n_members);
  out.r2 = r2.value() / static_cast<double>(n_members);
  return out;
}

// ---------------------------------------------------------------------------
// Marching squares

/// A contour with, for every vertex, the id of the grid edge it lies on.
/// Edge ids: 2 * index(i, j) for the edge (i, j)-(i+1, j), plus 1 for the
/// edge (i, j)-(i, j+1).
struct traced_contour {
  polyline line;
  std::vector<std::uint64_t> edges;
  bool closed = false;
};

/// End nodes (i0, j0), (i1, j1) of a grid edge.
inline std::array<std::size_t, 4> edge_nodes(const grid& g, std::uint64_t edge) noexcept {
  const std::size_t node = static_cast<std::size_t>(edge / 2);
  const std::size_t i = node % g.n_lon, j = node / g.n_lon;
  return (edge % 2 == 0) ? std::array<std::size_t, 4>{i, j, i + 1, j} : std::array<std::size_t, 4>{i, j, i, j + 1};
}

/// Linear interpolation of the level crossing along an edge.
inline geo_point edge_crossing(const scalar_field& f, std::uint64_t edge, double level) noexcept {
  const auto [i0, j0, i1, j1] = edge_nodes(f.nodes, edge);
  const double v0 = f.at(i0, j0), v1 = f.at(i1, j1);
  const double t = (level - v0) / (v1 - v0);
  const geo_point a = f.nodes.node(i0, j0), b = f.nodes.node(i1, j1);
  return {std::lerp(a.lon, b.lon, t), std::lerp(a.lat, b.lat, t)};
}

/// Marching squares over every cell whose four nodes carry values. Nodes at
/// or above the level count as above. Saddle cells join the corners that
/// share the class of the cell-centre mean. Segments are chained into
/// maximal polylines; closed loops repeat their first vertex.
inline std::vector<traced_contour> trace_contours(const scalar_field& f, double level) {
  if (!std::isfinite(level)) throw error(errc::invalid_argument, "contour level must be finite");
  const grid& g = f.nodes;
  std::map<std::uint64_t, std::vector<std::uint64_t>> links;
  auto connect = [&](std::uint64_t a, std::uint64_t b) {
    links[a].push_back(b);
    links[b].push_back(a);
  };
  auto h_edge = [&](std::size_t i, std::size_t j) { return std::uint64_t{2} * g.index(i, j); };
  auto v_edge = [&](std::size_t i, std::size_t j) { return std::uint64_t{2} * g.index(i, j) + 1; };

  for (std::size_t j = 0; j + 1 < g.n_lat; ++j) {
    for (std::size_t i = 0; i + 1 < g.n_lon; ++i) {
      const double v[4] = {f.at(i, j), f.at(i + 1, j), f.at(i + 1, j + 1), f.at(i, j + 1)};
      if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3])) continue;
      bool up[4];
      int code = 0;
      for (int k = 0; k < 4; ++k) {
        up[k] = v[k] >= level;
        code |= up[k] ? (1 << k) : 0;
      }
      if (code == 0 || code == 15) continue;
      // Edges: 0 bottom (c0-c1), 1 right (c1-c2), 2 top (c3-c2), 3 left (c0-c3).
      const std::uint64_t e[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
      if (code == 5 || code == 10) {
        const bool centre_up = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
        if (up[0] == centre_up) {
          connect(e[0], e[1]);  // isolate c1
          connect(e[2], e[3]);  // isolate c3
        } else {
          connect(e[3], e[0]);  // isolate c0
          connect(e[1], e[2]);  // isolate c2
        }
        continue;
      }
      std::uint64_t hit[2];
      int n = 0;
      if (up[0] != up[1]) hit[n++] = e[0];
      if (up[1] != up[2]) hit[n++] = e[1];
      if (up[3] != up[2]) hit[n++] = e[2];
      if (up[0] != up[3]) hit[n++] = e[3];
      connect(hit[0], hit[1]);
    }
  }

  std::vector<traced_contour> out;
  std::map<std::uint64_t, bool> visited;
  auto walk = [&](std::uint64_t start, bool loop) {
    traced_contour c;
    std::vector<std::uint64_t> chain{start};
    visited[start] = true;
    std::uint64_t cur = start;
    for (;;) {
      const auto& next = links[cur];
      const auto it = std::find_if(next.begin(), next.end(), [&](std::uint64_t e) { return !visited[e]; });
      if (it == next.end()) break;
      cur = *it;
      visited[cur] = true;
      chain.push_back(cur);
    }
    if (loop && chain.size() > 2) {
      c.closed = true;
      chain.push_back(start);
    }
    for (const auto e : chain) {
      const geo_point p = edge_crossing(f, e, level);
      if (!c.line.points.empty() && c.line.points.back() == p) continue;
      c.line.points.push_back(p);
      c.edges.push_back(e);
    }
    if (c.line.points.size() >= 2) out.push_back(std::move(c));
  };
  for (const auto& [edge, next] : links)
    if (next.size() == 1 && !visited[edge]) walk(edge, false);
  // Whatever remains is made of closed rings.
  for (const auto& [edge, next] : links)
    if (!visited[edge]) walk(edge, true);
  if (out.empty()) throw error(errc::no_crossing, "no cell straddles level " + std::to_string(level));
  return out;
}

inline std::vector<polyline> extract_contours(const scalar_field& f, double level) {
  std::vector<polyline> out;
  for (auto& c : trace_contours(f, level)) out.push_back(std::move(c.line));
  return out;
}

/// Index of the longest contour by great-circle length; ties go to the one
/// whose first vertex lies furthest west.
inline std::size_t principal_index(std::span<const polyline> contours) {
  if (contours.empty()) throw error(errc::invalid_argument, "no contours");
  std::size_t best = 0;
  double best_len = polyline_length_km(contours[0]);
  for (std::size_t k = 1; k < contours.size(); ++k) {
    const double len = polyline_length_km(contours[k]);
    const double slack = 1e-12 * std::max(len, best_len);
    if (len > best_len + slack) {
      best = k;
      best_len = len;
    } else if (std::abs(len - best_len) <= slack) {
      const auto& a = contours[k].points.front();
      const auto& b = contours[best].points.front();
      if (a.lon < b.lon || (a.lon == b.lon && a.lat < b.lat)) {
        best = k;
        best_len = std::max(len, best_len);
      }
    }
  }
  return best;
}

inline polyline principal_contour(std::span<const polyline> contours) {
  return contours[principal_index(contours)];
}

}  // namespace divideline
