#pragma once

// Accuracy accounting, great-circle distances and line comparison reports.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "divideline/error.hpp"
#include "divideline/geodata.hpp"
#include "divideline/hyperplane.hpp"

namespace divideline {

inline constexpr double earth_radius_km = 6371.0088;
inline constexpr double km_per_mile = 1.609344;

inline double haversine_km(const geo_point& a, const geo_point& b) noexcept {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double s1 = std::sin(0.5 * dlat);
  const double s2 = std::sin(0.5 * dlon);
  const double h = s1 * s1 + std::cos(a.lat * rad) * std::cos(b.lat * rad) * s2 * s2;
  return 2.0 * earth_radius_km * std::atan2(std::sqrt(h), std::sqrt(std::max(0.0, 1.0 - h)));
}

inline double polyline_length_km(const polyline& line) noexcept {
  double total = 0.0;
  for (std::size_t k = 1; k < line.points.size(); ++k) total += haversine_km(line.points[k - 1], line.points[k]);
  return total;
}

/// Nearest point of segment [a, b] to p, found in an equirectangular plane
/// centred on p.
inline geo_point nearest_on_segment(const geo_point& p, const geo_point& a, const geo_point& b) noexcept {
  const double k = std::cos(p.lat * std::numbers::pi / 180.0);
  const double ax = (a.lon - p.lon) * k, ay = a.lat - p.lat;
  const double dx = (b.lon - a.lon) * k, dy = b.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return a;
  const double t = std::clamp(-(ax * dx + ay * dy) / len2, 0.0, 1.0);
  return {a.lon + t * (b.lon - a.lon), a.lat + t * (b.lat - a.lat)};
}

/// Distance from p to the closest point of the line, km. Never exceeds the
/// distance to the nearest vertex.
inline double point_to_polyline_km(const geo_point& p, const polyline& line) {
  if (line.points.empty()) throw error(errc::invalid_argument, "empty polyline");
  double best = haversine_km(p, line.points.front());
  for (std::size_t k = 1; k < line.points.size(); ++k) {
    const auto& a = line.points[k - 1];
    const auto& b = line.points[k];
    best = std::min({best, haversine_km(p, b), haversine_km(p, nearest_on_segment(p, a, b))});
  }
  return best;
}

/// n points spaced uniformly by great-circle arc length, both ends included.
inline std::vector<geo_point> sample_by_arc_length(const polyline& line, std::size_t n) {
  if (line.points.size() < 2 || n < 2) throw error(errc::invalid_argument, "sampling needs >= 2 points");
  std::vector<double> cumulative{0.0};
  for (std::size_t k = 1; k < line.points.size(); ++k)
    cumulative.push_back(cumulative.back() + haversine_km(line.points[k - 1], line.points[k]));
  const double total = cumulative.back();
  std::vector<geo_point> out;
  out.reserve(n);
  std::size_t seg = 1;
  for (std::size_t s = 0; s < n; ++s) {
    if (s == n - 1) {
      out.push_back(line.points.back());
      break;
    }
    const double target = total * static_cast<double>(s) / static_cast<double>(n - 1);
    while (seg + 1 < cumulative.size() && cumulative[seg] < target) ++seg;
    const double len = cumulative[seg] - cumulative[seg - 1];
    const double t = len > 0.0 ? std::clamp((target - cumulative[seg - 1]) / len, 0.0, 1.0) : 0.0;
    const auto& a = line.points[seg - 1];
    const auto& b = line.points[seg];
    out.push_back({std::lerp(a.lon, b.lon, t), std::lerp(a.lat, b.lat, t)});
  }
  return out;
}

struct discrepancy {
  double mean_km = 0.0;
  double max_km = 0.0;
  double hausdorff_km = 0.0;
};

/// Mean and max of the distance from points sampled along `a` to `b`; the
/// Hausdorff value takes the larger of both directed maxima.
inline discrepancy line_discrepancy(const polyline& a, const polyline& b, std::size_t n_samples) {
  if (n_samples < 2) throw error(errc::invalid_argument, "n_samples must be >= 2");
  if (a.points.size() < 2 || b.points.size() < 2) throw error(errc::invalid_argument, "lines need >= 2 points");
  if (a == b) return {};
  discrepancy d;
  double sum = 0.0;
  for (const auto& p : sample_by_arc_length(a, n_samples)) {
    const double km = point_to_polyline_km(p, b);
    sum += km;
    d.max_km = std::max(d.max_km, km);
  }
  d.mean_km = sum / static_cast<double>(n_samples);
  double back = 0.0;
  for (const auto& p : sample_by_arc_length(b, n_samples)) back = std::max(back, point_to_polyline_km(p, a));
  d.hausdorff_km = std::max(d.max_km, back);
  return d;
}

/// Share of test points whose sign of decision value matches the label; a
/// decision value of exactly zero predicts the north class.
inline double svm_accuracy(const hyperplane& h, const store_dataset& test) {
  if (test.points.empty()) throw error(errc::test_set_empty, "svm_accuracy on empty test set");
  std::size_t correct = 0;
  for (const auto& p : test.points) correct += h.classify(p.point) == p.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(test.points.size());
}

// ---------------------------------------------------------------------------
// Landmarks and comparison reports

struct landmark {
  std::string name;
  geo_point point;
};

/// `name,lat,lon` rows.
inline std::vector<landmark> load_landmarks_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  const auto cols = detail::header_columns<3>(in, path, {"name", "lat", "lon"});
  std::vector<landmark> out;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto fields = detail::split_csv_line(line);
    if (fields.size() <= *std::max_element(cols.begin(), cols.end()))
      throw error(errc::malformed_row, where + ": expected 3 fields");
    out.push_back({fields[cols[0]], detail::checked_point(fields[cols[1]], fields[cols[2]], where)});
  }
  return out;
}

struct named_line {
  std::string name;
  polyline line;
};

struct line_pair_discrepancy {
  std::string a;
  std::string b;
  discrepancy metrics;
};

struct comparison_report {
  /// line name -> landmark name -> km
  std::map<std::string, std::map<std::string, double>> landmark_distances;
  std::vector<line_pair_discrepancy> line_discrepancies;
  std::map<std::string, double> accuracies;
};

inline comparison_report build_report(const std::vector<named_line>& lines, const std::vector<landmark>& landmarks,
                                      const std::optional<reference_line>& reference,
                                      const std::map<std::string, double>& accuracies,
                                      std::size_t n_samples = 200) {
  if (lines.empty()) throw error(errc::invalid_argument, "build_report needs at least one line");
  comparison_report report;
  report.accuracies = accuracies;
  std::vector<named_line> all = lines;
  if (reference) all.push_back({reference->name, reference->line});
  for (const auto& l : all)
    for (const auto& m : landmarks) report.landmark_distances[l.name][m.name] = point_to_polyline_km(m.point, l.line);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      report.line_discrepancies.push_back({all[i].name, all[j].name, line_discrepancy(all[i].line, all[j].line, n_samples)});
  return report;
}

inline nlohmann::json to_json(const comparison_report& r) {
  nlohmann::json j;
  j["landmark_distances_km"] = r.landmark_distances;
  j["accuracies"] = r.accuracies;
  auto pairs = nlohmann::json::array();
  for (const auto& p : r.line_discrepancies)
    pairs.push_back({{"a", p.a},
                     {"b", p.b},
                     {"mean_km", p.metrics.mean_km},
                     {"max_km", p.metrics.max_km},
                     {"hausdorff_km", p.metrics.hausdorff_km}});
  j["line_discrepancies"] = pairs;
  return j;
}

inline comparison_report report_from_json(const nlohmann::json& j) {
  comparison_report r;
  r.landmark_distances = j.at("landmark_distances_km").get<std::map<std::string, std::map<std::string, double>>>();
  r.accuracies = j.at("accuracies").get<std::map<std::string, double>>();
  for (const auto& p : j.at("line_discrepancies"))
    r.line_discrepancies.push_back({p.at("a").get<std::string>(),
                                    p.at("b").get<std::string>(),
                                    {p.at("mean_km").get<double>(), p.at("max_km").get<double>(),
                                     p.at("hausdorff_km").get<double>()}});
  return r;
}

}  // namespace divideline
