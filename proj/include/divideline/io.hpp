#pragma once

// GeoJSON and CSV output for lines and fields.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "divideline/error.hpp"
#include "divideline/evaluate.hpp"
#include "divideline/field_contour.hpp"
#include "divideline/geodata.hpp"

namespace divideline {

inline nlohmann::json coordinates(const polyline& line) {
  auto coords = nlohmann::json::array();
  for (const auto& p : line.points) coords.push_back({p.lon, p.lat});
  return coords;
}

inline nlohmann::json line_feature(const polyline& line, nlohmann::json properties) {
  return {{"type", "Feature"},
          {"properties", std::move(properties)},
          {"geometry", {{"type", "LineString"}, {"coordinates", coordinates(line)}}}};
}

/// Contours as a FeatureCollection; `rank` 0 marks the principal contour,
/// the rest follow in extraction order.
inline nlohmann::json contours_geojson(const std::vector<polyline>& contours, std::size_t principal, double level,
                                       const std::string& name) {
  auto features = nlohmann::json::array();
  features.push_back(line_feature(contours[principal], {{"name", name},
                                                        {"level", level},
                                                        {"rank", 0},
                                                        {"length_km", polyline_length_km(contours[principal])}}));
  std::size_t rank = 1;
  for (std::size_t k = 0; k < contours.size(); ++k) {
    if (k == principal) continue;
    features.push_back(line_feature(contours[k], {{"name", name},
                                                  {"level", level},
                                                  {"rank", rank++},
                                                  {"length_km", polyline_length_km(contours[k])}}));
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw error(errc::missing_file, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

/// `lon,lat,value` for every node, row by row from the south-west corner;
/// out-of-mask nodes carry `nan`.
inline void write_field_csv(std::ostream& out, const scalar_field& f) {
  out << "lon,lat,value\n";
  const grid& g = f.nodes;
  for (std::size_t j = 0; j < g.n_lat; ++j)
    for (std::size_t i = 0; i < g.n_lon; ++i) {
      const double v = f.at(i, j);
      out << detail::format_double(g.lon_at(i)) << ',' << detail::format_double(g.lat_at(j)) << ','
          << (std::isnan(v) ? std::string("nan") : detail::format_double(v)) << '\n';
    }
}

inline void write_field_csv(const std::filesystem::path& path, const scalar_field& f) {
  std::ofstream out(path);
  if (!out) throw error(errc::missing_file, "cannot write " + path.string());
  write_field_csv(out, f);
}

/// Reads a field written by write_field_csv. The grid is rebuilt from the
/// distinct coordinates; nodes with `nan` become out-of-mask.
inline scalar_field read_field_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  const auto cols = detail::header_columns<3>(in, path, {"lon", "lat", "value"});
  std::vector<std::array<double, 3>> rows;
  std::set<double> lons, lats;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() < 3) throw error(errc::malformed_row, where);
    const auto lon = detail::parse_double(fields[cols[0]]);
    const auto lat = detail::parse_double(fields[cols[1]]);
    if (!lon || !lat) throw error(errc::malformed_row, where);
    double v = std::numeric_limits<double>::quiet_NaN();
    if (fields[cols[2]] != "nan") {
      const auto parsed = detail::parse_double(fields[cols[2]]);
      if (!parsed) throw error(errc::malformed_row, where);
      v = *parsed;
    }
    rows.push_back({*lon, *lat, v});
    lons.insert(*lon);
    lats.insert(*lat);
  }
  if (lons.size() < 2 || lats.size() < 2 || rows.size() != lons.size() * lats.size())
    throw error(errc::malformed_row, path.string() + ": not a complete rectangular grid");
  const std::vector<double> lon_axis(lons.begin(), lons.end()), lat_axis(lats.begin(), lats.end());
  scalar_field f;
  f.nodes.box = {lon_axis.front(), lon_axis.back(), lat_axis.front(), lat_axis.back()};
  f.nodes.n_lon = lon_axis.size();
  f.nodes.n_lat = lat_axis.size();
  f.nodes.mask.assign(f.nodes.size(), 0);
  f.values.assign(f.nodes.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& r : rows) {
    const auto i = static_cast<std::size_t>(std::lower_bound(lon_axis.begin(), lon_axis.end(), r[0]) - lon_axis.begin());
    const auto j = static_cast<std::size_t>(std::lower_bound(lat_axis.begin(), lat_axis.end(), r[1]) - lat_axis.begin());
    f.values[f.nodes.index(i, j)] = r[2];
    f.nodes.mask[f.nodes.index(i, j)] = std::isnan(r[2]) ? 0 : 1;
  }
  return f;
}

/// In-mask nodes as GeoJSON Points with a `value` property.
inline nlohmann::json field_geojson(const scalar_field& f) {
  auto features = nlohmann::json::array();
  const grid& g = f.nodes;
  for (std::size_t j = 0; j < g.n_lat; ++j)
    for (std::size_t i = 0; i < g.n_lon; ++i) {
      const double v = f.at(i, j);
      if (std::isnan(v)) continue;
      features.push_back({{"type", "Feature"},
                          {"properties", {{"value", v}}},
                          {"geometry", {{"type", "Point"}, {"coordinates", {g.lon_at(i), g.lat_at(j)}}}}});
    }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

}  // namespace divideline
