#pragma once

// Geospatial inputs: store points, regional income records, landmass
// boundaries, reference lines and evaluation grids.
//
// Coordinates are (lon, lat) everywhere in memory. CSV files carry (lat, lon)
// columns; the loaders and writers swap.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "divideline/error.hpp"
#include "divideline/random.hpp"

namespace divideline {

struct geo_point {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const geo_point&, const geo_point&) = default;
};

inline bool is_valid(const geo_point& p) noexcept {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat >= -90.0 && p.lat <= 90.0;
}

/// +1 is the north-associated brand, -1 the south-associated one.
enum class brand_class : int { north = 1, south = -1 };

constexpr double sign_of(brand_class c) noexcept { return static_cast<int>(c); }

struct labeled_point {
  geo_point point;
  brand_class label = brand_class::north;

  friend bool operator==(const labeled_point&, const labeled_point&) = default;
};

struct store_dataset {
  std::vector<labeled_point> points;
  /// [0] maps to brand_class::north, [1] to brand_class::south.
  std::array<std::string, 2> brand_names{"North", "South"};

  std::size_t count(brand_class c) const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [c](const labeled_point& p) { return p.label == c; }));
  }

  friend bool operator==(const store_dataset&, const store_dataset&) = default;
};

struct income_record {
  std::string region_name;
  geo_point centroid;
  double gdhi = 0.0;
};

struct income_dataset {
  std::vector<income_record> records;
  double national_mean = 0.0;
};

using ring = std::vector<geo_point>;

struct polygon {
  ring outer;
  std::vector<ring> holes;
};

struct landmass_mask {
  std::vector<polygon> polygons;
  /// Covers the whole plane; used when no boundary file is given.
  bool everywhere = false;

  static landmass_mask whole_plane() {
    landmass_mask m;
    m.everywhere = true;
    return m;
  }

  std::size_t ring_count() const {
    std::size_t n = 0;
    for (const auto& poly : polygons) n += 1 + poly.holes.size();
    return n;
  }
};

struct bbox {
  double lon_min = 0.0;
  double lon_max = 0.0;
  double lat_min = 0.0;
  double lat_max = 0.0;

  bool contains(const geo_point& p) const noexcept {
    return p.lon >= lon_min && p.lon <= lon_max && p.lat >= lat_min && p.lat <= lat_max;
  }

  friend bool operator==(const bbox&, const bbox&) = default;
};

/// Covers England including the Isles of Scilly.
inline constexpr bbox england_bbox{-6.4, 1.8, 49.9, 55.9};

struct grid {
  bbox box;
  std::size_t n_lon = 0;
  std::size_t n_lat = 0;
  /// 1 where the node lies inside the landmass, indexed by index(i, j).
  std::vector<std::uint8_t> mask;

  std::size_t size() const noexcept { return n_lon * n_lat; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * n_lon + i; }

  double lon_at(std::size_t i) const noexcept {
    return std::lerp(box.lon_min, box.lon_max, static_cast<double>(i) / static_cast<double>(n_lon - 1));
  }
  double lat_at(std::size_t j) const noexcept {
    return std::lerp(box.lat_min, box.lat_max, static_cast<double>(j) / static_cast<double>(n_lat - 1));
  }
  geo_point node(std::size_t i, std::size_t j) const noexcept { return {lon_at(i), lat_at(j)}; }
  bool inside(std::size_t i, std::size_t j) const noexcept { return mask[index(i, j)] != 0; }

  std::size_t inside_count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
  }
};

struct polyline {
  std::vector<geo_point> points;

  friend bool operator==(const polyline&, const polyline&) = default;
};

struct reference_line {
  std::string name;
  polyline line;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\xEF' ||
                        s.front() == '\xBB' || s.front() == '\xBF'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in || std::filesystem::is_directory(path)) throw error(errc::missing_file, path.string());
  return in;
}

/// Reads the header and returns the column index of every required name.
template <std::size_t N>
std::array<std::size_t, N> header_columns(std::istream& in, const std::filesystem::path& path,
                                          const std::array<std::string_view, N>& names) {
  std::string line;
  if (!std::getline(in, line)) throw error(errc::malformed_row, path.string() + ":1: empty file");
  const auto cols = split_csv_line(line);
  std::array<std::size_t, N> where{};
  for (std::size_t k = 0; k < N; ++k) {
    const auto it = std::find(cols.begin(), cols.end(), names[k]);
    if (it == cols.end())
      throw error(errc::malformed_row, path.string() + ":1: missing column '" + std::string(names[k]) + "'");
    where[k] = static_cast<std::size_t>(it - cols.begin());
  }
  return where;
}

inline geo_point checked_point(std::string_view lat_text, std::string_view lon_text, const std::string& where) {
  const auto lat = parse_double(lat_text);
  const auto lon = parse_double(lon_text);
  if (!lat || !lon) throw error(errc::malformed_row, where + ": unparseable coordinate");
  const geo_point p{*lon, *lat};
  if (!is_valid(p))
    throw error(errc::coordinate_out_of_range,
                where + ": lat=" + std::string(lat_text) + " lon=" + std::string(lon_text));
  return p;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::malformed_row, path.string() + ": " + e.what());
  }
}

/// Every geometry object in a GeoJSON document (Feature, FeatureCollection
/// or bare geometry), with the properties of its enclosing feature.
inline void collect_geometries(const nlohmann::json& doc, const nlohmann::json& props,
                               std::vector<std::pair<nlohmann::json, nlohmann::json>>& out) {
  if (!doc.is_object() || !doc.contains("type")) return;
  const std::string type = doc.at("type").get<std::string>();
  if (type == "FeatureCollection") {
    for (const auto& f : doc.value("features", nlohmann::json::array())) collect_geometries(f, props, out);
  } else if (type == "Feature") {
    const auto p = doc.value("properties", nlohmann::json::object());
    if (doc.contains("geometry") && !doc.at("geometry").is_null())
      collect_geometries(doc.at("geometry"), p.is_null() ? nlohmann::json::object() : p, out);
  } else if (type == "GeometryCollection") {
    for (const auto& g : doc.value("geometries", nlohmann::json::array())) collect_geometries(g, props, out);
  } else {
    out.emplace_back(doc, props);
  }
}

inline geo_point position(const nlohmann::json& pos, const std::string& where) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
    throw error(errc::malformed_row, where + ": bad position");
  const geo_point p{pos[0].get<double>(), pos[1].get<double>()};
  if (!is_valid(p)) throw error(errc::coordinate_out_of_range, where);
  return p;
}

inline double cross(const geo_point& o, const geo_point& a, const geo_point& b) noexcept {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

inline bool on_segment(const geo_point& p, const geo_point& a, const geo_point& b) noexcept {
  const double scale = std::max({std::abs(a.lon - b.lon), std::abs(a.lat - b.lat), 1e-300});
  if (std::abs(cross(a, b, p)) > 1e-12 * scale * scale) return false;
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) && p.lat >= std::min(a.lat, b.lat) &&
         p.lat <= std::max(a.lat, b.lat);
}

inline bool segments_cross(const geo_point& a, const geo_point& b, const geo_point& c, const geo_point& d) noexcept {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  return (d1 == 0 && on_segment(a, c, d)) || (d2 == 0 && on_segment(b, c, d)) || (d3 == 0 && on_segment(c, a, b)) ||
         (d4 == 0 && on_segment(d, a, b));
}

inline bool self_intersects(const ring& r) {
  const std::size_t n = r.size() - 1;  // closed: r[n] == r[0]
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = r[i];
    const auto& b = r[i + 1];
    const double lo_lon = std::min(a.lon, b.lon), hi_lon = std::max(a.lon, b.lon);
    const double lo_lat = std::min(a.lat, b.lat), hi_lat = std::max(a.lat, b.lat);
    for (std::size_t k = i + 2; k < n; ++k) {
      if (i == 0 && k == n - 1) continue;  // adjacent through the closing vertex
      const auto& c = r[k];
      const auto& d = r[k + 1];
      if (std::max(c.lon, d.lon) < lo_lon || std::min(c.lon, d.lon) > hi_lon || std::max(c.lat, d.lat) < lo_lat ||
          std::min(c.lat, d.lat) > hi_lat)
        continue;
      if (segments_cross(a, b, c, d)) return true;
    }
  }
  return false;
}

inline ring read_ring(const nlohmann::json& coords, const std::string& where) {
  if (!coords.is_array()) throw error(errc::malformed_row, where + ": ring is not an array");
  ring r;
  r.reserve(coords.size() + 1);
  for (const auto& pos : coords) r.push_back(position(pos, where));
  if (r.empty() || !(r.front() == r.back())) {
    if (!r.empty()) r.push_back(r.front());
  }
  if (r.size() < 4) throw error(errc::degenerate_ring, where + ": fewer than 4 vertices after closure");
  if (self_intersects(r)) throw error(errc::degenerate_ring, where + ": ring self-intersects");
  return r;
}

inline polygon read_polygon(const nlohmann::json& rings, const std::string& where) {
  if (!rings.is_array() || rings.empty()) throw error(errc::degenerate_ring, where + ": polygon without rings");
  polygon poly;
  poly.outer = read_ring(rings[0], where);
  for (std::size_t k = 1; k < rings.size(); ++k) poly.holes.push_back(read_ring(rings[k], where));
  return poly;
}

/// Even-odd crossing parity of a horizontal ray from p against ring r.
inline bool ray_parity(const geo_point& p, const ring& r) noexcept {
  bool odd = false;
  for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
    const auto& a = r[i];
    const auto& b = r[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) odd = !odd;
    }
  }
  return odd;
}

inline bool on_ring(const geo_point& p, const ring& r) noexcept {
  for (std::size_t i = 0; i + 1 < r.size(); ++i)
    if (on_segment(p, r[i], r[i + 1])) return true;
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Store locations

/// Loads `brand,lat,lon` rows. Exact (lon, lat, label) duplicates are dropped,
/// keeping the first occurrence.
inline store_dataset load_store_csv(const std::filesystem::path& path, const std::string& north_brand,
                                    const std::string& south_brand) {
  auto in = detail::open_input(path);
  const auto cols = detail::header_columns<3>(in, path, {"brand", "lat", "lon"});
  store_dataset ds;
  ds.brand_names = {north_brand, south_brand};
  std::set<std::tuple<double, double, int>> seen;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto fields = detail::split_csv_line(line);
    if (fields.size() <= *std::max_element(cols.begin(), cols.end()))
      throw error(errc::malformed_row, where + ": expected " + std::to_string(cols.size()) + " fields");
    const std::string& brand = fields[cols[0]];
    brand_class label;
    if (brand == north_brand)
      label = brand_class::north;
    else if (brand == south_brand)
      label = brand_class::south;
    else
      throw error(errc::unknown_brand, where + ": '" + brand + "'");
    const geo_point p = detail::checked_point(fields[cols[1]], fields[cols[2]], where);
    if (seen.emplace(p.lon, p.lat, static_cast<int>(label)).second) ds.points.push_back({p, label});
  }
  if (ds.count(brand_class::north) < 2 || ds.count(brand_class::south) < 2)
    throw error(errc::fewer_than_two_per_class,
                path.string() + ": " + std::to_string(ds.count(brand_class::north)) + " " + north_brand + ", " +
                    std::to_string(ds.count(brand_class::south)) + " " + south_brand);
  return ds;
}

inline void write_store_csv(std::ostream& out, const store_dataset& ds) {
  out << "brand,lat,lon\n";
  for (const auto& p : ds.points) {
    out << (p.label == brand_class::north ? ds.brand_names[0] : ds.brand_names[1]) << ','
        << detail::format_double(p.point.lat) << ',' << detail::format_double(p.point.lon) << '\n';
  }
}

inline void write_store_csv(const std::filesystem::path& path, const store_dataset& ds) {
  std::ofstream out(path);
  if (!out) throw error(errc::missing_file, "cannot write " + path.string());
  write_store_csv(out, ds);
}

// ---------------------------------------------------------------------------
// Regional income

/// Loads `region,lat,lon,gdhi` rows. The national mean defaults to the
/// unweighted mean of the gdhi column.
inline income_dataset load_income_csv(const std::filesystem::path& path,
                                      std::optional<double> national_mean = std::nullopt) {
  auto in = detail::open_input(path);
  const auto cols = detail::header_columns<4>(in, path, {"region", "lat", "lon", "gdhi"});
  income_dataset ds;
  std::set<std::string> names;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto fields = detail::split_csv_line(line);
    if (fields.size() <= *std::max_element(cols.begin(), cols.end()))
      throw error(errc::malformed_row, where + ": expected 4 fields");
    income_record rec;
    rec.region_name = fields[cols[0]];
    rec.centroid = detail::checked_point(fields[cols[1]], fields[cols[2]], where);
    const auto gdhi = detail::parse_double(fields[cols[3]]);
    if (!gdhi) throw error(errc::malformed_row, where + ": unparseable gdhi");
    if (!(*gdhi > 0.0) || !std::isfinite(*gdhi)) throw error(errc::non_positive_income, where);
    rec.gdhi = *gdhi;
    if (!names.insert(rec.region_name).second) throw error(errc::duplicate_region, where + ": " + rec.region_name);
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.empty()) throw error(errc::malformed_row, path.string() + ": no records");
  if (national_mean) {
    ds.national_mean = *national_mean;
  } else {
    double sum = 0.0;
    for (const auto& r : ds.records) sum += r.gdhi;
    ds.national_mean = sum / static_cast<double>(ds.records.size());
  }
  return ds;
}

inline void write_income_csv(std::ostream& out, const income_dataset& ds) {
  out << "region,lat,lon,gdhi\n";
  for (const auto& r : ds.records)
    out << r.region_name << ',' << detail::format_double(r.centroid.lat) << ','
        << detail::format_double(r.centroid.lon) << ',' << detail::format_double(r.gdhi) << '\n';
}

// ---------------------------------------------------------------------------
// Boundaries and reference lines

/// Reads every Polygon / MultiPolygon in a GeoJSON document. Rings missing
/// their closing vertex are closed.
inline landmass_mask load_boundary(const std::filesystem::path& path) {
  const auto doc = detail::read_json(path);
  std::vector<std::pair<nlohmann::json, nlohmann::json>> geoms;
  detail::collect_geometries(doc, nlohmann::json::object(), geoms);
  landmass_mask mask;
  const std::string where = path.string();
  for (const auto& [g, props] : geoms) {
    const std::string type = g.value("type", "");
    if (type == "Polygon") {
      mask.polygons.push_back(detail::read_polygon(g.at("coordinates"), where));
    } else if (type == "MultiPolygon") {
      for (const auto& rings : g.at("coordinates")) mask.polygons.push_back(detail::read_polygon(rings, where));
    }
  }
  if (mask.polygons.empty()) throw error(errc::not_a_polygon, where + ": no Polygon or MultiPolygon geometry");
  return mask;
}

/// Loads the first LineString of a GeoJSON document, preferring the feature
/// whose `rank` property is 0 when ranks are present.
inline reference_line load_reference_line(const std::filesystem::path& path) {
  const auto doc = detail::read_json(path);
  std::vector<std::pair<nlohmann::json, nlohmann::json>> geoms;
  detail::collect_geometries(doc, nlohmann::json::object(), geoms);
  const nlohmann::json* chosen = nullptr;
  const nlohmann::json* chosen_props = nullptr;
  for (const auto& [g, props] : geoms) {
    if (g.value("type", "") != "LineString") continue;
    const bool principal = props.contains("rank") && props.at("rank") == 0;
    if (chosen == nullptr || principal) {
      chosen = &g;
      chosen_props = &props;
      if (principal) break;
    }
  }
  if (chosen == nullptr) throw error(errc::malformed_row, path.string() + ": no LineString geometry");
  reference_line ref;
  ref.name = chosen_props->contains("name") && chosen_props->at("name").is_string()
                 ? chosen_props->at("name").get<std::string>()
                 : path.stem().string();
  for (const auto& pos : chosen->at("coordinates")) {
    const geo_point p = detail::position(pos, path.string());
    if (ref.line.points.empty() || !(ref.line.points.back() == p)) ref.line.points.push_back(p);
  }
  if (ref.line.points.size() < 2) throw error(errc::malformed_row, path.string() + ": line needs 2 distinct points");
  return ref;
}

// ---------------------------------------------------------------------------
// Masks and grids

/// Even-odd rule over all rings of each polygon; points on any ring count as
/// inside; holes subtract.
inline bool point_in_mask(const geo_point& p, const landmass_mask& mask) noexcept {
  if (mask.everywhere) return true;
  for (const auto& poly : mask.polygons) {
    if (detail::on_ring(p, poly.outer)) return true;
    bool odd = detail::ray_parity(p, poly.outer);
    for (const auto& hole : poly.holes) {
      if (detail::on_ring(p, hole)) return true;
      if (detail::ray_parity(p, hole)) odd = !odd;
    }
    if (odd) return true;
  }
  return false;
}

inline grid make_grid(const bbox& box, std::size_t n_lon, std::size_t n_lat, const landmass_mask& mask) {
  if (n_lon < 2 || n_lat < 2) throw error(errc::degenerate_bbox, "grid needs at least 2 nodes per axis");
  if (!(box.lon_max > box.lon_min) || !(box.lat_max > box.lat_min) || !std::isfinite(box.lon_min) ||
      !std::isfinite(box.lon_max) || !std::isfinite(box.lat_min) || !std::isfinite(box.lat_max))
    throw error(errc::degenerate_bbox, "bbox must have lon_min < lon_max and lat_min < lat_max");
  grid g;
  g.box = box;
  g.n_lon = n_lon;
  g.n_lat = n_lat;
  g.mask.resize(n_lon * n_lat);
  for (std::size_t j = 0; j < n_lat; ++j)
    for (std::size_t i = 0; i < n_lon; ++i) g.mask[g.index(i, j)] = point_in_mask(g.node(i, j), mask) ? 1 : 0;
  return g;
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

/// Two isotropic Gaussian clusters at `center` +/- separation/2 in latitude;
/// north-brand points first.
inline store_dataset synth_two_brand(std::size_t n_north, std::size_t n_south, double separation, double noise_sd,
                                     std::uint64_t seed, geo_point center = {-1.5, 52.5},
                                     std::array<std::string, 2> brand_names = {"North", "South"}) {
  if (n_north < 2 || n_south < 2) throw error(errc::invalid_argument, "synth_two_brand needs >= 2 points per class");
  if (!(noise_sd >= 0.0)) throw error(errc::invalid_argument, "noise_sd must be >= 0");
  auto gen = make_rng(seed, stream::synth);
  std::normal_distribution<double> normal(0.0, 1.0);
  store_dataset ds;
  ds.brand_names = std::move(brand_names);
  auto emit = [&](std::size_t n, double lat0, brand_class label) {
    for (std::size_t k = 0; k < n; ++k) {
      const double dlon = normal(gen) * noise_sd;
      const double dlat = normal(gen) * noise_sd;
      ds.points.push_back({{center.lon + dlon, lat0 + dlat}, label});
    }
  };
  emit(n_north, center.lat + 0.5 * separation, brand_class::north);
  emit(n_south, center.lat - 0.5 * separation, brand_class::south);
  return ds;
}

/// Regions on a jittered lattice over `box` with income rising towards the
/// south-east plus a metropolitan bump. For demos and tests only.
inline income_dataset synth_income(std::size_t n_regions, std::uint64_t seed, const bbox& box = england_bbox) {
  if (n_regions < 2) throw error(errc::invalid_argument, "synth_income needs >= 2 regions");
  auto gen = make_rng(seed, stream::synth, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const geo_point metro{-0.1276, 51.5072};
  income_dataset ds;
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_regions))));
  for (std::size_t k = 0; k < n_regions; ++k) {
    const double u = (static_cast<double>(k % side) + 0.2 + 0.6 * unit(gen)) / static_cast<double>(side);
    const double v = (static_cast<double>(k / side) + 0.2 + 0.6 * unit(gen)) / static_cast<double>(side);
    const geo_point c{std::lerp(box.lon_min, box.lon_max, u), std::lerp(box.lat_min, box.lat_max, v)};
    const double d2 = (c.lon - metro.lon) * (c.lon - metro.lon) + (c.lat - metro.lat) * (c.lat - metro.lat);
    const double gdhi = 17000.0 + 1500.0 * (box.lat_max - c.lat) + 9000.0 * std::exp(-d2 / 0.8) + 400.0 * normal(gen);
    ds.records.push_back({"region-" + std::to_string(k + 1), c, std::max(gdhi, 1000.0)});
  }
  double sum = 0.0;
  for (const auto& r : ds.records) sum += r.gdhi;
  ds.national_mean = sum / static_cast<double>(ds.records.size());
  return ds;
}

}  // namespace divideline
