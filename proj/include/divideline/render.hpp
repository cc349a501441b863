#pragma once

// Static SVG figures: store scatter, averaged-field heatmap, contour and
// reference lines, landmarks and the landmass outline.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "divideline/error.hpp"
#include "divideline/evaluate.hpp"
#include "divideline/field_contour.hpp"
#include "divideline/geodata.hpp"

namespace divideline {

struct rgb {
  double r = 0, g = 0, b = 0;
};

inline constexpr rgb north_blue{33, 102, 172};
inline constexpr rgb south_red{178, 24, 43};
inline constexpr rgb neutral_white{255, 255, 255};

struct points_layer {
  std::vector<labeled_point> points;
  double radius = 1.5;
};

struct heatmap_layer {
  scalar_field field;
  /// Value rendered as the colormap midpoint.
  double level = 0.5;
  std::optional<double> lo;
  std::optional<double> hi;
};

struct line_layer {
  polyline line;
  std::string color = "#000000";
  double width = 2.0;
  bool dashed = false;
};

struct landmark_layer {
  landmark mark;
};

struct boundary_layer {
  landmass_mask mask;
};

using layer = std::variant<points_layer, heatmap_layer, line_layer, landmark_layer, boundary_layer>;

struct viewport {
  bbox box = england_bbox;
  double width_px = 600.0;
  double height_px = 800.0;
  /// Squeeze x by cos(53 deg) so England is not stretched east-west.
  bool aspect_cos_lat = false;
};

struct scene {
  std::vector<layer> layers;  ///< painted in order
  viewport view;
  std::string title;
};

/// Blue below the level, white at it, red above; linear in between.
inline rgb diverging_color(double v, double level, double lo, double hi) noexcept {
  auto blend = [](const rgb& a, const rgb& b, double t) {
    t = std::clamp(t, 0.0, 1.0);
    return rgb{a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
  };
  if (v == level) return neutral_white;
  if (v < level) return blend(neutral_white, north_blue, level > lo ? (level - v) / (level - lo) : 1.0);
  return blend(neutral_white, south_red, hi > level ? (v - level) / (hi - level) : 1.0);
}

inline std::string hex(const rgb& c) {
  char buf[8];
  auto byte = [](double x) { return static_cast<int>(std::lround(std::clamp(x, 0.0, 255.0))); };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", byte(c.r), byte(c.g), byte(c.b));
  return buf;
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Equirectangular lon/lat -> pixel transform, y pointing down.
struct projector {
  bbox box;
  double sx = 1.0;
  double sy = 1.0;

  double x(double lon) const noexcept { return (lon - box.lon_min) * sx; }
  double y(double lat) const noexcept { return (box.lat_max - lat) * sy; }
};

}  // namespace detail

inline std::string render_svg(const scene& sc) {
  if (sc.layers.empty()) throw error(errc::empty_scene, "scene has no layers");
  const viewport& vp = sc.view;
  if (!(vp.box.lon_max > vp.box.lon_min) || !(vp.box.lat_max > vp.box.lat_min) || !(vp.width_px > 0) ||
      !(vp.height_px > 0))
    throw error(errc::invalid_argument, "degenerate viewport");
  const double squeeze = vp.aspect_cos_lat ? std::cos(53.0 * std::numbers::pi / 180.0) : 1.0;
  const double width = vp.width_px * squeeze;
  const detail::projector pr{vp.box, width / (vp.box.lon_max - vp.box.lon_min),
                             vp.height_px / (vp.box.lat_max - vp.box.lat_min)};
  using detail::num;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width) << "\" height=\""
      << num(vp.height_px) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(vp.height_px) << "\">\n";
  if (!sc.title.empty()) svg << "<title>" << detail::xml_escape(sc.title) << "</title>\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(vp.height_px)
      << "\" fill=\"#f7f7f7\"/>\n";

  for (const auto& l : sc.layers) {
    if (const auto* hm = std::get_if<heatmap_layer>(&l)) {
      const grid& g = hm->field.nodes;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const double v : hm->field.values)
        if (!std::isnan(v)) lo = std::min(lo, v), hi = std::max(hi, v);
      lo = hm->lo.value_or(lo);
      hi = hm->hi.value_or(hi);
      const double dlon = (g.box.lon_max - g.box.lon_min) / static_cast<double>(g.n_lon - 1);
      const double dlat = (g.box.lat_max - g.box.lat_min) / static_cast<double>(g.n_lat - 1);
      svg << "<g class=\"heatmap\" shape-rendering=\"crispEdges\">\n";
      for (std::size_t j = 0; j < g.n_lat; ++j)
        for (std::size_t i = 0; i < g.n_lon; ++i) {
          const double v = hm->field.at(i, j);
          if (std::isnan(v)) continue;
          const double x0 = pr.x(g.lon_at(i) - 0.5 * dlon), y0 = pr.y(g.lat_at(j) + 0.5 * dlat);
          svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(dlon * pr.sx)
              << "\" height=\"" << num(dlat * pr.sy) << "\" fill=\"" << hex(diverging_color(v, hm->level, lo, hi))
              << "\"/>\n";
        }
      svg << "</g>\n";
    } else if (const auto* pts = std::get_if<points_layer>(&l)) {
      svg << "<g class=\"points\" fill-opacity=\"0.8\">\n";
      for (const auto& p : pts->points)
        svg << "<circle cx=\"" << num(pr.x(p.point.lon)) << "\" cy=\"" << num(pr.y(p.point.lat)) << "\" r=\""
            << num(pts->radius) << "\" fill=\"" << hex(p.label == brand_class::north ? north_blue : south_red)
            << "\"/>\n";
      svg << "</g>\n";
    } else if (const auto* ln = std::get_if<line_layer>(&l)) {
      svg << "<polyline fill=\"none\" stroke=\"" << detail::xml_escape(ln->color) << "\" stroke-width=\""
          << num(ln->width) << "\"" << (ln->dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      for (std::size_t k = 0; k < ln->line.points.size(); ++k)
        svg << (k ? " " : "") << num(pr.x(ln->line.points[k].lon)) << ',' << num(pr.y(ln->line.points[k].lat));
      svg << "\"/>\n";
    } else if (const auto* lm = std::get_if<landmark_layer>(&l)) {
      const double x = pr.x(lm->mark.point.lon), y = pr.y(lm->mark.point.lat);
      svg << "<g class=\"landmark\"><circle cx=\"" << num(x) << "\" cy=\"" << num(y)
          << "\" r=\"4.000\" fill=\"#ffd700\" stroke=\"#000000\"/><text x=\"" << num(x + 6.0) << "\" y=\""
          << num(y + 4.0) << "\" font-family=\"sans-serif\" font-size=\"12\">" << detail::xml_escape(lm->mark.name)
          << "</text></g>\n";
    } else if (const auto* bd = std::get_if<boundary_layer>(&l)) {
      svg << "<path class=\"boundary\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1.000\" d=\"";
      bool first = true;
      auto ring_path = [&](const ring& r) {
        for (std::size_t k = 0; k < r.size(); ++k) {
          svg << (first ? "" : " ") << (k == 0 ? "M" : "L") << num(pr.x(r[k].lon)) << ',' << num(pr.y(r[k].lat));
          first = false;
        }
        svg << " Z";
      };
      for (const auto& poly : bd->mask.polygons) {
        ring_path(poly.outer);
        for (const auto& h : poly.holes) ring_path(h);
      }
      svg << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace divideline
