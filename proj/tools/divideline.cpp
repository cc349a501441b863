// Command-line front end: svm, ann, gdhi, compare, render, synth.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "divideline/divideline.hpp"

namespace fs = std::filesystem;
namespace dl = divideline;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_runtime = 3;

struct common_opts {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string stores, north_brand = "Greggs", south_brand = "Pret";
  std::string boundary, landmarks, reference;
  std::vector<double> bbox;
  std::size_t grid_n = 200;
  std::size_t resamples = 1000;
  double train_frac = 0.8;
  std::string out, report, field, model;
};

struct svm_opts {
  double c = 1.0;
  double tol = 1e-4;
  std::size_t max_passes = 1000;
};

struct net_opts {
  std::vector<std::size_t> hidden{10};
  std::string act = "relu";
  double lr = 0.05;
  std::size_t epochs = 2000;
  double l2 = 1e-4;
  std::size_t members = 10;
};

struct compare_opts {
  std::vector<std::string> lines;
  std::vector<std::string> reports;
  std::size_t samples = 200;
};

struct render_opts {
  std::vector<std::string> lines;
  std::optional<double> level;
  double width = 600, height = 800;
  bool aspect = false;
  std::string title;
};

struct synth_opts {
  std::string mode = "stores";
  std::size_t n_north = 500, n_south = 500, n_regions = 40;
  double separation = 1.0, noise = 0.15;
};

struct income_opts {
  std::string income;
  std::optional<double> national_mean;
};

// ---------------------------------------------------------------------------
// Config file: `key = value` lines mirroring long flag names. Keys before any
// `[section]` apply to every subcommand, keys under `[svm]` etc. only to that
// one. They are spliced in ahead of the real arguments, and single-valued
// options keep the last occurrence, so flags given on the command line win.

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

/// Sectioned keys must be valid for their subcommand; shared keys are dropped
/// when the running subcommand has no such option.
std::vector<std::string> config_arguments(const fs::path& path, const std::string& subcommand,
                                          const std::function<bool(const std::string&)>& accepts) {
  std::ifstream in(path);
  if (!in) throw dl::error(dl::errc::missing_file, "cannot open config file " + path.string());
  std::vector<std::string> args;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t(dl::detail::trim(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw dl::error(dl::errc::malformed_row, path.string() + ":" + std::to_string(line_no));
      section = std::string(dl::detail::trim(std::string_view(t).substr(1, t.size() - 2)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw dl::error(dl::errc::malformed_row, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    if (!section.empty() && section != subcommand) continue;
    std::string key(dl::detail::trim(std::string_view(t).substr(0, eq)));
    std::string value = unquote(std::string(dl::detail::trim(std::string_view(t).substr(eq + 1))));
    for (auto& ch : key)
      if (ch == '_') ch = '-';
    if (key == "config" || (section.empty() && !accepts("--" + key))) continue;
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

/// argv with config-file arguments inserted right after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv, const CLI::App& app) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> config;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) config = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) config = args[k].substr(9);
  }
  if (!config || args.empty()) return args;
  if (!fs::exists(*config)) throw dl::error(dl::errc::missing_file, "config file not found: " + *config);
  const auto* sub = app.get_subcommand_no_throw(args.front());
  const auto accepts = [sub](const std::string& flag) { return sub && sub->get_option_no_throw(flag); };
  const auto extra = config_arguments(*config, args.front(), accepts);
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

// ---------------------------------------------------------------------------
// Helpers shared by the pipeline commands

dl::bbox resolve_bbox(const common_opts& o, const std::optional<dl::landmass_mask>& mask) {
  if (o.bbox.size() == 4) return {o.bbox[0], o.bbox[1], o.bbox[2], o.bbox[3]};
  if (!o.bbox.empty()) throw dl::error(dl::errc::invalid_argument, "--bbox takes lon_min lon_max lat_min lat_max");
  if (mask && !mask->everywhere && !mask->polygons.empty()) {
    dl::bbox b{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (const auto& poly : mask->polygons)
      for (const auto& p : poly.outer) {
        b.lon_min = std::min(b.lon_min, p.lon);
        b.lon_max = std::max(b.lon_max, p.lon);
        b.lat_min = std::min(b.lat_min, p.lat);
        b.lat_max = std::max(b.lat_max, p.lat);
      }
    return b;
  }
  return dl::england_bbox;
}

std::optional<dl::landmass_mask> maybe_boundary(const common_opts& o) {
  if (o.boundary.empty()) return std::nullopt;
  return dl::load_boundary(o.boundary);
}

std::vector<dl::landmark> maybe_landmarks(const std::string& path) {
  if (path.empty()) return {};
  return dl::load_landmarks_csv(path);
}

nlohmann::json landmark_json(const dl::polyline& line, const std::vector<dl::landmark>& marks) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& m : marks) j[m.name] = dl::point_to_polyline_km(m.point, line);
  return j;
}

std::string nearest_landmark_text(const dl::polyline& line, const std::vector<dl::landmark>& marks) {
  if (marks.empty()) return "nearest_landmark=n/a";
  double best = INFINITY;
  std::string name;
  for (const auto& m : marks) {
    const double d = dl::point_to_polyline_km(m.point, line);
    if (d < best) best = d, name = m.name;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "nearest_landmark=\"%s\" %.2f km (%.2f mi)", name.c_str(), best, best / dl::km_per_mile);
  return buf;
}

nlohmann::json standardizer_json(const dl::standardizer& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

nlohmann::json reference_json(const common_opts& o, const dl::polyline& line) {
  if (o.reference.empty()) return nullptr;
  const auto ref = dl::load_reference_line(o.reference);
  const auto d = dl::line_discrepancy(line, ref.line, 200);
  return {{"name", ref.name}, {"mean_km", d.mean_km}, {"max_km", d.max_km}, {"hausdorff_km", d.hausdorff_km}};
}

dl::train_config make_train_config(const common_opts& o, const net_opts& n) {
  dl::train_config cfg;
  cfg.learning_rate = n.lr;
  cfg.epochs = n.epochs;
  cfg.seed = o.seed;
  cfg.l2 = n.l2;
  return cfg;
}

dl::network_arch make_arch(const net_opts& n) { return {n.hidden, dl::parse_activation(n.act)}; }

nlohmann::json contour_summary(const std::vector<dl::polyline>& contours, std::size_t principal) {
  return {{"count", contours.size()},
          {"principal_length_km", dl::polyline_length_km(contours[principal])},
          {"principal", dl::coordinates(contours[principal])}};
}

void write_model(const std::string& path, const std::vector<dl::network>& members) {
  if (path.empty()) return;
  auto arr = nlohmann::json::array();
  for (const auto& m : members) arr.push_back(dl::to_json(m));
  dl::write_json(path, {{"members", arr}});
}

// ---------------------------------------------------------------------------
// Subcommands

int run_svm(const common_opts& o, const svm_opts& s) {
  const auto data = dl::load_store_csv(o.stores, o.north_brand, o.south_brand);
  const auto mask = maybe_boundary(o);
  const auto box = resolve_bbox(o, mask);
  const auto marks = maybe_landmarks(o.landmarks);
  const dl::svm_config cfg{s.c, s.tol, s.max_passes};
  const auto res = dl::svm_pipeline(data, {o.resamples, o.seed}, {o.train_frac, true, o.seed}, cfg,
                                    dl::resolve_threads(o.threads));
  const auto line = dl::hyperplane_to_polyline(res.plane, box);
  const double length = dl::polyline_length_km(line);

  if (!o.out.empty()) {
    auto features = nlohmann::json::array();
    features.push_back(dl::line_feature(line, {{"name", "svm"}, {"rank", 0}, {"length_km", length}}));
    dl::write_json(o.out, {{"type", "FeatureCollection"}, {"features", features}});
  }
  if (!o.report.empty()) {
    nlohmann::json r;
    r["name"] = "svm";
    r["accuracy"] = res.mean_accuracy;
    r["averaged_model_accuracy"] = res.averaged_model_accuracy;
    r["per_resample_accuracy"] = res.per_resample_accuracy;
    r["non_converged"] = res.non_converged;
    r["w"] = res.plane.w;
    r["b"] = res.plane.b;
    r["standardizer"] = standardizer_json(res.plane.scale);
    r["train_size"] = res.train_size;
    r["test_size"] = res.test_size;
    r["line"] = dl::coordinates(line);
    r["line_length_km"] = length;
    r["landmark_distances_km"] = landmark_json(line, marks);
    r["reference"] = reference_json(o, line);
    r["config"] = {{"seed", o.seed}, {"resamples", o.resamples}, {"train_frac", o.train_frac}, {"c", s.c},
                   {"tol", s.tol}, {"north_brand", o.north_brand}, {"south_brand", o.south_brand}};
    dl::write_json(o.report, r);
  }
  std::printf("svm: accuracy=%.4f averaged_model_accuracy=%.4f line_length_km=%.1f %s\n", res.mean_accuracy,
              res.averaged_model_accuracy, length, nearest_landmark_text(line, marks).c_str());
  return exit_ok;
}

int run_ann(const common_opts& o, const net_opts& n) {
  const auto data = dl::load_store_csv(o.stores, o.north_brand, o.south_brand);
  const auto mask = maybe_boundary(o);
  const auto box = resolve_bbox(o, mask);
  const auto marks = maybe_landmarks(o.landmarks);
  const auto g = dl::make_grid(box, o.grid_n, o.grid_n, mask.value_or(dl::landmass_mask::whole_plane()));
  const auto res = dl::brand_field(data, g, {o.resamples, o.seed}, {o.train_frac, true, o.seed}, make_arch(n),
                                   make_train_config(o, n), dl::resolve_threads(o.threads), !o.model.empty());
  const double level = 0.5;
  const auto contours = dl::extract_contours(res.field, level);
  const auto principal = dl::principal_index(contours);
  const auto& line = contours[principal];

  if (!o.out.empty()) dl::write_json(o.out, dl::contours_geojson(contours, principal, level, "ann"));
  if (!o.field.empty()) dl::write_field_csv(fs::path(o.field), res.field);
  write_model(o.model, res.members);
  if (!o.report.empty()) {
    nlohmann::json r;
    r["name"] = "ann";
    r["accuracy"] = res.mean_accuracy;
    r["averaged_model_accuracy"] = res.averaged_model_accuracy;
    r["per_resample_accuracy"] = res.per_resample_accuracy;
    r["level"] = level;
    r["standardizer"] = standardizer_json(res.scale);
    r["train_size"] = res.train_size;
    r["test_size"] = res.test_size;
    r["contours"] = contour_summary(contours, principal);
    r["landmark_distances_km"] = landmark_json(line, marks);
    r["reference"] = reference_json(o, line);
    r["config"] = {{"seed", o.seed},     {"resamples", o.resamples},   {"train_frac", o.train_frac},
                   {"hidden", n.hidden}, {"activation", n.act},        {"lr", n.lr},
                   {"epochs", n.epochs}, {"l2", n.l2},                 {"grid_n", o.grid_n},
                   {"north_brand", o.north_brand}, {"south_brand", o.south_brand}};
    dl::write_json(o.report, r);
  }
  std::printf("ann: accuracy=%.4f averaged_model_accuracy=%.4f principal_contour_km=%.1f contours=%zu %s\n",
              res.mean_accuracy, res.averaged_model_accuracy, dl::polyline_length_km(line), contours.size(),
              nearest_landmark_text(line, marks).c_str());
  return exit_ok;
}

int run_gdhi(const common_opts& o, const net_opts& n, const income_opts& inc) {
  const auto income = dl::load_income_csv(inc.income, inc.national_mean);
  const auto mask = maybe_boundary(o);
  const auto box = resolve_bbox(o, mask);
  const auto marks = maybe_landmarks(o.landmarks);
  const auto g = dl::make_grid(box, o.grid_n, o.grid_n, mask.value_or(dl::landmass_mask::whole_plane()));
  const auto res = dl::gdhi_field(income, g, make_arch(n), make_train_config(o, n), n.members, o.train_frac, o.seed,
                                  dl::resolve_threads(o.threads));
  const auto contours = dl::extract_contours(res.field, res.level);
  const auto principal = dl::principal_index(contours);
  const auto& line = contours[principal];

  if (!o.out.empty()) dl::write_json(o.out, dl::contours_geojson(contours, principal, res.level, "gdhi"));
  if (!o.field.empty()) dl::write_field_csv(fs::path(o.field), res.field);
  if (!o.report.empty()) {
    nlohmann::json r;
    r["name"] = "gdhi";
    r["accuracy"] = res.score;
    r["r2"] = res.r2;
    r["per_member_score"] = res.per_member_score;
    r["level"] = res.level;
    r["gdhi_min"] = res.lo;
    r["gdhi_max"] = res.hi;
    r["national_mean"] = income.national_mean;
    r["train_size"] = res.train_size;
    r["test_size"] = res.test_size;
    r["contours"] = contour_summary(contours, principal);
    r["landmark_distances_km"] = landmark_json(line, marks);
    r["reference"] = reference_json(o, line);
    r["config"] = {{"seed", o.seed},     {"members", n.members}, {"train_frac", o.train_frac}, {"hidden", n.hidden},
                   {"activation", n.act}, {"lr", n.lr},          {"epochs", n.epochs},         {"l2", n.l2},
                   {"grid_n", o.grid_n}};
    dl::write_json(o.report, r);
  }
  std::printf("gdhi: score=%.4f r2=%.4f level=%.6f principal_contour_km=%.1f %s\n", res.score, res.r2, res.level,
              dl::polyline_length_km(line), nearest_landmark_text(line, marks).c_str());
  return exit_ok;
}

int run_compare(const common_opts& o, const compare_opts& c) {
  std::vector<dl::named_line> lines;
  std::map<std::string, int> seen;
  for (const auto& path : c.lines) {
    auto ref = dl::load_reference_line(path);
    if (seen[ref.name]++ > 0) ref.name += " (" + fs::path(path).stem().string() + ")";
    lines.push_back({ref.name, ref.line});
  }
  std::map<std::string, double> accuracies;
  for (const auto& path : c.reports) {
    const auto j = dl::detail::read_json(path);
    if (j.contains("name") && j.contains("accuracy")) accuracies[j.at("name").get<std::string>()] = j.at("accuracy");
  }
  std::optional<dl::reference_line> reference;
  if (!o.reference.empty()) reference = dl::load_reference_line(o.reference);
  const auto marks = maybe_landmarks(o.landmarks);
  const auto report = dl::build_report(lines, marks, reference, accuracies, c.samples);
  if (!o.report.empty()) dl::write_json(o.report, dl::to_json(report));
  std::printf("compare: lines=%zu", lines.size());
  for (const auto& p : report.line_discrepancies)
    std::printf(" [%s vs %s: mean %.1f km, hausdorff %.1f km]", p.a.c_str(), p.b.c_str(), p.metrics.mean_km,
                p.metrics.hausdorff_km);
  std::printf(" %s\n", nearest_landmark_text(lines.front().line, marks).c_str());
  return exit_ok;
}

int run_render(const common_opts& o, const render_opts& r) {
  if (o.out.empty()) throw dl::error(dl::errc::invalid_argument, "render needs --out");
  dl::scene sc;
  sc.title = r.title;
  const auto mask = maybe_boundary(o);
  sc.view = {resolve_bbox(o, mask), r.width, r.height, r.aspect};
  double level = 0.5;
  std::optional<dl::polyline> report_line;
  if (!o.report.empty()) {
    const auto j = dl::detail::read_json(o.report);
    if (j.contains("level") && j.at("level").is_number()) level = j.at("level");
    if (j.contains("line")) {
      dl::polyline l;
      for (const auto& p : j.at("line")) l.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      report_line = l;
    } else if (j.contains("contours") && j.at("contours").contains("principal")) {
      dl::polyline l;
      for (const auto& p : j.at("contours").at("principal"))
        l.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      report_line = l;
    }
  }
  if (r.level) level = *r.level;
  if (!o.field.empty()) sc.layers.push_back(dl::heatmap_layer{dl::read_field_csv(o.field), level, {}, {}});
  if (mask) sc.layers.push_back(dl::boundary_layer{*mask});
  if (!o.stores.empty())
    sc.layers.push_back(dl::points_layer{dl::load_store_csv(o.stores, o.north_brand, o.south_brand).points, 1.5});
  if (!o.reference.empty())
    sc.layers.push_back(dl::line_layer{dl::load_reference_line(o.reference).line, "#4d4d4d", 2.0, true});
  if (report_line) sc.layers.push_back(dl::line_layer{*report_line, "#000000", 2.5, false});
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a"};
  for (std::size_t k = 0; k < r.lines.size(); ++k)
    sc.layers.push_back(dl::line_layer{dl::load_reference_line(r.lines[k]).line, palette[k % 4], 2.0, false});
  for (const auto& m : maybe_landmarks(o.landmarks)) sc.layers.push_back(dl::landmark_layer{m});
  const auto svg = dl::render_svg(sc);
  std::ofstream out(o.out);
  if (!out) throw dl::error(dl::errc::missing_file, "cannot write " + o.out);
  out << svg;
  std::printf("render: layers=%zu wrote %s\n", sc.layers.size(), o.out.c_str());
  return exit_ok;
}

int run_synth(const common_opts& o, const synth_opts& s) {
  if (o.out.empty()) throw dl::error(dl::errc::invalid_argument, "synth needs --out");
  if (s.mode == "stores") {
    const auto ds =
        dl::synth_two_brand(s.n_north, s.n_south, s.separation, s.noise, o.seed, {-1.5, 52.5}, {o.north_brand, o.south_brand});
    dl::write_store_csv(fs::path(o.out), ds);
    std::printf("synth: wrote %zu stores to %s\n", ds.points.size(), o.out.c_str());
  } else if (s.mode == "income") {
    const auto inc = dl::synth_income(s.n_regions, o.seed);
    std::ofstream out(o.out);
    if (!out) throw dl::error(dl::errc::missing_file, "cannot write " + o.out);
    dl::write_income_csv(out, inc);
    std::printf("synth: wrote %zu regions to %s (mean %.1f)\n", inc.records.size(), o.out.c_str(), inc.national_mean);
  } else {
    throw dl::error(dl::errc::invalid_argument, "--mode must be stores or income");
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------

void add_seed(CLI::App* app, common_opts& o) {
  app->add_option("--seed", o.seed, "Master RNG seed (required)")->required();
}

void add_threads(CLI::App* app, common_opts& o) {
  app->add_option("--threads", o.threads, "Worker threads (0: DIVIDELINE_THREADS or all cores)");
}

void add_stores(CLI::App* app, common_opts& o, bool required) {
  auto* opt = app->add_option("--stores", o.stores, "Store CSV (brand,lat,lon)")->check(CLI::ExistingFile);
  if (required) opt->required();
  app->add_option("--north-brand", o.north_brand, "Brand labeled north");
  app->add_option("--south-brand", o.south_brand, "Brand labeled south");
}

void add_geometry(CLI::App* app, common_opts& o) {
  app->add_option("--boundary", o.boundary, "Landmass GeoJSON")->check(CLI::ExistingFile);
  app->add_option("--bbox", o.bbox, "lon_min lon_max lat_min lat_max")->expected(4)->delimiter(',');
  app->add_option("--landmarks", o.landmarks, "Landmark CSV (name,lat,lon)")->check(CLI::ExistingFile);
  app->add_option("--reference", o.reference, "Reference line GeoJSON")->check(CLI::ExistingFile);
}

void add_net(CLI::App* app, net_opts& n) {
  app->add_option("--hidden", n.hidden, "Hidden layer sizes")->delimiter(',');
  app->add_option("--activation", n.act, "relu or tanh")->check(CLI::IsMember({"relu", "tanh"}));
  app->add_option("--lr", n.lr, "Learning rate")->check(CLI::PositiveNumber);
  app->add_option("--epochs", n.epochs, "Gradient-descent epochs")->check(CLI::PositiveNumber);
  app->add_option("--l2", n.l2, "Weight decay")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  common_opts o;
  svm_opts s;
  net_opts n;
  compare_opts c;
  render_opts r;
  synth_opts y;
  income_opts inc;
  double level_value = 0.0;

  CLI::App app{"divideline: dividing lines between two store populations"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override it");

  auto* svm = app.add_subcommand("svm", "Averaged linear SVM dividing line");
  auto* ann = app.add_subcommand("ann", "Averaged neural-network field and its 0.5 contour");
  auto* gdhi = app.add_subcommand("gdhi", "Income field and its national-mean contour");
  auto* compare = app.add_subcommand("compare", "Distances between lines and landmarks");
  auto* render = app.add_subcommand("render", "SVG figure");
  auto* synth = app.add_subcommand("synth", "Synthetic store or income data");

  for (auto* sub : {svm, ann, gdhi, compare, render, synth}) {
    sub->add_option("--config", config_path, "key = value config file; flags override it");
    sub->add_option("--out", o.out, "Output file");
  }
  for (auto* sub : {svm, ann, gdhi}) {
    add_seed(sub, o);
    add_threads(sub, o);
    add_geometry(sub, o);
    sub->add_option("--report", o.report, "Report JSON");
    sub->add_option("--train-frac", o.train_frac, "Training share")->check(CLI::Range(0.0, 1.0));
  }
  for (auto* sub : {svm, ann}) {
    add_stores(sub, o, true);
    sub->add_option("--resamples", o.resamples, "Balanced resamples")->check(CLI::PositiveNumber);
  }
  for (auto* sub : {ann, gdhi}) {
    add_net(sub, n);
    sub->add_option("--grid-n", o.grid_n, "Grid nodes per axis")->check(CLI::Range(2, 100000));
    sub->add_option("--field", o.field, "Field CSV output");
  }
  svm->add_option("--c", s.c, "Box constraint")->check(CLI::PositiveNumber);
  svm->add_option("--tol", s.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  svm->add_option("--max-passes", s.max_passes, "Iteration cap per point")->check(CLI::PositiveNumber);
  ann->add_option("--model", o.model, "Dump every trained member as JSON");

  gdhi->add_option("--income", inc.income, "Income CSV (region,lat,lon,gdhi)")->required()->check(CLI::ExistingFile);
  gdhi->add_option("--national-mean", level_value, "Threshold income (default: mean of the file)");
  gdhi->add_option("--members", n.members, "Ensemble size")->check(CLI::PositiveNumber);

  compare->add_option("--lines", c.lines, "Line GeoJSON files")->required()->check(CLI::ExistingFile);
  compare->add_option("--reports", c.reports, "Report JSON files with accuracies")->check(CLI::ExistingFile);
  compare->add_option("--samples", c.samples, "Samples per line for discrepancies")->check(CLI::Range(2, 1000000));
  compare->add_option("--landmarks", o.landmarks, "Landmark CSV")->check(CLI::ExistingFile);
  compare->add_option("--reference", o.reference, "Reference line GeoJSON")->check(CLI::ExistingFile);
  compare->add_option("--report", o.report, "Report JSON output");

  double render_level = 0.0;
  render->add_option("--report", o.report, "Report JSON (line and level)")->check(CLI::ExistingFile);
  render->add_option("--field", o.field, "Field CSV")->check(CLI::ExistingFile);
  render->add_option("--lines", r.lines, "Extra line GeoJSON files")->check(CLI::ExistingFile);
  render->add_option("--level", render_level, "Heatmap midpoint (default: report level or 0.5)");
  add_stores(render, o, false);
  add_geometry(render, o);
  render->add_option("--width", r.width, "Width in px")->check(CLI::PositiveNumber);
  render->add_option("--height", r.height, "Height in px")->check(CLI::PositiveNumber);
  render->add_flag("--aspect-cos-lat", r.aspect, "Squeeze x by cos(53 deg)");
  render->add_option("--title", r.title, "Figure title");

  add_seed(synth, o);
  synth->add_option("--mode", y.mode, "stores or income")->check(CLI::IsMember({"stores", "income"}));
  synth->add_option("--n-north", y.n_north, "North stores");
  synth->add_option("--n-south", y.n_south, "South stores");
  synth->add_option("--n-regions", y.n_regions, "Income regions");
  synth->add_option("--separation", y.separation, "Cluster separation in degrees latitude");
  synth->add_option("--noise", y.noise, "Cluster spread in degrees");
  synth->add_option("--north-brand", o.north_brand, "North brand name");
  synth->add_option("--south-brand", o.south_brand, "South brand name");

  try {
    auto args = expand_config(argc, argv, app);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  } catch (const dl::error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(dl::to_string(e.code())).c_str(), e.what());
    return exit_invalid;
  }
  if (gdhi->count("--national-mean") > 0) inc.national_mean = level_value;
  if (render->count("--level") > 0) r.level = render_level;

  try {
    if (*svm) return run_svm(o, s);
    if (*ann) return run_ann(o, n);
    if (*gdhi) return run_gdhi(o, n, inc);
    if (*compare) return run_compare(o, c);
    if (*render) return run_render(o, r);
    if (*synth) return run_synth(o, y);
  } catch (const dl::error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(dl::to_string(e.code())).c_str(), e.what());
    return dl::is_input_error(e.code()) ? exit_invalid : exit_runtime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_runtime;
  }
  return exit_invalid;
}
