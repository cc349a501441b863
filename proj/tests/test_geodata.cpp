#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <functional>
#include <thread>

#include "divideline/geodata.hpp"
#include "test_util.hpp"

namespace dl = divideline;
using dl::testing::temp_dir;
using dl::testing::write_file;

namespace {

dl::errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const dl::error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected divideline::error";
  return dl::errc::invalid_argument;
}

const char* kSquare = R"({"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1]]]})";

}  // namespace

TEST(StoreCsv, MapsBrandsToLabels) {
  const auto dir = temp_dir("store_map");
  const auto path = write_file(dir / "s.csv",
                               "brand,lat,lon\nGreggs,54.9,-1.6\nGreggs,53.4,-2.2\nGreggs,53.8,-1.5\n"
                               "Pret,51.5,-0.12\nPret,51.45,-2.58\n");
  const auto ds = dl::load_store_csv(path, "Greggs", "Pret");
  ASSERT_EQ(ds.points.size(), 5u);
  EXPECT_EQ(ds.count(dl::brand_class::north), 3u);
  EXPECT_EQ(ds.count(dl::brand_class::south), 2u);
  // (lat, lon) columns become (lon, lat) in memory
  EXPECT_DOUBLE_EQ(ds.points[0].point.lon, -1.6);
  EXPECT_DOUBLE_EQ(ds.points[0].point.lat, 54.9);
  EXPECT_EQ(ds.brand_names[0], "Greggs");
}

TEST(StoreCsv, ColumnOrderFollowsHeader) {
  const auto dir = temp_dir("store_cols");
  const auto path = write_file(dir / "s.csv", "lon,brand,lat\n-1,A,53\n-2,A,54\n0,B,51\n1,B,51.5\n");
  const auto ds = dl::load_store_csv(path, "A", "B");
  EXPECT_EQ(ds.points[0].point, (dl::geo_point{-1, 53}));
}

TEST(StoreCsv, LatitudeOutOfRange) {
  const auto dir = temp_dir("store_range");
  const auto path = write_file(dir / "s.csv", "brand,lat,lon\nGreggs,91.0,0.0\n");
  EXPECT_EQ(code_of([&] { dl::load_store_csv(path, "Greggs", "Pret"); }), dl::errc::coordinate_out_of_range);
}

TEST(StoreCsv, ExactDuplicatesDropped) {
  const auto dir = temp_dir("store_dup");
  const auto path = write_file(dir / "s.csv",
                               "brand,lat,lon\nPret,51.5,-0.12\nPret,51.5,-0.12\nPret,51.6,-0.12\n"
                               "Greggs,54,-1\nGreggs,54,-1.2\nGreggs,51.5,-0.12\n");
  const auto ds = dl::load_store_csv(path, "Greggs", "Pret");
  EXPECT_EQ(ds.count(dl::brand_class::south), 2u);
  // same coordinate under the other label is not a duplicate
  EXPECT_EQ(ds.count(dl::brand_class::north), 3u);
  EXPECT_EQ(ds.points[0].point, (dl::geo_point{-0.12, 51.5}));
  EXPECT_EQ(ds.points[1].point, (dl::geo_point{-0.12, 51.6}));
}

TEST(StoreCsv, Errors) {
  const auto dir = temp_dir("store_err");
  EXPECT_EQ(code_of([&] { dl::load_store_csv(dir / "absent.csv", "A", "B"); }), dl::errc::missing_file);
  const auto unknown = write_file(dir / "u.csv", "brand,lat,lon\nA,50,0\nC,50,1\n");
  EXPECT_EQ(code_of([&] { dl::load_store_csv(unknown, "A", "B"); }), dl::errc::unknown_brand);
  const auto few = write_file(dir / "f.csv", "brand,lat,lon\nA,50,0\nA,51,0\nB,50,1\n");
  EXPECT_EQ(code_of([&] { dl::load_store_csv(few, "A", "B"); }), dl::errc::fewer_than_two_per_class);
  const auto bad = write_file(dir / "b.csv", "brand,lat,lon\nA,50,0\nA,fifty,0\n");
  try {
    dl::load_store_csv(bad, "A", "B");
    FAIL();
  } catch (const dl::error& e) {
    EXPECT_EQ(e.code(), dl::errc::malformed_row);
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
  const auto header = write_file(dir / "h.csv", "name,lat,lon\nA,50,0\n");
  EXPECT_EQ(code_of([&] { dl::load_store_csv(header, "A", "B"); }), dl::errc::malformed_row);
}

TEST(StoreCsv, RoundTripProperty) {
  const auto dir = temp_dir("store_rt");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto ds = dl::synth_two_brand(3 + seed, 5 + 2 * seed, 0.7, 0.3, seed, {-1.0, 52.0}, {"Greggs", "Pret"});
    const auto path = dir / ("rt" + std::to_string(seed) + ".csv");
    dl::write_store_csv(path, ds);
    EXPECT_EQ(dl::load_store_csv(path, "Greggs", "Pret"), ds);
  }
}

TEST(IncomeCsv, ItlFixtureAndDefaultMean) {
  const auto dir = temp_dir("income");
  std::ostringstream csv;
  dl::write_income_csv(csv, dl::synth_income(43, 7));
  const auto ds = dl::load_income_csv(write_file(dir / "itl2.csv", csv.str()));
  EXPECT_EQ(ds.records.size(), 43u);

  const auto two = dl::load_income_csv(write_file(dir / "two.csv", "region,lat,lon,gdhi\nA,53,-1,10000\nB,51,0,30000\n"));
  EXPECT_DOUBLE_EQ(two.national_mean, 20000.0);
  const auto overridden =
      dl::load_income_csv(write_file(dir / "two2.csv", "region,lat,lon,gdhi\nA,53,-1,10000\nB,51,0,30000\n"), 21962.0);
  EXPECT_DOUBLE_EQ(overridden.national_mean, 21962.0);
}

TEST(IncomeCsv, Errors) {
  const auto dir = temp_dir("income_err");
  const auto dup = write_file(dir / "d.csv",
                              "region,lat,lon,gdhi\nGreater Manchester,53.5,-2.2,18000\nGreater Manchester,53.4,-2.3,19000\n");
  EXPECT_EQ(code_of([&] { dl::load_income_csv(dup); }), dl::errc::duplicate_region);
  const auto neg = write_file(dir / "n.csv", "region,lat,lon,gdhi\nA,53,-1,0\n");
  EXPECT_EQ(code_of([&] { dl::load_income_csv(neg); }), dl::errc::non_positive_income);
  EXPECT_EQ(code_of([&] { dl::load_income_csv(dir / "none.csv"); }), dl::errc::missing_file);
}

TEST(Boundary, ClosesRings) {
  const auto dir = temp_dir("boundary");
  const auto mask = dl::load_boundary(write_file(dir / "sq.geojson", kSquare));
  ASSERT_EQ(mask.ring_count(), 1u);
  EXPECT_EQ(mask.polygons[0].outer.size(), 5u);
  EXPECT_EQ(mask.polygons[0].outer.front(), mask.polygons[0].outer.back());
}

TEST(Boundary, RejectsNonPolygonsAndDegenerateRings) {
  const auto dir = temp_dir("boundary_err");
  const auto point = write_file(dir / "p.geojson", R"({"type":"Point","coordinates":[0,0]})");
  EXPECT_EQ(code_of([&] { dl::load_boundary(point); }), dl::errc::not_a_polygon);
  const auto thin = write_file(dir / "t.geojson", R"({"type":"Polygon","coordinates":[[[0,0],[1,0]]]})");
  EXPECT_EQ(code_of([&] { dl::load_boundary(thin); }), dl::errc::degenerate_ring);
  const auto bowtie = write_file(dir / "b.geojson", R"({"type":"Polygon","coordinates":[[[0,0],[1,1],[1,0],[0,1],[0,0]]]})");
  EXPECT_EQ(code_of([&] { dl::load_boundary(bowtie); }), dl::errc::degenerate_ring);
  EXPECT_EQ(code_of([&] { dl::load_boundary(dir / "absent.geojson"); }), dl::errc::missing_file);
}

TEST(Boundary, MultiPolygonInFeatureCollection) {
  const auto dir = temp_dir("boundary_multi");
  const auto path = write_file(dir / "m.geojson", R"({"type":"FeatureCollection","features":[{"type":"Feature",
    "properties":{},"geometry":{"type":"MultiPolygon","coordinates":[
      [[[0,0],[1,0],[1,1],[0,1],[0,0]]],
      [[[5,5],[6,5],[6,6],[5,6],[5,5]]]]}}]})");
  const auto mask = dl::load_boundary(path);
  EXPECT_EQ(mask.ring_count(), 2u);
  EXPECT_TRUE(dl::point_in_mask({5.5, 5.5}, mask));
  EXPECT_FALSE(dl::point_in_mask({3, 3}, mask));
}

TEST(Boundary, ShippedEnglandOutlineLoads) {
  const auto mask = dl::load_boundary(DIVIDELINE_DATA_DIR "/england_coarse.geojson");
  EXPECT_EQ(mask.ring_count(), 1u);
  EXPECT_TRUE(dl::point_in_mask({-1.1105, 52.3030}, mask));  // Watford Gap
  EXPECT_TRUE(dl::point_in_mask({-0.1276, 51.5072}, mask));  // London
  EXPECT_FALSE(dl::point_in_mask({-3.19, 55.95}, mask));     // Edinburgh
  EXPECT_FALSE(dl::point_in_mask({-3.18, 51.48}, mask));     // Cardiff
}

TEST(PointInMask, SquareAndHole) {
  dl::landmass_mask sq;
  sq.polygons.push_back({{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}, {}});
  EXPECT_TRUE(dl::point_in_mask({0.5, 0.5}, sq));
  EXPECT_FALSE(dl::point_in_mask({2, 2}, sq));
  // boundary counts as inside
  EXPECT_TRUE(dl::point_in_mask({1, 0.5}, sq));
  EXPECT_TRUE(dl::point_in_mask({0, 0}, sq));
  EXPECT_TRUE(dl::point_in_mask({0.5, 1}, sq));

  dl::landmass_mask holed;
  holed.polygons.push_back(
      {{{0, 0}, {4, 0}, {4, 4}, {0, 4}, {0, 0}}, {{{1, 1}, {3, 1}, {3, 3}, {1, 3}, {1, 1}}}});
  // Oracle: nonzero winding of the outer ring minus that of the hole.
  for (const dl::geo_point p : {dl::geo_point{2, 2}, dl::geo_point{0.5, 0.5}, dl::geo_point{3.5, 2}, dl::geo_point{5, 5}}) {
    const int wn = std::abs(dl::testing::winding_number(p, holed.polygons[0].outer)) -
                   std::abs(dl::testing::winding_number(p, holed.polygons[0].holes[0]));
    EXPECT_EQ(dl::point_in_mask(p, holed), wn != 0) << p.lon << "," << p.lat;
  }
  EXPECT_FALSE(dl::point_in_mask({2, 2}, holed));
  EXPECT_TRUE(dl::point_in_mask({1, 2}, holed));  // on the hole boundary
}

TEST(PointInMask, AgreesWithWindingOracleOnRandomConvexPolygons) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t checked = 0;
  for (int poly = 0; poly < 20; ++poly) {
    std::vector<dl::geo_point> cloud;
    for (int k = 0; k < 12; ++k) cloud.push_back({u(gen), u(gen)});
    dl::landmass_mask mask;
    mask.polygons.push_back({dl::testing::convex_hull(cloud), {}});
    for (int k = 0; k < 50; ++k, ++checked) {
      const dl::geo_point p{1.2 * u(gen), 1.2 * u(gen)};
      EXPECT_EQ(dl::point_in_mask(p, mask), dl::testing::winding_number(p, mask.polygons[0].outer) != 0);
    }
  }
  EXPECT_EQ(checked, 1000u);
}

TEST(Grid, CornersAndSpacing) {
  const auto g = dl::make_grid({0, 1, 0, 1}, 2, 2, dl::landmass_mask::whole_plane());
  EXPECT_EQ(g.node(0, 0), (dl::geo_point{0, 0}));
  EXPECT_EQ(g.node(1, 0), (dl::geo_point{1, 0}));
  EXPECT_EQ(g.node(0, 1), (dl::geo_point{0, 1}));
  EXPECT_EQ(g.node(1, 1), (dl::geo_point{1, 1}));

  const dl::bbox box{-6.4, 1.8, 49.9, 55.9};
  const auto big = dl::make_grid(box, 37, 53, dl::landmass_mask::whole_plane());
  EXPECT_EQ(big.node(0, 0), (dl::geo_point{box.lon_min, box.lat_min}));
  EXPECT_EQ(big.node(36, 52), (dl::geo_point{box.lon_max, box.lat_max}));
  EXPECT_EQ(big.inside_count(), big.size());
  const double step = (box.lon_max - box.lon_min) / 36.0;
  for (std::size_t i = 1; i < 37; ++i) EXPECT_NEAR(big.lon_at(i) - big.lon_at(i - 1), step, 1e-12);
}

TEST(Grid, EnglandMaskFraction) {
  const auto mask = dl::load_boundary(DIVIDELINE_DATA_DIR "/england_coarse.geojson");
  const auto g = dl::make_grid(dl::england_bbox, 200, 200, mask);
  EXPECT_EQ(g.size(), 40000u);
  std::size_t oracle = 0;
  for (std::size_t j = 0; j < 200; ++j)
    for (std::size_t i = 0; i < 200; ++i) {
      const bool in = dl::testing::winding_number(g.node(i, j), mask.polygons[0].outer) != 0;
      oracle += in ? 1 : 0;
    }
  const std::size_t inside = g.inside_count();
  EXPECT_GT(inside, 0u);
  EXPECT_LT(inside, g.size());
  // boundary nodes may differ between rules; none expected on a coarse outline
  EXPECT_EQ(inside, oracle);
}

TEST(Grid, Degenerate) {
  EXPECT_EQ(code_of([] { dl::make_grid({0, 0, 0, 1}, 3, 3, dl::landmass_mask::whole_plane()); }),
            dl::errc::degenerate_bbox);
  EXPECT_EQ(code_of([] { dl::make_grid({0, 1, 0, 1}, 1, 3, dl::landmass_mask::whole_plane()); }),
            dl::errc::degenerate_bbox);
}

TEST(Synth, ZeroNoiseCollapsesClusters) {
  const auto ds = dl::synth_two_brand(5, 4, 1.0, 0.0, 3);
  for (const auto& p : ds.points) {
    const auto& first = p.label == dl::brand_class::north ? ds.points.front() : ds.points.back();
    EXPECT_EQ(p.point, first.point);
  }
  EXPECT_DOUBLE_EQ(ds.points.front().point.lat - ds.points.back().point.lat, 1.0);
}

TEST(Synth, DeterministicAcrossRunsAndThreads) {
  const auto a = dl::synth_two_brand(50, 30, 1.0, 0.2, 99);
  EXPECT_EQ(a, dl::synth_two_brand(50, 30, 1.0, 0.2, 99));
  EXPECT_NE(a, dl::synth_two_brand(50, 30, 1.0, 0.2, 100));
  std::vector<dl::store_dataset> from_threads(4);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < 4; ++t)
    pool.emplace_back([&, t] { from_threads[t] = dl::synth_two_brand(50, 30, 1.0, 0.2, 99); });
  for (auto& t : pool) t.join();
  for (const auto& ds : from_threads) EXPECT_EQ(ds, a);
}

TEST(Synth, WellSeparatedClustersHavePositiveGap) {
  const auto ds = dl::synth_two_brand(500, 500, 1.0, 0.1, 5);
  // exhaustive pairwise latitude gap
  double min_gap = INFINITY;
  for (const auto& n : ds.points) {
    if (n.label != dl::brand_class::north) continue;
    for (const auto& s : ds.points)
      if (s.label == dl::brand_class::south) min_gap = std::min(min_gap, n.point.lat - s.point.lat);
  }
  EXPECT_GT(min_gap, 0.0);
}
