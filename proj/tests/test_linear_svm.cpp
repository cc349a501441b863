#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "divideline/linear_svm.hpp"
#include "test_util.hpp"

namespace dl = divideline;

namespace {

const dl::svm_config kHardMargin{1e6, 1e-6, 10000};
// property checks compare two solves, so both must sit well inside the tolerance
const dl::svm_config kTight{1.0, 1e-10, 10000};

double min_margin(const dl::hyperplane& h, std::span<const dl::labeled_point> pts) {
  double m = INFINITY;
  for (const auto& p : pts) m = std::min(m, dl::sign_of(p.label) * h.decision(p.point));
  return m;
}

dl::hyperplane plane_at_angle(double degrees, double b, dl::standardizer s = {}) {
  const double r = degrees * std::numbers::pi / 180.0;
  return {{std::cos(r), std::sin(r)}, b, s};
}

}  // namespace

TEST(Standardizer, SmallExample) {
  const std::vector<dl::geo_point> pts{{0, 0}, {2, 2}};
  const auto s = dl::fit_standardizer(std::span<const dl::geo_point>(pts));
  EXPECT_EQ(s.mean, (dl::vec2{1, 1}));
  EXPECT_EQ(s.sd, (dl::vec2{1, 1}));
}

TEST(Standardizer, ZeroVariance) {
  const std::vector<dl::geo_point> same(5, {1.5, 52.0});
  try {
    dl::fit_standardizer(std::span<const dl::geo_point>(same));
    FAIL();
  } catch (const dl::error& e) {
    EXPECT_EQ(e.code(), dl::errc::zero_variance);
  }
}

TEST(Standardizer, MatchesExtendedPrecisionTwoPass) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> lon(-1.5, 1.2), lat(52.5, 1.4);
  std::vector<dl::geo_point> pts(1000);
  for (auto& p : pts) p = {lon(gen), lat(gen)};
  long double m0 = 0, m1 = 0;
  for (const auto& p : pts) m0 += p.lon, m1 += p.lat;
  m0 /= 1000;
  m1 /= 1000;
  long double v0 = 0, v1 = 0;
  for (const auto& p : pts) v0 += (p.lon - m0) * (p.lon - m0), v1 += (p.lat - m1) * (p.lat - m1);
  const auto s = dl::fit_standardizer(std::span<const dl::geo_point>(pts));
  EXPECT_NEAR(s.mean[0], static_cast<double>(m0), 1e-12);
  EXPECT_NEAR(s.mean[1], static_cast<double>(m1), 1e-12);
  EXPECT_NEAR(s.sd[0], static_cast<double>(std::sqrt(v0 / 1000)), 1e-12);
  EXPECT_NEAR(s.sd[1], static_cast<double>(std::sqrt(v1 / 1000)), 1e-12);
}

TEST(TrainSvm, SymmetricPair) {
  const std::vector<dl::labeled_point> pts{{{0, -1}, dl::brand_class::south}, {{0, 1}, dl::brand_class::north}};
  const auto fit = dl::train_svm(pts, dl::standardizer::identity(), {});
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.plane.w[0], 0.0, 1e-9);
  EXPECT_NEAR(fit.plane.w[1], 1.0, 1e-9);
  EXPECT_NEAR(fit.plane.b, 0.0, 1e-9);
  EXPECT_NEAR(min_margin(fit.plane, pts), 1.0, 1e-9);
}

TEST(TrainSvm, XorIsNotSeparable) {
  // Exact XOR gives w = 0 by symmetry; a slight stretch keeps a unique normal.
  const std::vector<dl::labeled_point> pts{{{0, 0}, dl::brand_class::north},
                                           {{1, 1.3}, dl::brand_class::north},
                                           {{1, 0}, dl::brand_class::south},
                                           {{0, 1}, dl::brand_class::south}};
  const auto fit = dl::train_svm(pts, dl::standardizer::identity(), {});
  EXPECT_TRUE(fit.converged);
  std::size_t correct = 0;
  double slack = 0.0;
  for (const auto& p : pts) {
    correct += fit.plane.classify(p.point) == p.label ? 1 : 0;
    slack += std::max(0.0, 1.0 - dl::sign_of(p.label) * fit.plane.decision(p.point));
  }
  EXPECT_LE(correct, 3u);
  EXPECT_GT(slack, 0.0);
}

TEST(TrainSvm, PerfectlySymmetricXorIsDegenerate) {
  const std::vector<dl::labeled_point> pts{{{0, 0}, dl::brand_class::north},
                                           {{1, 1}, dl::brand_class::north},
                                           {{1, 0}, dl::brand_class::south},
                                           {{0, 1}, dl::brand_class::south}};
  try {
    dl::train_svm(pts, dl::standardizer::identity(), {});
    FAIL();
  } catch (const dl::error& e) {
    EXPECT_EQ(e.code(), dl::errc::degenerate_hyperplane);
  }
}

TEST(TrainSvm, MatchesExhaustiveMarginOracle) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pts = dl::testing::random_separable(gen, 20);
    const auto fit = dl::train_svm(pts, dl::standardizer::identity(), kHardMargin);
    ASSERT_TRUE(fit.converged);
    const auto oracle = dl::testing::max_margin_oracle(pts);
    EXPECT_NEAR(min_margin(fit.plane, pts), oracle.margin, 1e-3);
    for (const auto& p : pts) {
      const double f_oracle = oracle.w[0] * p.point.lon + oracle.w[1] * p.point.lat + oracle.b;
      EXPECT_NEAR(fit.plane.decision(p.point), f_oracle, 1e-3);
    }
  }
}

TEST(TrainSvm, OrientationPutsNorthPositive) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = dl::testing::random_separable(gen, 25);
    const auto fit = dl::train_svm(pts, dl::fit_standardizer(std::span<const dl::labeled_point>(pts)), {});
    double pos = 0, neg = 0;
    std::size_t np = 0, nn = 0;
    for (const auto& p : pts) {
      const double f = fit.plane.decision(p.point);
      (p.label == dl::brand_class::north ? (pos += f, np) : (neg += f, nn))++;
    }
    EXPECT_GT(pos / static_cast<double>(np), neg / static_cast<double>(nn));
    EXPECT_NEAR(dl::norm(fit.plane.w), 1.0, 1e-9);
  }
}

TEST(TrainSvm, LabelFlipGivesSameLine) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    // hard margin: with every multiplier at the box bound the offset is only an interval
    auto pts = dl::testing::random_separable(gen, 30);
    const auto a = dl::train_svm(pts, {}, {1e6, 1e-10, 10000});
    for (auto& p : pts) p.label = p.label == dl::brand_class::north ? dl::brand_class::south : dl::brand_class::north;
    const auto b = dl::train_svm(pts, {}, {1e6, 1e-10, 10000});
    EXPECT_NEAR(a.plane.w[0], -b.plane.w[0], 1e-6);
    EXPECT_NEAR(a.plane.w[1], -b.plane.w[1], 1e-6);
    EXPECT_NEAR(a.plane.b, -b.plane.b, 1e-6);
  }
}

TEST(TrainSvm, TranslationEquivariance) {
  auto ds = dl::synth_two_brand(60, 40, 0.6, 0.4, 21);
  const auto scale = dl::fit_standardizer(std::span<const dl::labeled_point>(ds.points));
  const auto base = dl::train_svm(ds.points, scale, kTight);
  auto shifted = ds;
  for (auto& p : shifted.points) p.point.lon += 3.0, p.point.lat -= 2.0;
  const auto moved =
      dl::train_svm(shifted.points, dl::fit_standardizer(std::span<const dl::labeled_point>(shifted.points)), kTight);
  for (std::size_t k = 0; k < ds.points.size(); ++k)
    EXPECT_NEAR(base.plane.decision(ds.points[k].point), moved.plane.decision(shifted.points[k].point), 1e-6);
}

TEST(AverageHyperplane, IdenticalPlanes) {
  const auto h = plane_at_angle(73.0, 0.25);
  const std::vector<dl::hyperplane> planes(1000, h);
  const auto avg = dl::average_hyperplane(planes);
  EXPECT_NEAR(avg.w[0], h.w[0], 1e-12);
  EXPECT_NEAR(avg.w[1], h.w[1], 1e-12);
  EXPECT_NEAR(avg.b, h.b, 1e-12);
}

TEST(AverageHyperplane, SignAlignment) {
  const std::vector<dl::hyperplane> planes{{{0, 1}, 0, {}}, {{0, -1}, 0, {}}};
  const auto avg = dl::average_hyperplane(planes);
  EXPECT_EQ(avg.w, (dl::vec2{0, 1}));
  EXPECT_EQ(avg.b, 0.0);
}

TEST(AverageHyperplane, SymmetricPairIsVertical) {
  const std::vector<dl::hyperplane> planes{plane_at_angle(80.0, 0.0), plane_at_angle(100.0, 0.0)};
  const auto avg = dl::average_hyperplane(planes);
  EXPECT_NEAR(avg.w[0], 0.0, 1e-9);
  EXPECT_NEAR(avg.w[1], 1.0, 1e-9);
}

TEST(AverageHyperplane, OrderInvariant) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> angle(60, 120), off(-0.3, 0.3);
  std::vector<dl::hyperplane> planes;
  for (int k = 0; k < 200; ++k) planes.push_back(plane_at_angle(angle(gen), off(gen)));
  const auto ref = dl::average_hyperplane(planes);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(planes.begin(), planes.end(), gen);
    const auto avg = dl::average_hyperplane(planes);
    EXPECT_NEAR(avg.w[0], ref.w[0], 1e-12);
    EXPECT_NEAR(avg.w[1], ref.w[1], 1e-12);
    EXPECT_NEAR(avg.b, ref.b, 1e-12);
  }
}

TEST(AverageHyperplane, Errors) {
  try {
    dl::average_hyperplane({});
    FAIL();
  } catch (const dl::error& e) {
    EXPECT_EQ(e.code(), dl::errc::empty_ensemble);
  }
  // sign alignment keeps unit normals from cancelling, so only vanishing inputs can
  const std::vector<dl::hyperplane> vanishing{{{0, 0}, 0.1, {}}, {{1e-9, 0}, 0.0, {}}};
  try {
    dl::average_hyperplane(vanishing);
    FAIL();
  } catch (const dl::error& e) {
    EXPECT_EQ(e.code(), dl::errc::cancellation_degenerate);
  }
  dl::hyperplane other_scale = plane_at_angle(10, 0);
  other_scale.scale.sd = {2, 2};
  const std::vector<dl::hyperplane> mixed{plane_at_angle(10, 0), other_scale};
  EXPECT_THROW(dl::average_hyperplane(mixed), dl::error);
}

TEST(SvmPipeline, SeparableClustersAreClassifiedPerfectly) {
  const auto ds = dl::synth_two_brand(200, 120, 1.0, 0.15, 5);
  const auto res = dl::svm_pipeline(ds, {20, 5}, {0.8, true, 5}, {}, 2);
  EXPECT_EQ(res.mean_accuracy, 1.0);
  EXPECT_EQ(res.averaged_model_accuracy, 1.0);
  EXPECT_EQ(res.per_resample_accuracy.size(), 20u);
  EXPECT_EQ(res.non_converged, 0u);
  EXPECT_EQ(res.train_size + res.test_size, ds.points.size());
}

TEST(SvmPipeline, SingleResampleIsTheDirectFit) {
  const auto ds = dl::synth_two_brand(50, 50, 0.5, 0.4, 6);
  const dl::split_spec spec{0.8, true, 6};
  const dl::resample_plan plan{1, 6};
  const auto res = dl::svm_pipeline(ds, plan, spec, {});
  const auto [train, test] = dl::split(ds, spec);
  const auto direct =
      dl::train_svm(dl::make_balanced_sample(train, 0, plan), dl::fit_standardizer(std::span<const dl::labeled_point>(train.points)), {});
  EXPECT_NEAR(res.plane.w[0], direct.plane.w[0], 1e-12);
  EXPECT_NEAR(res.plane.w[1], direct.plane.w[1], 1e-12);
  EXPECT_NEAR(res.plane.b, direct.plane.b, 1e-12);
}

TEST(SvmPipeline, ThreadCountDoesNotMatter) {
  const auto ds = dl::synth_two_brand(150, 60, 0.4, 0.5, 12);
  const auto a = dl::svm_pipeline(ds, {40, 3}, {0.8, true, 3}, {}, 1);
  const auto b = dl::svm_pipeline(ds, {40, 3}, {0.8, true, 3}, {}, 4);
  EXPECT_EQ(a.plane.w, b.plane.w);
  EXPECT_EQ(a.plane.b, b.plane.b);
  EXPECT_EQ(a.per_resample_accuracy, b.per_resample_accuracy);
}

TEST(HyperplaneToPolyline, HorizontalLine) {
  const dl::hyperplane h{{0, 1}, -52.0, dl::standardizer::identity()};
  const auto line = dl::hyperplane_to_polyline(h, dl::england_bbox);
  ASSERT_EQ(line.points.size(), 2u);
  EXPECT_EQ(line.points[0], (dl::geo_point{dl::england_bbox.lon_min, 52.0}));
  EXPECT_EQ(line.points[1], (dl::geo_point{dl::england_bbox.lon_max, 52.0}));
}

TEST(HyperplaneToPolyline, MissesBox) {
  const dl::hyperplane h{{0, 1}, -70.0, dl::standardizer::identity()};
  try {
    dl::hyperplane_to_polyline(h, dl::england_bbox);
    FAIL();
  } catch (const dl::error& e) {
    EXPECT_EQ(e.code(), dl::errc::no_intersection);
  }
}

TEST(HyperplaneToPolyline, EndpointsLieOnLineAndBorder) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> angle(0, 360), lon(-6, 1.5), lat(50.2, 55.5), sd(0.3, 2.0);
  const auto box = dl::england_bbox;
  for (int trial = 0; trial < 500; ++trial) {
    const dl::standardizer s{{lon(gen), lat(gen)}, {sd(gen), sd(gen)}};
    auto h = plane_at_angle(angle(gen), 0.0, s);
    const dl::geo_point through{lon(gen), lat(gen)};
    h.b = -dl::dot(h.w, s.apply(through));
    const auto line = dl::hyperplane_to_polyline(h, box);
    ASSERT_EQ(line.points.size(), 2u);
    EXPECT_LE(line.points[0].lon, line.points[1].lon);
    for (const auto& p : line.points) {
      EXPECT_LT(std::abs(h.decision(p)), 1e-9);
      const double border = std::min({std::abs(p.lon - box.lon_min), std::abs(p.lon - box.lon_max),
                                      std::abs(p.lat - box.lat_min), std::abs(p.lat - box.lat_max)});
      EXPECT_LT(border, 1e-9);
    }
  }
}
