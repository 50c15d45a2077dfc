#include <doctest.h>

#include <cmath>

#include "bayesbench/density_ratio.hpp"
#include "bayesbench/random.hpp"

using namespace bayesbench;

namespace {

ClassPartition two_class_1d(const std::vector<double>& x1,
                            const std::vector<double>& x2) {
  Matrix pts(x1.size() + x2.size(), 1);
  std::vector<int> labels;
  std::size_t r = 0;
  for (double v : x1) {
    pts(r++, 0) = v;
    labels.push_back(1);
  }
  for (double v : x2) {
    pts(r++, 0) = v;
    labels.push_back(2);
  }
  return partition_by_class(make_dataset(std::move(pts), std::move(labels)));
}

} // namespace

TEST_CASE("eps_ball_ratio hand example") {
  const auto part = two_class_1d({0.0, 0.2}, {0.1, 0.9});
  const SpatialIndex idx(part);
  const auto est = eps_ball_ratio(idx, part.class_points[1], 1, 2, 0.15, 2, 2);
  REQUIRE(est.values.size() == 2);
  CHECK(est.values[0] == doctest::Approx(2.0)); // both class-1 points, self only
}

TEST_CASE("identical class samples give unit ratios") {
  const std::vector<double> xs{0.1, 0.5, 0.9, 1.4};
  const auto part = two_class_1d(xs, xs);
  const SpatialIndex idx(part);
  for (double eps : {0.05, 0.3, 2.0}) {
    const auto est = eps_ball_ratio(idx, part.class_points[1], 1, 2, eps, 4, 4);
    for (double v : est.values) CHECK(v == doctest::Approx(1.0));
  }
}

TEST_CASE("radius beyond the diameter gives global count ratios") {
  const auto part = two_class_1d({0, 1, 2}, {0.5, 1.5});
  const SpatialIndex idx(part);
  const auto est = eps_ball_ratio(idx, part.class_points[1], 1, 2, 100.0, 3, 2);
  for (double v : est.values) CHECK(v == doctest::Approx(1.0)); // (2/3)*(3/2)
}

TEST_CASE("schedule radii scale as n_basis^(-1/(2d))") {
  const NodeSet ns = chebyshev_roots(4, 0.4);
  for (int d : {1, 2, 10}) {
    const auto s1 = make_schedule(ns, 500, d);
    const auto s2 = make_schedule(ns, 1000, d);
    const auto r1 = s1.radii();
    const auto r2 = s2.radii();
    const double shrink = std::pow(2.0, -1.0 / (2.0 * d));
    for (std::size_t i = 0; i < r1.size(); ++i)
      CHECK(r2[i] == doctest::Approx(r1[i] * shrink).epsilon(1e-14));
  }
}

TEST_CASE("ensemble_ratio is linear before flooring") {
  Rng rng(17);
  const WeightVector w{{0.3, 0.7}, 0};
  for (int rep = 0; rep < 20; ++rep) {
    DensityRatioEstimate a, b;
    for (int i = 0; i < 5; ++i) {
      a.values.push_back(rng.uniform(0, 4));
      b.values.push_back(rng.uniform(0, 4));
    }
    const double ca = rng.uniform(0, 2), cb = rng.uniform(0, 2);
    DensityRatioEstimate mixed0, mixed1;
    for (int i = 0; i < 5; ++i) {
      mixed0.values.push_back(ca * a.values[i] + cb * b.values[i]);
      mixed1.values.push_back(ca * a.values[i] + cb * b.values[i]);
    }
    // combine(ca*A + cb*B) == ca*combine(A) + cb*combine(B); all values
    // nonnegative here so the floor never fires
    const auto lhs = ensemble_ratio({mixed0, mixed1}, w);
    const auto ra = ensemble_ratio({a, a}, w);
    const auto rb = ensemble_ratio({b, b}, w);
    for (int i = 0; i < 5; ++i)
      CHECK(lhs.values[i] ==
            doctest::Approx(ca * ra.values[i] + cb * rb.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("ensemble with one weight is the base estimate") {
  DensityRatioEstimate base;
  base.values = {0.2, 1.7, 3.0};
  const auto out = ensemble_ratio({base}, WeightVector{{1.0}, 0});
  CHECK(out.values == base.values);
}

TEST_CASE("ensemble preserves constants since weights sum to one") {
  DensityRatioEstimate a, b;
  a.values = {2.0, 2.0};
  b.values = {2.0, 2.0};
  const WeightVector w{{-0.2071067811865475, 1.2071067811865475}, 1};
  const auto out = ensemble_ratio({a, b}, w);
  for (double v : out.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
  // convex combination example
  DensityRatioEstimate c, d;
  c.values = {2.0};
  d.values = {4.0};
  const auto mid = ensemble_ratio({c, d}, WeightVector{{0.5, 0.5}, 0});
  CHECK(mid.values[0] == doctest::Approx(3.0));
}

TEST_CASE("negative combinations floor at zero") {
  DensityRatioEstimate a, b;
  a.values = {5.0};
  b.values = {0.0};
  const auto out = ensemble_ratio({a, b}, WeightVector{{-0.5, 1.5}, 0});
  CHECK(out.values[0] == 0.0);
}

TEST_CASE("clip_ratio clamps into the bound interval") {
  const auto bounds = ClipBounds::from_lo(0.01);
  DensityRatioEstimate est;
  est.values = {0.0, 1.0, 1e6};
  const auto out = clip_ratio(est, bounds);
  CHECK(out.values[0] == doctest::Approx(0.01));
  CHECK(out.values[1] == doctest::Approx(1.0));
  CHECK(out.values[2] == doctest::Approx(100.0));
  CHECK(out.clamped == 2);
}

TEST_CASE("identical samples: clipped ensemble ratios equal one exactly") {
  const std::vector<double> xs{0.0, 0.4, 0.8, 1.2, 1.6};
  const auto part = two_class_1d(xs, xs);
  const SpatialIndex idx(part);
  const std::vector<double> radii{0.3, 0.5};
  const auto table = ratio_table(idx, part.class_points[1], 1, 2, radii, 5, 5, 1);
  const WeightVector w{{-0.2071067811865475, 1.2071067811865475}, 1};
  auto combined = combine_table(table, 5, w);
  const auto bounds = ClipBounds::from_lo(1e-3);
  for (double v : combined) CHECK(bounds.clamp(v) == 1.0);
}

TEST_CASE("clip bounds validation") {
  CHECK_THROWS_AS(ClipBounds::from_lo(0.0), ValidationError);
  CHECK_THROWS_AS(ClipBounds::from_lo(1.5), ValidationError);
  const auto b = ClipBounds::from_lo(1e-3);
  CHECK(b.ratio_hi == doctest::Approx(1e3));
}
