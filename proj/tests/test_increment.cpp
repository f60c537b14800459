#include <gtest/gtest.h>

#include <cmath>

#include "flowercell/increment.hpp"

using namespace flowercell;

namespace {
ConvexBody square() { return ConvexBody::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}); }
}  // namespace

TEST(IncrementExact, ZeroInsideFlower) {
  auto d = ConvexBody::disk(1.0);
  EXPECT_EQ(increment_area_exact(d, {0.5, 0.2}), 0.0);
  EXPECT_EQ(increment_area_exact(d, {0.99, 0}), 0.0);
  EXPECT_EQ(increment_area_exact(square(), {1.2, 1.2}) > 0.0, true);
  EXPECT_EQ(increment_area_exact(square(), {0.9, -0.3}), 0.0);
}

TEST(IncrementExact, DiskMatchesAsymptoteAtOnePercent) {
  auto d = ConvexBody::disk(1.0);
  const double exact = increment_area_exact(d, {1.01, 0});
  const double asym = increment_area_smooth_asymptotic(d, Angle(0), 0.01);
  EXPECT_NEAR(asym, 1.885618083164127e-3, 1e-15);
  EXPECT_NEAR(exact / asym, 1.0, 0.03);
}

TEST(IncrementExact, SquareCornerFrame) {
  auto sq = square();
  const Vec2 x = polygon_local_point(sq, 0, 1.0, 0.01);
  EXPECT_NEAR(x.x, -1 + std::cos(0.01), 1e-15);
  EXPECT_NEAR(x.y, -1 - std::sin(0.01), 1e-15);
  // mpmath oracle at 30 digits, window endpoints found by root finding, split at the corner normal.
  EXPECT_NEAR(increment_area_exact(sq, x), 1.0065994072455373e-4, 1e-16);
  EXPECT_NEAR(increment_area_polygon_asymptotic(sq, 0, 1.0, 0.01), 1.0e-4, 1e-16);
}

TEST(IncrementSmooth, Examples) {
  auto d4 = ConvexBody::disk(4.0);
  EXPECT_NEAR(increment_area_smooth_asymptotic(d4, Angle(1.0), 0.01), 3.771236166328254e-3, 1e-15);
  EXPECT_THROW(increment_area_smooth_asymptotic(d4, Angle(0), 0.0), DomainError);
  EXPECT_THROW(increment_area_smooth_asymptotic(square(), Angle(0), 0.1), UnsupportedKindError);
}

TEST(IncrementSmooth, RatioTendsToOne) {
  auto d = ConvexBody::disk(1.0);
  double prev = 1e9;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const Vec2 x = smooth_exterior_point(d, Angle(0.7), h);
    const double ratio = increment_area_exact(d, x) / increment_area_smooth_asymptotic(d, Angle(0.7), h);
    const double gap = std::abs(ratio - 1.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(IncrementSmooth, EllipseRatio) {
  auto e = ConvexBody::ellipse(2, 1, {0.1, -0.2}, 0.3);
  for (double t : {0.0, 1.0, 2.5, 4.0}) {
    const double h = 1e-4;
    const double r = increment_area_exact(e, smooth_exterior_point(e, Angle(t), h)) /
                     increment_area_smooth_asymptotic(e, Angle(t), h);
    EXPECT_NEAR(r, 1.0, 0.01);
  }
}

TEST(IncrementPolygon, Examples) {
  auto sq = square();
  EXPECT_EQ(increment_area_polygon_asymptotic(sq, 0, 1.0, 0.0), 0.0);
  for (double rho : {1e-2, 1e-3, 1e-4}) {
    EXPECT_NEAR(increment_area_polygon_asymptotic(sq, 1, rho, 0.1) / rho, 0.01 * 0.5 * 2 / (2 - rho), 1e-12);
  }
  EXPECT_THROW(increment_area_polygon_asymptotic(sq, 0, 2.5, 0.01), DomainError);
  EXPECT_THROW(increment_area_polygon_asymptotic(sq, 0, 1.0, 2.0), DomainError);
}

TEST(IncrementPolygon, RatioTendsToOne) {
  auto sq = square();
  for (double rho : {0.5, 1.0, 1.5}) {
    const double r2 = increment_area_exact(sq, polygon_local_point(sq, 2, rho, 1e-2)) /
                      increment_area_polygon_asymptotic(sq, 2, rho, 1e-2);
    const double r3 = increment_area_exact(sq, polygon_local_point(sq, 2, rho, 1e-3)) /
                      increment_area_polygon_asymptotic(sq, 2, rho, 1e-3);
    EXPECT_NEAR(r2, 1.0, 0.05);
    EXPECT_NEAR(r3, 1.0, 0.01);
    EXPECT_LT(std::abs(r3 - 1), std::abs(r2 - 1));
  }
}

// Disk: increment / h^{3/2} stays above 0.5 on a log grid of h in (0, 10].
TEST(IncrementBounds, SmoothLowerBound) {
  auto d = ConvexBody::disk(1.0);
  for (int k = 0; k <= 60; ++k) {
    const double h = std::pow(10.0, -5.0 + 6.0 * k / 60.0);
    const double v = increment_area_exact(d, smooth_exterior_point(d, Angle(0.3), h));
    EXPECT_GE(v / std::pow(h, 1.5), 0.5) << "h = " << h;
  }
}

// Square: increment >= C max(1, rho) rho alpha^2; the mpmath minimum over this grid is 0.528.
TEST(IncrementBounds, PolygonLowerBound) {
  constexpr double C = 0.5;
  auto sq = square();
  for (double rho : {0.1, 0.5, 1.0, 1.5, 3.0}) {
    for (double alpha : {1e-2, 0.1, 0.3, 0.7, 1.2, 1.5}) {
      const double v = increment_area_exact(sq, polygon_local_point(sq, 0, rho, alpha));
      EXPECT_GE(v, C * std::max(1.0, rho) * rho * alpha * alpha) << rho << " " << alpha;
    }
  }
}

TEST(IncrementExact, ContinuousAlongRays) {
  // Zero exactly on K: along a ray the increment vanishes up to the radial function of K and grows after.
  const double a = 1.5, b = 1.0;
  auto e = ConvexBody::ellipse(a, b);
  for (double t : {0.2, 1.3, 3.0}) {
    const double edge = a * b / std::hypot(b * std::cos(t), a * std::sin(t));
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double r = edge * (0.9 + 0.2 * k / 200.0);
      const double v = increment_area_exact(e, unit(t) * r);
      if (r < edge * (1 - 1e-9)) EXPECT_EQ(v, 0.0);
      if (r > edge * (1 + 1e-9)) EXPECT_GT(v, 0.0);
      EXPECT_GE(v, prev);
      EXPECT_LT(v - prev, 5e-3);
      prev = v;
    }
  }
}
