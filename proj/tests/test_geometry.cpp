#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flowercell/body.hpp"
#include "flowercell/geometry.hpp"
#include "flowercell/increment.hpp"

using namespace flowercell;

namespace {

ConvexBody square() { return ConvexBody::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}); }

// Brute force: x is in F_o(K) iff it lies in some disk with diameter [o, s], s on the boundary.
bool union_of_disks(const ConvexBody& k, Vec2 x, double scale) {
  for (int i = 0; i < 20000; ++i) {
    const Vec2 s = k.boundary_point(kTwoPi * i / 20000) * scale;
    if (norm(x - s * 0.5) <= 0.5 * norm(s) + 1e-12) return true;
  }
  return false;
}

// Trapezoid rule with n nodes, exact-ish for periodic integrands.
template <class F>
double trapezoid(const F& f, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(kTwoPi * i / n);
  return s * kTwoPi / n;
}

}  // namespace

TEST(Angle, ReductionIsIdempotent) {
  for (double t : {-7.0, -0.1, 0.0, 3.0, 6.5, 100.0}) {
    Angle a(t);
    EXPECT_GE(a.radians(), 0.0);
    EXPECT_LT(a.radians(), kTwoPi);
    EXPECT_DOUBLE_EQ(Angle(a.radians()).radians(), a.radians());
  }
}

TEST(Support, Examples) {
  auto sq = square();
  EXPECT_NEAR(support_function(sq, {}, Angle(kPi / 4)), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(support_function(sq, {}, Angle(0)), 1.0, 1e-12);
  auto disk = ConvexBody::disk(1.0);
  EXPECT_NEAR(support_function(disk, {0.5, 0}, Angle(0)), 0.5, 1e-12);
}

TEST(Support, TranslationRule) {
  auto bodies = {square(), ConvexBody::ellipse(2, 1), ConvexBody::disk(1.0, {0.3, -0.2})};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5), t(0, kTwoPi);
  for (const auto& k : bodies) {
    for (int i = 0; i < 100; ++i) {
      const Vec2 x{u(rng), u(rng)};
      const double th = t(rng);
      EXPECT_NEAR(support_function(k, x, Angle(th)), k.support(th) - dot(x, unit(th)), 1e-12);
    }
  }
}

TEST(BoundaryPoint, Examples) {
  auto bp = boundary_point(ConvexBody::disk(1.0, {0.5, 0}), Angle(kPi / 2));
  EXPECT_NEAR(bp.point.x, 0.5, 1e-12);
  EXPECT_NEAR(bp.point.y, 1.0, 1e-12);
  EXPECT_NEAR(bp.curvature_radius, 1.0, 1e-12);

  auto e = ConvexBody::ellipse(2, 1);
  auto p = boundary_point(e, Angle(0));
  EXPECT_NEAR(p.point.x, 2.0, 1e-12);
  EXPECT_NEAR(p.point.y, 0.0, 1e-12);
  EXPECT_NEAR(p.curvature_radius, 0.5, 1e-12);
  // Finite-difference h'' oracle.
  const double d = 1e-4;
  const double fd = (e.support(d) - 2 * e.support(0) + e.support(-d)) / (d * d);
  EXPECT_NEAR(e.support(0) + fd, 0.5, 1e-6);
}

TEST(BoundaryPoint, SupportConsistency) {
  for (const auto& k : {ConvexBody::ellipse(2, 1, {0.2, 0.1}, 0.4), ConvexBody::disk(2.0, {1, 1})}) {
    for (int i = 0; i < 1000; ++i) {
      const double t = kTwoPi * i / 1000;
      EXPECT_NEAR(dot(k.boundary_point(t), unit(t)), k.support(t), 1e-12);
    }
  }
}

TEST(FlowerMembership, Examples) {
  auto disk = ConvexBody::disk(1.0);
  EXPECT_TRUE(flower_membership(disk, {0.9, 0}, 1.0));
  EXPECT_TRUE(flower_membership(disk, {1.5, 0}, 2.0));
  EXPECT_FALSE(flower_membership(disk, {2.1, 0}, 2.0));
  EXPECT_TRUE(flower_membership(disk, {}, 1.0));
  auto sq = square();
  EXPECT_FALSE(flower_membership(sq, {1.2, 1.2}, 1.0));
  EXPECT_EQ(flower_membership(sq, {1.2, 1.2}, 1.0), union_of_disks(sq, {1.2, 1.2}, 1.0));
}

TEST(FlowerMembership, AgreesWithUnionOfDisks) {
  auto e = ConvexBody::ellipse(1.5, 1.0, {0.1, 0.2});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const Vec2 x{u(rng), u(rng)};
    // Skip points within 1e-3 of the flower boundary.
    if (std::abs(norm(x) - e.support(polar_angle(x))) < 1e-3) continue;
    EXPECT_EQ(flower_membership(e, x, 1.0), union_of_disks(e, x, 1.0));
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(FlowerMembership, ContainsBody) {
  auto e = ConvexBody::ellipse(2, 1, {0.3, 0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(0, kTwoPi);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(flower_membership(e, e.boundary_point(t(rng)) * (1 - 1e-12), 1.0));
}

TEST(FlowerArea, Examples) {
  EXPECT_NEAR(flower_area(ConvexBody::disk(1.7)), kPi * 1.7 * 1.7, 1e-12);
  EXPECT_NEAR(flower_area(ConvexBody::disk(1.0, {0.5, 0})), 3.53429173528851739, 1e-9);
  EXPECT_NEAR(flower_area(square()), kPi + 2.0, 1e-9);
  // Disk centred at x seen from x.
  auto d = ConvexBody::disk(1.3, {0.2, 0.1});
  EXPECT_NEAR(flower_area(d, {0.2, 0.1}), kPi * 1.3 * 1.3, 1e-10);
  EXPECT_THROW(flower_area(d, {3, 0}), DomainError);
}

TEST(FlowerRest, Examples) {
  auto disk = ConvexBody::disk(1.0);
  EXPECT_EQ(flower_rest(disk, {0.3, 0.2}), 0.0);
  // mpmath: 1/2 int_{cos t >= 1/3} (1 - 3 cos t)^2 dt
  EXPECT_NEAR(flower_rest(disk, {3, 0}), 2.52763610825497561, 1e-9);
  const Vec2 x{3, 0};
  EXPECT_NEAR(flower_area_general(disk, x) + flower_rest(disk, x) - kPi / 2 * norm2(x), flower_area(disk), 1e-8);
}

TEST(FlowerRest, DecompositionIdentityAndBound) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const auto& k : {square(), ConvexBody::ellipse(2, 1), ConvexBody::disk(1.0)}) {
    ASSERT_LT(norm(steiner_point(k)), 1e-12);
    for (int i = 0; i < 20; ++i) {
      const Vec2 x{u(rng), u(rng)};
      const double r = flower_rest(k, x);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, kPi / 4 * norm2(x) + 1e-12);
      EXPECT_NEAR(flower_area_general(k, x) + r - kPi / 2 * norm2(x), flower_area(k), 1e-8);
    }
  }
}

TEST(SteinerPoint, Examples) {
  const Vec2 c{0.4, -0.7};
  Vec2 s = steiner_point(ConvexBody::disk(2.0, c));
  EXPECT_NEAR(s.x, c.x, 1e-9);
  EXPECT_NEAR(s.y, c.y, 1e-9);

  // Triangle with o moved inside; trapezoid oracle at 1e6 nodes on the support function.
  auto tri = ConvexBody::polygon({{0, 0}, {1, 0}, {0, 1}}, {0.25, 0.25});
  const Vec2 st = steiner_point(tri) + tri.reference_origin();
  const double ox = trapezoid([&](double t) { return tri.support(t) * std::cos(t); }, 1000000) / kPi + 0.25;
  const double oy = trapezoid([&](double t) { return tri.support(t) * std::sin(t); }, 1000000) / kPi + 0.25;
  EXPECT_NEAR(st.x, ox, 1e-9);
  EXPECT_NEAR(st.y, oy, 1e-9);
  // Exterior-angle weights: (3/8, 3/8).
  EXPECT_NEAR(st.x, 0.375, 1e-9);
  EXPECT_NEAR(st.y, 0.375, 1e-9);
}

TEST(SteinerPoint, CentrallySymmetricPolygons) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const int half = 2 + k % 5;
    std::vector<double> ang;
    for (int i = 0; i < half; ++i) ang.push_back(kPi * (i + 0.2 + 0.6 * u(rng)) / half);
    const Vec2 c{u(rng) - 0.5, u(rng) - 0.5};
    std::vector<Vec2> v;
    for (int s = 0; s < 2; ++s) {
      for (int i = 0; i < half; ++i) {
        const double r = 1.0 + 0.0 * u(rng);
        v.push_back(c + unit(ang[i] + s * kPi) * r);
      }
    }
    auto p = ConvexBody::polygon(v, c);
    const Vec2 st = steiner_point(p) + p.reference_origin();
    EXPECT_NEAR(st.x, c.x, 1e-9);
    EXPECT_NEAR(st.y, c.y, 1e-9);
  }
}

TEST(SteinerPoint, MinimisesFlowerArea) {
  for (const auto& k : {ConvexBody::ellipse(2, 1), square()}) {
    const double base = flower_area(k);
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const Vec2 x{0.09 * i, 0.045 * j};
        if (!k.contains_interior(x)) continue;
        const double a = flower_area(k, x);
        if (i == 0 && j == 0) {
          EXPECT_NEAR(a, base, 1e-12);
        } else {
          EXPECT_GT(a, base);
        }
      }
    }
  }
}

TEST(Hausdorff, Examples) {
  auto d1 = ConvexBody::disk(1.0), d2 = ConvexBody::disk(1.25);
  EXPECT_NEAR(hausdorff_support(d1, d1), 0.0, 1e-12);
  EXPECT_NEAR(hausdorff_support(d1, d2), 0.25, 1e-9);
  EXPECT_NEAR(hausdorff_support(square(), d1), std::sqrt(2.0) - 1.0, 1e-7);
}

TEST(Validation, RejectsBadBodies) {
  EXPECT_THROW(ConvexBody::polygon({{0, 0}, {1, 0}}), ValidationError);
  EXPECT_THROW(ConvexBody::polygon({{-1, -1}, {1, -1}, {2, -1}, {0, 1}}), ValidationError);
  EXPECT_THROW(ConvexBody::polygon({{0, 0}, {1, 0}, {0, 1}}), ValidationError);  // o on the boundary
  EXPECT_THROW(ConvexBody::polygon({{-1, -1}, {1, -1}, {0, -0.5}, {0, 1}}), ValidationError);
  EXPECT_THROW(ConvexBody::disk(1.0, {1.0, 0}), ValidationError);
  EXPECT_THROW(ConvexBody::smooth([](double) { return 1.0; }, [](double t) { return std::sin(t); },
                                  [](double) { return 0.0; }),
               ValidationError);
  std::vector<double> few(100, 1.0);
  EXPECT_THROW(ConvexBody::custom_grid(few), ValidationError);
}

TEST(Validation, ClockwisePolygonIsReoriented) {
  auto p = ConvexBody::polygon({{-1, 1}, {1, 1}, {1, -1}, {-1, -1}});
  EXPECT_NEAR(p.area(), 4.0, 1e-12);
  EXPECT_NEAR(flower_area(p), kPi + 2.0, 1e-9);
}

TEST(CustomGrid, MatchesEllipse) {
  auto e = ConvexBody::ellipse(2, 1);
  std::vector<double> s(1024);
  for (int k = 0; k < 1024; ++k) s[k] = e.support(kTwoPi * k / 1024);
  auto g = ConvexBody::custom_grid(s);
  EXPECT_NEAR(g.area(), e.area(), 1e-6);
  EXPECT_NEAR(g.perimeter(), e.perimeter(), 1e-6);
  EXPECT_NEAR(g.curvature_radius(0.3), e.curvature_radius(0.3), 1e-3);
}

TEST(Body, AreaPerimeter) {
  auto e = ConvexBody::ellipse(2, 1);
  EXPECT_NEAR(e.area(), 2 * kPi, 1e-10);
  EXPECT_NEAR(ConvexBody::disk(1.5).perimeter(), 3 * kPi, 1e-10);
  EXPECT_NEAR(square().perimeter(), 8.0, 1e-12);
}

TEST(Body, Rebase) {
  auto d = ConvexBody::disk(1.0);
  auto r = d.rebased({0.3, 0.1});
  EXPECT_NEAR(r.support(0.0), 0.7, 1e-12);
  EXPECT_NEAR(r.curvature_radius(1.0), 1.0, 1e-12);
  EXPECT_NEAR(r.reference_origin().x, 0.3, 1e-15);
  auto sq = square().rebased({0.5, 0.5});
  EXPECT_NEAR(sq.support(0.0), 0.5, 1e-12);
  EXPECT_THROW(d.rebased({2, 0}), ValidationError);
}

TEST(Body, Distance) {
  auto sq = square();
  EXPECT_NEAR(sq.distance({2, 0}), 1.0, 1e-12);
  EXPECT_NEAR(sq.distance({2, 2}), std::sqrt(2.0), 1e-12);
  EXPECT_EQ(sq.distance({0.5, 0}), 0.0);
  auto e = ConvexBody::disk(1.0, {0.2, 0});
  EXPECT_NEAR(e.distance({2.2, 0}), 1.0, 1e-9);
  EXPECT_NEAR(e.distance({0.2, 3}), 2.0, 1e-9);
}
