#include "charfol/surface.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace charfol;
using namespace charfol::test;

namespace {

// A random point on the unit sphere scaled onto an ellipsoid.
Vec3 on_ellipsoid(std::mt19937_64& g, double a, double b, double c) {
  Vec3 d;
  do d = random_point(g, 1); while (d.norm() < 0.1 || d.norm() > 1);
  d.normalize();
  return {a * d.x(), b * d.y(), c * d.z()};
}

}  // namespace

TEST(HorizontalDerivatives, SpherePole) {
  const HorizontalDerivatives hd = horizontal_derivatives(ellipsoid(1, 1, 1), heisenberg(), Vec3(0, 0, 1));
  EXPECT_EQ(hd.Xf, Vec3(2, 0, 0));
  EXPECT_EQ(hd.f, 0.0);
}

TEST(HorizontalDerivatives, HorizontalPlaneByHand) {
  const Vec3 p(0.8, -1.4, 0.3);
  const HorizontalDerivatives hd = horizontal_derivatives(parse("z", 3), heisenberg(), p);
  EXPECT_DOUBLE_EQ(hd.Xf[1], -p.y() / 2);
  EXPECT_DOUBLE_EQ(hd.Xf[2], p.x() / 2);
  EXPECT_DOUBLE_EQ(hd.XXf(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(hd.XXf(2, 1), -0.5);
  EXPECT_DOUBLE_EQ(hd.XXf(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(hd.bracket21(), -1.0);
}

// X_a X_b f against a finite difference of X_b f along X_a, on a frame with
// non-constant coefficients.
TEST(HorizontalDerivatives, FiniteDifferenceOracle) {
  const ContactStructure cs = generic_frame();
  const Expr f = parse("x^2 + 0.5*y^2 + z^2 + 0.3*x*z - 1", 3);
  auto g = rng(21);
  const double h = 1e-5;
  for (int t = 0; t < 30; ++t) {
    const Vec3 p = random_point(g, 1.2);
    const HorizontalDerivatives hd = horizontal_derivatives(f, cs, p);
    auto xbf = [&](int b, const Vec3& q) { return horizontal_derivatives(f, cs, q).Xf[b]; };
    for (int a = 0; a < 3; ++a) {
      const Vec3 va = cs.field_at(a, p);
      for (int b = 0; b < 3; ++b) {
        const double fd = (xbf(b, p + h * va) - xbf(b, p - h * va)) / (2 * h);
        EXPECT_NEAR(hd.XXf(a, b), fd, 1e-7 * (1 + std::abs(fd)));
      }
    }
  }
}

TEST(HorizontalDerivatives, BracketIdentity) {
  const ContactStructure cs = generic_frame();
  const Surface s = ellipsoid(1, 1.2, 0.9);
  auto g = rng(22);
  for (int t = 0; t < 50; ++t) {
    const Vec3 p = on_ellipsoid(g, 1, 1.2, 0.9);
    const HorizontalDerivatives hd = horizontal_derivatives(s, cs, p);
    EXPECT_NEAR(hd.bracket21(), bracket(cs, 2, 1, p).dot(hd.grad), 1e-9);
  }
}

TEST(TangentFrame, SpherePole) {
  const ContactStructure cs = heisenberg();
  const auto [F1, F2] = tangent_frame(ellipsoid(1, 1, 1), cs, Vec3(0, 0, 1));
  EXPECT_TRUE(F1.isApprox(2 * cs.field_at(1, Vec3(0, 0, 1))));
  EXPECT_TRUE(F2.isApprox(2 * cs.field_at(2, Vec3(0, 0, 1))));
}

TEST(TangentFrame, Tangency) {
  const ContactStructure cs = generic_frame();
  const Surface s = ellipsoid(1, 1.2, 0.9);
  auto g = rng(23);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const Vec3 p = on_ellipsoid(g, 1, 1.2, 0.9);
    const HorizontalDerivatives hd = horizontal_derivatives(s, cs, p);
    if (std::abs(hd.Xf[0]) < 1e-3) continue;
    const auto [F1, F2] = tangent_frame(s, cs, p);
    EXPECT_LT(std::abs(F1.dot(hd.grad)), 1e-10);
    EXPECT_LT(std::abs(F2.dot(hd.grad)), 1e-10);
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

TEST(TangentFrame, VerticalPlaneIsAChartError) {
  EXPECT_THROW(tangent_frame(plane(1, 0, 0), heisenberg(), Vec3::Zero()), ChartError);
}

TEST(CharacteristicPoints, UnitSphere) {
  const CharacteristicSet set = find_characteristic_points(ellipsoid(1, 1, 1), heisenberg());
  ASSERT_EQ(set.points.size(), 2u);
  std::vector<double> z;
  for (const auto& lp : set.points) {
    EXPECT_LT(lp.location.head<2>().norm(), 1e-9);
    z.push_back(lp.location.z());
  }
  std::sort(z.begin(), z.end());
  EXPECT_NEAR(z[0], -1, 1e-9);
  EXPECT_NEAR(z[1], 1, 1e-9);
}

TEST(CharacteristicPoints, Tori) {
  const ContactStructure cs = heisenberg();
  EXPECT_TRUE(find_characteristic_points(torus_horizontal(1, 3), cs).points.empty());
  EXPECT_EQ(find_characteristic_points(torus_vertical(2, 5), cs).points.size(), 8u);
  EXPECT_EQ(find_characteristic_points(torus_vertical(1, 3), cs).points.size(), 4u);
}

// Points from the implicit search equal those from the parameter search.
TEST(CharacteristicPoints, ImplicitAndParametricAgree) {
  const ContactStructure cs = heisenberg();
  const Surface both = torus_vertical(2, 5);
  Surface implicit_only = Surface::implicit(both.implicit_form().f, both.box());
  const auto a = find_characteristic_points(both, cs).points;
  const auto b = find_characteristic_points(implicit_only, cs).points;
  ASSERT_EQ(a.size(), b.size());
  for (const auto& p : a) {
    double best = 1e9;
    for (const auto& q : b) best = std::min(best, (p.location - q.location).norm());
    EXPECT_LT(best, 1e-7);
  }
}

TEST(CharacteristicPoints, Invariants) {
  const ContactStructure cs = heisenberg();
  for (const Surface& s : {ellipsoid(1, 2, 1), paraboloid(1.0), torus_vertical(1, 3), plane(0.3, -0.2, 1.0)}) {
    const CharacteristicSet set = find_characteristic_points(s, cs);
    ASSERT_FALSE(set.points.empty()) << s.name();
    for (const auto& lp : set.points) {
      const HorizontalDerivatives hd = horizontal_derivatives(s, cs, lp.location);
      const double tol = 1e-9 * (1 + hd.grad.norm());
      EXPECT_LT(std::abs(hd.f), tol) << s.name();
      EXPECT_LT(std::abs(hd.Xf[1]) + std::abs(hd.Xf[2]), tol) << s.name();
      // At least one of d(X1 f), d(X2 f) is nonzero on T_pS.
      const auto [F1, F2] = tangent_frame(s, cs, lp.location);
      Mat2 d;
      const Mat3 A = hd.A;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
          const Vec3 Fk = k == 0 ? F1 : F2;
          const Vec3 b = A.partialPivLu().solve(Fk);
          d(i, k) = b[0] * hd.XXf(0, i + 1) + b[1] * hd.XXf(1, i + 1) + b[2] * hd.XXf(2, i + 1);
        }
      EXPECT_GT(std::max(d.row(0).norm(), d.row(1).norm()), 1e-8);
    }
    for (std::size_t i = 0; i < set.points.size(); ++i)
      for (std::size_t j = i + 1; j < set.points.size(); ++j)
        EXPECT_GT((set.points[i].location - set.points[j].location).norm(), 1e-6 * s.diameter());
  }
}

TEST(CharacteristicPoints, StableUnderGridRefinement) {
  const ContactStructure cs = heisenberg();
  for (const Surface& s : {ellipsoid(1, 1, 2), paraboloid(0.5), torus_vertical(2, 5), torus_vertical(1, 3)}) {
    CharSearchOptions coarse, fine;
    coarse.grid_n = 32;
    fine.grid_n = 64;
    EXPECT_EQ(find_characteristic_points(s, cs, coarse).points.size(),
              find_characteristic_points(s, cs, fine).points.size())
        << s.name();
  }
}

TEST(Parametrization, TorusPointsSatisfyImplicitEquation) {
  const Surface s = torus_vertical(1.5, 4);
  auto g = rng(24);
  for (int t = 0; t < 30; ++t) {
    const Vec2 uv(uniform(g, 0, 7), uniform(g, -1, 7));
    EXPECT_NEAR(evaluate(s.implicit_form().f, s.point(uv)), 0.0, 1e-10);
    const Vec3 grad = eval_jet2<3>(s.implicit_form().f, s.point(uv)).g;
    const auto T = s.tangents(uv);
    EXPECT_LT(std::abs(T.col(0).dot(grad)), 1e-9 * grad.norm());
    EXPECT_LT(std::abs(T.col(1).dot(grad)), 1e-9 * grad.norm());
    const Vec2 w = s.wrap(uv);
    EXPECT_GE(w[0], 0.0);
    EXPECT_LT(w[0], 2 * std::numbers::pi);
    EXPECT_LT((s.point(w) - s.point(uv)).norm(), 1e-12);
  }
  EXPECT_NEAR(s.param_delta(Vec2(0.1, 0.1), Vec2(2 * std::numbers::pi - 0.1, 0.1))[0], -0.2, 1e-12);
}

TEST(Projection, NewtonStepMovesOntoSurface) {
  const Surface s = ellipsoid(1, 1, 1);
  const Vec3 q = s.project(Vec3(0.6, 0.0, 0.81), 5);
  EXPECT_NEAR(q.norm(), 1.0, 1e-14);
}

TEST(Builtins, Preconditions) {
  EXPECT_THROW(plane(0, 0, 0), PreconditionError);
  EXPECT_THROW(ellipsoid(1, -1, 1), PreconditionError);
  EXPECT_THROW(torus_vertical(3, 1), PreconditionError);
  EXPECT_TRUE(ellipsoid(1, 1, 1).compact());
  EXPECT_FALSE(plane(0, 0, 1).compact());
}
