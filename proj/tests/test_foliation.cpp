#include "charfol/charclass.hpp"
#include "charfol/foliation.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace charfol;
using namespace charfol::test;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<CharPoint> points_of(const CharVectorField& X) {
  return analyze(X, find_characteristic_points(X.surface(), X.structure()));
}

// Closed forms for the horizontal torus field u' = rho^2/2, v' = r cos u.
double alpha_exact(double r, double R) { return -4 * kPi * r * r / std::pow(R * R - r * r, 1.5); }
double t0_exact(double r, double R) { return 4 * kPi * R / std::pow(R * R - r * r, 1.5); }

// r with alpha(r, R) / 2 pi = target, by bisection on the closed form.
double solve_r(double R, double target) {
  double lo = 1e-3, hi = 0.999 * R;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (alpha_exact(mid, R) / (2 * kPi) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Vec3 sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace

TEST(Leaf, PlaneRadialLeaves) {
  const ContactStructure cs = heisenberg();
  auto g = rng(51);
  for (int t = 0; t < 5; ++t) {
    const double a = uniform(g, -1, 1), b = uniform(g, -1, 1), c = uniform(g, 0.5, 2);
    const Surface s = plane(a, b, c);
    const Vec3 p(-2 * b / c, 2 * a / c, 0);
    const double x = uniform(g, -3, 3), y = uniform(g, -3, 3);
    const Vec3 q(x, y, -(a * x + b * y) / c);
    const double want = (q - p).head<2>().norm();

    // X_S points away from p, so its backward leaf ends there; X_f = Zf X_S is reversed.
    const CharVectorField XS(s, cs, FieldKind::XS), Xf(s, cs, FieldKind::Xf);
    const auto known = points_of(Xf);
    ASSERT_EQ(known.size(), 1u);
    const Trajectory back = integrate_leaf(XS, known, q, Direction::Backward);
    EXPECT_EQ(back.termination, Termination::ConvergedTo);
    const LeafLength ls = leaf_length_to_limit(XS, known, back);
    EXPECT_NEAR(ls.length, want, 1e-5);
    const LeafLength lf = leaf_length_to_limit(Xf, known, q, Direction::Forward);
    EXPECT_EQ(lf.trajectory.termination, Termination::ConvergedTo);
    EXPECT_NEAR(lf.length, want, 1e-5);
    EXPECT_EQ(integrate_leaf(XS, known, q, Direction::Forward).termination, Termination::LeftDomain);
  }
}

TEST(Leaf, SeedInsideEventRadius) {
  const ContactStructure cs = heisenberg();
  const Surface s = plane(0, 0, 1);
  const CharVectorField X(s, cs, FieldKind::XS);
  const auto known = points_of(X);
  const double rad = event_radius(s, LeafOptions{});
  const LeafLength l = leaf_length_to_limit(X, known, Vec3(0.5 * rad, 0, 0), Direction::Backward);
  EXPECT_EQ(l.trajectory.termination, Termination::ConvergedTo);
  EXPECT_LE(l.length, rad);
}

TEST(Leaf, SphereLeavesReachBothPoles) {
  const ContactStructure cs = heisenberg();
  const CharVectorField X(ellipsoid(1, 1, 1), cs);
  const auto known = points_of(X);
  ASSERT_EQ(known.size(), 2u);
  auto g = rng(52);
  for (int t = 0; t < 6; ++t) {
    const Vec3 q = sphere_point(uniform(g, 0.3, kPi - 0.3), uniform(g, 0, 2 * kPi));
    const Trajectory f = integrate_leaf(X, known, q, Direction::Forward);
    const Trajectory b = integrate_leaf(X, known, q, Direction::Backward);
    ASSERT_EQ(f.termination, Termination::ConvergedTo);
    ASSERT_EQ(b.termination, Termination::ConvergedTo);
    EXPECT_NE(f.limit, b.limit);
    EXPECT_NEAR(std::abs(known[f.limit].location.z()), 1.0, 1e-9);
    EXPECT_GT(f.sr_length, 0.0);
  }
}

TEST(Leaf, SamplesStayOnSurfaceAndLengthMatchesChords) {
  const ContactStructure cs = generic_frame();
  const Surface s = Surface::implicit(parse("x^2 + 1.3*y^2 + z^2 - 1", 3), box(2, 2, 2.5));
  const CharVectorField X(s, cs);
  LeafOptions o;
  o.horizon_T = 3;
  o.tol_ode = 1e-10;
  const Trajectory tr = integrate_leaf(X, points_of(X), s.project(Vec3(0.8, 0.3, 0.4), 8), Direction::Forward, o);
  ASSERT_GT(tr.samples.size(), 10u);
  double chords = 0, prev_len = -1;
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const auto& smp = tr.samples[k];
    EXPECT_LT(std::abs(evaluate(s.implicit_form().f, smp.point)), 10 * o.tol_ode);
    EXPECT_GE(smp.length, prev_len);
    prev_len = smp.length;
    // The velocity is horizontal: no X0 component.
    const Vec3 v = X(smp.point);
    EXPECT_LT(std::abs(theta(cs.frame(smp.point), v)), 10 * o.tol_ode * (1 + v.norm()));
    if (k > 0) {
      const Vec3 mid = 0.5 * (smp.point + tr.samples[k - 1].point);
      const Vec3 b = frame_coefficients(cs.frame(mid), smp.point - tr.samples[k - 1].point);
      chords += b.tail<2>().norm();
    }
  }
  EXPECT_NEAR(chords, tr.sr_length, 1e-3 * tr.sr_length);
}

TEST(Leaf, ToleranceHalving) {
  const CharVectorField X(ellipsoid(1, 1, 1), heisenberg());
  LeafOptions a, b;
  a.horizon_T = b.horizon_T = 20;
  a.stop_at_char = b.stop_at_char = false;
  a.tol_ode = 1e-8;
  b.tol_ode = 5e-9;
  const Vec3 q = sphere_point(1.1, 0.4);
  const double la = integrate_leaf(X, {}, q, Direction::Forward, a).sr_length;
  const double lb = integrate_leaf(X, {}, q, Direction::Forward, b).sr_length;
  EXPECT_LT(std::abs(la - lb), 10 * a.tol_ode);
}

TEST(Leaf, TimeReversal) {
  const ContactStructure cs = heisenberg();
  for (const Surface& s : {ellipsoid(1, 1, 1), ellipsoid(2, 1, 3), torus_vertical(1, 3)}) {
    const CharVectorField X(s, cs, FieldKind::Xf, false);
    LeafOptions o;
    const bool torus = s.name() == "torus_vertical";
    // The torus field is fast here; a long horizon would reach a characteristic point.
    o.horizon_T = torus ? 0.005 : 1.5;
    o.stop_at_char = false;
    o.detect_periodic = false;
    o.tol_ode = 1e-12;
    Vec3 seed = torus ? s.point(Vec2(0.7, 2.0)) : s.project(Vec3(0.6, 0.3, 0.5), 10);
    const Trajectory fwd = integrate_leaf(X, {}, seed, Direction::Forward, o);
    ASSERT_EQ(fwd.termination, Termination::HorizonReached) << s.name();
    const Trajectory bwd = integrate_leaf(X, {}, fwd.back().point, Direction::Backward, o);
    EXPECT_LT((bwd.back().point - seed).norm(), 1e-5) << s.name();
  }
}

TEST(Leaf, CauchyLengthIntoPole) {
  const CharVectorField X(ellipsoid(1, 1, 1), heisenberg());
  LeafOptions o;
  o.stop_at_char = false;
  o.detect_periodic = false;
  o.horizon_T = 640;
  const double a = integrate_leaf(X, {}, sphere_point(0.9, 2.0), Direction::Forward, o).sr_length;
  o.horizon_T = 1280;
  const double b = integrate_leaf(X, {}, sphere_point(0.9, 2.0), Direction::Forward, o).sr_length;
  EXPECT_LT(std::abs(a - b), 1e-6);
}

TEST(Torus, RotationNumberClosedForm) {
  for (const auto& [r, R] : {std::pair{1.0, 3.0}, {0.5, 2.0}, {2.0, 5.0}}) {
    const TorusAnalysis ta = rotation_number(r, R);
    EXPECT_NEAR(ta.alpha, alpha_exact(r, R), 1e-9);
    EXPECT_NEAR(ta.t0, t0_exact(r, R), 1e-9);
    EXPECT_GE(ta.t0, 4 * kPi / ((r + R) * (r + R)));
    EXPECT_LE(ta.t0, 4 * kPi / ((R - r) * (R - r)));
    EXPECT_NEAR(rotation_number(r, R, 5e-13).alpha, ta.alpha, 1e-9);
  }
  EXPECT_NEAR(rotation_number(1, 3).alpha, -0.55536036727, 1e-10);
}

TEST(Torus, RationalInstanceIsPeriodic) {
  const double R = 3, r = solve_r(R, -1.0 / 12.0);
  const TorusAnalysis ta = rotation_number(r, R);
  ASSERT_TRUE(ta.periodic_candidate);
  EXPECT_EQ(ta.p, -1);
  EXPECT_EQ(ta.q, 12);

  const CharVectorField X(torus_horizontal(r, R), heisenberg());
  LeafOptions o;
  o.horizon_T = 200;
  const Trajectory tr = integrate_leaf_uv(X, {}, Vec2(0, 0), Direction::Forward, o);
  EXPECT_EQ(tr.termination, Termination::Periodic);
  EXPECT_NEAR(tr.period, 12 * t0_exact(r, R), 1e-4);
  EXPECT_GT(tr.sr_length, 0.0);
}

TEST(Torus, IrrationalInstanceRunsToHorizon) {
  const CharVectorField X(torus_horizontal(1, 3), heisenberg());
  LeafOptions o;
  o.horizon_T = 50;
  const Trajectory tr = integrate_leaf_uv(X, {}, Vec2(0.3, 0.1), Direction::Forward, o);
  EXPECT_EQ(tr.termination, Termination::HorizonReached);
  EXPECT_FALSE(tr.stiff);
}

TEST(RationalApproximation, ContinuedFractions) {
  EXPECT_EQ(rational_approximation(0.75, 64), (std::pair<long, long>{3, 4}));
  EXPECT_EQ(rational_approximation(kPi, 7), (std::pair<long, long>{22, 7}));
  EXPECT_EQ(rational_approximation(kPi, 200), (std::pair<long, long>{355, 113}));
  EXPECT_EQ(rational_approximation(-1.0 / 12.0, 64), (std::pair<long, long>{-1, 12}));
}

TEST(Separatrices, VerticalTorusSaddles) {
  const CharVectorField X(torus_vertical(1, 3), heisenberg());
  const auto known = points_of(X);
  ASSERT_EQ(known.size(), 4u);
  int saddles = 0;
  for (int i = 0; i < 4; ++i) {
    if (known[i].cls != PointClass::Saddle) {
      EXPECT_THROW(separatrices(X, known, i), PreconditionError);
      continue;
    }
    ++saddles;
    const auto seps = separatrices(X, known, i);
    ASSERT_EQ(seps.size(), 4u);
    const auto halved = separatrices(X, known, i, {}, 0.5e-5);
    for (std::size_t k = 0; k < 4; ++k) {
      const Trajectory& tr = seps[k].trajectory;
      ASSERT_EQ(tr.termination, Termination::ConvergedTo);
      EXPECT_NE(tr.limit, i);
      EXPECT_EQ(halved[k].trajectory.termination, Termination::ConvergedTo);
      EXPECT_EQ(halved[k].trajectory.limit, tr.limit);
      EXPECT_LT(std::abs((tr.sr_length + seps[k].seed_offset) -
                         (halved[k].trajectory.sr_length + halved[k].seed_offset)),
                1e-4);
    }
  }
  EXPECT_EQ(saddles, 2);
}

TEST(Skeleton, SphereProbesConnectThePoles) {
  const CharVectorField X(ellipsoid(1, 1, 1), heisenberg());
  SkeletonOptions so;
  so.probe_grid = 4;
  const Skeleton sk = skeleton(X, points_of(X), so);
  ASSERT_EQ(sk.points.size(), 2u);
  EXPECT_TRUE(sk.separatrices.empty());
  ASSERT_FALSE(sk.census.empty());
  for (const auto& pr : sk.census) {
    EXPECT_EQ(pr.alpha.kind, Termination::ConvergedTo);
    EXPECT_EQ(pr.omega.kind, Termination::ConvergedTo);
    EXPECT_NE(pr.alpha.point, pr.omega.point);
  }
  EXPECT_EQ(sk.unresolved, 0u);
}

TEST(Skeleton, HorizontalTorusHasNoLimits) {
  const CharVectorField X(torus_horizontal(1, 3), heisenberg());
  SkeletonOptions so;
  so.probe_grid = 2;
  so.leaf.horizon_T = 30;
  const Skeleton sk = skeleton(X, points_of(X), so);
  EXPECT_TRUE(sk.points.empty());
  ASSERT_FALSE(sk.census.empty());
  for (const auto& pr : sk.census)
    for (const LeafEnd& e : {pr.alpha, pr.omega})
      EXPECT_TRUE(e.kind == Termination::HorizonReached || e.kind == Termination::Periodic);
}

TEST(Skeleton, VerticalTorusCensusUsesCharacteristicPoints) {
  const CharVectorField X(torus_vertical(1, 3), heisenberg());
  SkeletonOptions so;
  so.probe_grid = 4;
  const Skeleton sk = skeleton(X, points_of(X), so);
  ASSERT_EQ(sk.points.size(), 4u);
  EXPECT_EQ(sk.separatrices.size(), 2u);
  for (const auto& pr : sk.census) {
    if (pr.unresolved) continue;
    EXPECT_EQ(pr.alpha.kind, Termination::ConvergedTo);
    EXPECT_EQ(pr.omega.kind, Termination::ConvergedTo);
    EXPECT_GE(pr.alpha.point, 0);
    EXPECT_LT(pr.omega.point, 4);
  }
}

TEST(LocateUv, RoundTripAndOffSurface) {
  const Surface s = torus_vertical(1, 3);
  const Vec2 uv(1.2, 4.0);
  const Vec2 back = locate_uv(s, s.point(uv));
  EXPECT_LT((s.point(back) - s.point(uv)).norm(), 1e-10);
  EXPECT_THROW(locate_uv(s, Vec3(5, 5, 5)), ChartError);
}
