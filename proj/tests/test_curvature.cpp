#include "charfol/curvature.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace charfol;
using namespace charfol::test;

namespace {

const Surface& generic_surface() {
  static const Surface s = Surface::implicit(parse("x^2 + 1.3*y^2 + z^2 - 1", 3), box(2, 2, 2.5));
  return s;
}

std::vector<Vec3> char_locations(const Surface& s, const ContactStructure& cs) {
  std::vector<Vec3> out;
  for (const auto& lp : find_characteristic_points(s, cs).points) out.push_back(lp.location);
  return out;
}

// (surface, structure, characteristic point) triples used for the closed forms.
struct Site {
  Surface s;
  ContactStructure cs;
  Vec3 p;
};
std::vector<Site> sites() {
  std::vector<Site> out;
  const ContactStructure h = heisenberg();
  const ContactStructure tilted = with_transverse(h, {parse("0.2*x", 3), parse("0.1*y", 3), parse("1", 3)});
  for (const Surface& s : {ellipsoid(1, 1, 1), ellipsoid(2, 1, 3), paraboloid(0.5), torus_vertical(1, 3)}) {
    for (const Vec3& p : char_locations(s, h)) {
      out.push_back({s, h, p});
      out.push_back({s, tilted, p});
      out.push_back({s, rotate_frame(h, 0.8), p});
    }
  }
  for (const Vec3& p : char_locations(generic_surface(), generic_frame())) out.push_back({generic_surface(), generic_frame(), p});
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(ConnectionTable, HeisenbergValue) {
  const ConnectionTable t = connection_table(structure_constants(heisenberg(), Vec3::Zero()), 1.0);
  EXPECT_NEAR(std::abs(t(0, 1, 2)), 0.5, 1e-15);
  // With only c^0_12 nonzero, coefficients with three distinct indices are +-c/2
  // and the rest vanish apart from the X0 rows.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const bool distinct = i != j && j != k && i != k;
        if (distinct) EXPECT_NEAR(std::abs(t(i, j, k)), 0.5, 1e-15);
        else EXPECT_EQ(t(i, j, k), 0.0) << i << j << k;
      }
}

TEST(ConnectionTable, TorsionFreeAndMetric) {
  const ContactStructure cs = generic_frame();
  auto g = rng(41);
  for (int t = 0; t < 20; ++t) {
    const StructureConstants sc = structure_constants(cs, random_point(g, 1.8));
    for (double eps : {1.0, 0.1}) {
      const ConnectionTable tab = connection_table(sc, eps);
      EXPECT_LT(tab.torsion_residual(sc), 1e-9);
      EXPECT_LT(tab.metric_residual(), 1e-9);
    }
  }
}

// The printed rows of the table, read as frame coefficients. For the diagonal
// rows with i = 1, 2 the unit-length fields give c^i_i1 and c^i_i2 without the
// 1/eps^2 factor.
TEST(ConnectionTable, PrintedRows) {
  const ContactStructure cs = generic_frame();
  auto g = rng(42);
  for (int t = 0; t < 20; ++t) {
    const StructureConstants sc = structure_constants(cs, random_point(g, 1.8));
    auto c = [&](int k, int i, int j) { return sc(k, i, j); };
    for (double eps : {1.0, 0.3, 0.05}) {
      const double e2 = eps * eps;
      const ConnectionTable tab = connection_table(sc, eps);
      auto near = [&](const Vec3& got, const Vec3& want) {
        EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12 * (1 + want.cwiseAbs().maxCoeff()))
            << got.transpose() << " vs " << want.transpose();
      };
      near(tab.covariant(0, 0), Vec3(0, c(0, 0, 1) / e2, c(0, 0, 2) / e2));
      for (int i = 1; i <= 2; ++i) {
        Vec3 want(c(i, i, 0) * e2, 0, 0);
        want[1] = c(i, i, 1);
        want[2] = c(i, i, 2);
        near(tab.covariant(i, i), want);
        const int j = 3 - i;
        Vec3 mixed = Vec3::Zero();
        mixed[0] = 0.5 * (-c(j, 0, i) * e2 - c(i, 0, j) * e2 + c(0, i, j));
        mixed[j] = c(j, i, j);
        near(tab.covariant(j, i), mixed);
      }
      near(tab.covariant(0, 1), Vec3(-c(0, 0, 1), 0, 0.5 * (c(1, 0, 2) - c(2, 0, 1) + c(0, 1, 2) / e2)));
      near(tab.covariant(0, 2), Vec3(-c(0, 0, 2), 0.5 * (c(2, 0, 1) - c(1, 0, 2) - c(0, 1, 2) / e2), 0));
    }
  }
}

TEST(ClosedForms, MatchGeneralFrameRoute) {
  for (const auto& [s, cs, p] : sites())
    for (double eps : {1.0, 0.1, 0.01}) {
      const CurvatureReport r = gaussian_curvature(s, cs, p, eps);
      EXPECT_LT(rel(det_second_fundamental(s, cs, p, eps), r.det_II), 1e-8) << s.name() << " eps " << eps;
      EXPECT_LT(rel(extrinsic_curvature(s, cs, p, eps), r.K_ext), 1e-8) << s.name() << " eps " << eps;
      EXPECT_NEAR(r.K_eps, det_second_fundamental(s, cs, p, eps) + extrinsic_curvature(s, cs, p, eps),
                  1e-8 * std::max(1.0, std::abs(r.K_eps)));
    }
}

TEST(ClosedForms, LeadingTerms) {
  const double eps = 1e-4;
  for (const auto& [s, cs, p] : sites()) {
    const HorizontalDerivatives hd = horizontal_derivatives(s, cs, p);
    const double c = structure_constants(cs, p)(0, 1, 2);
    const double lead_II = hd.hess_h().determinant() / (hd.Xf[0] * hd.Xf[0]) - c * c / 4;
    EXPECT_LT(rel(eps * eps * det_second_fundamental(s, cs, p, eps), lead_II), 1e-6) << s.name();
    EXPECT_LT(rel(eps * eps * extrinsic_curvature(s, cs, p, eps), -0.75 * c * c), 1e-8) << s.name();
  }
}

TEST(ClosedForms, HeisenbergExtrinsicCurvature) {
  for (double eps : {1.0, 0.2, 0.01})
    EXPECT_NEAR(extrinsic_curvature(ellipsoid(1, 1, 1), heisenberg(), Vec3(0, 0, 1), eps), -0.75 / (eps * eps),
                1e-12 / (eps * eps));
}

// At a characteristic point T_pS = D_p, so K_ext is the sectional curvature
// of span(X1, X2), here from the Riemann tensor built out of the table.
TEST(ClosedForms, ExtrinsicIsSectionalCurvature) {
  for (const auto& [s, cs, p] : sites())
    for (double eps : {1.0, 0.5}) {
      const double sec = riemann(cs, p, eps, 1, 2, 2, 1);
      EXPECT_LT(rel(extrinsic_curvature(s, cs, p, eps), sec), 1e-7) << s.name();
    }
}

TEST(GaussianCurvature, GaussFormulaAtRandomPoints) {
  const ContactStructure cs = generic_frame();
  const Surface& s = generic_surface();
  auto g = rng(43);
  int n = 0;
  while (n < 100) {
    Vec3 d = random_point(g, 1);
    if (d.norm() < 0.1) continue;
    const Vec3 p = s.project(d.normalized(), 8);
    const double eps = uniform(g, 0.05, 1.0);
    CurvatureReport r;
    try {
      r = gaussian_curvature(s, cs, p, eps);
    } catch (const ChartError&) {
      continue;
    }
    EXPECT_NEAR(r.K_eps, r.K_ext + r.det_II, 1e-8 * std::max(1.0, std::abs(r.K_eps)));
    EXPECT_NEAR(r.ratio, r.K_eps / r.det_B, 1e-12 * std::max(1.0, std::abs(r.ratio)));
    ++n;
  }
}

TEST(GaussianCurvature, DetBIsHomogeneous) {
  for (const auto& [s, cs, p] : sites()) {
    const double a = gaussian_curvature(s, cs, p, 0.1).det_B, b = gaussian_curvature(s, cs, p, 0.01).det_B;
    EXPECT_NEAR(a * 0.01 / (b * 1e-4), 1.0, 1e-12);
  }
}

TEST(GaussianCurvature, ChartErrorWhereTransverseDerivativeVanishes) {
  EXPECT_THROW(gaussian_curvature(plane(1, 0, 0), heisenberg(), Vec3(0, 1, 2), 0.1), ChartError);
}

TEST(GaussianCurvature, SpherePoleRatio) {
  const CurvatureReport r = gaussian_curvature(ellipsoid(1, 1, 1), heisenberg(), Vec3(0, 0, 1), 0.01);
  EXPECT_LT(std::abs(r.ratio - 0.25), 1e-3);
}

const std::vector<double> kEps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

TEST(LimitStudy, SpherePoleHeisenberg) {
  const LimitStudy st = khat_limit_study(ellipsoid(1, 1, 1), heisenberg(), Vec3(0, 0, 1), kEps);
  EXPECT_EQ(st.closed_form, 0.25);
  EXPECT_NEAR(st.extrapolated, 0.25, 1e-6);
  // The eps^2 term vanishes identically here, so the rate is exact.
  EXPECT_TRUE(st.exact);
  EXPECT_FALSE(st.slope.has_value());
}

TEST(LimitStudy, TransverseFieldIndependence) {
  const ContactStructure h = heisenberg();
  const ContactStructure t = with_transverse(h, {parse("0.2*x", 3), parse("0", 3), parse("1", 3)});
  const LimitStudy a = khat_limit_study(ellipsoid(1, 1, 1), h, Vec3(0, 0, 1), kEps);
  const LimitStudy b = khat_limit_study(ellipsoid(1, 1, 1), t, Vec3(0, 0, 1), kEps);
  EXPECT_NEAR(a.extrapolated, b.extrapolated, 1e-5);
  ASSERT_TRUE(b.slope.has_value());
  EXPECT_GE(*b.slope, 1.9);
  EXPECT_LE(*b.slope, 2.1);
}

TEST(LimitStudy, PlaneIsExact) {
  const LimitStudy st = khat_limit_study(plane(0.3, 0.1, 1), heisenberg(), Vec3(-0.2, 0.6, 0), kEps);
  EXPECT_TRUE(st.exact);
  for (double r : st.ratio) EXPECT_NEAR(r, -0.75, 1e-12);
}

TEST(LimitStudy, GenericFrameRateIsSecondOrder) {
  const auto pts = char_locations(generic_surface(), generic_frame());
  ASSERT_FALSE(pts.empty());
  for (const Vec3& p : pts) {
    const LimitStudy st = khat_limit_study(generic_surface(), generic_frame(), p, kEps);
    EXPECT_NEAR(st.extrapolated, st.closed_form, 1e-6 * std::max(1.0, std::abs(st.closed_form)));
    ASSERT_TRUE(st.slope.has_value());
    EXPECT_NEAR(*st.slope, 2.0, 0.1);
  }
}

TEST(LimitStudy, Preconditions) {
  const Surface s = ellipsoid(1, 1, 1);
  const ContactStructure h = heisenberg();
  EXPECT_THROW(khat_limit_study(s, h, Vec3(0, 0, 1), {1e-1, 1e-2, 1e-3}), PreconditionError);
  EXPECT_THROW(khat_limit_study(s, h, Vec3(0, 0, 1), {1e-3, 1e-2, 1e-1, 1.0}), PreconditionError);
  EXPECT_THROW(khat_limit_study(s, h, Vec3(0, 0, 1), {1e-1, 8e-2, 6e-2, 4e-2}), PreconditionError);
}
