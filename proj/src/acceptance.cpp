#include "charfol/acceptance.hpp"

#include "charfol/distance.hpp"
#include "charfol/report.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace charfol {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// A located characteristic point together with its surface, for the
// criteria that sweep every point of criteria 1-4.
struct Case {
  std::string label;
  Surface surface;
  Vec3 point;
};

std::mt19937_64 rng() { return std::mt19937_64(20261016); }

double uniform(std::mt19937_64& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

struct PlaneParams {
  double a, b, c;
};

std::vector<PlaneParams> random_planes() {
  auto g = rng();
  std::vector<PlaneParams> out;
  for (int i = 0; i < 10; ++i) {
    const double a = uniform(g, -1, 1), b = uniform(g, -1, 1);
    const double c = uniform(g, 0.5, 2) * (i % 2 == 0 ? 1 : -1);
    out.push_back({a, b, c});
  }
  return out;
}

const std::array<Vec3, 3> kEllipsoids{Vec3(1, 1, 1), Vec3(1, 2, 1), Vec3(2, 1, 3)};
const std::array<double, 3> kParaboloids{0.5, 1.0, 2.0};
const std::array<std::pair<double, double>, 3> kTori{std::pair{3.0, 1.0}, {5.0, 2.0}, {5.0, 1.0}};  // (R, r)

std::vector<CharPoint> classify_surface(const Surface& s, const ContactStructure& cs) {
  const CharVectorField X(s, cs);
  std::vector<CharPoint> pts = analyze(X, find_characteristic_points(s, cs));
  sort_points(pts);
  return pts;
}

std::vector<Case> criteria_cases(const ContactStructure& cs) {
  std::vector<Case> out;
  for (const auto& p : random_planes())
    out.push_back({"plane", plane(p.a, p.b, p.c), Vec3(-2 * p.b / p.c, 2 * p.a / p.c, 0)});
  for (const Vec3& e : kEllipsoids)
    for (double sg : {1.0, -1.0}) out.push_back({"ellipsoid", ellipsoid(e[0], e[1], e[2]), Vec3(0, 0, sg * e[2])});
  for (double a : kParaboloids) out.push_back({"paraboloid", paraboloid(a), Vec3::Zero()});
  for (const auto& [R, r] : kTori) {
    const Surface s = torus_vertical(r, R);
    for (const auto& cp : classify_surface(s, cs)) out.push_back({"torus_vertical", s, cp.location});
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome c1_plane() {
  const ContactStructure cs = heisenberg();
  double worst = 0.0;
  for (const auto& p : random_planes()) {
    const Vec3 q(-2 * p.b / p.c, 2 * p.a / p.c, 0);
    worst = std::max(worst, std::abs(khat(plane(p.a, p.b, p.c), cs, q) + 0.75));
  }
  return {worst < 1e-9, "max |khat + 3/4| = " + sci(worst) + " over 10 planes"};
}

Outcome c2_ellipsoid() {
  const ContactStructure cs = heisenberg();
  double worst = 0.0;
  for (const Vec3& e : kEllipsoids) {
    const Surface s = ellipsoid(e[0], e[1], e[2]);
    const double expect = -0.75 + e[2] * e[2] / (e[0] * e[0] * e[1] * e[1]);
    for (double sg : {1.0, -1.0}) worst = std::max(worst, std::abs(khat(s, cs, Vec3(0, 0, sg * e[2])) - expect));
  }
  return {worst < 1e-8, "max |khat - (-3/4 + c^2/(a^2 b^2))| = " + sci(worst) + " at 6 poles"};
}

Outcome c3_paraboloid() {
  const ContactStructure cs = heisenberg();
  double worst = 0.0, alt = 0.0;
  for (double a : kParaboloids) {
    const double k = khat(paraboloid(a), cs, Vec3::Zero());
    worst = std::max(worst, std::abs(k - (-0.75 + 4 * std::pow(a, 4))));
    alt = std::max(alt, std::abs(k - (-0.75 + 4 * a * a)));
  }
  std::string d = "max |khat - (-3/4 + 4 a^4)| = " + sci(worst);
  if (worst >= 1e-8) d += "; note max |khat - (-3/4 + 4 a^2)| = " + sci(alt);
  return {worst < 1e-8, d};
}

Outcome c4_torus() {
  const ContactStructure cs = heisenberg();
  std::ostringstream d;
  bool ok = true;

  auto near_z = [](const CharPoint& p, double z) {
    return std::abs(p.location.z() - z) < 1e-4 && std::abs(p.location.x()) < 1e-4 && std::abs(p.location.y()) < 1e-4;
  };

  {
    const double R = 3, r = 1;
    const auto pts = classify_surface(torus_vertical(r, R), cs);
    ok &= pts.size() == 4;
    d << "(3,1): " << pts.size() << " points";
    const double want_f = -0.75 + 1.0 / 12.0, want_v = -0.75 - 0.5;
    double err_f = 0, err_v = 0, got_f = 0, got_v = 0;
    int nf = 0, nv = 0;
    bool classes = true;
    for (const auto& p : pts) {
      if (near_z(p, R + r) || near_z(p, -(R + r))) {
        ++nf;
        got_f = p.khat;
        err_f = std::max(err_f, std::abs(p.khat - want_f));
        classes &= p.cls == PointClass::Focus;
      } else if (near_z(p, R - r) || near_z(p, -(R - r))) {
        ++nv;
        got_v = p.khat;
        err_v = std::max(err_v, std::abs(p.khat - want_v));
        classes &= p.cls == PointClass::Saddle;
      }
    }
    ok &= nf == 2 && nv == 2 && classes && err_f < 1e-7 && err_v < 1e-7;
    d << "; khat(F) = " << num(got_f) << " vs target " << num(want_f) << " (err " << sci(err_f) << ")";
    d << "; khat(V) = " << num(got_v) << " (err " << sci(err_v) << ")";
    d << "; F Focus and V Saddle: " << (classes ? "yes" : "no");
    if (err_f >= 1e-7)
      d << "; note -3/4 + 1/(r(R+r)) = " << num(-0.75 + 1.0 / (r * (R + r))) << " agrees with the measured value";
  }
  {
    const auto pts = classify_surface(torus_vertical(2, 5), cs);
    ok &= pts.size() == 8;
    d << "; (5,2): " << pts.size() << " points";
  }
  {
    const double R = 5, r = 1;
    const auto pts = classify_surface(torus_vertical(r, R), cs);
    double err = 0;
    int nv = 0;
    bool degenerate = true;
    for (const auto& p : pts)
      if (near_z(p, R - r) || near_z(p, -(R - r))) {
        ++nv;
        err = std::max(err, std::abs(p.khat + 1.0));
        degenerate &= p.cls == PointClass::DegenerateSaddle;
      }
    ok &= nv == 2 && err < 1e-7 && degenerate;
    d << "; (5,1): |khat(V) + 1| = " << sci(err) << ", DegenerateSaddle: " << (degenerate && nv == 2 ? "yes" : "no");
  }
  return {ok, d.str()};
}

const std::vector<double> kEps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

Outcome c5_rate() {
  const LimitStudy st = khat_limit_study(ellipsoid(1, 1, 1), heisenberg(), Vec3(0, 0, 1), kEps);
  const double rich = std::abs(st.extrapolated - 0.25);
  const double max_err = *std::max_element(st.error.begin(), st.error.end());
  std::ostringstream d;
  d << "Richardson |value - 1/4| = " << sci(rich);
  bool ok = rich < 1e-6;
  if (st.slope) {
    d << "; slope " << num(*st.slope);
    ok &= *st.slope >= 1.9 && *st.slope <= 2.1;
  } else {
    ok = false;
    d << "; no slope: the ratio equals 1/4 at every eps (max error " << sci(max_err)
      << "), so the error has no eps^2 term to fit";
  }
  return {ok, d.str()};
}

Outcome c6_transverse() {
  const ContactStructure cs = heisenberg();
  const ContactStructure cs2 = with_transverse(cs, {parse("0.2*x", 3), parse("0", 3), parse("1", 3)});
  const Surface s = ellipsoid(1, 1, 1);
  const LimitStudy a = khat_limit_study(s, cs, Vec3(0, 0, 1), kEps);
  const LimitStudy b = khat_limit_study(s, cs2, Vec3(0, 0, 1), kEps);
  const double diff = std::abs(a.extrapolated - b.extrapolated);
  std::ostringstream d;
  d << "extrapolated values " << num(a.extrapolated) << " and " << num(b.extrapolated) << ", difference " << sci(diff);
  if (b.slope) d << "; slope with the new transverse field " << num(*b.slope);
  return {diff < 1e-5, d.str()};
}

Outcome c7_eigen() {
  const ContactStructure cs = heisenberg();
  double eig = 0, ident = 0;
  std::size_t n = 0;
  for (const Case& c : criteria_cases(cs)) {
    const CharVectorField X(c.surface, cs, FieldKind::Xf, false);
    const HorizontalDerivatives hd = horizontal_derivatives(c.surface, cs, c.point);
    const Mat2 dx = linearization(X, c.point);
    const double tr = hd.bracket21();
    const double det = hd.hess_h().determinant();
    ident = std::max(ident, std::abs(dx.trace() - tr) / std::max(1.0, std::abs(tr)));
    ident = std::max(ident, std::abs(dx.determinant() - det) / std::max(1.0, std::abs(det)));

    const auto [lp, lm] = eigenvalues(tr, khat(hd));
    Eigen::EigenSolver<Mat2> es(dx, false);
    std::array<std::complex<double>, 2> num_ev{es.eigenvalues()[0], es.eigenvalues()[1]};
    std::array<std::complex<double>, 2> formula{lp, lm};
    auto order = [](const std::complex<double>& a, const std::complex<double>& b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(num_ev.begin(), num_ev.end(), order);
    std::sort(formula.begin(), formula.end(), order);
    for (int k = 0; k < 2; ++k)
      eig = std::max(eig, std::abs(num_ev[static_cast<std::size_t>(k)] - formula[static_cast<std::size_t>(k)]) /
                              std::max(1.0, std::abs(formula[static_cast<std::size_t>(k)])));
    ++n;
  }
  return {eig < 1e-6 && ident < 1e-9, std::to_string(n) + " points; eigenvalue mismatch " + sci(eig) +
                                          ", trace/det identity residual " + sci(ident) + " (relative to max(1, |value|))"};
}

Outcome c8_british_rail(double tol_ode) {
  const ContactStructure cs = heisenberg();
  const Surface s = plane(0, 0, 1);
  const CharVectorField X(s, cs);
  const auto chars = analyze(X, find_characteristic_points(s, cs));
  auto g = rng();
  std::vector<Vec3> queries;
  std::vector<double> expect;
  for (int i = 0; i < 5; ++i) {
    const double th = uniform(g, 0, 2 * kPi);
    const Vec2 dir(std::cos(th), std::sin(th));
    const double r1 = uniform(g, 0.5, 4), r2 = uniform(g, 0.5, 4) * (i % 2 == 0 ? -1 : 1);
    queries.emplace_back(r1 * dir.x(), r1 * dir.y(), 0);
    queries.emplace_back(r2 * dir.x(), r2 * dir.y(), 0);
    expect.push_back(std::abs(r1 - r2));
  }
  for (int i = 0; i < 5; ++i) {
    const double th = uniform(g, 0, 2 * kPi), dth = uniform(g, 0.4, 2 * kPi - 0.4);
    const double r1 = uniform(g, 0.5, 4), r2 = uniform(g, 0.5, 4);
    if (std::abs(std::sin(dth)) < 0.2) {
      --i;
      continue;
    }
    queries.emplace_back(r1 * std::cos(th), r1 * std::sin(th), 0);
    queries.emplace_back(r2 * std::cos(th + dth), r2 * std::sin(th + dth), 0);
    expect.push_back(r1 + r2);
  }
  GraphOptions go;
  go.leaf.tol_ode = tol_ode;
  const FoliationGraph fg = build_graph(X, chars, queries, go);
  double worst = 0;
  int finite = 0;
  for (int k = 0; k < 10; ++k) {
    const DistanceVerdict v = induced_distance(fg, 2 * k, 2 * k + 1);
    if (v.kind != VerdictKind::Finite) {
      worst = std::numeric_limits<double>::infinity();
      continue;
    }
    ++finite;
    worst = std::max(worst, std::abs(v.value - expect[static_cast<std::size_t>(k)]));
  }
  return {worst < 1e-4, std::to_string(finite) + "/10 pairs Finite; max |d - closed form| = " + sci(worst)};
}

Vec3 rotate_z(const Vec3& p, double a) {
  return {std::cos(a) * p.x() - std::sin(a) * p.y(), std::sin(a) * p.x() + std::cos(a) * p.y(), p.z()};
}

Outcome c9_sphere(double tol_ode) {
  const ContactStructure cs = heisenberg();
  const Surface s = ellipsoid(1, 1, 1);
  const CharVectorField X(s, cs);
  const auto chars = analyze(X, find_characteristic_points(s, cs));
  auto g = rng();
  auto random_point = [&] {
    const double z = uniform(g, -0.9, 0.9), ph = uniform(g, 0, 2 * kPi);
    const double rho = std::sqrt(1 - z * z);
    return Vec3(rho * std::cos(ph), rho * std::sin(ph), z);
  };
  std::vector<Vec3> queries;
  for (int i = 0; i < 10; ++i) {
    const Vec3 a = random_point(), b = random_point();
    const double ang = uniform(g, 0, 2 * kPi);
    queries.push_back(a);
    queries.push_back(b);
    queries.push_back(rotate_z(a, ang));
    queries.push_back(rotate_z(b, ang));
  }
  GraphOptions go;
  go.leaf.tol_ode = tol_ode;
  const FoliationGraph fg = build_graph(X, chars, queries, go);
  int finite = 0;
  double rot = 0;
  for (int k = 0; k < 10; ++k) {
    const DistanceVerdict v = induced_distance(fg, 4 * k, 4 * k + 1);
    const DistanceVerdict w = induced_distance(fg, 4 * k + 2, 4 * k + 3);
    if (v.kind == VerdictKind::Finite && w.kind == VerdictKind::Finite) {
      ++finite;
      rot = std::max(rot, std::abs(v.value - w.value));
    } else {
      rot = std::numeric_limits<double>::infinity();
    }
  }
  const TriangleReport tr = triangle_audit(fg);
  const bool ok = finite == 10 && rot < 1e-5 && tr.violations == 0 && tr.asymmetric == 0 && tr.nonzero_self == 0;
  return {ok, std::to_string(finite) + "/10 pairs Finite; rotation change " + sci(rot) + "; triangle violations " +
                  std::to_string(tr.violations) + " of " + std::to_string(tr.triples) + ", asymmetric " +
                  std::to_string(tr.asymmetric)};
}

Outcome c10_cauchy(double tol_ode) {
  const ContactStructure cs = heisenberg();
  const Surface s = ellipsoid(1, 1, 1);
  const CharVectorField X(s, cs);
  const std::array<Vec3, 5> seeds{Vec3(0.6, 0, 0.8), Vec3(0, -0.8, 0.6), Vec3(-1, 0, 0),
                                  Vec3(0.6, 0.48, -0.64), Vec3(0, 0.28, -0.96)};
  double worst = 0;
  double T_last = 0;
  int into_pole = 0;  // leaves that run to the horizon and end near a pole
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    LeafOptions o;
    o.tol_ode = tol_ode;
    o.stop_at_char = false;
    o.detect_periodic = false;
    const Direction dir = i % 2 == 0 ? Direction::Forward : Direction::Backward;
    double prev = 0;
    for (int k = 0; k < 8; ++k) {
      o.horizon_T = 10.0 * std::pow(2.0, k);
      const Trajectory tr = integrate_leaf(X, {}, seeds[i], dir, o);
      const double L = tr.sr_length;
      if (k == 7) {
        worst = std::max(worst, std::abs(L - prev));
        const Vec3 end = tr.back().point;
        into_pole += tr.termination == Termination::HorizonReached && !tr.stiff &&
                     std::min((end - Vec3(0, 0, 1)).norm(), (end - Vec3(0, 0, -1)).norm()) < 1e-3;
      }
      prev = L;
      T_last = o.horizon_T;
    }
  }
  return {worst < 1e-6 && into_pole == 5, std::to_string(into_pole) + "/5 leaves reach a pole; max |L(" +
                                              num(T_last) + ") - L(" + num(T_last / 2) + ")| = " + sci(worst)};
}

Outcome c11_infinite() {
  const ContactStructure cs = heisenberg();
  std::ostringstream d;
  bool ok = true;
  {
    const Surface s = torus_horizontal(1, 3);
    const CharVectorField X(s, cs);
    const auto chars = analyze(X, find_characteristic_points(s, cs));
    const std::vector<Vec3> q{s.point(Vec2(0.3, 0.2)), s.point(Vec2(2.5, 4.0)), s.point(Vec2(4.4, 1.1))};
    GraphOptions go;
    go.leaf.horizon_T = 100;
    const FoliationGraph g = build_graph(X, chars, q, go);
    int hits = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const DistanceVerdict v = induced_distance(g, i, j);
        hits += v.kind == VerdictKind::Infinite && v.infinite_reason == InfiniteReason::NoCharPoints;
      }
    ok &= chars.empty() && hits == 3;
    d << "horizontal torus: " << chars.size() << " characteristic points, " << hits << "/3 pairs Infinite(NoCharPoints)";
  }
  {
    const Surface s = plane(1, 0, 0);
    const CharVectorField X(s, cs);
    const auto chars = analyze(X, find_characteristic_points(s, cs));
    const std::vector<Vec3> q{Vec3(0, 1, 2), Vec3(0, -1, 3), Vec3(0, 2.5, -1.5)};
    const FoliationGraph g = build_graph(X, chars, q);
    int hits = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) hits += induced_distance(g, i, j).kind == VerdictKind::Infinite;
    ok &= hits == 3;
    d << "; vertical plane: " << hits << "/3 pairs with different z Infinite";
  }
  return {ok, d.str()};
}

Outcome c12_invariance() {
  const ContactStructure cs = heisenberg();
  double worst = 0;
  std::size_t n = 0;
  const Expr g = parse("2 + x^2 + sin(y)", 3);
  for (const Case& c : criteria_cases(cs)) {
    const double k0 = khat(c.surface, cs, c.point);
    for (double th : {0.4, 1.3, 2.9}) worst = std::max(worst, std::abs(khat(c.surface, rotate_frame(cs, th), c.point) - k0));
    const Expr& f = c.surface.implicit_form().f;
    const Box& box = c.surface.box();
    for (const Expr& scaled : {3.0 * f, -0.5 * f, f * g})
      worst = std::max(worst, std::abs(khat(Surface::implicit(scaled, box), cs, c.point) - k0));
    ++n;
  }
  return {worst < 1e-8, std::to_string(n) + " points, 3 rotations and 3 rescalings each; max change " + sci(worst)};
}

ContactStructure generic_structure() {
  auto P = [](const char* s) { return parse(s, 3); };
  Box dom;
  dom.axes = {Interval{-2, 2}, Interval{-2, 2}, Interval{-2.5, 2.5}};
  return ContactStructure({P("0.1*y"), P("0.05*x"), P("1")}, {P("1 + 0.2*x*y"), P("0.1*z"), P("-y/2")},
                          {P("0.1*z^2"), P("1 + 0.1*x"), P("x/2")}, dom);
}

Outcome c13_connection() {
  const ContactStructure gen = generic_structure();
  const ContactStructure heis = heisenberg();
  auto g = rng();
  double torsion = 0, metric = 0;
  for (int i = 0; i < 100; ++i) {
    const ContactStructure& cs = i % 2 == 0 ? gen : heis;
    const Vec3 p(uniform(g, -1.5, 1.5), uniform(g, -1.5, 1.5), uniform(g, -1.5, 1.5));
    const double eps = std::pow(10.0, uniform(g, -3, 0));
    const StructureConstants sc = structure_constants(cs, p);
    const ConnectionTable t(sc, eps);
    torsion = std::max(torsion, t.torsion_residual(sc));
    metric = std::max(metric, t.metric_residual());
  }

  // Gauss formula: ambient K_ext + det II against the intrinsic curvature of
  // the first fundamental form.
  ParamForm graph;
  graph.phi = {parse("u", 2), parse("v", 2), parse("0.3*sin(u)*cos(v) + 0.2*u*v", 2)};
  graph.u = {-1, 1};
  graph.v = {-1, 1};
  Box gbox;
  gbox.axes = {Interval{-1.2, 1.2}, Interval{-1.2, 1.2}, Interval{-1.5, 1.5}};
  Surface gs = Surface::implicit(parse("z - (0.3*sin(x)*cos(y) + 0.2*x*y)", 3), gbox, "graph");
  gs.with_param(graph);
  const Surface torus = torus_vertical(1, 3);

  double gauss = 0;
  int samples = 0;
  for (int i = 0; i < 40; ++i) {
    const bool on_graph = i % 2 == 0;
    const Surface& s = on_graph ? gs : torus;
    const ContactStructure& cs = on_graph ? gen : heis;
    const Vec2 uv = on_graph ? Vec2(uniform(g, -0.9, 0.9), uniform(g, -0.9, 0.9))
                             : Vec2(uniform(g, 0, 2 * kPi), uniform(g, 0, 2 * kPi));
    const double eps = std::pow(10.0, uniform(g, -1, 0));
    try {
      const CurvatureReport rep = gaussian_curvature(s, cs, s.point(uv), eps);
      const double k = intrinsic_curvature(s, cs, uv, eps);
      gauss = std::max(gauss, std::abs(rep.K_eps - k) / std::max(1.0, std::abs(k)));
      ++samples;
    } catch (const ChartError&) {
      // X0 f vanishes there; the tangent frame is undefined.
    }
  }
  const bool ok = torsion < 1e-9 && metric < 1e-9 && gauss < 1e-8 && samples >= 30;
  return {ok, "torsion " + sci(torsion) + ", metric " + sci(metric) + " over 100 samples; Gauss residual " + sci(gauss) +
                  " (relative) over " + std::to_string(samples) + " samples"};
}

}  // namespace

// ---------------------------------------------------------------------------

double intrinsic_curvature(const Surface& s, const ContactStructure& cs, const Vec2& uv, double eps) {
  using D = Dual<2>;
  struct Fundamental {
    double E, F, G;
    Vec2 dE, dF, dG;
  };
  auto det3 = [](const std::array<std::array<D, 3>, 3>& c) {  // columns
    return c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) - c[1][0] * (c[0][1] * c[2][2] - c[0][2] * c[2][1]) +
           c[2][0] * (c[0][1] * c[1][2] - c[0][2] * c[1][1]);
  };
  auto form = [&](const Vec2& w) {
    std::array<D, 3> P, Pu, Pv;
    const ParamForm& pf = s.param_form();
    for (std::size_t i = 0; i < 3; ++i) {
      const Jet2<2> j = eval_jet2<2>(pf.phi[i], w);
      P[i] = D(j.v, j.g);
      Pu[i] = D(j.g[0], j.h.col(0));
      Pv[i] = D(j.g[1], j.h.col(1));
    }
    std::array<std::array<D, 3>, 3> B;  // columns eps X0, X1, X2
    for (int a = 0; a < 3; ++a) {
      B[static_cast<std::size_t>(a)] = cs.field_at<D>(a, P);
      if (a == 0)
        for (auto& x : B[0]) x = x * eps;
    }
    const D det = det3(B);
    auto coeffs = [&](const std::array<D, 3>& v) {
      std::array<D, 3> c;
      for (std::size_t a = 0; a < 3; ++a) {
        auto M = B;
        M[a] = v;
        c[a] = det3(M) / det;
      }
      return c;
    };
    const auto cu = coeffs(Pu), cv = coeffs(Pv);
    D E(0.0), F(0.0), G(0.0);
    for (std::size_t a = 0; a < 3; ++a) {
      E = E + cu[a] * cu[a];
      F = F + cu[a] * cv[a];
      G = G + cv[a] * cv[a];
    }
    return Fundamental{E.v, F.v, G.v, E.g, F.g, G.g};
  };

  const Fundamental f0 = form(uv);
  // Second derivatives from central differences of exact first derivatives,
  // with one Richardson step.
  auto second = [&](const std::function<double(const Fundamental&)>& pick, int axis) {
    auto diff = [&](double h) {
      Vec2 e = Vec2::Zero();
      e[axis] = h;
      return (pick(form(uv + e)) - pick(form(uv - e))) / (2 * h);
    };
    const double h = 1e-3;
    return (4 * diff(h / 2) - diff(h)) / 3;
  };
  const double Evv = second([](const Fundamental& f) { return f.dE[1]; }, 1);
  const double Guu = second([](const Fundamental& f) { return f.dG[0]; }, 0);
  const double Fuv = second([](const Fundamental& f) { return f.dF[1]; }, 0);

  const double E = f0.E, F = f0.F, G = f0.G;
  const double Eu = f0.dE[0], Ev = f0.dE[1], Fu = f0.dF[0], Fv = f0.dF[1], Gu = f0.dG[0], Gv = f0.dG[1];
  Mat3 m1, m2;
  m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev, Fv - 0.5 * Gu, E, F, 0.5 * Gv, F, G;
  m2 << 0.0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, E, F, 0.5 * Gu, F, G;
  const double w = E * G - F * F;
  return (m1.determinant() - m2.determinant()) / (w * w);
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  struct Entry {
    int id;
    const char* title;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const double tol = opts.tol_ode;
  const std::vector<Entry> entries{
      {1, "plane khat", 1, c1_plane},
      {2, "ellipsoid khat", 1, c2_ellipsoid},
      {3, "paraboloid khat", 1, c3_paraboloid},
      {4, "vertical torus census and bifurcation", 10, c4_torus},
      {5, "curvature ratio convergence rate", 2, c5_rate},
      {6, "independence of the transverse field", 2, c6_transverse},
      {7, "eigenvalue cross-check", 30, c7_eigen},
      {8, "plane distance closed form", 5, [tol] { return c8_british_rail(tol); }},
      {9, "sphere finiteness", 30, [tol] { return c9_sphere(tol); }},
      {10, "Cauchy leaf lengths", 30, [tol] { return c10_cauchy(tol); }},
      {11, "infinite verdicts", 5, c11_infinite},
      {12, "frame rotation and f-rescaling invariance", 5, c12_invariance},
      {13, "connection table soundness", 60, c13_connection},
  };

  std::vector<CriterionResult> out;
  for (const Entry& e : entries) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), e.id) == opts.only.end()) continue;
    CriterionResult r;
    r.id = e.id;
    r.title = e.title;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = e.run();
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("error: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > e.budget) {
      r.pass = false;
      r.detail += "; over the " + num(e.budget) + " s budget";
    }
    out.push_back(r);
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.title << ": " << r.detail << " (";
  os.precision(3);
  os << std::fixed << r.seconds << " s)";
  return os.str();
}

}  // namespace charfol
