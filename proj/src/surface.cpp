#include "charfol/surface.hpp"

#include "charfol/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace charfol {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Box symmetric_box(double hx, double hy, double hz) {
  Box b;
  b.axes = {Interval{-hx, hx}, Interval{-hy, hy}, Interval{-hz, hz}};
  return b;
}

template <typename T>
T det3(const std::array<T, 3>& a, const std::array<T, 3>& b, const std::array<T, 3>& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

bool straddles(double lo, double hi) { return lo <= 0.0 && hi >= 0.0; }

// Merges roots closer than the merge radius, or moderately close with a small
// residual all along the segment between them (slow convergence at degenerate
// roots leaves clusters around a single zero). The smaller residual wins.
template <typename Residual>
std::vector<LocatedPoint> merge_roots(std::vector<LocatedPoint> roots, double diameter, double tol, Residual&& residual) {
  std::sort(roots.begin(), roots.end(), [](const LocatedPoint& a, const LocatedPoint& b) {
    return std::lexicographical_compare(a.location.data(), a.location.data() + 3, b.location.data(),
                                        b.location.data() + 3);
  });
  const double merge_radius = 1e-6 * diameter;
  const double cluster_radius = 1e-3 * diameter;
  std::vector<LocatedPoint> out;
  for (const LocatedPoint& r : roots) {
    bool merged = false;
    for (LocatedPoint& kept : out) {
      const double d = (kept.location - r.location).norm();
      bool same = d <= merge_radius;
      if (!same && d <= cluster_radius) {
        same = true;
        for (int k = 1; k < 8 && same; ++k) same = residual(kept, r, k / 8.0) < tol;
      }
      if (same) {
        if (r.residual < kept.residual) kept = r;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Implicit search on (f, X1 f, X2 f).

struct ImplicitEval {
  Vec3 F;
  Mat3 J;
  double grad_norm;
};

ImplicitEval implicit_system(const Expr& f, const ContactStructure& cs, const Vec3& p) {
  const Jet2<3> fj = eval_jet2<3>(f, p);
  const FrameJet jet = frame_jet(cs, p);
  ImplicitEval e;
  e.F[0] = fj.v;
  e.J.row(0) = fj.g.transpose();
  for (int i = 1; i <= 2; ++i) {
    const Vec3 xi = jet.A.col(i);
    e.F[i] = xi.dot(fj.g);
    e.J.row(i) = (jet.J[static_cast<std::size_t>(i)].transpose() * fj.g + fj.h * xi).transpose();
  }
  e.grad_norm = fj.g.norm();
  return e;
}

double implicit_residual(const Vec3& F) { return std::max(std::abs(F[0]), std::abs(F[1]) + std::abs(F[2])); }

std::optional<LocatedPoint> newton_implicit(const Expr& f, const ContactStructure& cs, const Box& box, Vec3 x,
                                            double tol_fixed) {
  const double diam = box.diameter();
  ImplicitEval e = implicit_system(f, cs, x);
  for (int it = 0; it < 200; ++it) {
    Eigen::FullPivLU<Mat3> lu(e.J);
    Vec3 step = lu.rank() == 3 ? Vec3(lu.solve(e.F)) : Vec3(e.J.completeOrthogonalDecomposition().solve(e.F));
    if (!step.allFinite()) return std::nullopt;
    if (step.norm() > 0.1 * diam) step *= 0.1 * diam / step.norm();
    double lambda = 1.0;
    const double r0 = e.F.norm();
    ImplicitEval next;
    Vec3 xn;
    for (int ls = 0; ls < 30; ++ls) {
      xn = x - lambda * step;
      try {
        next = implicit_system(f, cs, xn);
        if (next.F.norm() < r0 || next.F.norm() == 0.0) break;
      } catch (const Error&) {
      }
      lambda *= 0.5;
    }
    const double moved = (xn - x).norm();
    x = xn;
    e = next;
    if (moved <= 1e-15 * (1.0 + x.norm())) break;
  }
  const double tol = tol_fixed > 0 ? tol_fixed : 1e-9 * (1.0 + e.grad_norm);
  const double res = implicit_residual(e.F);
  Box grown = box;
  for (auto& ax : grown.axes) {
    const double pad = 1e-9 * diam;
    ax.lo -= pad;
    ax.hi += pad;
  }
  if (!(res < tol) || !grown.contains(x)) return std::nullopt;
  return LocatedPoint{x, std::nullopt, res};
}

CharacteristicSet search_implicit(const Surface& s, const ContactStructure& cs, const CharSearchOptions& opts) {
  const Expr& f = s.implicit_form().f;
  const Box& box = s.implicit_form().box;
  const int n = opts.grid_n;
  const Vec3 lo = box.lower();
  const Vec3 h = (box.upper() - lo) / n;
  const int nn = n + 1;
  auto node = [&](int i, int j, int k) { return Vec3(lo + Vec3(i * h[0], j * h[1], k * h[2])); };
  auto idx = [nn](int i, int j, int k) { return (static_cast<std::size_t>(i) * nn + j) * nn + k; };

  std::vector<double> fv(static_cast<std::size_t>(nn) * nn * nn);
  parallel_for(static_cast<std::size_t>(nn), [&](std::size_t i) {
    for (int j = 0; j < nn; ++j)
      for (int k = 0; k < nn; ++k) {
        double v = std::numeric_limits<double>::quiet_NaN();
        try {
          v = evaluate(f, node(static_cast<int>(i), j, k));
        } catch (const DomainError&) {
        }
        fv[idx(static_cast<int>(i), j, k)] = v;
      }
  });

  // Cells crossed by the surface, then their corner values of X1 f, X2 f.
  std::vector<std::array<int, 3>> surface_cells;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double mn = INFINITY, mx = -INFINITY;
        bool ok = true;
        for (int c = 0; c < 8; ++c) {
          const double v = fv[idx(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))];
          if (std::isnan(v)) ok = false;
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
        if (ok && straddles(mn, mx)) surface_cells.push_back({i, j, k});
      }

  std::vector<char> flagged(surface_cells.size(), 0);
  parallel_for(surface_cells.size(), [&](std::size_t c) {
    const auto [i, j, k] = surface_cells[c];
    Vec2 mn = Vec2::Constant(INFINITY), mx = Vec2::Constant(-INFINITY);
    for (int q = 0; q < 8; ++q) {
      const Vec3 p = node(i + (q & 1), j + ((q >> 1) & 1), k + ((q >> 2) & 1));
      try {
        const Dual<3> fd = eval_dual<3>(f, p);
        const Mat3 A = cs.frame(p);
        for (int a = 0; a < 2; ++a) {
          const double v = A.col(a + 1).dot(fd.g);
          mn[a] = std::min(mn[a], v);
          mx[a] = std::max(mx[a], v);
        }
      } catch (const Error&) {
        return;
      }
    }
    flagged[c] = straddles(mn[0], mx[0]) && straddles(mn[1], mx[1]);
  });

  std::vector<Vec3> starts;
  for (std::size_t c = 0; c < surface_cells.size(); ++c)
    if (flagged[c]) {
      const auto [i, j, k] = surface_cells[c];
      starts.push_back(node(i, j, k) + 0.5 * h);
    }

  std::vector<std::optional<LocatedPoint>> found(starts.size());
  parallel_for(starts.size(), [&](std::size_t c) {
    try {
      found[c] = newton_implicit(f, cs, box, starts[c], opts.tol_root);
    } catch (const Error&) {
      found[c] = std::nullopt;
    }
  });

  CharacteristicSet out;
  out.grid_n = n;
  std::vector<LocatedPoint> roots;
  double worst_tol = 0.0;
  for (std::size_t c = 0; c < starts.size(); ++c) {
    if (found[c]) {
      roots.push_back(*found[c]);
    } else {
      out.unresolved.push_back(starts[c]);
    }
  }
  for (const auto& r : roots) {
    const double tol = opts.tol_root > 0 ? opts.tol_root : 1e-9 * (1.0 + implicit_system(f, cs, r.location).grad_norm);
    worst_tol = std::max(worst_tol, tol);
  }
  out.points = merge_roots(std::move(roots), box.diameter(), worst_tol,
                           [&](const LocatedPoint& a, const LocatedPoint& b, double t) {
                             return implicit_residual(implicit_system(f, cs, (1 - t) * a.location + t * b.location).F);
                           });
  // A flagged cell whose Newton run failed is only unresolved if no located
  // root lies inside it: neighbours of a root often fail on their own.
  std::vector<Vec3> unresolved;
  for (const Vec3& c : out.unresolved) {
    bool covered = false;
    for (const auto& r : out.points)
      if (((r.location - c).cwiseAbs() - 1.01 * h).maxCoeff() <= 0.0) covered = true;
    if (!covered) unresolved.push_back(c);
  }
  out.unresolved = std::move(unresolved);
  return out;
}

// ---------------------------------------------------------------------------
// Parametric search on (theta(Phi_u), theta(Phi_v)).

double param_residual(const ParamField& pf) { return std::abs(pf.value[0]) + std::abs(pf.value[1]); }

double param_tol(const Surface& s, const Vec2& uv, double tol_fixed) {
  if (tol_fixed > 0) return tol_fixed;
  return 1e-9 * (1.0 + s.tangents(uv).norm());
}

std::optional<LocatedPoint> newton_param(const Surface& s, const ContactStructure& cs, Vec2 uv, double tol_fixed) {
  const ParamForm& pf = s.param_form();
  const double span = std::max(pf.u.width(), pf.v.width());
  ParamField e = param_field(s, cs, uv);
  for (int it = 0; it < 200; ++it) {
    Eigen::FullPivLU<Mat2> lu(e.jacobian);
    Vec2 step = lu.rank() == 2 ? Vec2(lu.solve(e.value)) : Vec2(e.jacobian.completeOrthogonalDecomposition().solve(e.value));
    if (!step.allFinite()) return std::nullopt;
    if (step.norm() > 0.1 * span) step *= 0.1 * span / step.norm();
    double lambda = 1.0;
    const double r0 = e.value.norm();
    ParamField next = e;
    Vec2 un;
    bool evaluated = false;
    for (int ls = 0; ls < 30; ++ls) {
      un = s.wrap(uv - lambda * step);
      try {
        next = param_field(s, cs, un);
        evaluated = true;
        if (next.value.norm() < r0 || next.value.norm() == 0.0) break;
      } catch (const Error&) {
        evaluated = false;
      }
      lambda *= 0.5;
    }
    if (!evaluated) return std::nullopt;
    const double moved = s.param_delta(uv, un).norm();
    uv = un;
    e = next;
    if (moved <= 1e-15 * (1.0 + uv.norm())) break;
  }
  const double res = param_residual(e);
  const double pad = 1e-9 * span;
  const bool inside = (pf.periodic_u || (uv[0] >= pf.u.lo - pad && uv[0] <= pf.u.hi + pad)) &&
                      (pf.periodic_v || (uv[1] >= pf.v.lo - pad && uv[1] <= pf.v.hi + pad));
  if (!(res < param_tol(s, uv, tol_fixed)) || !inside) return std::nullopt;
  return LocatedPoint{s.point(uv), uv, res};
}

CharacteristicSet search_param(const Surface& s, const ContactStructure& cs, const CharSearchOptions& opts) {
  const ParamForm& pf = s.param_form();
  const int n = opts.grid_n;
  const int nn = n + 1;
  auto node = [&](int i, int j) {
    return Vec2(pf.u.lo + pf.u.width() * i / n, pf.v.lo + pf.v.width() * j / n);
  };
  std::vector<Vec2> g(static_cast<std::size_t>(nn) * nn, Vec2::Constant(std::numeric_limits<double>::quiet_NaN()));
  parallel_for(static_cast<std::size_t>(nn), [&](std::size_t i) {
    for (int j = 0; j < nn; ++j) {
      try {
        const ParamField e = param_field(s, cs, node(static_cast<int>(i), j));
        g[i * nn + j] = Vec2(e.value[1], -e.value[0]);
      } catch (const Error&) {
      }
    }
  });

  std::vector<Vec2> starts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 mn = Vec2::Constant(INFINITY), mx = Vec2::Constant(-INFINITY);
      bool ok = true;
      for (int c = 0; c < 4; ++c) {
        const Vec2 v = g[static_cast<std::size_t>(i + (c & 1)) * nn + j + (c >> 1)];
        if (!v.allFinite()) ok = false;
        mn = mn.cwiseMin(v);
        mx = mx.cwiseMax(v);
      }
      if (ok && straddles(mn[0], mx[0]) && straddles(mn[1], mx[1]))
        starts.push_back(0.5 * (node(i, j) + node(i + 1, j + 1)));
    }

  std::vector<std::optional<LocatedPoint>> found(starts.size());
  parallel_for(starts.size(), [&](std::size_t c) {
    try {
      found[c] = newton_param(s, cs, starts[c], opts.tol_root);
    } catch (const Error&) {
      found[c] = std::nullopt;
    }
  });

  CharacteristicSet out;
  out.grid_n = n;
  out.searched_param = true;
  std::vector<LocatedPoint> roots;
  std::vector<Vec2> failed;
  double worst_tol = 0.0;
  for (std::size_t c = 0; c < starts.size(); ++c) {
    if (found[c]) {
      roots.push_back(*found[c]);
      worst_tol = std::max(worst_tol, param_tol(s, *found[c]->uv, opts.tol_root));
    } else {
      failed.push_back(starts[c]);
    }
  }
  out.points = merge_roots(std::move(roots), s.diameter(), worst_tol,
                           [&](const LocatedPoint& a, const LocatedPoint& b, double t) {
                             const Vec2 uv = s.wrap(*a.uv + t * s.param_delta(*a.uv, *b.uv));
                             return param_residual(param_field(s, cs, uv));
                           });
  const Vec2 h(pf.u.width() / n, pf.v.width() / n);
  for (const Vec2& c : failed) {
    bool covered = false;
    for (const auto& r : out.points)
      if ((s.param_delta(c, *r.uv).cwiseAbs() - 1.01 * h).maxCoeff() <= 0.0) covered = true;
    if (!covered) out.unresolved.push_back(s.point(c));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Surface Surface::implicit(Expr f, Box box, std::string name) {
  if (f.arity() != 3) throw PreconditionError("implicit surfaces need an expression in x, y, z");
  Surface s;
  s.implicit_ = ImplicitForm{std::move(f), box};
  s.box_ = box;
  s.name_ = std::move(name);
  return s;
}

Surface Surface::parametrized(ParamForm form, std::string name) {
  Surface s;
  s.name_ = std::move(name);
  s.with_param(std::move(form));
  // Bounding box of Phi sampled on the parameter domain, padded by 25%.
  Vec3 lo = Vec3::Constant(INFINITY), hi = Vec3::Constant(-INFINITY);
  constexpr int n = 64;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const ParamForm& pf = s.param_form();
      const Vec3 p = s.point({pf.u.lo + pf.u.width() * i / n, pf.v.lo + pf.v.width() * j / n});
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  const Vec3 pad = 0.25 * (hi - lo).cwiseMax(Vec3::Constant(1e-3));
  for (int k = 0; k < 3; ++k) s.box_.axes[static_cast<std::size_t>(k)] = Interval{lo[k] - pad[k], hi[k] + pad[k]};
  s.compact_ = s.param_form().periodic_u && s.param_form().periodic_v;
  return s;
}

Surface& Surface::with_param(ParamForm form) {
  for (const auto& e : form.phi)
    if (e.arity() != 2) throw PreconditionError("parametrizations need expressions in u, v");
  param_ = std::move(form);
  return *this;
}

const ImplicitForm& Surface::implicit_form() const {
  if (!implicit_) throw PreconditionError("surface '" + name_ + "' has no implicit form");
  return *implicit_;
}

const ParamForm& Surface::param_form() const {
  if (!param_) throw PreconditionError("surface '" + name_ + "' has no parametrization");
  return *param_;
}

Vec3 Surface::point(const Vec2& uv) const {
  const ParamForm& pf = param_form();
  Vec3 p;
  for (int m = 0; m < 3; ++m)
    p[m] = evaluate<double>(pf.phi[static_cast<std::size_t>(m)], std::span<const double>(uv.data(), 2));
  return p;
}

Eigen::Matrix<double, 3, 2> Surface::tangents(const Vec2& uv) const {
  const ParamForm& pf = param_form();
  Eigen::Matrix<double, 3, 2> t;
  for (int m = 0; m < 3; ++m) t.row(m) = eval_dual<2>(pf.phi[static_cast<std::size_t>(m)], uv).g.transpose();
  return t;
}

Vec2 Surface::wrap(const Vec2& uv) const {
  const ParamForm& pf = param_form();
  Vec2 out = uv;
  auto wrap1 = [](double t, const Interval& I) {
    const double w = I.width();
    double r = std::fmod(t - I.lo, w);
    if (r < 0) r += w;
    return I.lo + r;
  };
  if (pf.periodic_u) out[0] = wrap1(uv[0], pf.u);
  if (pf.periodic_v) out[1] = wrap1(uv[1], pf.v);
  return out;
}

Vec2 Surface::param_delta(const Vec2& a, const Vec2& b) const {
  const ParamForm& pf = param_form();
  Vec2 d = b - a;
  auto reduce = [](double t, double w) { return t - w * std::round(t / w); };
  if (pf.periodic_u) d[0] = reduce(d[0], pf.u.width());
  if (pf.periodic_v) d[1] = reduce(d[1], pf.v.width());
  return d;
}

Vec3 Surface::project(const Vec3& p, int iterations) const {
  const Expr& f = implicit_form().f;
  Vec3 x = p;
  for (int i = 0; i < iterations; ++i) {
    const Dual<3> d = eval_dual<3>(f, x);
    const double g2 = d.g.squaredNorm();
    if (g2 == 0.0) throw ChartError("gradient of f vanishes on the surface");
    x -= (d.v / g2) * d.g;
  }
  return x;
}

// ---------------------------------------------------------------------------

Surface plane(double a, double b, double c) {
  if (a == 0.0 && b == 0.0 && c == 0.0) throw PreconditionError("plane needs (a, b, c) != 0");
  return Surface::implicit(parse(num(a) + "*x + " + num(b) + "*y + " + num(c) + "*z", 3), Box{}, "plane");
}

Surface ellipsoid(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0)) throw PreconditionError("ellipsoid semi-axes must be positive");
  const std::string f = "x^2/" + num(a * a) + " + y^2/" + num(b * b) + " + z^2/" + num(c * c) + " - 1";
  Surface s = Surface::implicit(parse(f, 3), symmetric_box(1.25 * a, 1.25 * b, 1.25 * c), "ellipsoid");
  s.set_compact(true);
  return s;
}

Surface paraboloid(double a) {
  Box box = symmetric_box(2.0, 2.0, 1.0);
  box.axes[2] = Interval{std::min(0.0, 8.0 * a) - 1.0, std::max(0.0, 8.0 * a) + 1.0};
  return Surface::implicit(parse("z - " + num(a) + "*(x^2+y^2)", 3), box, "paraboloid");
}

namespace {
ParamForm torus_param(const std::string& x, const std::string& y, const std::string& z) {
  ParamForm pf;
  pf.phi = {parse(x, 2), parse(y, 2), parse(z, 2)};
  pf.u = Interval{0.0, 2.0 * std::numbers::pi};
  pf.v = Interval{0.0, 2.0 * std::numbers::pi};
  pf.periodic_u = pf.periodic_v = true;
  return pf;
}
void check_torus(double r, double R) {
  if (!(R > r && r > 0)) throw PreconditionError("torus needs R > r > 0");
}
}  // namespace

Surface torus_horizontal(double r, double R) {
  check_torus(r, R);
  const std::string rs = num(r), Rs = num(R);
  const std::string rho = "(" + Rs + " + " + rs + "*cos(u))";
  const std::string f = "(x^2+y^2+z^2+" + num(R * R - r * r) + ")^2 - " + num(4 * R * R) + "*(x^2+y^2)";
  const double h = 1.25 * (R + r);
  Surface s = Surface::implicit(parse(f, 3), symmetric_box(h, h, 1.25 * r), "torus_horizontal");
  s.with_param(torus_param(rho + "*cos(v)", rho + "*sin(v)", rs + "*sin(u)"));
  s.set_compact(true);
  return s;
}

Surface torus_vertical(double r, double R) {
  check_torus(r, R);
  const std::string rs = num(r), Rs = num(R);
  const std::string rho = "(" + Rs + " + " + rs + "*cos(u))";
  const std::string f = "(x^2+y^2+z^2+" + num(R * R - r * r) + ")^2 - " + num(4 * R * R) + "*(y^2+z^2)";
  const double h = 1.25 * (R + r);
  Surface s = Surface::implicit(parse(f, 3), symmetric_box(1.25 * r, h, h), "torus_vertical");
  s.with_param(torus_param(rs + "*sin(u)", rho + "*cos(v)", rho + "*sin(v)"));
  s.set_compact(true);
  return s;
}

// ---------------------------------------------------------------------------

HorizontalDerivatives horizontal_derivatives(const Expr& f, const ContactStructure& cs, const Vec3& p) {
  const Jet2<3> fj = eval_jet2<3>(f, p);
  const FrameJet jet = frame_jet(cs, p);
  HorizontalDerivatives hd;
  hd.f = fj.v;
  hd.grad = fj.g;
  hd.hess = fj.h;
  hd.A = jet.A;
  for (int a = 0; a < 3; ++a) hd.Xf[a] = jet.A.col(a).dot(fj.g);
  // X_a X_b f = X_a^n d_n (X_b^m d_m f).
  for (int b = 0; b < 3; ++b) {
    const Vec3 grad_xbf = jet.J[static_cast<std::size_t>(b)].transpose() * fj.g + fj.h * jet.A.col(b);
    for (int a = 0; a < 3; ++a) hd.XXf(a, b) = jet.A.col(a).dot(grad_xbf);
  }
  return hd;
}

HorizontalDerivatives horizontal_derivatives(const Surface& s, const ContactStructure& cs, const Vec3& p) {
  return horizontal_derivatives(s.implicit_form().f, cs, p);
}

std::pair<Vec3, Vec3> tangent_frame(const Surface& s, const ContactStructure& cs, const Vec3& p) {
  const HorizontalDerivatives hd = horizontal_derivatives(s, cs, p);
  if (std::abs(hd.Xf[0]) < 1e-12 * (1.0 + hd.grad.norm())) throw ChartError("X0 f vanishes: the tangent frame is undefined");
  const Vec3 f1 = hd.Xf[0] * hd.A.col(1) - hd.Xf[1] * hd.A.col(0);
  const Vec3 f2 = hd.Xf[0] * hd.A.col(2) - hd.Xf[2] * hd.A.col(0);
  return {f1, f2};
}

ParamField param_field(const Surface& s, const ContactStructure& cs, const Vec2& uv) {
  const ParamForm& pf = s.param_form();
  using D = Dual<2>;
  std::array<D, 3> P, Pu, Pv;
  for (std::size_t m = 0; m < 3; ++m) {
    const Jet2<2> j = eval_jet2<2>(pf.phi[m], uv);
    P[m] = D(j.v, j.g);
    Pu[m] = D(j.g[0], j.h.col(0));
    Pv[m] = D(j.g[1], j.h.col(1));
  }
  const auto x0 = cs.field_at<D>(0, P);
  const auto x1 = cs.field_at<D>(1, P);
  const auto x2 = cs.field_at<D>(2, P);
  const D det = det3(x0, x1, x2);
  if (std::abs(det.v) < 1e-12) throw FrameDegeneracyError("frame matrix is singular");
  const D thu = det3(Pu, x1, x2) / det;
  const D thv = det3(Pv, x1, x2) / det;
  ParamField out;
  out.value = Vec2(-thv.v, thu.v);
  out.jacobian.row(0) = -thv.g.transpose();
  out.jacobian.row(1) = thu.g.transpose();
  return out;
}

CharacteristicSet find_characteristic_points(const Surface& s, const ContactStructure& cs,
                                             const CharSearchOptions& opts) {
  if (opts.grid_n < 8) throw PreconditionError("grid_n must be at least 8");
  return s.has_param() ? search_param(s, cs, opts) : search_implicit(s, cs, opts);
}

}  // namespace charfol
