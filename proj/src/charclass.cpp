#include "charfol/charclass.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace charfol {
namespace {

// Frame coefficients (1, 2) of the tangent vectors, i.e. dPhi in the basis (X1, X2).
Mat2 tangent_in_frame(const Surface& s, const ContactStructure& cs, const Vec2& uv) {
  const Vec3 p = s.point(uv);
  const Mat3 A = cs.frame(p);
  const Eigen::Matrix<double, 3, 2> t = s.tangents(uv);
  const Eigen::PartialPivLU<Mat3> lu(A);
  Mat2 T;
  for (int c = 0; c < 2; ++c) T.col(c) = lu.solve(t.col(c)).tail<2>();
  return T;
}

double zf(const ContactStructure& cs, const Vec3& p, const Vec3& grad) {
  const double v = reeb(cs, p).dot(grad);
  if (std::abs(v) < 1e-12 * (1.0 + grad.norm())) throw ChartError("Zf vanishes: X_S is undefined here");
  return v;
}

}  // namespace

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::Saddle: return "Saddle";
    case PointClass::Node: return "Node";
    case PointClass::Focus: return "Focus";
    case PointClass::DegenerateSaddle: return "DegenerateSaddle";
    case PointClass::DegenerateNode: return "DegenerateNode";
    case PointClass::SaddleNode: return "SaddleNode";
    case PointClass::DegenerateUnresolved: return "DegenerateUnresolved";
  }
  return "?";
}

bool is_saddle(PointClass c) { return c == PointClass::Saddle || c == PointClass::DegenerateSaddle; }

// ---------------------------------------------------------------------------

CharVectorField::CharVectorField(Surface s, ContactStructure cs, FieldKind kind, std::optional<bool> parametric)
    : surface_(std::move(s)), cs_(std::move(cs)), kind_(kind) {
  parametric_ = parametric.value_or(surface_.has_param());
  if (parametric_ && !surface_.has_param()) throw PreconditionError("surface has no parametrization");
  if (!parametric_ && !surface_.has_implicit()) throw PreconditionError("surface has no implicit form");
  if (parametric_ && kind_ == FieldKind::XS)
    throw PreconditionError("X_S is defined through a submersion; use an implicit surface");
}

Vec2 CharVectorField::frame_coefficients(const Vec3& p) const {
  const Dual<3> fd = eval_dual<3>(surface_.implicit_form().f, p);
  const Mat3 A = cs_.frame(p);
  const double x1f = A.col(1).dot(fd.g);
  const double x2f = A.col(2).dot(fd.g);
  Vec2 a(-x2f, x1f);
  if (kind_ == FieldKind::XS) a /= zf(cs_, p, fd.g);
  return a;
}

Vec3 CharVectorField::operator()(const Vec3& p) const {
  const Vec2 a = frame_coefficients(p);
  const Mat3 A = cs_.frame(p);
  return a[0] * A.col(1) + a[1] * A.col(2);
}

ParamField CharVectorField::param(const Vec2& uv) const { return param_field(surface_, cs_, uv); }

double CharVectorField::param_sr_norm(const Vec2& uv, const Vec2& w) const {
  const Vec3 v = surface_.tangents(uv) * w;
  const Vec3 b = charfol::frame_coefficients(cs_.frame(surface_.point(uv)), v);
  return std::hypot(b[1], b[2]);
}

// ---------------------------------------------------------------------------

double khat(const HorizontalDerivatives& hd) {
  const double br = hd.bracket21();
  if (std::abs(br) < 1e-10) throw NonContactError("[X2, X1] f vanishes at the point");
  return -1.0 + hd.hess_h().determinant() / (br * br);
}

double khat(const Surface& s, const ContactStructure& cs, const Vec3& p) {
  const HorizontalDerivatives hd = horizontal_derivatives(s, cs, p);
  const double tol = 1e-6 * (1.0 + hd.grad.norm());
  if (std::abs(hd.f) > tol || std::abs(hd.Xf[1]) + std::abs(hd.Xf[2]) > tol)
    throw PreconditionError("point is not characteristic");
  return khat(hd);
}

double khat_from_linearization(const Mat2& dx) {
  const double tr = dx.trace();
  if (std::abs(tr) < 1e-14) throw NonContactError("linearization has zero trace");
  return -1.0 + dx.determinant() / (tr * tr);
}

Mat2 linearization_formula(const HorizontalDerivatives& hd) {
  Mat2 m;
  m << -hd.XXf(1, 2), -hd.XXf(2, 2), hd.XXf(1, 1), hd.XXf(2, 1);
  return m;
}

Mat2 linearization(const CharVectorField& X, const Vec3& p) {
  if (X.parametric()) throw PreconditionError("use linearization_param for parametric fields");
  const Surface& s = X.surface();
  const ContactStructure& cs = X.structure();
  const Jet2<3> fj = eval_jet2<3>(s.implicit_form().f, p);
  const FrameJet jet = frame_jet(cs, p);
  const Vec3 x1 = jet.A.col(1), x2 = jet.A.col(2);
  const double x1f = x1.dot(fj.g), x2f = x2.dot(fj.g);
  if (std::abs(x1f) + std::abs(x2f) > 1e-6 * (1.0 + fj.g.norm()))
    throw PreconditionError("linearization requested away from a characteristic point");
  const Vec3 grad_x1f = jet.J[1].transpose() * fj.g + fj.h * x1;
  const Vec3 grad_x2f = jet.J[2].transpose() * fj.g + fj.h * x2;
  // Ambient Jacobian of X_f = (X1 f) X2 - (X2 f) X1.
  Mat3 J = x2 * grad_x1f.transpose() + x1f * jet.J[2] - x1 * grad_x2f.transpose() - x2f * jet.J[1];
  if (X.kind() == FieldKind::XS) J /= zf(cs, p, fj.g);
  const Eigen::PartialPivLU<Mat3> lu(jet.A);
  Mat2 dx;
  for (int j = 0; j < 2; ++j) dx.col(j) = lu.solve(J * jet.A.col(j + 1)).tail<2>();
  return dx;
}

Mat2 linearization_param(const CharVectorField& X, const Vec2& uv) {
  const ParamField pf = X.param(uv);
  const Mat2 T = tangent_in_frame(X.surface(), X.structure(), uv);
  return T * pf.jacobian * T.inverse();
}

std::pair<std::complex<double>, std::complex<double>> eigenvalues(double trace, double khat) {
  const std::complex<double> root = std::sqrt(std::complex<double>(-0.75 - khat, 0.0));
  return {trace * (0.5 + root), trace * (0.5 - root)};
}

PointClass classify_khat(double khat, double tol_deg) {
  if (std::abs(khat + 1.0) < tol_deg) return PointClass::DegenerateUnresolved;
  if (khat < -1.0) return PointClass::Saddle;
  // The boundary -3/4 belongs to the nodes; allow rounding there.
  if (khat <= -0.75 + 1e-12) return PointClass::Node;
  return PointClass::Focus;
}

// ---------------------------------------------------------------------------

int poincare_index(const CharVectorField& X, const CharPoint& cp, double radius) {
  std::function<Vec2(double)> sample;
  const Surface& s = X.surface();
  if (X.parametric()) {
    const Vec2 uv0 = *cp.uv;
    const Eigen::Matrix<double, 3, 2> t = s.tangents(uv0);
    const double scale = std::max(t.col(0).norm(), t.col(1).norm());
    const double rho = radius / scale;
    sample = [&, uv0, rho](double phi) {
      return X.param(s.wrap(uv0 + rho * Vec2(std::cos(phi), std::sin(phi)))).value;
    };
  } else {
    const Vec3 p = cp.location;
    const Vec3 n = eval_dual<3>(s.implicit_form().f, p).g.normalized();
    const Vec3 x1 = X.structure().field_at(1, p);
    const Vec3 e1 = (x1 - x1.dot(n) * n).normalized();
    const Vec3 e2 = n.cross(e1);
    sample = [&, p, e1, e2, radius](double phi) {
      const Vec3 q = s.project(p + radius * (std::cos(phi) * e1 + std::sin(phi) * e2), 3);
      const Vec3 v = X(q);
      return Vec2(v.dot(e1), v.dot(e2));
    };
  }
  // Adaptive bisection: the field turns quickly where the loop passes close to
  // a slow (center) direction, so uniform sampling is not enough.
  int budget = 1 << 22;
  std::function<double(double, double, const Vec2&, const Vec2&, int)> turn =
      [&](double a, double b, const Vec2& va, const Vec2& vb, int depth) -> double {
    const double d = std::atan2(va[0] * vb[1] - va[1] * vb[0], va.dot(vb));
    if (std::abs(d) < 0.3) return d;
    if (depth > 60 || --budget < 0) throw PreconditionError("winding number did not resolve");
    const double m = 0.5 * (a + b);
    const Vec2 vm = sample(m);
    if (vm.norm() == 0.0) throw PreconditionError("field vanishes on the probe loop");
    return turn(a, m, va, vm, depth + 1) + turn(m, b, vm, vb, depth + 1);
  };
  constexpr int n = 256;
  double total = 0.0;
  Vec2 prev = sample(0.0);
  for (int k = 1; k <= n; ++k) {
    const double a = 2.0 * std::numbers::pi * (k - 1) / n;
    const double b = 2.0 * std::numbers::pi * k / n;
    const Vec2 cur = sample(b);
    total += turn(a, b, prev, cur, 0);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

PointClass classify_degenerate(const CharVectorField& X, const CharPoint& cp, double isolation) {
  const double r1 = std::min(1e-3 * X.surface().diameter(), 0.25 * isolation);
  try {
    const int i1 = poincare_index(X, cp, r1);
    const int i2 = poincare_index(X, cp, 0.25 * r1);
    if (i1 != i2) return PointClass::DegenerateUnresolved;
    switch (i1) {
      case -1: return PointClass::DegenerateSaddle;
      case 1: return PointClass::DegenerateNode;
      case 0: return PointClass::SaddleNode;
      default: return PointClass::DegenerateUnresolved;
    }
  } catch (const Error&) {
    return PointClass::DegenerateUnresolved;
  }
}

CharPoint analyze_point(const CharVectorField& X, const LocatedPoint& lp, double isolation,
                        const ClassifyOptions& opts) {
  const Surface& s = X.surface();
  CharPoint cp;
  cp.location = lp.location;
  cp.uv = lp.uv;
  cp.residual = lp.residual;
  if (X.parametric()) {
    if (!lp.uv) throw PreconditionError("parametric field needs parameter coordinates");
    cp.dx_param = X.param(*lp.uv).jacobian;
    cp.dx = linearization_param(X, *lp.uv);
  } else {
    cp.dx = linearization(X, lp.location);
  }
  cp.trace = cp.dx.trace();
  cp.det = cp.dx.determinant();
  if (std::abs(cp.trace) < 1e-12) throw NonContactError("characteristic point with zero divergence");
  cp.khat = s.has_implicit() ? khat(horizontal_derivatives(s, X.structure(), lp.location))
                             : khat_from_linearization(cp.dx);
  std::tie(cp.lambda_plus, cp.lambda_minus) = eigenvalues(cp.trace, cp.khat);
  cp.cls = classify_khat(cp.khat, opts.tol_deg);
  if (cp.cls == PointClass::DegenerateUnresolved) {
    cp.cls = classify_degenerate(X, cp, isolation);
    const double r = std::min(1e-3 * s.diameter(), 0.25 * isolation);
    try {
      cp.poincare_index = poincare_index(X, cp, r);
    } catch (const Error&) {
    }
  }
  return cp;
}

std::vector<CharPoint> analyze(const CharVectorField& X, const CharacteristicSet& set, const ClassifyOptions& opts) {
  std::vector<CharPoint> out;
  out.reserve(set.points.size());
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    double isolation = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < set.points.size(); ++j)
      if (j != i) isolation = std::min(isolation, (set.points[i].location - set.points[j].location).norm());
    out.push_back(analyze_point(X, set.points[i], isolation, opts));
  }
  return out;
}

}  // namespace charfol
