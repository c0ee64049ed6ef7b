#include "charfol/contact.hpp"

#include <cmath>
#include <sstream>

namespace charfol {
namespace {

constexpr double kSingularFrame = 1e-12;
constexpr double kNonContact = 1e-12;

std::string point_string(const Vec3& p) {
  std::ostringstream os;
  os << "(" << p.x() << ", " << p.y() << ", " << p.z() << ")";
  return os.str();
}

void validate(const ContactStructure& cs) {
  const Box& d = cs.domain();
  constexpr int n = 5;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 p(d.axes[0].lo + d.axes[0].width() * i / (n - 1),
                     d.axes[1].lo + d.axes[1].width() * j / (n - 1),
                     d.axes[2].lo + d.axes[2].width() * k / (n - 1));
        const FrameJet jet = frame_jet(cs, p);
        if (std::abs(jet.A.determinant()) < kSingularFrame)
          throw FrameDegeneracyError("frame is singular at " + point_string(p));
        if (std::abs(structure_constants(jet)(0, 1, 2)) < kNonContact)
          throw NonContactError("c^0_12 vanishes at " + point_string(p) + ": the distribution is not contact");
      }
}

}  // namespace

ContactStructure::ContactStructure(FieldExprs x0, FieldExprs x1, FieldExprs x2, Box domain, bool check)
    : fields_{std::move(x0), std::move(x1), std::move(x2)}, domain_(domain) {
  for (const auto& f : fields_)
    for (const auto& e : f)
      if (e.arity() != 3) throw PreconditionError("frame components must be expressions in x, y, z");
  if (check) validate(*this);
}

Vec3 ContactStructure::field_at(int a, const Vec3& p) const {
  Vec3 out;
  for (int m = 0; m < 3; ++m) out[m] = evaluate(fields_[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)], p);
  return out;
}

Mat3 ContactStructure::frame(const Vec3& p) const {
  Mat3 A;
  for (int a = 0; a < 3; ++a) A.col(a) = field_at(a, p);
  return A;
}

ContactStructure heisenberg(const Box& domain) {
  auto e = [](const char* s) { return parse(s, 3); };
  return ContactStructure({e("0"), e("0"), e("1")}, {e("1"), e("0"), e("-y/2")}, {e("0"), e("1"), e("x/2")}, domain);
}

ContactStructure rotate_frame(const ContactStructure& cs, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  ContactStructure::FieldExprs x1;
  ContactStructure::FieldExprs x2;
  for (std::size_t m = 0; m < 3; ++m) {
    x1[m] = c * cs.field(1)[m] + s * cs.field(2)[m];
    x2[m] = (-s) * cs.field(1)[m] + c * cs.field(2)[m];
  }
  return ContactStructure(cs.field(0), x1, x2, cs.domain());
}

ContactStructure with_transverse(const ContactStructure& cs, ContactStructure::FieldExprs x0) {
  return ContactStructure(std::move(x0), cs.field(1), cs.field(2), cs.domain());
}

FrameJet frame_jet(const ContactStructure& cs, const Vec3& p) {
  FrameJet jet;
  for (int a = 0; a < 3; ++a) {
    for (int m = 0; m < 3; ++m) {
      const Jet2<3> j = eval_jet2<3>(cs.field(a)[static_cast<std::size_t>(m)], p);
      jet.A(m, a) = j.v;
      jet.J[static_cast<std::size_t>(a)].row(m) = j.g.transpose();
      jet.H[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] = j.h;
    }
  }
  return jet;
}

Vec3 bracket(const FrameJet& jet, int a, int b) {
  const auto ua = static_cast<std::size_t>(a);
  const auto ub = static_cast<std::size_t>(b);
  return jet.J[ub] * jet.A.col(a) - jet.J[ua] * jet.A.col(b);
}

Vec3 bracket(const ContactStructure& cs, int a, int b, const Vec3& p) { return bracket(frame_jet(cs, p), a, b); }

Mat3 bracket_jacobian(const FrameJet& jet, int a, int b) {
  const auto ua = static_cast<std::size_t>(a);
  const auto ub = static_cast<std::size_t>(b);
  const Vec3 xa = jet.A.col(a);
  const Vec3 xb = jet.A.col(b);
  Mat3 out;
  for (int m = 0; m < 3; ++m) {
    const auto um = static_cast<std::size_t>(m);
    for (int n = 0; n < 3; ++n) {
      double s = 0.0;
      for (int l = 0; l < 3; ++l) {
        s += jet.J[ua](l, n) * jet.J[ub](m, l) + xa[l] * jet.H[ub][um](n, l);
        s -= jet.J[ub](l, n) * jet.J[ua](m, l) + xb[l] * jet.H[ua][um](n, l);
      }
      out(m, n) = s;
    }
  }
  return out;
}

Vec3 frame_coefficients(const Mat3& A, const Vec3& v) {
  Eigen::FullPivLU<Mat3> lu(A);
  if (!lu.isInvertible() || std::abs(A.determinant()) < kSingularFrame)
    throw FrameDegeneracyError("frame matrix is singular");
  return lu.solve(v);
}

StructureConstants structure_constants(const FrameJet& jet) {
  if (std::abs(jet.A.determinant()) < kSingularFrame) throw FrameDegeneracyError("frame matrix is singular");
  const Eigen::PartialPivLU<Mat3> lu(jet.A);
  StructureConstants sc;
  for (auto& m : sc.c) m.setZero();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Vec3 coeffs = lu.solve(bracket(jet, j, i));
      for (int k = 0; k < 3; ++k) {
        sc.c[static_cast<std::size_t>(k)](i, j) = coeffs[k];
        sc.c[static_cast<std::size_t>(k)](j, i) = -coeffs[k];
      }
    }
  return sc;
}

StructureConstants structure_constants(const ContactStructure& cs, const Vec3& p) {
  return structure_constants(frame_jet(cs, p));
}

StructureConstantsJet structure_constants_jet(const FrameJet& jet) {
  StructureConstantsJet out;
  out.value = structure_constants(jet);
  const Eigen::PartialPivLU<Mat3> lu(jet.A);
  for (auto& g : out.grad)
    for (auto& m : g.c) m.setZero();
  // From A c_ij = [X_j, X_i]: d_n c_ij = A^{-1} (d_n [X_j, X_i] - (d_n A) c_ij).
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Mat3 db = bracket_jacobian(jet, j, i);
      Vec3 cij;
      for (int k = 0; k < 3; ++k) cij[k] = out.value(k, i, j);
      for (int n = 0; n < 3; ++n) {
        Mat3 dA;
        for (int a = 0; a < 3; ++a) dA.col(a) = jet.J[static_cast<std::size_t>(a)].col(n);
        const Vec3 dc = lu.solve(db.col(n) - dA * cij);
        for (int k = 0; k < 3; ++k) {
          out.grad[static_cast<std::size_t>(n)].c[static_cast<std::size_t>(k)](i, j) = dc[k];
          out.grad[static_cast<std::size_t>(n)].c[static_cast<std::size_t>(k)](j, i) = -dc[k];
        }
      }
    }
  return out;
}

double StructureConstantsJet::frame_derivative(const Mat3& A, int a, int k, int i, int j) const {
  double s = 0.0;
  for (int n = 0; n < 3; ++n) s += A(n, a) * grad[static_cast<std::size_t>(n)](k, i, j);
  return s;
}

double theta(const Mat3& A, const Vec3& v) {
  Mat3 B = A;
  B.col(0) = v;
  return B.determinant() / A.determinant();
}

Vec3 reeb(const ContactStructure& cs, const Vec3& p) {
  const FrameJet jet = frame_jet(cs, p);
  const StructureConstantsJet sc = structure_constants_jet(jet);
  const double c = sc.value(0, 1, 2);
  if (std::abs(c) < kNonContact) throw NonContactError("c^0_12 vanishes at " + point_string(p));
  const double x1c = sc.frame_derivative(jet.A, 1, 0, 1, 2);
  const double x2c = sc.frame_derivative(jet.A, 2, 0, 1, 2);
  const double g1 = sc.value(0, 2, 0) - x2c / c;
  const double g2 = x1c / c - sc.value(0, 1, 0);
  return c * jet.A.col(0) + g1 * jet.A.col(1) + g2 * jet.A.col(2);
}

MetricEps::MetricEps(const ContactStructure& cs, double eps) : cs_(&cs), eps_(eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
}

double MetricEps::inner(const Vec3& p, const Vec3& v, const Vec3& w) const {
  const Mat3 A = cs_->frame(p);
  const Vec3 bv = frame_coefficients(A, v);
  const Vec3 bw = frame_coefficients(A, w);
  return bv[0] * bw[0] / (eps_ * eps_) + bv[1] * bw[1] + bv[2] * bw[2];
}

MetricEps metric_eps(const ContactStructure& cs, double eps) { return MetricEps(cs, eps); }

}  // namespace charfol
