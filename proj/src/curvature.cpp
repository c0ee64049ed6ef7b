#include "charfol/curvature.hpp"

#include "charfol/charclass.hpp"

#include <cmath>

namespace charfol {
namespace {

using Coeffs = std::array<double, 27>;
std::size_t at(int a, int b, int c) { return static_cast<std::size_t>(9 * a + 3 * b + c); }

// Commutator coefficients of the orthonormal frame E_a = s_a X_a:
// [E_a, E_b] = sum_k C[k][a][b] E_k. Linear in c, so the same map turns
// frame derivatives of c into those of C.
Coeffs commutators(const StructureConstants& sc, const std::array<double, 3>& s) {
  Coeffs C{};
  for (int k = 0; k < 3; ++k)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) C[at(k, a, b)] = sc(k, b, a) * s[a] * s[b] / s[k];
  return C;
}

// Koszul formula in an orthonormal frame: Gamma[a][b][c] = <nabla_{E_a} E_b, E_c>.
Coeffs christoffel(const Coeffs& C) {
  Coeffs G{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) G[at(a, b, c)] = 0.5 * (C[at(c, a, b)] - C[at(a, b, c)] - C[at(b, a, c)]);
  return G;
}

struct LocalGeometry {
  std::array<double, 3> s;
  Coeffs C, G;
  std::array<Coeffs, 3> dG;  // dG[e] = E_e(Gamma)
  double c012;
};

LocalGeometry local_geometry(const ContactStructure& cs, const Vec3& p, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  const FrameJet jet = frame_jet(cs, p);
  const StructureConstantsJet scj = structure_constants_jet(jet);
  LocalGeometry lg;
  lg.s = {eps, 1.0, 1.0};
  lg.C = commutators(scj.value, lg.s);
  lg.G = christoffel(lg.C);
  lg.c012 = scj.value(0, 1, 2);
  for (int e = 0; e < 3; ++e) {
    StructureConstants xe;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) xe.c[static_cast<std::size_t>(k)](i, j) = scj.frame_derivative(jet.A, e, k, i, j);
    Coeffs dG = christoffel(commutators(xe, lg.s));
    for (double& v : dG) v *= lg.s[static_cast<std::size_t>(e)];
    lg.dG[static_cast<std::size_t>(e)] = dG;
  }
  return lg;
}

double riemann(const LocalGeometry& lg, int a, int b, int c, int d) {
  const auto& G = lg.G;
  double r = lg.dG[static_cast<std::size_t>(a)][at(b, c, d)] - lg.dG[static_cast<std::size_t>(b)][at(a, c, d)];
  for (int m = 0; m < 3; ++m) {
    r += G[at(b, c, m)] * G[at(a, m, d)] - G[at(a, c, m)] * G[at(b, m, d)];
    r -= lg.C[at(m, a, b)] * G[at(m, c, d)];
  }
  return r;
}

}  // namespace

ConnectionTable::ConnectionTable(const StructureConstants& sc, double eps) : eps_(eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  const std::array<double, 3> s{eps, 1.0, 1.0};
  const Coeffs G = christoffel(commutators(sc, s));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        g_[idx(i, j, k)] = G[at(i, j, k)] / (s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)] *
                                             s[static_cast<std::size_t>(k)]);
}

Vec3 ConnectionTable::covariant(int i, int j) const {
  // <X_k, X_k> is 1/eps^2 for k = 0 and 1 otherwise.
  return Vec3(eps_ * eps_ * (*this)(i, j, 0), (*this)(i, j, 1), (*this)(i, j, 2));
}

double ConnectionTable::torsion_residual(const StructureConstants& sc) const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec3 br(sc(0, j, i), sc(1, j, i), sc(2, j, i));  // [X_i, X_j]
      worst = std::max(worst, (covariant(i, j) - covariant(j, i) - br).cwiseAbs().maxCoeff());
    }
  return worst;
}

double ConnectionTable::metric_residual() const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs((*this)(i, j, k) + (*this)(i, k, j)));
  return worst;
}

ConnectionTable connection_table(const StructureConstants& sc, double eps) { return ConnectionTable(sc, eps); }

double riemann(const ContactStructure& cs, const Vec3& p, double eps, int a, int b, int c, int d) {
  return riemann(local_geometry(cs, p, eps), a, b, c, d);
}

// ---------------------------------------------------------------------------
// Closed forms at characteristic points.

double det_second_fundamental(const Surface& s, const ContactStructure& cs, const Vec3& p, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  const HorizontalDerivatives hd = horizontal_derivatives(s, cs, p);
  const double x0f = hd.Xf[0];
  if (std::abs(x0f) < 1e-12 * (1.0 + hd.grad.norm())) throw ChartError("X0 f vanishes at the point");
  const StructureConstants sc = structure_constants(cs, p);
  const double c011 = sc(1, 0, 1), c022 = sc(2, 0, 2), c021 = sc(1, 0, 2), c012 = sc(2, 0, 1), c0 = sc(0, 1, 2);
  const double e2 = eps * eps;
  const double mixed = c021 + c012;
  return (hd.hess_h().determinant() / (x0f * x0f) - 0.25 * c0 * c0) / e2 +
         e2 * (c011 * c022 - 0.25 * mixed * mixed) +
         (c022 * hd.XXf(1, 1) + c011 * hd.XXf(2, 2) - 0.5 * mixed * (hd.XXf(2, 1) + hd.XXf(1, 2))) / x0f;
}

double extrinsic_curvature(const Surface& s, const ContactStructure& cs, const Vec3& p, double eps) {
  (void)s;
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  const FrameJet jet = frame_jet(cs, p);
  const StructureConstantsJet scj = structure_constants_jet(jet);
  const StructureConstants& sc = scj.value;
  const double c011 = sc(1, 0, 1), c022 = sc(2, 0, 2), c021 = sc(1, 0, 2), c012 = sc(2, 0, 1), c0 = sc(0, 1, 2);
  const double c1 = sc(1, 1, 2), c2 = sc(2, 1, 2);
  const double x2c1 = scj.frame_derivative(jet.A, 2, 1, 1, 2);
  const double x1c2 = scj.frame_derivative(jet.A, 1, 2, 1, 2);
  const double e2 = eps * eps;
  const double mixed = c012 + c021;
  return -0.75 * c0 * c0 / e2 - e2 * (c011 * c022 - 0.25 * mixed * mixed) +
         (x2c1 - x1c2 - c1 * c1 - c2 * c2 + c0 * 0.5 * (c012 - c021));
}

// ---------------------------------------------------------------------------
// Definitions in the tangent frame F_i, expressed in E-coordinates.

CurvatureReport gaussian_curvature(const Surface& s, const ContactStructure& cs, const Vec3& p, double eps) {
  const LocalGeometry lg = local_geometry(cs, p, eps);
  const HorizontalDerivatives hd = horizontal_derivatives(s, cs, p);
  const double x0f = hd.Xf[0];
  if (std::abs(x0f) < 1e-12 * (1.0 + hd.grad.norm())) throw ChartError("X0 f vanishes: the tangent frame is undefined");

  // F_j = (X0 f) X_j - (X_j f) X0 has E-components phi_j.
  std::array<Vec3, 2> phi;
  std::array<Mat3, 2> dphi;  // dphi[j](b, a) = E_a(phi_j^b)
  for (int j = 0; j < 2; ++j) {
    const int J = j + 1;
    phi[static_cast<std::size_t>(j)] = Vec3::Zero();
    phi[static_cast<std::size_t>(j)][0] = -hd.Xf[J] / eps;
    phi[static_cast<std::size_t>(j)][J] = x0f;
    Mat3& d = dphi[static_cast<std::size_t>(j)];
    d.setZero();
    for (int a = 0; a < 3; ++a) {
      const double sa = lg.s[static_cast<std::size_t>(a)];
      d(0, a) = -sa * hd.XXf(a, J) / eps;
      d(J, a) = sa * hd.XXf(a, 0);
    }
  }

  const Vec3 n_raw(eps * hd.Xf[0], hd.Xf[1], hd.Xf[2]);
  const Vec3 N = n_raw.normalized();

  const double gram = phi[0].squaredNorm() * phi[1].squaredNorm() - std::pow(phi[0].dot(phi[1]), 2);

  Mat2 II;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Vec3& fi = phi[static_cast<std::size_t>(i)];
      const Vec3& fj = phi[static_cast<std::size_t>(j)];
      Vec3 nabla = dphi[static_cast<std::size_t>(j)] * fi;
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c)
          for (int b = 0; b < 3; ++b) nabla[b] += fi[a] * fj[c] * lg.G[at(a, c, b)];
      II(i, j) = nabla.dot(N);
    }
  const double ii12 = 0.5 * (II(0, 1) + II(1, 0));

  double rsum = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
          rsum += phi[0][a] * phi[1][b] * phi[1][c] * phi[0][d] * riemann(lg, a, b, c, d);

  CurvatureReport rep;
  rep.eps = eps;
  rep.K_ext = rsum / gram;
  rep.det_II = (II(0, 0) * II(1, 1) - ii12 * ii12) / gram;
  rep.K_eps = rep.K_ext + rep.det_II;
  rep.det_B = lg.c012 * lg.c012 / (eps * eps);
  rep.ratio = rep.K_eps / rep.det_B;
  return rep;
}

// ---------------------------------------------------------------------------

LimitStudy khat_limit_study(const Surface& s, const ContactStructure& cs, const Vec3& p,
                            const std::vector<double>& eps_list) {
  if (eps_list.size() < 4) throw PreconditionError("need at least four eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw PreconditionError("eps values must be decreasing");
  if (!(eps_list.back() > 0.0) || eps_list.front() / eps_list.back() < 100.0 * (1.0 - 1e-12))
    throw PreconditionError("eps values must span at least two decades");

  LimitStudy st;
  st.eps = eps_list;
  st.closed_form = khat(s, cs, p);
  for (double e : eps_list) {
    const CurvatureReport rep = gaussian_curvature(s, cs, p, e);
    st.ratio.push_back(rep.ratio);
    st.error.push_back(std::abs(rep.ratio - st.closed_form));
  }

  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < st.eps.size(); ++i)
    if (st.error[i] >= 1e-13) pts.emplace_back(std::log(st.eps[i]), std::log(st.error[i]));
  st.exact = pts.empty();
  if (pts.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
    }
    st.slope = sxy / sxx;
  }

  const std::size_t n = st.eps.size();
  const double e1 = st.eps[n - 2], e2 = st.eps[n - 1];
  const double r1 = st.ratio[n - 2], r2 = st.ratio[n - 1];
  st.extrapolated = (r2 * e1 * e1 - r1 * e2 * e2) / (e1 * e1 - e2 * e2);
  return st;
}

}  // namespace charfol
