#pragma once

// Contact sub-Riemannian structures given by a frame (X0, X1, X2) of R^3.
// (X1, X2) is declared orthonormal and spans the distribution; X0 is any
// transverse field. Index 0 always refers to X0.

#include "charfol/expr.hpp"
#include "charfol/types.hpp"

#include <array>

namespace charfol {

class ContactStructure {
 public:
  using FieldExprs = std::array<Expr, 3>;

  ContactStructure() = default;

  /// Builds a structure and validates the frame and contact conditions on a
  /// 5x5x5 sample grid of the domain. Throws FrameDegeneracyError or
  /// NonContactError on failure.
  ContactStructure(FieldExprs x0, FieldExprs x1, FieldExprs x2, Box domain, bool validate = true);

  const FieldExprs& field(int a) const { return fields_[static_cast<std::size_t>(a)]; }
  const Box& domain() const { return domain_; }

  /// Component vector of X_a at p.
  Vec3 field_at(int a, const Vec3& p) const;

  /// Frame matrix with columns (X0, X1, X2).
  Mat3 frame(const Vec3& p) const;

  /// Components of X_a at a point whose coordinates carry derivatives.
  template <typename T>
  std::array<T, 3> field_at(int a, const std::array<T, 3>& p) const {
    std::array<T, 3> out;
    for (std::size_t m = 0; m < 3; ++m)
      out[m] = evaluate<T>(fields_[static_cast<std::size_t>(a)][m], std::span<const T>(p.data(), 3));
    return out;
  }

 private:
  std::array<FieldExprs, 3> fields_;
  Box domain_;
};

/// The Heisenberg structure X1 = dx - y/2 dz, X2 = dy + x/2 dz with X0 = dz.
ContactStructure heisenberg(const Box& domain = Box{});

/// Rotates (X1, X2) by a constant angle: X1' = cos X1 + sin X2, X2' = -sin X1 + cos X2.
ContactStructure rotate_frame(const ContactStructure& cs, double theta);

/// Same distribution and metric with a different transverse field.
ContactStructure with_transverse(const ContactStructure& cs, ContactStructure::FieldExprs x0);

/// Values, first and second derivatives of every frame component at a point.
struct FrameJet {
  Mat3 A;                                 // A(m, a) = X_a^m
  std::array<Mat3, 3> J;                  // J[a](m, n) = d_n X_a^m
  std::array<std::array<Mat3, 3>, 3> H;   // H[a][m](n, l) = d_n d_l X_a^m
};
FrameJet frame_jet(const ContactStructure& cs, const Vec3& p);

/// Lie bracket [X_a, X_b](p).
Vec3 bracket(const ContactStructure& cs, int a, int b, const Vec3& p);
Vec3 bracket(const FrameJet& jet, int a, int b);

/// d_n [X_a, X_b]^m as a matrix (m, n).
Mat3 bracket_jacobian(const FrameJet& jet, int a, int b);

/// Structure constants with [X_j, X_i] = sum_k c^k_ij X_k, stored as c[k](i, j).
struct StructureConstants {
  std::array<Mat3, 3> c;
  double operator()(int k, int i, int j) const { return c[static_cast<std::size_t>(k)](i, j); }
};

StructureConstants structure_constants(const ContactStructure& cs, const Vec3& p);
StructureConstants structure_constants(const FrameJet& jet);

/// Structure constants with their first derivatives. grad[n] holds d_n c.
struct StructureConstantsJet {
  StructureConstants value;
  std::array<StructureConstants, 3> grad;

  /// X_a(c^k_ij) at the point.
  double frame_derivative(const Mat3& A, int a, int k, int i, int j) const;
};
StructureConstantsJet structure_constants_jet(const FrameJet& jet);

/// Contact form normalized by the transverse field: theta(X0) = 1, theta(D) = 0.
double theta(const Mat3& A, const Vec3& v);

/// Reeb field of the contact form normalized so that d omega(X1, X2) = 1.
Vec3 reeb(const ContactStructure& cs, const Vec3& p);

/// Riemannian approximation g^eps making (eps X0, X1, X2) orthonormal.
class MetricEps {
 public:
  MetricEps(const ContactStructure& cs, double eps);
  double eps() const { return eps_; }
  double inner(const Vec3& p, const Vec3& v, const Vec3& w) const;
  double norm(const Vec3& p, const Vec3& v) const { return std::sqrt(inner(p, v, v)); }

 private:
  const ContactStructure* cs_;
  double eps_;
};
MetricEps metric_eps(const ContactStructure& cs, double eps);

/// Frame coefficients (b0, b1, b2) of v at p; throws FrameDegeneracyError.
Vec3 frame_coefficients(const Mat3& A, const Vec3& v);

}  // namespace charfol
