#pragma once

// The metric coefficient K-hat at characteristic points, linearizations of
// characteristic vector fields and the resulting phase-portrait classes.

#include "charfol/contact.hpp"
#include "charfol/surface.hpp"

#include <complex>
#include <string>
#include <vector>

namespace charfol {

enum class PointClass { Saddle, Node, Focus, DegenerateSaddle, DegenerateNode, SaddleNode, DegenerateUnresolved };

std::string to_string(PointClass c);
bool is_saddle(PointClass c);

enum class FieldKind { Xf, XS };

/// A characteristic vector field of a surface.
///
/// Implicit surfaces use X_f = (X1 f) X2 - (X2 f) X1 or X_S = X_f / Zf in the
/// ambient space. Surfaces with a parametrization and no implicit form use
/// X = -theta(Phi_v) d/du + theta(Phi_u) d/dv in parameter space.
class CharVectorField {
 public:
  /// `parametric` defaults to whether the surface has a parametrization.
  CharVectorField(Surface s, ContactStructure cs, FieldKind kind = FieldKind::Xf,
                  std::optional<bool> parametric = std::nullopt);

  FieldKind kind() const { return kind_; }
  bool parametric() const { return parametric_; }
  const Surface& surface() const { return surface_; }
  const ContactStructure& structure() const { return cs_; }

  /// Ambient value at a point of an implicit surface.
  Vec3 operator()(const Vec3& p) const;
  /// Coefficients (a1, a2) with X = a1 X1 + a2 X2.
  Vec2 frame_coefficients(const Vec3& p) const;

  /// Parameter-space value and Jacobian.
  ParamField param(const Vec2& uv) const;
  /// Sub-Riemannian norm of the ambient vector dPhi(w) at uv.
  double param_sr_norm(const Vec2& uv, const Vec2& w) const;

 private:
  Surface surface_;
  ContactStructure cs_;
  FieldKind kind_;
  bool parametric_;
};

/// K-hat = -1 + det Hess_H f / ([X2, X1] f)^2 at a characteristic point.
double khat(const Surface& s, const ContactStructure& cs, const Vec3& p);
double khat(const HorizontalDerivatives& hd);

/// -1 + det / trace^2 of a linearization.
double khat_from_linearization(const Mat2& dx);

/// [[-X1X2f, -X2X2f], [X1X1f, X2X1f]].
Mat2 linearization_formula(const HorizontalDerivatives& hd);

/// Linearization of X at a zero in an orthonormal basis (X1, X2) of D_p,
/// assembled from the ambient (or parameter-space) Jacobian of X.
Mat2 linearization(const CharVectorField& X, const Vec3& p);
Mat2 linearization_param(const CharVectorField& X, const Vec2& uv);

/// lambda = trace (1/2 +- sqrt(-3/4 - khat)), complex when needed.
std::pair<std::complex<double>, std::complex<double>> eigenvalues(double trace, double khat);

/// Non-degenerate trichotomy; returns DegenerateUnresolved near khat = -1.
PointClass classify_khat(double khat, double tol_deg = 1e-7);

struct CharPoint {
  Vec3 location;
  std::optional<Vec2> uv;
  double residual = 0.0;
  double khat = 0.0;
  double trace = 0.0;
  double det = 0.0;
  Mat2 dx;                          // linearization in the (X1, X2) basis of D_p
  std::optional<Mat2> dx_param;     // the same in (u, v) for parametric fields
  std::complex<double> lambda_plus, lambda_minus;
  PointClass cls = PointClass::DegenerateUnresolved;
  int poincare_index = 0;  // only filled in by the degenerate probe
};

struct ClassifyOptions {
  double tol_deg = 1e-7;
};

/// Winding number of X around a small loop centred at a zero. Radius is in
/// ambient units.
int poincare_index(const CharVectorField& X, const CharPoint& cp, double radius);

/// Class from the Poincare index: -1 saddle, +1 node, 0 saddle-node.
PointClass classify_degenerate(const CharVectorField& X, const CharPoint& cp, double isolation);

/// Fills every field of CharPoint for each located point.
std::vector<CharPoint> analyze(const CharVectorField& X, const CharacteristicSet& set, const ClassifyOptions& opts = {});
CharPoint analyze_point(const CharVectorField& X, const LocatedPoint& lp, double isolation,
                        const ClassifyOptions& opts = {});

}  // namespace charfol
