#pragma once

// Surfaces given as a zero set {f = 0}, as a parametrization Phi(u, v), or
// both. When both are present they must describe the same surface; the
// implicit form is then preferred for curvature and the parametrization for
// locating characteristic points and integrating leaves.

#include "charfol/contact.hpp"
#include "charfol/expr.hpp"
#include "charfol/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace charfol {

struct ImplicitForm {
  Expr f;
  Box box;
};

struct ParamForm {
  std::array<Expr, 3> phi;  // arity 2 in (u, v)
  Interval u{0.0, 2.0 * 3.14159265358979323846};
  Interval v{0.0, 2.0 * 3.14159265358979323846};
  bool periodic_u = false;
  bool periodic_v = false;
};

class Surface {
 public:
  static Surface implicit(Expr f, Box box = Box{}, std::string name = "implicit");
  static Surface parametrized(ParamForm form, std::string name = "param");

  /// Attaches a parametrization of the same surface.
  Surface& with_param(ParamForm form);
  Surface& set_compact(bool compact) {
    compact_ = compact;
    return *this;
  }

  bool has_implicit() const { return implicit_.has_value(); }
  bool has_param() const { return param_.has_value(); }
  const ImplicitForm& implicit_form() const;
  const ParamForm& param_form() const;

  const std::string& name() const { return name_; }
  bool compact() const { return compact_; }

  /// Ambient box used for searches, domain exits and scale.
  const Box& box() const { return box_; }
  double diameter() const { return box_.diameter(); }

  /// Phi(u, v), with its first derivatives as columns (Phi_u, Phi_v).
  Vec3 point(const Vec2& uv) const;
  Eigen::Matrix<double, 3, 2> tangents(const Vec2& uv) const;

  /// Wraps periodic coordinates into their fundamental interval.
  Vec2 wrap(const Vec2& uv) const;
  /// Displacement b - a with periodic axes reduced to the shortest representative.
  Vec2 param_delta(const Vec2& a, const Vec2& b) const;

  /// Newton projection of p onto {f = 0} along the gradient.
  Vec3 project(const Vec3& p, int iterations = 1) const;

 private:
  std::optional<ImplicitForm> implicit_;
  std::optional<ParamForm> param_;
  std::string name_;
  Box box_;
  bool compact_ = false;
};

// Built-in families. Boxes are chosen to enclose the compact ones with margin.
Surface plane(double a, double b, double c);
Surface ellipsoid(double a, double b, double c);
Surface paraboloid(double a);
Surface torus_horizontal(double r, double R);
Surface torus_vertical(double r, double R);

/// First and second frame derivatives of f at a point.
struct HorizontalDerivatives {
  double f = 0.0;
  Vec3 grad;   // ambient gradient
  Mat3 hess;   // ambient Hessian
  Vec3 Xf;     // (X0 f, X1 f, X2 f)
  Mat3 XXf;    // XXf(a, b) = X_a X_b f
  Mat3 A;      // frame matrix at the point

  /// (X_i X_j f) for i, j in {1, 2}, unsymmetrized.
  Mat2 hess_h() const { return XXf.block<2, 2>(1, 1); }
  /// [X2, X1] f = X2 X1 f - X1 X2 f.
  double bracket21() const { return XXf(2, 1) - XXf(1, 2); }
};

HorizontalDerivatives horizontal_derivatives(const Expr& f, const ContactStructure& cs, const Vec3& p);
HorizontalDerivatives horizontal_derivatives(const Surface& s, const ContactStructure& cs, const Vec3& p);

/// Tangent frame F_i = (X0 f) X_i - (X_i f) X0; throws ChartError where X0 f = 0.
std::pair<Vec3, Vec3> tangent_frame(const Surface& s, const ContactStructure& cs, const Vec3& p);

struct LocatedPoint {
  Vec3 location;
  std::optional<Vec2> uv;
  double residual = 0.0;
};

struct CharacteristicSet {
  std::vector<LocatedPoint> points;
  std::vector<Vec3> unresolved;  // centers of flagged cells where Newton failed
  int grid_n = 0;
  bool searched_param = false;
};

struct CharSearchOptions {
  int grid_n = 64;
  double tol_root = -1.0;  // negative: 1e-9 (1 + |grad|) per root
};

CharacteristicSet find_characteristic_points(const Surface& s, const ContactStructure& cs,
                                             const CharSearchOptions& opts = {});

/// Characteristic field in parameter coordinates:
///   X = -theta(Phi_v) d/du + theta(Phi_u) d/dv,
/// together with its Jacobian in (u, v).
struct ParamField {
  Vec2 value;
  Mat2 jacobian;
};
ParamField param_field(const Surface& s, const ContactStructure& cs, const Vec2& uv);

}  // namespace charfol
