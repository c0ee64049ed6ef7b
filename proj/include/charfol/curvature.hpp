#pragma once

// Riemannian approximations g^eps and the Gaussian curvature of a surface in
// them. Everything is expressed in the orthonormal frame (eps X0, X1, X2).

#include "charfol/contact.hpp"
#include "charfol/surface.hpp"

#include <optional>
#include <vector>

namespace charfol {

/// Levi-Civita coefficients <nabla_{X_i} X_j, X_k>_{g^eps}.
class ConnectionTable {
 public:
  ConnectionTable(const StructureConstants& sc, double eps);

  double eps() const { return eps_; }
  double operator()(int i, int j, int k) const { return g_[idx(i, j, k)]; }

  /// Frame coefficients of nabla_{X_i} X_j.
  Vec3 covariant(int i, int j) const;

  /// Largest |nabla_i X_j - nabla_j X_i - [X_i, X_j]| over all pairs.
  double torsion_residual(const StructureConstants& sc) const;
  /// Largest |<nabla_i X_j, X_k> + <X_j, nabla_i X_k>| (the frame has constant inner products).
  double metric_residual() const;

 private:
  static std::size_t idx(int i, int j, int k) { return static_cast<std::size_t>(9 * i + 3 * j + k); }
  double eps_;
  std::array<double, 27> g_{};
};

ConnectionTable connection_table(const StructureConstants& sc, double eps);

struct CurvatureReport {
  double eps = 0.0;
  double K_eps = 0.0;
  double K_ext = 0.0;
  double det_II = 0.0;
  double det_B = 0.0;
  double ratio = 0.0;  // K_eps / det_B
};

/// Closed-form det II^eps at a characteristic point.
double det_second_fundamental(const Surface& s, const ContactStructure& cs, const Vec3& p, double eps);
/// Closed-form K_ext^eps at a characteristic point.
double extrinsic_curvature(const Surface& s, const ContactStructure& cs, const Vec3& p, double eps);

/// K_ext and det II from their definitions in the frame F_i = (X0 f) X_i - (X_i f) X0,
/// valid at any surface point with X0 f != 0.
CurvatureReport gaussian_curvature(const Surface& s, const ContactStructure& cs, const Vec3& p, double eps);

/// Riemann tensor R(E_a, E_b, E_c, E_d) = <R(E_a, E_b) E_c, E_d> in the frame E = (eps X0, X1, X2).
double riemann(const ContactStructure& cs, const Vec3& p, double eps, int a, int b, int c, int d);

struct LimitStudy {
  std::vector<double> eps;
  std::vector<double> ratio;
  std::vector<double> error;  // |ratio - closed_form|
  double closed_form = 0.0;
  bool exact = false;              // every error below 1e-13
  std::optional<double> slope;     // least-squares slope of log error vs log eps
  double extrapolated = 0.0;       // order-2 Richardson on the two smallest eps
};

LimitStudy khat_limit_study(const Surface& s, const ContactStructure& cs, const Vec3& p,
                            const std::vector<double>& eps_list);

}  // namespace charfol
