#pragma once

// Forward-mode automatic differentiation types.
//
// Dual<N> carries a value and its gradient with respect to N seeded inputs.
// Jet2<N> additionally carries the Hessian, propagated with the exact
// second-order chain rule so no finite-difference truncation ever enters.

#include <Eigen/Dense>

#include <cmath>
#include <type_traits>

namespace charfol {

template <int N>
struct Dual {
  using Gradient = Eigen::Matrix<double, N, 1>;

  double v = 0.0;
  Gradient g = Gradient::Zero();

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit promotion of constants
  Dual(double value, const Gradient& grad) : v(value), g(grad) {}

  static Dual variable(double value, int index) {
    Dual d(value);
    d.g[index] = 1.0;
    return d;
  }

  /// Applies a scalar function given its value and first derivative at v.
  Dual chain(double f, double df) const { return Dual(f, df * g); }
  Dual chain(double f, double df, double /*d2f*/) const { return chain(f, df); }
};

template <int N>
struct Jet2 {
  using Gradient = Eigen::Matrix<double, N, 1>;
  using Hessian = Eigen::Matrix<double, N, N>;

  double v = 0.0;
  Gradient g = Gradient::Zero();
  Hessian h = Hessian::Zero();

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: implicit promotion of constants
  Jet2(double value, const Gradient& grad, const Hessian& hess) : v(value), g(grad), h(hess) {}

  static Jet2 variable(double value, int index) {
    Jet2 j(value);
    j.g[index] = 1.0;
    return j;
  }

  Jet2 chain(double f, double df, double d2f) const {
    return Jet2(f, df * g, df * h + d2f * (g * g.transpose()));
  }
};

template <typename T>
struct is_autodiff : std::false_type {};
template <int N>
struct is_autodiff<Dual<N>> : std::true_type {};
template <int N>
struct is_autodiff<Jet2<N>> : std::true_type {};
template <typename T>
inline constexpr bool is_autodiff_v = is_autodiff<T>::value;

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) {
  return x.v;
}
template <int N>
double value_of(const Jet2<N>& x) {
  return x.v;
}

// ---------------------------------------------------------------------------
// Dual arithmetic

template <int N>
Dual<N> operator+(const Dual<N>& a, const Dual<N>& b) {
  return {a.v + b.v, a.g + b.g};
}
template <int N>
Dual<N> operator-(const Dual<N>& a, const Dual<N>& b) {
  return {a.v - b.v, a.g - b.g};
}
template <int N>
Dual<N> operator-(const Dual<N>& a) {
  return {-a.v, -a.g};
}
template <int N>
Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  return {a.v * b.v, b.v * a.g + a.v * b.g};
}
template <int N>
Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
  const double inv = 1.0 / b.v;
  return {a.v * inv, (a.g - (a.v * inv) * b.g) * inv};
}
template <int N>
Dual<N> operator+(const Dual<N>& a, double b) {
  return {a.v + b, a.g};
}
template <int N>
Dual<N> operator+(double a, const Dual<N>& b) {
  return {a + b.v, b.g};
}
template <int N>
Dual<N> operator-(const Dual<N>& a, double b) {
  return {a.v - b, a.g};
}
template <int N>
Dual<N> operator-(double a, const Dual<N>& b) {
  return {a - b.v, -b.g};
}
template <int N>
Dual<N> operator*(const Dual<N>& a, double b) {
  return {a.v * b, a.g * b};
}
template <int N>
Dual<N> operator*(double a, const Dual<N>& b) {
  return {a * b.v, a * b.g};
}
template <int N>
Dual<N> operator/(const Dual<N>& a, double b) {
  return {a.v / b, a.g / b};
}
template <int N>
Dual<N> operator/(double a, const Dual<N>& b) {
  return Dual<N>(a) / b;
}

// ---------------------------------------------------------------------------
// Jet2 arithmetic

template <int N>
Jet2<N> operator+(const Jet2<N>& a, const Jet2<N>& b) {
  return {a.v + b.v, a.g + b.g, a.h + b.h};
}
template <int N>
Jet2<N> operator-(const Jet2<N>& a, const Jet2<N>& b) {
  return {a.v - b.v, a.g - b.g, a.h - b.h};
}
template <int N>
Jet2<N> operator-(const Jet2<N>& a) {
  return {-a.v, -a.g, -a.h};
}
template <int N>
Jet2<N> operator*(const Jet2<N>& a, const Jet2<N>& b) {
  // a_i b_j + b_i a_j is bitwise symmetric in (i, j).
  const typename Jet2<N>::Hessian cross = a.g * b.g.transpose() + b.g * a.g.transpose();
  return {a.v * b.v, b.v * a.g + a.v * b.g, b.v * a.h + a.v * b.h + cross};
}
template <int N>
Jet2<N> reciprocal(const Jet2<N>& b) {
  const double inv = 1.0 / b.v;
  return b.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
}
template <int N>
Jet2<N> operator/(const Jet2<N>& a, const Jet2<N>& b) {
  return a * reciprocal(b);
}
template <int N>
Jet2<N> operator+(const Jet2<N>& a, double b) {
  return {a.v + b, a.g, a.h};
}
template <int N>
Jet2<N> operator+(double a, const Jet2<N>& b) {
  return {a + b.v, b.g, b.h};
}
template <int N>
Jet2<N> operator-(const Jet2<N>& a, double b) {
  return {a.v - b, a.g, a.h};
}
template <int N>
Jet2<N> operator-(double a, const Jet2<N>& b) {
  return {a - b.v, -b.g, -b.h};
}
template <int N>
Jet2<N> operator*(const Jet2<N>& a, double b) {
  return {a.v * b, a.g * b, a.h * b};
}
template <int N>
Jet2<N> operator*(double a, const Jet2<N>& b) {
  return {a * b.v, a * b.g, a * b.h};
}
template <int N>
Jet2<N> operator/(const Jet2<N>& a, double b) {
  return {a.v / b, a.g / b, a.h / b};
}
template <int N>
Jet2<N> operator/(double a, const Jet2<N>& b) {
  return a * reciprocal(b);
}

// ---------------------------------------------------------------------------
// Elementary functions, written once for every scalar type. For plain doubles
// chain() is not available, so each function dispatches on is_autodiff_v.

namespace detail {
template <typename T, typename F, typename D1, typename D2>
T lift(const T& x, F f, D1 df, D2 d2f) {
  if constexpr (is_autodiff_v<T>) {
    const double a = x.v;
    return x.chain(f(a), df(a), d2f(a));
  } else {
    return f(x);
  }
}
}  // namespace detail

template <typename T>
T sin(const T& x) {
  return detail::lift(
      x, [](double a) { return std::sin(a); }, [](double a) { return std::cos(a); },
      [](double a) { return -std::sin(a); });
}
template <typename T>
T cos(const T& x) {
  return detail::lift(
      x, [](double a) { return std::cos(a); }, [](double a) { return -std::sin(a); },
      [](double a) { return -std::cos(a); });
}
template <typename T>
T tan(const T& x) {
  return detail::lift(
      x, [](double a) { return std::tan(a); },
      [](double a) {
        const double c = std::cos(a);
        return 1.0 / (c * c);
      },
      [](double a) {
        const double c = std::cos(a);
        return 2.0 * std::tan(a) / (c * c);
      });
}
template <typename T>
T exp(const T& x) {
  return detail::lift(
      x, [](double a) { return std::exp(a); }, [](double a) { return std::exp(a); },
      [](double a) { return std::exp(a); });
}
template <typename T>
T log(const T& x) {
  return detail::lift(
      x, [](double a) { return std::log(a); }, [](double a) { return 1.0 / a; },
      [](double a) { return -1.0 / (a * a); });
}
template <typename T>
T sqrt(const T& x) {
  return detail::lift(
      x, [](double a) { return std::sqrt(a); }, [](double a) { return 0.5 / std::sqrt(a); },
      [](double a) { return -0.25 / (a * std::sqrt(a)); });
}
/// |x| with derivative sign(x), taken as 0 at x = 0; second derivative 0.
template <typename T>
T abs(const T& x) {
  return detail::lift(
      x, [](double a) { return std::abs(a); },
      [](double a) { return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0); }, [](double) { return 0.0; });
}
/// Integer power, valid for negative bases.
template <typename T>
T powi(const T& x, int n) {
  return detail::lift(
      x, [n](double a) { return std::pow(a, n); },
      [n](double a) { return n == 0 ? 0.0 : n * std::pow(a, n - 1); },
      [n](double a) { return (n == 0 || n == 1) ? 0.0 : n * (n - 1) * std::pow(a, n - 2); });
}

}  // namespace charfol
