#pragma once

// Dormand-Prince 5(4) embedded pair. The caller owns step-size control so it
// can interleave projections and event checks between accepted steps.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace charfol {

template <int N>
struct Dopri5 {
  using State = Eigen::Matrix<double, N, 1>;

  struct Result {
    State y;      // fifth-order solution
    double err;   // scaled RMS error estimate; accept when <= 1
  };

  /// One trial step of size h from (t, y). `f` maps a state to its derivative.
  /// A quadrature component (e.g. accumulated length) may be named in
  /// `increment`: its error is then measured relative to its increment over
  /// the step, so the global error stays proportional to the total.
  template <typename F>
  static Result step(const F& f, const State& y, double h, double atol, double rtol, int increment = -1) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                            a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                            b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const State k1 = f(y);
    const State k2 = f(State(y + h * a21 * k1));
    const State k3 = f(State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 = f(State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = f(State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = f(State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(y5);
    const State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double acc = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = i == increment ? 1e-3 * atol + rtol * std::abs(y5[i] - y[i])
                                       : atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      acc += (e[i] / sc) * (e[i] / sc);
    }
    return {y5, std::sqrt(acc / static_cast<double>(y.size()))};
  }

  /// Standard step-size update with safety factor and growth limits.
  static double next_h(double h, double err) {
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    return h * factor;
  }
};

}  // namespace charfol
