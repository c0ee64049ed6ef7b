#include "charfol/foliation.hpp"

#include "charfol/ode.hpp"
#include "charfol/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace charfol {
namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
constexpr std::size_t kMaxSamples = std::size_t{1} << 20;

// What the integrator needs to know about the phase space. D is the
// dimension of the surface coordinates; the state appends the length.
template <int D>
struct Model {
  using Coord = Eigen::Matrix<double, D, 1>;
  std::function<Coord(const Coord&)> field;          // X, already oriented
  std::function<double(const Coord&)> speed;         // |X|_g
  std::function<Coord(const Coord&)> correct;        // projection or wrapping
  std::function<Vec3(const Coord&)> point;
  std::function<bool(const Coord&)> inside;
  std::function<Coord(const Coord&, const Coord&)> delta;  // b - a, periodic-aware
  std::function<std::optional<Vec2>(const Coord&)> uv;
  double section_window = 0.0;
};

void thin(std::vector<TrajectorySample>& s) {
  std::vector<TrajectorySample> kept;
  kept.reserve(s.size() / 2 + 2);
  for (std::size_t i = 0; i < s.size(); i += 2) kept.push_back(s[i]);
  if ((s.size() - 1) % 2 != 0) kept.push_back(s.back());
  s.swap(kept);
}

template <int D>
Trajectory run(const Model<D>& m, std::span<const CharPoint> known, const typename Model<D>::Coord& seed,
               Direction dir, const LeafOptions& opts, double diameter) {
  using Coord = typename Model<D>::Coord;
  using Stepper = Dopri5<D + 1>;
  using State = typename Stepper::State;

  const double ev_rad = opts.ev_rad > 0 ? opts.ev_rad : 1e-4 * diameter;
  const double horizon_len = opts.horizon_len > 0 ? opts.horizon_len : 1e3 * diameter;
  const double sign = dir == Direction::Forward ? 1.0 : -1.0;

  auto rhs = [&](const State& y) {
    const Coord c = y.template head<D>();
    State d;
    d.template head<D>() = sign * m.field(c);
    d[D] = m.speed(c);
    return d;
  };

  Trajectory tr;
  tr.direction = dir;
  tr.seed = m.point(seed);
  tr.seed_uv = m.uv(seed);
  const Coord x0 = m.field(seed);
  if (!(m.speed(seed) > 1e-10)) throw PreconditionError("seed is a characteristic point");
  const Coord section = sign * x0;

  State y;
  y.template head<D>() = seed;
  y[D] = 0.0;
  double t = 0.0;
  tr.samples.push_back({0.0, tr.seed, 0.0, tr.seed_uv});

  auto section_value = [&](const State& s) { return m.delta(seed, s.template head<D>()).dot(section); };
  auto accept = [&](const State& trial) {
    State out = trial;
    out.template head<D>() = m.correct(trial.template head<D>());
    return out;
  };

  double h = std::min(opts.horizon_T, 1e-2 * diameter / std::max(x0.norm(), 1e-300));
  double g_prev = 0.0;
  tr.termination = Termination::HorizonReached;

  for (;;) {
    if (tr.steps >= opts.max_steps) {
      tr.stiff = true;
      break;
    }
    h = std::min(h, opts.horizon_T - t);
    const auto trial = Stepper::step(rhs, y, h, opts.tol_ode, opts.tol_ode, D);
    if (!(trial.err <= 1.0)) {
      h = std::isfinite(trial.err) ? Stepper::next_h(h, trial.err) : 0.25 * h;
      if (h < 1e-14 * std::max(1.0, t)) {
        tr.stiff = true;
        break;
      }
      continue;
    }
    ++tr.steps;
    const State y_prev = y;
    const double t_prev = t;
    y = accept(trial.y);
    t += h;
    const Coord c = y.template head<D>();

    if (!m.inside(c)) {
      tr.termination = Termination::LeftDomain;
      y = y_prev;
      t = t_prev;
      break;
    }

    tr.samples.push_back({t, m.point(c), y[D], m.uv(c)});
    if (tr.samples.size() > kMaxSamples) thin(tr.samples);

    if (opts.stop_at_char && !known.empty() && m.speed(c) < opts.ev_tol) {
      const Vec3 p = m.point(c);
      int best = -1;
      double bd = ev_rad;
      for (std::size_t i = 0; i < known.size(); ++i) {
        const double d = (known[i].location - p).norm();
        if (d < bd) {
          bd = d;
          best = static_cast<int>(i);
        }
      }
      if (best >= 0) {
        tr.termination = Termination::ConvergedTo;
        tr.limit = best;
        break;
      }
    }

    if (opts.detect_periodic) {
      const double g_new = section_value(y);
      const bool near = m.delta(seed, c).norm() < m.section_window &&
                        m.delta(seed, y_prev.template head<D>()).norm() < m.section_window;
      if (g_prev < 0.0 && g_new >= 0.0 && near) {
        // Re-step from the previous state to land on the section.
        double lo = 0.0, hi = h, glo = g_prev, ghi = g_new;
        State hit = y;
        double h_hit = h;
        for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, t); ++it) {
          double hm = lo - glo * (hi - lo) / (ghi - glo);
          if (!(hm > lo && hm < hi)) hm = 0.5 * (lo + hi);
          const State s = accept(Stepper::step(rhs, y_prev, hm, opts.tol_ode, opts.tol_ode, D).y);
          const double gm = section_value(s);
          hit = s;
          h_hit = hm;
          if (std::abs(gm) < 1e-14 * std::max(1.0, section.norm())) break;
          if (gm < 0.0) {
            lo = hm;
            glo = gm;
          } else {
            hi = hm;
            ghi = gm;
          }
        }
        if ((m.point(hit.template head<D>()) - tr.seed).norm() < ev_rad) {
          tr.samples.back() = {t_prev + h_hit, m.point(hit.template head<D>()), hit[D], m.uv(hit.template head<D>())};
          y = hit;
          t = t_prev + h_hit;
          tr.termination = Termination::Periodic;
          tr.period = t;
          break;
        }
      }
      g_prev = g_new;
    }

    if (t >= opts.horizon_T || y[D] >= horizon_len) break;
    h = Stepper::next_h(h, trial.err);
  }
  tr.sr_length = y[D];
  return tr;
}

Model<3> implicit_model(const CharVectorField& X) {
  const Surface& s = X.surface();
  Model<3> m;
  m.field = [&X](const Vec3& p) { return X(p); };
  m.speed = [&X](const Vec3& p) { return X.frame_coefficients(p).norm(); };
  m.correct = [&s](const Vec3& p) { return s.project(p, 1); };
  m.point = [](const Vec3& p) { return p; };
  m.inside = [&s](const Vec3& p) { return s.box().contains(p); };
  m.delta = [](const Vec3& a, const Vec3& b) { return Vec3(b - a); };
  m.uv = [](const Vec3&) { return std::optional<Vec2>{}; };
  m.section_window = 0.1 * s.diameter();
  return m;
}

Model<2> param_model(const CharVectorField& X) {
  const Surface& s = X.surface();
  const ParamForm& pf = s.param_form();
  Model<2> m;
  m.field = [&X](const Vec2& uv) { return X.param(uv).value; };
  m.speed = [&X](const Vec2& uv) { return X.param_sr_norm(uv, X.param(uv).value); };
  m.correct = [&s](const Vec2& uv) { return s.wrap(uv); };
  m.point = [&s](const Vec2& uv) { return s.point(uv); };
  m.inside = [&pf](const Vec2& uv) {
    return (pf.periodic_u || pf.u.contains(uv[0])) && (pf.periodic_v || pf.v.contains(uv[1]));
  };
  m.delta = [&s](const Vec2& a, const Vec2& b) { return s.param_delta(a, b); };
  m.uv = [](const Vec2& uv) { return std::optional<Vec2>(uv); };
  m.section_window = 0.25 * std::min(pf.u.width(), pf.v.width());
  return m;
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ConvergedTo: return "ConvergedTo";
    case Termination::LeftDomain: return "LeftDomain";
    case Termination::Periodic: return "PeriodicWithPeriod";
    case Termination::HorizonReached: return "HorizonReached";
  }
  return "?";
}

Vec2 locate_uv(const Surface& s, const Vec3& p) {
  const ParamForm& pf = s.param_form();
  constexpr int n = 64;
  Vec2 best(pf.u.mid(), pf.v.mid());
  double bd = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Vec2 uv(pf.u.lo + pf.u.width() * i / n, pf.v.lo + pf.v.width() * j / n);
      const double d = (s.point(uv) - p).squaredNorm();
      if (d < bd) {
        bd = d;
        best = uv;
      }
    }
  for (int it = 0; it < 50; ++it) {
    const Vec3 r = s.point(best) - p;
    const Eigen::Matrix<double, 3, 2> T = s.tangents(best);
    const Vec2 step = T.colPivHouseholderQr().solve(-r);
    best = s.wrap(best + step);
    if (step.norm() < 1e-15) break;
  }
  const double res = (s.point(best) - p).norm();
  if (res > 1e-8 * (1.0 + s.diameter())) throw ChartError("point is not on the parametrized surface");
  return best;
}

double event_radius(const Surface& s, const LeafOptions& opts) {
  return opts.ev_rad > 0 ? opts.ev_rad : 1e-4 * s.diameter();
}

Trajectory integrate_leaf(const CharVectorField& X, std::span<const CharPoint> known, const Vec3& seed, Direction dir,
                          const LeafOptions& opts) {
  if (X.parametric()) throw PreconditionError("parametric field: seed the leaf in (u, v)");
  const Surface& s = X.surface();
  const double f = evaluate(s.implicit_form().f, seed);
  if (std::abs(f) > 1e-6 * (1.0 + seed.norm())) throw PreconditionError("seed is not on the surface");
  return run<3>(implicit_model(X), known, s.project(seed, 2), dir, opts, s.diameter());
}

Trajectory integrate_leaf_uv(const CharVectorField& X, std::span<const CharPoint> known, const Vec2& seed_uv,
                             Direction dir, const LeafOptions& opts) {
  if (!X.parametric()) throw PreconditionError("implicit field: seed the leaf with an ambient point");
  return run<2>(param_model(X), known, seed_uv, dir, opts, X.surface().diameter());
}

// ---------------------------------------------------------------------------

LeafLength leaf_length_to_limit(const CharVectorField& X, std::span<const CharPoint> known, const Trajectory& tr) {
  if (tr.termination != Termination::ConvergedTo) throw PreconditionError("leaf does not converge to a known point");
  const CharPoint& cp = known[static_cast<std::size_t>(tr.limit)];
  const Vec3 gap = cp.location - tr.back().point;
  const Vec3 b = frame_coefficients(X.structure().frame(cp.location), gap);
  const double d = std::hypot(b[1], b[2]);

  // |gamma(t) - p| <= C d e^{-alpha t} gives a tail length of at most C d.
  const double alpha = std::min(std::abs(cp.lambda_plus.real()), std::abs(cp.lambda_minus.real()));
  const double norm = Eigen::JacobiSVD<Mat2>(cp.dx).singularValues()[0];
  const double C = alpha > 0 ? norm / alpha : std::numeric_limits<double>::infinity();

  LeafLength out;
  out.trajectory = tr;
  out.tail = d;
  out.tail_uncertainty = d == 0.0 ? 0.0 : std::max(C * d - d, 0.0);
  out.length = tr.sr_length + d;
  return out;
}

LeafLength leaf_length_to_limit(const CharVectorField& X, std::span<const CharPoint> known, const Vec3& seed,
                                Direction dir, const LeafOptions& opts) {
  return leaf_length_to_limit(X, known, integrate_leaf(X, known, seed, dir, opts));
}

// ---------------------------------------------------------------------------

std::vector<Separatrix> separatrices(const CharVectorField& X, std::span<const CharPoint> known, int saddle,
                                     const LeafOptions& opts, double delta_scale) {
  const CharPoint& cp = known[static_cast<std::size_t>(saddle)];
  if (std::abs(cp.lambda_plus.imag()) > 0 || std::abs(cp.lambda_minus.imag()) > 0)
    throw PreconditionError("complex eigenvalues: not a saddle");
  if (!is_saddle(cp.cls)) throw PreconditionError("point is not a saddle");

  const Mat2 dx = X.parametric() ? *cp.dx_param : cp.dx;
  Eigen::EigenSolver<Mat2> es(dx);
  const Eigen::Vector2cd ev = es.eigenvalues();
  if (std::abs(ev[0].imag()) > 1e-12 * (1.0 + std::abs(ev[0])))
    throw PreconditionError("complex eigenvalues: not a saddle");
  const int iu = ev[0].real() >= ev[1].real() ? 0 : 1;
  const int is = 1 - iu;
  const std::array<int, 2> order{iu, is};

  const Surface& s = X.surface();
  const double delta = delta_scale * s.diameter();
  const Mat3 A = X.structure().frame(cp.location);

  std::vector<Separatrix> out(4);
  std::array<Vec3, 4> seeds3;
  std::array<Vec2, 4> seeds2;
  for (int k = 0; k < 2; ++k) {
    const Vec2 v = es.eigenvectors().col(order[static_cast<std::size_t>(k)]).real();
    for (int sg = 0; sg < 2; ++sg) {
      const int idx = 2 * k + sg;
      const double sign = sg == 0 ? 1.0 : -1.0;
      Separatrix& sp = out[static_cast<std::size_t>(idx)];
      sp.eigen_sign = sg == 0 ? 1 : -1;
      sp.unstable = k == 0;
      sp.seed_offset = delta;
      if (X.parametric()) {
        const Vec2 w = v / X.param_sr_norm(*cp.uv, v);
        seeds2[static_cast<std::size_t>(idx)] = s.wrap(*cp.uv + sign * delta * w);
      } else {
        const Vec2 w = v.normalized();
        seeds3[static_cast<std::size_t>(idx)] = s.project(cp.location + sign * delta * (w[0] * A.col(1) + w[1] * A.col(2)), 3);
      }
    }
  }
  parallel_for(4, [&](std::size_t i) {
    const Direction dir = out[i].unstable ? Direction::Forward : Direction::Backward;
    out[i].trajectory = X.parametric() ? integrate_leaf_uv(X, known, seeds2[i], dir, opts)
                                       : integrate_leaf(X, known, seeds3[i], dir, opts);
  });
  return out;
}

// ---------------------------------------------------------------------------

std::pair<long, long> rational_approximation(double x, long max_q) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_q) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return {p1, q1};
}

TorusAnalysis rotation_number(double r, double R, double tol) {
  if (!(R > r && r > 0)) throw PreconditionError("need R > r > 0");
  using Stepper = Dopri5<2>;
  using State = Stepper::State;
  auto rhs = [&](const State& y) {
    const double rho = R + r * std::cos(y[0]);
    return State(0.5 * rho * rho, r * std::cos(y[0]));
  };
  State y(0.0, 0.0);
  double t = 0.0, h = 1e-2;
  for (long steps = 0; steps < 10'000'000; ++steps) {
    const auto trial = Stepper::step(rhs, y, h, tol, tol);
    if (!(trial.err <= 1.0)) {
      h = Stepper::next_h(h, trial.err);
      continue;
    }
    if (trial.y[0] >= kTwoPi) {
      // Newton on the step length so that u lands on 2 pi.
      double hs = h * (kTwoPi - y[0]) / (trial.y[0] - y[0]);
      State end = trial.y;
      for (int it = 0; it < 20; ++it) {
        end = Stepper::step(rhs, y, hs, tol, tol).y;
        const double du = end[0] - kTwoPi;
        if (std::abs(du) < 1e-15) break;
        hs -= du / rhs(end)[0];
      }
      TorusAnalysis out;
      out.t0 = t + hs;
      out.alpha = end[1];
      const auto [p, q] = rational_approximation(out.alpha / kTwoPi, 64);
      out.p = p;
      out.q = q;
      out.periodic_candidate = std::abs(out.alpha / kTwoPi - static_cast<double>(p) / static_cast<double>(q)) < 1e-9;
      return out;
    }
    y = trial.y;
    t += h;
    h = Stepper::next_h(h, trial.err);
  }
  throw PreconditionError("rotation number integration did not reach u = 2 pi");
}

// ---------------------------------------------------------------------------

std::vector<Vec3> probe_seeds_implicit(const Surface& s, int n) {
  const Expr& f = s.implicit_form().f;
  const Box& box = s.box();
  std::vector<Vec3> out;
  const int m = 8 * n;
  for (int axis : {2, 0, 1}) {
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    const Interval& ia = box.axes[static_cast<std::size_t>(axis)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec3 p;
        p[a1] = box.axes[static_cast<std::size_t>(a1)].lo + (i + 0.5) / n * box.axes[static_cast<std::size_t>(a1)].width();
        p[a2] = box.axes[static_cast<std::size_t>(a2)].lo + (j + 0.5) / n * box.axes[static_cast<std::size_t>(a2)].width();
        auto at = [&](double w) {
          Vec3 q = p;
          q[axis] = w;
          return q;
        };
        double w0 = ia.lo, f0 = evaluate(f, at(w0));
        for (int k = 1; k <= m; ++k) {
          const double w1 = ia.lo + ia.width() * k / m;
          const double f1 = evaluate(f, at(w1));
          if ((f0 < 0) != (f1 < 0)) {
            double lo = w0, hi = w1, flo = f0;
            for (int it = 0; it < 80; ++it) {
              const double mid = 0.5 * (lo + hi);
              const double fm = evaluate(f, at(mid));
              if ((fm < 0) == (flo < 0)) {
                lo = mid;
                flo = fm;
              } else {
                hi = mid;
              }
            }
            out.push_back(s.project(at(0.5 * (lo + hi)), 2));
          }
          w0 = w1;
          f0 = f1;
        }
      }
    if (!out.empty()) break;
  }
  return out;
}

std::vector<Vec2> probe_seeds_param(const Surface& s, int n) {
  const ParamForm& pf = s.param_form();
  std::vector<Vec2> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.emplace_back(pf.u.lo + (i + 0.5) / n * pf.u.width(), pf.v.lo + (j + 0.5) / n * pf.v.width());
  return out;
}

Skeleton skeleton(const CharVectorField& X, std::vector<CharPoint> points, const SkeletonOptions& opts) {
  Skeleton sk;
  sk.points = std::move(points);
  const std::span<const CharPoint> known(sk.points);
  const Surface& s = X.surface();
  const double ev_rad = event_radius(s, opts.leaf);

  for (std::size_t i = 0; i < sk.points.size(); ++i) {
    if (!is_saddle(sk.points[i].cls)) continue;
    try {
      sk.separatrices.emplace_back(static_cast<int>(i), separatrices(X, known, static_cast<int>(i), opts.leaf));
    } catch (const PreconditionError&) {
      // Degenerate saddles without two real eigendirections are skipped.
    }
  }

  std::vector<Vec3> seeds3;
  std::vector<Vec2> seeds2;
  auto keep = [&](const Vec3& p, double speed) {
    if (!(speed > 1e-6)) return false;
    for (const auto& cp : sk.points)
      if ((cp.location - p).norm() < 10.0 * ev_rad) return false;
    return true;
  };
  if (X.parametric()) {
    for (const Vec2& uv : probe_seeds_param(s, opts.probe_grid))
      if (keep(s.point(uv), X.param_sr_norm(uv, X.param(uv).value))) seeds2.push_back(uv);
  } else {
    for (const Vec3& p : probe_seeds_implicit(s, opts.probe_grid))
      if (s.box().contains(p) && keep(p, X.frame_coefficients(p).norm())) seeds3.push_back(p);
  }
  const std::size_t n = X.parametric() ? seeds2.size() : seeds3.size();

  std::vector<Trajectory> fwd(n), bwd(n);
  parallel_for(2 * n, [&](std::size_t k) {
    const std::size_t i = k / 2;
    const Direction dir = k % 2 == 0 ? Direction::Forward : Direction::Backward;
    Trajectory tr = X.parametric() ? integrate_leaf_uv(X, known, seeds2[i], dir, opts.leaf)
                                   : integrate_leaf(X, known, seeds3[i], dir, opts.leaf);
    (k % 2 == 0 ? fwd[i] : bwd[i]) = std::move(tr);
  });

  for (std::size_t i = 0; i < n; ++i) {
    ProbeResult pr;
    pr.seed = fwd[i].seed;
    pr.seed_uv = fwd[i].seed_uv;
    pr.omega = {fwd[i].termination, fwd[i].limit};
    pr.alpha = {bwd[i].termination, bwd[i].limit};
    pr.unresolved = fwd[i].stiff || bwd[i].stiff || fwd[i].termination == Termination::HorizonReached ||
                    bwd[i].termination == Termination::HorizonReached;
    if (pr.unresolved) ++sk.unresolved;
    if (fwd[i].termination == Termination::Periodic) sk.periodic.push_back(fwd[i]);
    sk.census.push_back(pr);
  }
  for (std::size_t i = 0; i < n; ++i) {
    sk.probe_leaves.push_back(std::move(fwd[i]));
    sk.probe_leaves.push_back(std::move(bwd[i]));
  }
  return sk;
}

}  // namespace charfol
