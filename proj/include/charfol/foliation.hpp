#pragma once

// Leaves of the characteristic foliation as trajectories of a characteristic
// vector field: adaptive integration with events, sub-Riemannian lengths,
// separatrices, torus rotation numbers and a probe census.

#include "charfol/charclass.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace charfol {

enum class Direction { Forward, Backward };
enum class Termination { ConvergedTo, LeftDomain, Periodic, HorizonReached };

std::string to_string(Direction d);
std::string to_string(Termination t);

struct LeafOptions {
  double tol_ode = 1e-10;
  double horizon_T = 1e4;
  double horizon_len = -1.0;  // negative: 1e3 * surface diameter
  double ev_tol = 1e-8;
  double ev_rad = -1.0;       // negative: 1e-4 * surface diameter
  long max_steps = 10'000'000;
  bool stop_at_char = true;   // convergence event on known characteristic points
  bool detect_periodic = true;
};

struct TrajectorySample {
  double t = 0.0;
  Vec3 point;
  double length = 0.0;  // cumulative sub-Riemannian length
  std::optional<Vec2> uv;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double sr_length = 0.0;
  Termination termination = Termination::HorizonReached;
  int limit = -1;          // index into the known points for ConvergedTo
  double period = 0.0;     // for Periodic
  bool stiff = false;      // step underflow or step budget exhausted
  long steps = 0;
  Vec3 seed;
  std::optional<Vec2> seed_uv;
  Direction direction = Direction::Forward;

  const TrajectorySample& back() const { return samples.back(); }
};

/// Parameters (u, v) of a point of a parametrized surface; throws ChartError
/// when the point is not on the surface.
Vec2 locate_uv(const Surface& s, const Vec3& p);

/// Resolved event radii for a surface.
double event_radius(const Surface& s, const LeafOptions& opts);

/// Integrates the leaf through `seed`. Parametric fields take the seed in
/// (u, v); implicit ones take an ambient point on S.
Trajectory integrate_leaf(const CharVectorField& X, std::span<const CharPoint> known, const Vec3& seed, Direction dir,
                          const LeafOptions& opts = {});
Trajectory integrate_leaf_uv(const CharVectorField& X, std::span<const CharPoint> known, const Vec2& seed_uv,
                             Direction dir, const LeafOptions& opts = {});

/// Sub-Riemannian length of the leaf up to its limit point, with a tail
/// bound for the part past the convergence event.
struct LeafLength {
  Trajectory trajectory;
  double length = 0.0;            // sr_length + tail
  double tail = 0.0;              // remaining distance to the limit point
  double tail_uncertainty = 0.0;  // worst case minus the estimate, from the linearization
};

LeafLength leaf_length_to_limit(const CharVectorField& X, std::span<const CharPoint> known, const Vec3& seed,
                                Direction dir, const LeafOptions& opts = {});
LeafLength leaf_length_to_limit(const CharVectorField& X, std::span<const CharPoint> known, const Trajectory& tr);

/// Four separatrices of a saddle, in the order (+v_u, -v_u, +v_s, -v_s):
/// forward along the unstable eigenvector, backward along the stable one.
struct Separatrix {
  Trajectory trajectory;
  int eigen_sign = 1;  // +1 or -1
  bool unstable = true;
  double seed_offset = 0.0;  // sub-Riemannian length from the saddle to the seed
};

std::vector<Separatrix> separatrices(const CharVectorField& X, std::span<const CharPoint> known, int saddle,
                                     const LeafOptions& opts = {}, double delta_scale = 1e-5);

/// Horizontal torus rotation increment per u-period.
struct TorusAnalysis {
  double alpha = 0.0;
  double t0 = 0.0;   // time to reach u = 2 pi
  bool periodic_candidate = false;
  long p = 0, q = 1;  // alpha / (2 pi) ~ p / q when periodic_candidate
};

TorusAnalysis rotation_number(double r, double R, double tol = 1e-12);

/// Best rational approximation p/q of x with q <= max_q (continued fractions).
std::pair<long, long> rational_approximation(double x, long max_q);

struct LeafEnd {
  Termination kind = Termination::HorizonReached;
  int point = -1;
  bool operator==(const LeafEnd&) const = default;
};

struct ProbeResult {
  Vec3 seed;
  std::optional<Vec2> seed_uv;
  LeafEnd alpha;  // backward limit
  LeafEnd omega;  // forward limit
  bool unresolved = false;  // a stiff or horizon-limited end
};

struct SkeletonOptions {
  int probe_grid = 8;
  // Probe leaves on tori may never terminate; a short horizon keeps the census cheap.
  LeafOptions leaf = [] {
    LeafOptions o;
    o.horizon_T = 100.0;
    return o;
  }();
};

struct Skeleton {
  std::vector<CharPoint> points;
  std::vector<std::pair<int, std::vector<Separatrix>>> separatrices;  // (saddle index, its four leaves)
  std::vector<Trajectory> periodic;
  std::vector<ProbeResult> census;
  std::vector<Trajectory> probe_leaves;  // forward then backward per probe
  std::size_t unresolved = 0;
};

/// Probe seeds on S: sign changes of f along coordinate lines for implicit
/// surfaces, a (u, v) grid for parametric ones.
std::vector<Vec3> probe_seeds_implicit(const Surface& s, int n);
std::vector<Vec2> probe_seeds_param(const Surface& s, int n);

Skeleton skeleton(const CharVectorField& X, std::vector<CharPoint> points, const SkeletonOptions& opts = {});

}  // namespace charfol
