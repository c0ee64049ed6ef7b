#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace charfol {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// Axis-aligned box in R^3.
struct Box {
  std::array<Interval, 3> axes{Interval{-10, 10}, Interval{-10, 10}, Interval{-10, 10}};

  bool contains(const Vec3& p) const {
    return axes[0].contains(p.x()) && axes[1].contains(p.y()) && axes[2].contains(p.z());
  }
  double diameter() const {
    return std::sqrt(axes[0].width() * axes[0].width() + axes[1].width() * axes[1].width() +
                     axes[2].width() * axes[2].width());
  }
  Vec3 lower() const { return {axes[0].lo, axes[1].lo, axes[2].lo}; }
  Vec3 upper() const { return {axes[0].hi, axes[1].hi, axes[2].hi}; }
};

// Error hierarchy. Every failure the library raises derives from Error so the
// CLI can map it to an exit code in one place.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  /// The same error located at a config key.
  ParseError(const std::string& path, const ParseError& e) : Error(path + ": " + e.what()), offset_(e.offset_) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class DomainError : public Error {
 public:
  DomainError(const std::string& subexpr, const std::string& what)
      : Error("domain error in '" + subexpr + "': " + what), subexpr_(subexpr) {}
  const std::string& subexpression() const { return subexpr_; }

 private:
  std::string subexpr_;
};

class FrameDegeneracyError : public Error {
 public:
  using Error::Error;
};

class NonContactError : public Error {
 public:
  using Error::Error;
};

class ChartError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace charfol
