#pragma once

// Scene configuration: a contact structure, a surface and command options,
// read from JSON with a strict schema (unknown keys are errors).

#include "charfol/charclass.hpp"
#include "charfol/foliation.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace charfol {

struct SceneOptions {
  FieldKind field = FieldKind::Xf;
  std::optional<bool> parametric;
  int grid = 64;
  double tol_root = -1.0;
  double tol_deg = 1e-7;
  LeafOptions leaf;
  bool horizon_T_given = false;  // skeleton shortens the horizon unless set
  int probe_grid = 8;
  std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::optional<Vec3> point;             // curvature-limit point; default: first characteristic point
  std::vector<Vec3> seeds;               // foliate, ambient seeds
  std::vector<Vec2> seeds_uv;            // foliate, parameter seeds
  std::vector<Direction> directions{Direction::Forward, Direction::Backward};
  std::vector<Vec3> queries;             // distance
  std::vector<std::pair<int, int>> pairs;  // distance; empty: every pair i < j
};

struct Scene {
  ContactStructure structure;
  Surface surface = Surface::implicit(Expr::constant(0.0, 3));
  SceneOptions options;

  CharVectorField field() const;
  CharSearchOptions search_options() const;
  ClassifyOptions classify_options() const;
};

/// Parses a scene. Throws ConfigError (with the offending key path) or
/// ParseError for malformed expressions.
Scene parse_scene(const nlohmann::json& j);
Scene parse_scene_text(const std::string& text);
Scene load_scene(const std::string& path);

ContactStructure parse_structure(const nlohmann::json& j);
Surface parse_surface(const nlohmann::json& j);

}  // namespace charfol
