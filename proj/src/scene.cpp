#include "charfol/scene.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace charfol {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(path, "unknown key \"" + k + "\"");
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0)) fail(path, "must be positive");
  return v;
}

int count(const json& j, const std::string& path, int lo) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const long v = j.get<long>();
  if (v < lo || v > 1'000'000) fail(path, "out of range");
  return static_cast<int>(v);
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != N) fail(path, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = number(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return v;
}

template <int N>
std::vector<Eigen::Matrix<double, N, 1>> vec_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<Eigen::Matrix<double, N, 1>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec<N>(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Interval interval(const json& j, const std::string& path, bool* periodic = nullptr) {
  const std::size_t n = j.is_array() ? j.size() : 0;
  if (n != 2 && !(periodic && n == 3)) fail(path, "expected [lo, hi]" + std::string(periodic ? " or [lo, hi, \"periodic\"]" : ""));
  Interval iv{number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  if (!(iv.hi > iv.lo)) fail(path, "empty interval");
  if (periodic) {
    *periodic = n == 3;
    if (n == 3 && (!j[2].is_string() || j[2].get<std::string>() != "periodic"))
      fail(path + "[2]", "the only flag is \"periodic\"");
  }
  return iv;
}

Box box(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected three intervals");
  Box b;
  for (std::size_t i = 0; i < 3; ++i) b.axes[i] = interval(j[i], path + "[" + std::to_string(i) + "]");
  return b;
}

Expr expression(const json& j, const std::string& path, int arity) {
  const std::string s = text(j, path);
  try {
    return parse(s, arity);
  } catch (const ParseError& e) {
    throw ParseError(path, e);
  }
}

ContactStructure::FieldExprs field(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected three component expressions");
  return {expression(j[0], path + "[0]", 3), expression(j[1], path + "[1]", 3), expression(j[2], path + "[2]", 3)};
}

double param(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path, std::string("missing \"") + key + "\"");
  return number(j.at(key), path + "." + key);
}

}  // namespace

ContactStructure parse_structure(const json& j) {
  const std::string path = "structure";
  if (j.is_string()) {
    if (j.get<std::string>() == "heisenberg") return heisenberg();
    fail(path, "unknown structure \"" + j.get<std::string>() + "\"");
  }
  only_keys(j, path, {"X0", "X1", "X2", "domain"});
  for (const char* k : {"X0", "X1", "X2"})
    if (!j.contains(k)) fail(path, std::string("missing \"") + k + "\"");
  const Box dom = j.contains("domain") ? box(j.at("domain"), path + ".domain") : Box{};
  try {
    return ContactStructure(field(j.at("X0"), path + ".X0"), field(j.at("X1"), path + ".X1"),
                            field(j.at("X2"), path + ".X2"), dom);
  } catch (const FrameDegeneracyError& e) {
    fail(path, e.what());
  } catch (const NonContactError& e) {
    fail(path, e.what());
  }
}

Surface parse_surface(const json& j) {
  const std::string path = "surface";
  if (!j.is_object() || j.empty()) fail(path, "expected an object");
  only_keys(j, path,
            {"implicit", "box", "param", "compact", "plane", "ellipsoid", "paraboloid", "torus_horizontal",
             "torus_vertical"});

  auto builtin = [&](const char* name, std::initializer_list<const char*> keys) -> std::optional<json> {
    if (!j.contains(name)) return std::nullopt;
    if (j.size() != 1) fail(path, std::string("\"") + name + "\" cannot be combined with other keys");
    only_keys(j.at(name), path + "." + name, keys);
    return j.at(name);
  };
  const std::string bp = path + ".";
  if (auto b = builtin("plane", {"a", "b", "c"}))
    return plane(param(*b, bp + "plane", "a"), param(*b, bp + "plane", "b"), param(*b, bp + "plane", "c"));
  if (auto b = builtin("ellipsoid", {"a", "b", "c"})) {
    const std::string p = bp + "ellipsoid";
    return ellipsoid(positive(b->value("a", json()), p + ".a"), positive(b->value("b", json()), p + ".b"),
                     positive(b->value("c", json()), p + ".c"));
  }
  if (auto b = builtin("paraboloid", {"a"})) return paraboloid(param(*b, bp + "paraboloid", "a"));
  for (const char* name : {"torus_horizontal", "torus_vertical"}) {
    if (auto b = builtin(name, {"r", "R"})) {
      const std::string p = bp + name;
      const double r = positive(b->value("r", json()), p + ".r");
      const double R = positive(b->value("R", json()), p + ".R");
      if (!(R > r)) fail(p, "need R > r");
      return std::string(name) == "torus_horizontal" ? torus_horizontal(r, R) : torus_vertical(r, R);
    }
  }

  std::optional<Surface> s;
  if (j.contains("implicit")) {
    const Box b = j.contains("box") ? box(j.at("box"), path + ".box") : Box{};
    s = Surface::implicit(expression(j.at("implicit"), path + ".implicit", 3), b);
  } else if (j.contains("box")) {
    fail(path + ".box", "only valid with \"implicit\"");
  }
  if (j.contains("param")) {
    const json& pj = j.at("param");
    const std::string p = path + ".param";
    only_keys(pj, p, {"x", "y", "z", "u", "v"});
    ParamForm pf;
    const char* comps[3] = {"x", "y", "z"};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!pj.contains(comps[i])) fail(p, std::string("missing \"") + comps[i] + "\"");
      pf.phi[i] = expression(pj.at(comps[i]), p + "." + comps[i], 2);
    }
    if (pj.contains("u")) pf.u = interval(pj.at("u"), p + ".u", &pf.periodic_u);
    if (pj.contains("v")) pf.v = interval(pj.at("v"), p + ".v", &pf.periodic_v);
    if (s)
      s->with_param(pf);
    else
      s = Surface::parametrized(pf);
  }
  if (!s) fail(path, "needs \"implicit\", \"param\" or a built-in family");
  if (j.contains("compact")) {
    if (!j.at("compact").is_boolean()) fail(path + ".compact", "expected a boolean");
    s->set_compact(j.at("compact").get<bool>());
  }
  return *s;
}

Scene parse_scene(const json& j) {
  only_keys(j, "config", {"structure", "surface", "options"});
  if (!j.contains("structure")) fail("config", "missing \"structure\"");
  if (!j.contains("surface")) fail("config", "missing \"surface\"");
  Scene sc;
  sc.structure = parse_structure(j.at("structure"));
  sc.surface = parse_surface(j.at("surface"));

  if (!j.contains("options")) return sc;
  const json& o = j.at("options");
  const std::string p = "options";
  only_keys(o, p,
            {"field", "parametric", "grid", "tol_root", "tol_deg", "tol_ode", "horizon_T", "horizon_len", "ev_tol",
             "ev_rad", "max_steps", "probe_grid", "eps", "point", "seeds", "seeds_uv", "directions", "queries",
             "pairs"});
  SceneOptions& opt = sc.options;
  for (const auto& [k, v] : o.items()) {
    const std::string kp = p + "." + k;
    if (k == "field") {
      const std::string f = text(v, kp);
      if (f == "Xf")
        opt.field = FieldKind::Xf;
      else if (f == "XS")
        opt.field = FieldKind::XS;
      else
        fail(kp, "expected \"Xf\" or \"XS\"");
    } else if (k == "parametric") {
      if (!v.is_boolean()) fail(kp, "expected a boolean");
      opt.parametric = v.get<bool>();
    } else if (k == "grid") {
      opt.grid = count(v, kp, 2);
    } else if (k == "tol_root") {
      opt.tol_root = positive(v, kp);
    } else if (k == "tol_deg") {
      opt.tol_deg = positive(v, kp);
    } else if (k == "tol_ode") {
      opt.leaf.tol_ode = positive(v, kp);
    } else if (k == "horizon_T") {
      opt.leaf.horizon_T = positive(v, kp);
      opt.horizon_T_given = true;
    } else if (k == "horizon_len") {
      opt.leaf.horizon_len = positive(v, kp);
    } else if (k == "ev_tol") {
      opt.leaf.ev_tol = positive(v, kp);
    } else if (k == "ev_rad") {
      opt.leaf.ev_rad = positive(v, kp);
    } else if (k == "max_steps") {
      opt.leaf.max_steps = count(v, kp, 1);
    } else if (k == "probe_grid") {
      opt.probe_grid = count(v, kp, 1);
    } else if (k == "eps") {
      if (!v.is_array() || v.empty()) fail(kp, "expected a non-empty array");
      opt.eps.clear();
      for (std::size_t i = 0; i < v.size(); ++i) opt.eps.push_back(positive(v[i], kp + "[" + std::to_string(i) + "]"));
    } else if (k == "point") {
      opt.point = vec<3>(v, kp);
    } else if (k == "seeds") {
      opt.seeds = vec_list<3>(v, kp);
    } else if (k == "seeds_uv") {
      opt.seeds_uv = vec_list<2>(v, kp);
    } else if (k == "directions") {
      const std::string d = text(v, kp);
      if (d == "both")
        opt.directions = {Direction::Forward, Direction::Backward};
      else if (d == "forward")
        opt.directions = {Direction::Forward};
      else if (d == "backward")
        opt.directions = {Direction::Backward};
      else
        fail(kp, "expected \"both\", \"forward\" or \"backward\"");
    } else if (k == "queries") {
      opt.queries = vec_list<3>(v, kp);
    } else if (k == "pairs") {
      if (!v.is_array()) fail(kp, "expected an array");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string ip = kp + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != 2) fail(ip, "expected [i, j]");
        opt.pairs.emplace_back(count(v[i][0], ip + "[0]", 0), count(v[i][1], ip + "[1]", 0));
      }
    }
  }
  for (std::size_t i = 0; i < opt.pairs.size(); ++i)
    if (opt.pairs[i].first >= static_cast<int>(opt.queries.size()) ||
        opt.pairs[i].second >= static_cast<int>(opt.queries.size()))
      fail(p + ".pairs[" + std::to_string(i) + "]", "query index out of range");
  if (opt.parametric.value_or(false) && !sc.surface.has_param())
    fail(p + ".parametric", "the surface has no parametrization");
  if (opt.parametric.has_value() && !*opt.parametric && !sc.surface.has_implicit())
    fail(p + ".parametric", "the surface has no implicit form");
  return sc;
}

Scene parse_scene_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_scene(j);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene_text(ss.str());
}

CharVectorField Scene::field() const {
  const bool parametric =
      options.field == FieldKind::XS ? false : options.parametric.value_or(surface.has_param());
  return CharVectorField(surface, structure, options.field, parametric);
}

CharSearchOptions Scene::search_options() const {
  CharSearchOptions o;
  o.grid_n = options.grid;
  o.tol_root = options.tol_root;
  return o;
}

ClassifyOptions Scene::classify_options() const {
  ClassifyOptions o;
  o.tol_deg = options.tol_deg;
  return o;
}

}  // namespace charfol
