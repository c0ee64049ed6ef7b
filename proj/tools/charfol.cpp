// charfol: characteristic foliations of surfaces in contact sub-Riemannian
// 3-manifolds, from a JSON scene file.
//
// Exit codes: 0 success, 1 selftest failure, 2 bad usage or configuration,
// 3 numerical failure. Errors are written to stderr as one JSON object.

#include "charfol/acceptance.hpp"
#include "charfol/distance.hpp"
#include "charfol/parallel.hpp"
#include "charfol/report.hpp"
#include "charfol/scene.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace charfol;
using nlohmann::json;

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  std::vector<double> eps;
  int grid = 0;
  double tol = 0.0;
};

// One output document: a file stem and its text in a given format.
struct Output {
  std::string format;
  std::string stem;
  std::function<std::string()> render;
};

int report_error(const std::string& kind, const std::string& type, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"type", type}, {"message", message}}.dump() << std::endl;
  return code;
}

// Writes the requested format to stdout, or every available format (or the
// requested one) into the output directory.
void emit(const Flags& fl, const std::vector<Output>& outputs) {
  std::vector<const Output*> chosen;
  if (!fl.format.empty()) {
    for (const auto& o : outputs)
      if (o.format == fl.format) chosen.push_back(&o);
    if (chosen.empty()) {
      std::string have;
      for (const auto& o : outputs) have += (have.empty() ? "" : ", ") + o.format;
      throw ConfigError("--format: this command writes " + have);
    }
  } else if (!fl.out.empty()) {
    for (const auto& o : outputs) chosen.push_back(&o);
  } else {
    chosen.push_back(&outputs.front());
  }

  if (fl.out.empty()) {
    std::cout << chosen.front()->render();
    return;
  }
  std::filesystem::create_directories(fl.out);
  for (const Output* o : chosen) {
    const auto path = std::filesystem::path(fl.out) / (o->stem + "." + o->format);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("--out: cannot write " + path.string());
    f << o->render();
  }
}

Scene load(const Flags& fl) {
  if (fl.config.empty()) throw ConfigError("--config is required for this command");
  Scene sc = load_scene(fl.config);
  if (!fl.eps.empty()) sc.options.eps = fl.eps;
  if (fl.grid > 0) sc.options.grid = fl.grid;
  return sc;
}

std::vector<CharPoint> char_points(const Scene& sc, const CharVectorField& X) {
  std::vector<CharPoint> pts =
      analyze(X, find_characteristic_points(sc.surface, sc.structure, sc.search_options()), sc.classify_options());
  sort_points(pts);
  return pts;
}

std::string error_type(const Error& e) {
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const FrameDegeneracyError*>(&e)) return "FrameDegeneracyError";
  if (dynamic_cast<const NonContactError*>(&e)) return "NonContactError";
  if (dynamic_cast<const ChartError*>(&e)) return "ChartError";
  if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
  return "Error";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

void cmd_classify(const Flags& fl) {
  Scene sc = load(fl);
  if (fl.tol > 0) sc.options.tol_root = fl.tol;
  const CharVectorField X = sc.field();
  const auto pts = char_points(sc, X);
  emit(fl, {{"csv", "charpoints", [&] { return charpoints_csv(pts); }},
            {"json", "charpoints", [&] { return dump(charpoints_json(pts)); }},
            {"svg", "charpoints", [&] { return foliation_svg(X, pts, {}, sc.surface.name()); }}});
}

void cmd_foliate(const Flags& fl) {
  Scene sc = load(fl);
  if (fl.tol > 0) sc.options.leaf.tol_ode = fl.tol;
  const CharVectorField X = sc.field();
  const auto pts = char_points(sc, X);
  const SceneOptions& o = sc.options;

  // Seeds in the coordinates the field integrates in.
  std::vector<Vec3> seeds = o.seeds;
  std::vector<Vec2> seeds_uv = o.seeds_uv;
  if (X.parametric()) {
    for (const Vec3& p : seeds) seeds_uv.push_back(locate_uv(sc.surface, p));
    seeds.clear();
    if (seeds_uv.empty()) seeds_uv = probe_seeds_param(sc.surface, o.probe_grid);
  } else {
    if (!seeds_uv.empty()) throw ConfigError("options.seeds_uv: the field is not parametric");
    if (seeds.empty()) seeds = probe_seeds_implicit(sc.surface, o.probe_grid);
  }

  const std::size_t n_seeds = X.parametric() ? seeds_uv.size() : seeds.size();
  const std::size_t n_dir = o.directions.size();
  std::vector<Trajectory> leaves(n_seeds * n_dir);
  parallel_for(leaves.size(), [&](std::size_t k) {
    const Direction d = o.directions[k % n_dir];
    leaves[k] = X.parametric() ? integrate_leaf_uv(X, pts, seeds_uv[k / n_dir], d, o.leaf)
                               : integrate_leaf(X, pts, seeds[k / n_dir], d, o.leaf);
  });

  emit(fl, {{"csv", "trajectories", [&] { return trajectories_csv(leaves); }},
            {"json", "trajectories",
             [&] {
               json arr = json::array();
               for (const auto& tr : leaves) arr.push_back(trajectory_summary_json(tr));
               return dump(arr);
             }},
            {"svg", "foliation", [&] { return foliation_svg(X, pts, leaves, sc.surface.name()); }}});
}

void cmd_distance(const Flags& fl) {
  Scene sc = load(fl);
  if (fl.tol > 0) sc.options.leaf.tol_ode = fl.tol;
  const SceneOptions& o = sc.options;
  if (o.queries.size() < 2) throw ConfigError("options.queries: distance needs at least two query points");
  const CharVectorField X = sc.field();
  const auto pts = char_points(sc, X);
  GraphOptions go;
  go.leaf = o.leaf;
  const FoliationGraph g = build_graph(X, pts, o.queries, go);

  std::vector<std::pair<int, int>> pairs = o.pairs;
  if (pairs.empty())
    for (int i = 0; i < static_cast<int>(o.queries.size()); ++i)
      for (int j = i + 1; j < static_cast<int>(o.queries.size()); ++j) pairs.emplace_back(i, j);

  json doc;
  if (pairs.size() == 1) {
    doc = verdict_json(induced_distance(g, pairs[0].first, pairs[0].second));
  } else {
    doc = json::array();
    for (const auto& [i, j] : pairs) {
      json v = verdict_json(induced_distance(g, i, j));
      v["pair"] = {i, j};
      doc.push_back(v);
    }
  }
  emit(fl, {{"json", "distance", [&] { return dump(doc); }}});
}

void cmd_curvature_limit(const Flags& fl) {
  const Scene sc = load(fl);
  const CharVectorField X = sc.field();
  Vec3 p;
  if (sc.options.point) {
    p = *sc.options.point;
  } else {
    const auto pts = char_points(sc, X);
    if (pts.empty()) throw PreconditionError("curvature-limit: the surface has no characteristic point");
    p = pts.front().location;
  }
  const LimitStudy st = khat_limit_study(sc.surface, sc.structure, p, sc.options.eps);
  std::vector<CurvatureReport> reports;
  for (double e : st.eps) reports.push_back(gaussian_curvature(sc.surface, sc.structure, p, e));
  emit(fl, {{"csv", "curvature_limit", [&] { return limit_csv(st, reports); }},
            {"json", "curvature_limit", [&] { return dump(limit_json(st, reports)); }}});
}

void cmd_skeleton(const Flags& fl) {
  Scene sc = load(fl);
  if (fl.tol > 0) sc.options.leaf.tol_ode = fl.tol;
  const CharVectorField X = sc.field();
  SkeletonOptions so;
  so.probe_grid = sc.options.probe_grid;
  const double horizon = so.leaf.horizon_T;
  so.leaf = sc.options.leaf;
  if (!sc.options.horizon_T_given) so.leaf.horizon_T = horizon;
  const Skeleton sk = skeleton(X, char_points(sc, X), so);

  std::vector<Trajectory> leaves;
  for (const auto& [saddle, seps] : sk.separatrices)
    for (const auto& s : seps) leaves.push_back(s.trajectory);
  for (const auto& tr : sk.periodic) leaves.push_back(tr);
  emit(fl, {{"json", "skeleton", [&] { return dump(skeleton_json(sk)); }},
            {"svg", "skeleton", [&] { return foliation_svg(X, sk.points, leaves, sc.surface.name()); }}});
}

int cmd_selftest(const Flags& fl, const std::vector<int>& only) {
  AcceptanceOptions ao;
  if (fl.tol > 0) ao.tol_ode = fl.tol;
  ao.only = only;
  int failed = 0;
  for (const auto& r : run_acceptance(ao)) {
    std::cout << format_result(r) << std::endl;
    failed += !r.pass;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic foliations and induced distances of surfaces in contact 3-manifolds"};
  app.require_subcommand(1);

  Flags fl;
  std::vector<int> only;
  auto common = [&](CLI::App* sub, bool config) {
    auto* c = sub->add_option("--config", fl.config, "scene file (JSON)");
    if (config) c->check(CLI::ExistingFile);
    sub->add_option("--out", fl.out, "write files into this directory instead of stdout");
    sub->add_option("--format", fl.format, "output format")->check(CLI::IsMember({"csv", "json", "svg"}));
    sub->add_option("--eps", fl.eps, "comma-separated eps list for curvature-limit")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    sub->add_option("--grid", fl.grid, "characteristic point search grid")->check(CLI::PositiveNumber);
    sub->add_option("--tol", fl.tol,
                    "root tolerance for classify, integration tolerance for the leaf commands and selftest")
        ->check(CLI::PositiveNumber);
  };

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"classify", "locate and classify characteristic points (CSV)"},
           {"foliate", "integrate leaves from seeds or probe points (CSV, JSON, SVG)"},
           {"distance", "induced distance between query points (JSON)"},
           {"curvature-limit", "Riemannian approximation limit of the curvature ratio (CSV, JSON)"},
           {"skeleton", "separatrices, periodic leaves and probe census (JSON, SVG)"}}) {
    subs[name] = app.add_subcommand(name, help);
    common(subs[name], true);
  }
  CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  common(selftest, false);
  selftest->add_option("criteria", only, "criterion ids to run (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.get_name(), e.what(), 2);
  }

  try {
    if (selftest->parsed()) return cmd_selftest(fl, only);
    if (subs["classify"]->parsed()) cmd_classify(fl);
    if (subs["foliate"]->parsed()) cmd_foliate(fl);
    if (subs["distance"]->parsed()) cmd_distance(fl);
    if (subs["curvature-limit"]->parsed()) cmd_curvature_limit(fl);
    if (subs["skeleton"]->parsed()) cmd_skeleton(fl);
  } catch (const ConfigError& e) {
    return report_error("config", "ConfigError", e.what(), 2);
  } catch (const ParseError& e) {
    return report_error("config", "ParseError", e.what(), 2);
  } catch (const Error& e) {
    return report_error("numerical", error_type(e), e.what(), 3);
  } catch (const std::exception& e) {
    return report_error("internal", "exception", e.what(), 3);
  }
  return 0;
}
