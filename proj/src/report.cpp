#include "charfol/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace charfol {

using nlohmann::json;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void sort_points(std::vector<CharPoint>& pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const CharPoint& a, const CharPoint& b) {
    return std::lexicographical_compare(a.location.data(), a.location.data() + 3, b.location.data(),
                                        b.location.data() + 3);
  });
}

std::string charpoints_csv(const std::vector<CharPoint>& pts) {
  std::ostringstream os;
  os << "x,y,z,khat,trace,det,re_lambda_plus,re_lambda_minus,im_lambda_plus,im_lambda_minus,class\n";
  for (const auto& p : pts)
    os << fmt(p.location.x()) << ',' << fmt(p.location.y()) << ',' << fmt(p.location.z()) << ',' << fmt(p.khat)
       << ',' << fmt(p.trace) << ',' << fmt(p.det) << ',' << fmt(p.lambda_plus.real()) << ','
       << fmt(p.lambda_minus.real()) << ',' << fmt(p.lambda_plus.imag()) << ',' << fmt(p.lambda_minus.imag()) << ','
       << to_string(p.cls) << '\n';
  return os.str();
}

json charpoints_json(const std::vector<CharPoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) {
    json o{{"location", {p.location.x(), p.location.y(), p.location.z()}},
           {"khat", p.khat},
           {"trace", p.trace},
           {"det", p.det},
           {"lambda_plus", {p.lambda_plus.real(), p.lambda_plus.imag()}},
           {"lambda_minus", {p.lambda_minus.real(), p.lambda_minus.imag()}},
           {"class", to_string(p.cls)},
           {"residual", p.residual}};
    if (p.uv) o["uv"] = {p.uv->x(), p.uv->y()};
    if (p.poincare_index != 0) o["poincare_index"] = p.poincare_index;
    arr.push_back(o);
  }
  return arr;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  os << "t,x,y,z,cumulative_length\n";
  for (const auto& s : tr.samples)
    os << fmt(s.t) << ',' << fmt(s.point.x()) << ',' << fmt(s.point.y()) << ',' << fmt(s.point.z()) << ','
       << fmt(s.length) << '\n';
  return os.str();
}

std::string trajectories_csv(const std::vector<Trajectory>& trs) {
  std::ostringstream os;
  os << "leaf,direction,t,x,y,z,cumulative_length\n";
  for (std::size_t i = 0; i < trs.size(); ++i)
    for (const auto& s : trs[i].samples)
      os << i << ',' << to_string(trs[i].direction) << ',' << fmt(s.t) << ',' << fmt(s.point.x()) << ','
         << fmt(s.point.y()) << ',' << fmt(s.point.z()) << ',' << fmt(s.length) << '\n';
  return os.str();
}

json trajectory_summary_json(const Trajectory& tr) {
  json o{{"seed", {tr.seed.x(), tr.seed.y(), tr.seed.z()}},
         {"direction", to_string(tr.direction)},
         {"termination", to_string(tr.termination)},
         {"sr_length", tr.sr_length},
         {"steps", tr.steps},
         {"samples", tr.samples.size()},
         {"stiff", tr.stiff}};
  if (tr.termination == Termination::ConvergedTo) o["limit"] = tr.limit;
  if (tr.termination == Termination::Periodic) o["period"] = tr.period;
  return o;
}

std::string limit_csv(const LimitStudy& st, const std::vector<CurvatureReport>& reports) {
  std::ostringstream os;
  os << "eps,K_eps,det_B,ratio,abs_error\n";
  for (std::size_t i = 0; i < st.eps.size(); ++i)
    os << fmt(st.eps[i]) << ',' << fmt(reports[i].K_eps) << ',' << fmt(reports[i].det_B) << ',' << fmt(st.ratio[i])
       << ',' << fmt(st.error[i]) << '\n';
  return os.str();
}

json limit_json(const LimitStudy& st, const std::vector<CurvatureReport>& reports) {
  json rows = json::array();
  for (std::size_t i = 0; i < st.eps.size(); ++i)
    rows.push_back({{"eps", st.eps[i]},
                    {"K_eps", reports[i].K_eps},
                    {"K_ext", reports[i].K_ext},
                    {"det_II", reports[i].det_II},
                    {"det_B", reports[i].det_B},
                    {"ratio", st.ratio[i]},
                    {"abs_error", st.error[i]}});
  json o{{"closed_form", st.closed_form}, {"exact", st.exact}, {"extrapolated", st.extrapolated}, {"rows", rows}};
  o["slope"] = st.slope ? json(*st.slope) : json(nullptr);
  return o;
}

json verdict_json(const DistanceVerdict& v) {
  json o{{"verdict", to_string(v.kind)}};
  if (v.kind == VerdictKind::Finite) {
    o["value"] = v.value;
    o["path"] = v.path;
  } else if (v.kind == VerdictKind::Infinite) {
    o["reason"] = to_string(v.infinite_reason);
    o["detail"] = v.reason;
  } else {
    o["reason"] = v.reason;
  }
  return o;
}

json graph_json(const FoliationGraph& g) {
  json nodes = json::array();
  for (int i = 0; i < g.n_nodes; ++i) {
    const Vec3& p = g.node_points[static_cast<std::size_t>(i)];
    nodes.push_back({{"id", i}, {"kind", i < g.n_char ? "characteristic" : "query"}, {"point", {p.x(), p.y(), p.z()}}});
  }
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}, {"leaf", e.provenance}});
  json queries = json::array();
  for (const auto& q : g.queries)
    queries.push_back({{"node", q.node},
                       {"merged", q.merged},
                       {"forward", to_string(q.forward)},
                       {"backward", to_string(q.backward)}});
  return {{"nodes", nodes}, {"edges", edges}, {"queries", queries}};
}

namespace {
json end_json(const LeafEnd& e) {
  json o{{"termination", to_string(e.kind)}};
  if (e.kind == Termination::ConvergedTo) o["point"] = e.point;
  return o;
}
}  // namespace

json skeleton_json(const Skeleton& sk) {
  json seps = json::array();
  for (const auto& [idx, list] : sk.separatrices) {
    json leaves = json::array();
    for (const auto& s : list) {
      json o = trajectory_summary_json(s.trajectory);
      o["unstable"] = s.unstable;
      o["eigen_sign"] = s.eigen_sign;
      leaves.push_back(o);
    }
    seps.push_back({{"saddle", idx}, {"leaves", leaves}});
  }
  json census = json::array();
  for (const auto& pr : sk.census) {
    json o{{"seed", {pr.seed.x(), pr.seed.y(), pr.seed.z()}},
           {"alpha", end_json(pr.alpha)},
           {"omega", end_json(pr.omega)},
           {"unresolved", pr.unresolved}};
    census.push_back(o);
  }
  json periodic = json::array();
  for (const auto& tr : sk.periodic) periodic.push_back(trajectory_summary_json(tr));
  return {{"points", charpoints_json(sk.points)},
          {"separatrices", seps},
          {"periodic", periodic},
          {"census", census},
          {"unresolved", sk.unresolved}};
}

// ---------------------------------------------------------------------------

namespace {

const char* class_color(PointClass c) {
  switch (c) {
    case PointClass::Saddle: return "#d62728";
    case PointClass::Node: return "#1f77b4";
    case PointClass::Focus: return "#2ca02c";
    case PointClass::DegenerateSaddle: return "#ff7f0e";
    case PointClass::DegenerateNode: return "#9467bd";
    case PointClass::SaddleNode: return "#8c564b";
    case PointClass::DegenerateUnresolved: return "#7f7f7f";
  }
  return "#000000";
}

struct Projection {
  bool param = false;
  double lo_x = 0, hi_x = 1, lo_y = 0, hi_y = 1;
  Vec2 plane(const Vec3& p) const {
    // Orthographic view from azimuth 35 degrees, elevation 25 degrees.
    constexpr double ca = 0.8191520442889918, sa = 0.5735764363510461;
    constexpr double ce = 0.9063077870366499, se = 0.42261826174069944;
    const double x = ca * p.x() - sa * p.y();
    const double depth = sa * p.x() + ca * p.y();
    return {x, ce * p.z() - se * depth};
  }
};

}  // namespace

std::string foliation_svg(const CharVectorField& X, const std::vector<CharPoint>& pts,
                          const std::vector<Trajectory>& leaves, const std::string& title) {
  constexpr double W = 640, H = 640, M = 40;
  Projection pr;
  pr.param = X.parametric();
  if (pr.param) {
    const ParamForm& pf = X.surface().param_form();
    pr.lo_x = pf.u.lo;
    pr.hi_x = pf.u.hi;
    pr.lo_y = pf.v.lo;
    pr.hi_y = pf.v.hi;
  } else {
    const Box& b = X.surface().box();
    pr.lo_x = pr.lo_y = std::numeric_limits<double>::infinity();
    pr.hi_x = pr.hi_y = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < 8; ++c) {
      const Vec3 corner((c & 1) ? b.axes[0].hi : b.axes[0].lo, (c & 2) ? b.axes[1].hi : b.axes[1].lo,
                        (c & 4) ? b.axes[2].hi : b.axes[2].lo);
      const Vec2 q = pr.plane(corner);
      pr.lo_x = std::min(pr.lo_x, q.x());
      pr.hi_x = std::max(pr.hi_x, q.x());
      pr.lo_y = std::min(pr.lo_y, q.y());
      pr.hi_y = std::max(pr.hi_y, q.y());
    }
  }
  const double scale = std::min((W - 2 * M) / (pr.hi_x - pr.lo_x), (H - 2 * M) / (pr.hi_y - pr.lo_y));
  auto screen = [&](const Vec2& q) {
    return Vec2(M + (q.x() - pr.lo_x) * scale, H - M - (q.y() - pr.lo_y) * scale);
  };
  auto coords = [&](const Vec3& p, const std::optional<Vec2>& uv) {
    return screen(pr.param && uv ? *uv : pr.plane(p));
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) os << "<text x=\"" << M << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  if (pr.param) {
    const Vec2 a = screen({pr.lo_x, pr.lo_y}), b = screen({pr.hi_x, pr.hi_y});
    os << "<rect x=\"" << fmt(a.x()) << "\" y=\"" << fmt(b.y()) << "\" width=\"" << fmt(b.x() - a.x())
       << "\" height=\"" << fmt(a.y() - b.y()) << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
  }

  for (const auto& tr : leaves) {
    // Break the polyline where periodic wrapping jumps across the chart.
    std::vector<std::vector<Vec2>> runs(1);
    std::optional<Vec2> prev;
    for (const auto& s : tr.samples) {
      const Vec2 q = coords(s.point, s.uv);
      if (prev && (q - *prev).norm() > 0.25 * (W - 2 * M)) runs.emplace_back();
      runs.back().push_back(q);
      prev = q;
    }
    for (const auto& run : runs) {
      if (run.size() < 2) continue;
      os << "<polyline fill=\"none\" stroke=\"#333333\" stroke-width=\"0.8\" points=\"";
      for (std::size_t i = 0; i < run.size(); ++i) os << (i ? " " : "") << fmt(run[i].x()) << ',' << fmt(run[i].y());
      os << "\"/>\n";
    }
  }
  for (const auto& p : pts) {
    const Vec2 q = coords(p.location, p.uv);
    os << "<circle cx=\"" << fmt(q.x()) << "\" cy=\"" << fmt(q.y()) << "\" r=\"5\" fill=\"" << class_color(p.cls)
       << "\"><title>" << to_string(p.cls) << "</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace charfol
