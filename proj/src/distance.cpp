#include "charfol/distance.hpp"

#include "charfol/parallel.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>

namespace charfol {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cumulative length at the point of the polyline closest to q, if that point
// is within tol.
std::optional<double> length_along(const Trajectory& tr, const Vec3& q, double tol) {
  std::optional<double> best;
  double bd = tol;
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    const Vec3& a = tr.samples[i - 1].point;
    const Vec3& b = tr.samples[i].point;
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double s = len2 > 0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const double d = (a + s * ab - q).norm();
    if (d < bd) {
      bd = d;
      best = tr.samples[i - 1].length + s * (tr.samples[i].length - tr.samples[i - 1].length);
    }
  }
  return best;
}

class EdgeSet {
 public:
  void add(int a, int b, double w, std::string provenance) {
    if (a == b || !std::isfinite(w)) return;
    const auto key = std::minmax(a, b);
    auto it = edges_.find(key);
    if (it == edges_.end() || w < it->second.weight)
      edges_[key] = GraphEdge{key.first, key.second, std::max(w, 0.0), std::move(provenance)};
  }
  std::vector<GraphEdge> list() const {
    std::vector<GraphEdge> out;
    for (const auto& [k, e] : edges_) out.push_back(e);
    return out;
  }

 private:
  std::map<std::pair<int, int>, GraphEdge> edges_;
};

}  // namespace

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Finite: return "Finite";
    case VerdictKind::Infinite: return "Infinite";
    case VerdictKind::Unknown: return "Unknown";
  }
  return "?";
}

std::string to_string(InfiniteReason r) {
  switch (r) {
    case InfiniteReason::NoCharPoints: return "NoCharPoints";
    case InfiniteReason::PeriodicLeafSeparation: return "PeriodicLeafSeparation";
    case InfiniteReason::LeafNonConvergent: return "LeafNonConvergent";
  }
  return "?";
}

FoliationGraph build_graph(const CharVectorField& X, std::span<const CharPoint> chars, const std::vector<Vec3>& queries,
                           const GraphOptions& opts) {
  const Surface& s = X.surface();
  const double ev_rad = event_radius(s, opts.leaf);
  const double on_leaf = opts.on_leaf_tol > 0 ? opts.on_leaf_tol : 1e-6 * s.diameter();

  FoliationGraph g;
  g.n_char = static_cast<int>(chars.size());
  g.surface_compact = s.compact();
  for (const auto& cp : chars) g.node_points.push_back(cp.location);
  g.n_nodes = g.n_char;

  for (const Vec3& q : queries) {
    QueryInfo qi;
    qi.point = q;
    for (std::size_t i = 0; i < chars.size(); ++i)
      if ((chars[i].location - q).norm() < ev_rad) {
        qi.node = static_cast<int>(i);
        qi.merged = true;
        qi.forward = qi.backward = Termination::ConvergedTo;
        break;
      }
    if (!qi.merged) {
      qi.node = g.n_nodes++;
      g.node_points.push_back(q);
    }
    g.queries.push_back(qi);
  }

  // Leaves through each unmerged query, both directions.
  const std::size_t nq = queries.size();
  std::vector<std::array<Trajectory, 2>> leaves(nq);
  parallel_for(2 * nq, [&](std::size_t k) {
    const std::size_t i = k / 2;
    if (g.queries[i].merged) return;
    const Direction dir = k % 2 == 0 ? Direction::Forward : Direction::Backward;
    leaves[i][k % 2] = X.parametric() ? integrate_leaf_uv(X, chars, locate_uv(s, queries[i]), dir, opts.leaf)
                                      : integrate_leaf(X, chars, queries[i], dir, opts.leaf);
  });

  EdgeSet edges;
  for (std::size_t i = 0; i < nq; ++i) {
    QueryInfo& qi = g.queries[i];
    if (qi.merged) continue;
    qi.forward = leaves[i][0].termination;
    qi.backward = leaves[i][1].termination;
    qi.periodic = qi.forward == Termination::Periodic || qi.backward == Termination::Periodic;
    for (int d = 0; d < 2; ++d) {
      const Trajectory& tr = leaves[i][static_cast<std::size_t>(d)];
      if (tr.termination != Termination::ConvergedTo) continue;
      const LeafLength ll = leaf_length_to_limit(X, chars, tr);
      edges.add(qi.node, tr.limit, ll.length,
                "query " + std::to_string(i) + " " + to_string(d == 0 ? Direction::Forward : Direction::Backward));
    }
  }

  // Queries lying on another query's leaf.
  for (std::size_t i = 0; i < nq; ++i) {
    if (g.queries[i].merged) continue;
    for (std::size_t j = 0; j < nq; ++j) {
      if (i == j || g.queries[j].merged || g.queries[i].node == g.queries[j].node) continue;
      for (int d = 0; d < 2; ++d) {
        const auto along = length_along(leaves[i][static_cast<std::size_t>(d)], queries[j], on_leaf);
        if (along)
          edges.add(g.queries[i].node, g.queries[j].node, *along,
                    "query " + std::to_string(i) + " leaf through query " + std::to_string(j));
      }
    }
  }

  if (opts.saddle_edges) {
    for (std::size_t c = 0; c < chars.size(); ++c) {
      if (!is_saddle(chars[c].cls)) continue;
      std::vector<Separatrix> seps;
      try {
        seps = separatrices(X, chars, static_cast<int>(c), opts.leaf);
      } catch (const PreconditionError&) {
        continue;
      }
      for (std::size_t k = 0; k < seps.size(); ++k) {
        const Trajectory& tr = seps[k].trajectory;
        if (tr.termination != Termination::ConvergedTo || tr.limit == static_cast<int>(c)) continue;
        const LeafLength ll = leaf_length_to_limit(X, chars, tr);
        edges.add(static_cast<int>(c), tr.limit, seps[k].seed_offset + ll.length,
                  "separatrix " + std::to_string(k) + " of point " + std::to_string(c));
      }
    }
  }

  g.edges = edges.list();
  return g;
}

std::vector<double> shortest_from(const FoliationGraph& g, int node, std::vector<int>* parent) {
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(g.n_nodes));
  for (const auto& e : g.edges) {
    adj[static_cast<std::size_t>(e.a)].emplace_back(e.b, e.weight);
    adj[static_cast<std::size_t>(e.b)].emplace_back(e.a, e.weight);
  }
  std::vector<double> dist(static_cast<std::size_t>(g.n_nodes), kInf);
  std::vector<int> par(static_cast<std::size_t>(g.n_nodes), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(node)] = 0.0;
  pq.emplace(0.0, node);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
      const double nd = d + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        par[static_cast<std::size_t>(v)] = u;
        pq.emplace(nd, v);
      }
    }
  }
  if (parent) *parent = std::move(par);
  return dist;
}

DistanceVerdict induced_distance(const FoliationGraph& g, int qi, int qj) {
  const int nq = static_cast<int>(g.queries.size());
  if (qi < 0 || qj < 0 || qi >= nq || qj >= nq)
    throw PreconditionError("query index out of range (graph has " + std::to_string(nq) + " queries)");
  const QueryInfo& a = g.queries.at(static_cast<std::size_t>(qi));
  const QueryInfo& b = g.queries.at(static_cast<std::size_t>(qj));
  DistanceVerdict v;

  // Searching from the lower node id makes d(a, b) and d(b, a) bitwise equal.
  const int src = std::min(a.node, b.node), dst = std::max(a.node, b.node);
  std::vector<int> parent;
  const std::vector<double> dist = shortest_from(g, src, &parent);
  if (std::isfinite(dist[static_cast<std::size_t>(dst)])) {
    v.kind = VerdictKind::Finite;
    for (int n = dst; n != -1; n = parent[static_cast<std::size_t>(n)]) v.path.insert(v.path.begin(), n);
    double total = 0.0;
    for (std::size_t k = 1; k < v.path.size(); ++k)
      for (const auto& e : g.edges)
        if (std::minmax(v.path[k - 1], v.path[k]) == std::minmax(e.a, e.b)) total += e.weight;
    v.value = total;
    if (a.node != src) std::reverse(v.path.begin(), v.path.end());
    return v;
  }

  auto exits = [](const QueryInfo& q) {
    return !q.merged && q.forward == Termination::LeftDomain && q.backward == Termination::LeftDomain;
  };
  if (g.n_char == 0 && g.surface_compact) {
    v.kind = VerdictKind::Infinite;
    v.infinite_reason = InfiniteReason::NoCharPoints;
    v.reason = "the surface is compact and has no characteristic points";
  } else if (a.periodic || b.periodic) {
    v.kind = VerdictKind::Infinite;
    v.infinite_reason = InfiniteReason::PeriodicLeafSeparation;
    v.reason = "a query lies on a periodic leaf not containing the other";
  } else if (exits(a) || exits(b)) {
    v.kind = VerdictKind::Infinite;
    v.infinite_reason = InfiniteReason::LeafNonConvergent;
    v.reason = "a query leaf leaves the domain in both directions without reaching a characteristic point";
  } else {
    v.kind = VerdictKind::Unknown;
    v.reason = "no connecting concatenation of leaves was found";
  }
  return v;
}

TriangleReport triangle_audit(const FoliationGraph& g, double slack) {
  const std::size_t n = g.queries.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const DistanceVerdict v = induced_distance(g, static_cast<int>(i), static_cast<int>(j));
      if (v.kind == VerdictKind::Finite) d[i][j] = v.value;
    }
  TriangleReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i][i] != 0.0) ++rep.nonzero_self;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(d[i][j])) rep.all_finite = false;
      if (d[i][j] != d[j][i]) ++rep.asymmetric;
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        if (a == b || b == c || a == c) continue;
        ++rep.triples;
        if (d[a][c] > d[a][b] + d[b][c] + slack) ++rep.violations;
      }
  return rep;
}

}  // namespace charfol
