#pragma once

// The induced distance d_S approximated by shortest paths through a graph of
// leaves. Finite values are lengths of explicit horizontal concatenations and
// therefore upper bounds for d_S.

#include "charfol/foliation.hpp"

#include <string>
#include <vector>

namespace charfol {

struct GraphEdge {
  int a = 0, b = 0;
  double weight = 0.0;
  std::string provenance;  // which leaf realized the edge
};

struct QueryInfo {
  Vec3 point;
  int node = -1;               // graph node of the query (a char node when merged)
  bool merged = false;
  Termination forward = Termination::HorizonReached;
  Termination backward = Termination::HorizonReached;
  bool periodic = false;
};

struct FoliationGraph {
  int n_char = 0;                     // nodes [0, n_char) are characteristic points
  int n_nodes = 0;
  std::vector<Vec3> node_points;
  std::vector<GraphEdge> edges;       // undirected, one entry per pair, minimum weight
  std::vector<QueryInfo> queries;
  bool surface_compact = false;
};

struct GraphOptions {
  LeafOptions leaf;
  bool saddle_edges = true;
  double on_leaf_tol = -1.0;  // negative: 1e-6 * surface diameter
};

FoliationGraph build_graph(const CharVectorField& X, std::span<const CharPoint> chars, const std::vector<Vec3>& queries,
                           const GraphOptions& opts = {});

enum class VerdictKind { Finite, Infinite, Unknown };
enum class InfiniteReason { NoCharPoints, PeriodicLeafSeparation, LeafNonConvergent };

std::string to_string(VerdictKind k);
std::string to_string(InfiniteReason r);

struct DistanceVerdict {
  VerdictKind kind = VerdictKind::Unknown;
  double value = 0.0;
  std::vector<int> path;     // node ids, for Finite
  InfiniteReason infinite_reason = InfiniteReason::NoCharPoints;
  std::string reason;        // human-readable, for Infinite and Unknown
};

/// Distance between the i-th and j-th queries of the graph.
DistanceVerdict induced_distance(const FoliationGraph& g, int qi, int qj);

/// All-pairs shortest distances from a node (infinity when unreachable).
std::vector<double> shortest_from(const FoliationGraph& g, int node, std::vector<int>* parent = nullptr);

struct TriangleReport {
  std::size_t triples = 0;
  std::size_t violations = 0;
  std::size_t asymmetric = 0;
  std::size_t nonzero_self = 0;
  bool all_finite = true;
};

TriangleReport triangle_audit(const FoliationGraph& g, double slack = 1e-6);

}  // namespace charfol
