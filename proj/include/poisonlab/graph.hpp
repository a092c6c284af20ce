#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poisonlab/rng.hpp"

namespace poisonlab {

// The eight synthetic graph classes. Integer encoding is stable and is what
// gets written to disk as the class label.
enum class GraphClass : int {
  Cycle = 0,
  Star = 1,
  Wheel = 2,
  Lollipop = 3,
  Hypercube = 4,
  Grid = 5,
  Clique = 6,
  CircularLadder = 7,
};

inline constexpr int kNumGraphClasses = 8;

const char* to_string(GraphClass cls);
GraphClass graph_class_from_index(int index);

// Smallest node count the class generator accepts.
int min_feasible_nodes(GraphClass cls);

// Undirected simple graph. Edges are stored normalized (a < b), sorted and
// unique; no self loops. A label, when present, is a class index in [0, 8).
struct Graph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  std::optional<int> label;

  int edge_count() const { return static_cast<int>(edges.size()); }
  bool has_edge(int a, int b) const;

  // Throws std::invalid_argument if any structural invariant is broken.
  void validate() const;

  bool operator==(const Graph&) const = default;
};

struct GraphStats {
  int num_nodes = 0;
  int num_edges = 0;
  double mean_degree = 0.0;
  double max_degree = 0.0;
  double min_degree = 0.0;
};

// Generators ------------------------------------------------------------

// Builds a labeled graph of the given class with ~n_nodes nodes. Classes
// whose structure constrains the node count adjust it downward (hypercube
// to the nearest power of two, grid to rows*cols, circular ladder to an
// even count). Lollipop and grid consume randomness for their shape split.
// Throws std::invalid_argument when n_nodes < min_feasible_nodes(cls).
Graph generate_class_graph(GraphClass cls, int n_nodes, Rng& rng);

// Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs is drawn independently,
// in lexicographic pair order. Unlabeled.
Graph generate_gnp(int n, double p_edge, Rng& rng);

// Disjoint union of host and sub (sub node ids shifted by host.node_count)
// plus exactly one bridge edge between a uniformly chosen host node and a
// uniformly chosen sub node. Host label is preserved. Inputs are untouched.
Graph insert_subgraph(const Graph& host, const Graph& sub, Rng& rng);

// Single-element edits. The delete/add-edge variants return nullopt when the
// edit is infeasible (no node to delete, no missing pair, no edge) so an
// agent exploring the extended action space gets a no-op instead of a crash.
Graph node_add(const Graph& g);
std::optional<Graph> node_delete(const Graph& g, Rng& rng);
std::optional<Graph> edge_add(const Graph& g, Rng& rng);
std::optional<Graph> edge_delete(const Graph& g, Rng& rng);

// Degree of each node, edges counted in both directions.
std::vector<double> in_degrees(const Graph& g);

GraphStats summary_stats(const Graph& g);

// Serialization: one compact JSON object per graph,
//   {"n": int, "edges": [[i,j],...], "label": int}
// with "label" omitted for unlabeled graphs. Files are newline-delimited.
std::string graph_to_json_line(const Graph& g);
Graph graph_from_json_line(const std::string& line);  // throws std::runtime_error

}  // namespace poisonlab
