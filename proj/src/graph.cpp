#include "poisonlab/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "json.hpp"

namespace poisonlab {

namespace {

std::pair<int, int> norm_edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

void finalize(Graph& g) {
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.validate();
}

std::int64_t max_edges(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

// Unranks pair index k in [0, n(n-1)/2) to the k-th pair in lexicographic
// (a, b) order with a < b.
std::pair<int, int> unrank_pair(int n, std::int64_t k) {
  for (int a = 0; a < n - 1; ++a) {
    const std::int64_t row = n - 1 - a;
    if (k < row) return {a, a + 1 + static_cast<int>(k)};
    k -= row;
  }
  throw std::logic_error("unrank_pair: index out of range");
}

}  // namespace

const char* to_string(GraphClass cls) {
  switch (cls) {
    case GraphClass::Cycle: return "cycle";
    case GraphClass::Star: return "star";
    case GraphClass::Wheel: return "wheel";
    case GraphClass::Lollipop: return "lollipop";
    case GraphClass::Hypercube: return "hypercube";
    case GraphClass::Grid: return "grid";
    case GraphClass::Clique: return "clique";
    case GraphClass::CircularLadder: return "circular_ladder";
  }
  return "unknown";
}

GraphClass graph_class_from_index(int index) {
  if (index < 0 || index >= kNumGraphClasses)
    throw std::invalid_argument("graph class index out of range: " + std::to_string(index));
  return static_cast<GraphClass>(index);
}

int min_feasible_nodes(GraphClass cls) {
  switch (cls) {
    case GraphClass::Cycle: return 3;
    case GraphClass::Star: return 2;
    case GraphClass::Wheel: return 4;
    case GraphClass::Lollipop: return 4;
    case GraphClass::Hypercube: return 2;
    case GraphClass::Grid: return 4;
    case GraphClass::Clique: return 1;
    case GraphClass::CircularLadder: return 6;
  }
  return 1;
}

bool Graph::has_edge(int a, int b) const {
  if (a == b) return false;
  return std::binary_search(edges.begin(), edges.end(), norm_edge(a, b));
}

void Graph::validate() const {
  if (node_count < 1) throw std::invalid_argument("graph must have at least one node");
  const std::pair<int, int>* prev = nullptr;
  for (const auto& e : edges) {
    if (e.first == e.second) throw std::invalid_argument("self loop in edge set");
    if (e.first > e.second) throw std::invalid_argument("edge not normalized (a < b)");
    if (e.first < 0 || e.second >= node_count)
      throw std::invalid_argument("edge endpoint out of range");
    if (prev && !(*prev < e)) throw std::invalid_argument("edges not sorted/unique");
    prev = &e;
  }
  if (label && (*label < 0 || *label >= kNumGraphClasses))
    throw std::invalid_argument("label out of range");
}

Graph generate_class_graph(GraphClass cls, int n_nodes, Rng& rng) {
  if (n_nodes < min_feasible_nodes(cls))
    throw std::invalid_argument(std::string("n_nodes too small for class ") + to_string(cls) +
                                ": " + std::to_string(n_nodes));
  Graph g;
  g.label = static_cast<int>(cls);
  switch (cls) {
    case GraphClass::Cycle: {
      g.node_count = n_nodes;
      for (int i = 0; i < n_nodes; ++i) g.edges.push_back(norm_edge(i, (i + 1) % n_nodes));
      break;
    }
    case GraphClass::Star: {
      g.node_count = n_nodes;
      for (int i = 1; i < n_nodes; ++i) g.edges.emplace_back(0, i);
      break;
    }
    case GraphClass::Wheel: {
      g.node_count = n_nodes;
      const int rim = n_nodes - 1;
      for (int i = 1; i <= rim; ++i) {
        g.edges.emplace_back(0, i);
        g.edges.push_back(norm_edge(i, 1 + (i % rim)));
      }
      break;
    }
    case GraphClass::Lollipop: {
      // Candy K_m on [0, m) plus a path on [m, n); the chain edge (m-1, m)
      // is the bridge. Path length drawn uniformly from [2, n/2].
      const int path_len = 2 + static_cast<int>(rng.uniform_index(
                                   static_cast<std::uint64_t>(std::max(1, n_nodes / 2 - 1))));
      const int m = n_nodes - path_len;
      g.node_count = n_nodes;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) g.edges.emplace_back(i, j);
      for (int k = m; k < n_nodes; ++k) g.edges.emplace_back(k - 1, k);
      break;
    }
    case GraphClass::Hypercube: {
      int dim = 0;
      while ((2 << dim) <= n_nodes) ++dim;  // dim = floor(log2 n)
      const int n = 1 << dim;
      g.node_count = n;
      for (int v = 0; v < n; ++v)
        for (int b = 0; b < dim; ++b) {
          const int u = v ^ (1 << b);
          if (u > v) g.edges.emplace_back(v, u);
        }
      break;
    }
    case GraphClass::Grid: {
      const int rows = 2 + static_cast<int>(rng.uniform_index(
                               static_cast<std::uint64_t>(std::max(1, n_nodes / 2 - 1))));
      const int cols = n_nodes / rows;
      g.node_count = rows * cols;
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          const int v = r * cols + c;
          if (c + 1 < cols) g.edges.emplace_back(v, v + 1);
          if (r + 1 < rows) g.edges.emplace_back(v, v + cols);
        }
      break;
    }
    case GraphClass::Clique: {
      g.node_count = n_nodes;
      for (int i = 0; i < n_nodes; ++i)
        for (int j = i + 1; j < n_nodes; ++j) g.edges.emplace_back(i, j);
      break;
    }
    case GraphClass::CircularLadder: {
      const int k = n_nodes / 2;
      g.node_count = 2 * k;
      for (int i = 0; i < k; ++i) {
        g.edges.push_back(norm_edge(i, (i + 1) % k));
        g.edges.push_back(norm_edge(k + i, k + (i + 1) % k));
        g.edges.emplace_back(i, k + i);
      }
      break;
    }
  }
  finalize(g);
  return g;
}

Graph generate_gnp(int n, double p_edge, Rng& rng) {
  if (n < 1) throw std::invalid_argument("gnp: n must be >= 1");
  if (!(p_edge >= 0.0 && p_edge <= 1.0))
    throw std::invalid_argument("gnp: p_edge must be in [0, 1]");
  Graph g;
  g.node_count = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p_edge)) g.edges.emplace_back(i, j);
  finalize(g);
  return g;
}

Graph insert_subgraph(const Graph& host, const Graph& sub, Rng& rng) {
  host.validate();
  sub.validate();
  Graph out;
  out.node_count = host.node_count + sub.node_count;
  out.label = host.label;
  out.edges = host.edges;
  out.edges.reserve(host.edges.size() + sub.edges.size() + 1);
  const int shift = host.node_count;
  for (const auto& [a, b] : sub.edges) out.edges.emplace_back(a + shift, b + shift);
  const int u = rng.uniform_int(host.node_count);
  const int v = shift + rng.uniform_int(sub.node_count);
  out.edges.push_back(norm_edge(u, v));
  finalize(out);
  return out;
}

Graph node_add(const Graph& g) {
  Graph out = g;
  out.node_count += 1;
  return out;
}

std::optional<Graph> node_delete(const Graph& g, Rng& rng) {
  if (g.node_count < 2) return std::nullopt;
  const int victim = rng.uniform_int(g.node_count);
  Graph out;
  out.node_count = g.node_count - 1;
  out.label = g.label;
  for (const auto& [a, b] : g.edges) {
    if (a == victim || b == victim) continue;
    out.edges.emplace_back(a > victim ? a - 1 : a, b > victim ? b - 1 : b);
  }
  finalize(out);
  return out;
}

std::optional<Graph> edge_add(const Graph& g, Rng& rng) {
  const std::int64_t total = max_edges(g.node_count);
  const auto present = static_cast<std::int64_t>(g.edges.size());
  if (present >= total) return std::nullopt;
  Graph out = g;
  // Rejection sample a missing pair; fall back to enumeration for very
  // dense graphs. Both stages are uniform over missing pairs.
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto [a, b] = unrank_pair(g.node_count, static_cast<std::int64_t>(
                                                      rng.uniform_index(total)));
    if (!g.has_edge(a, b)) {
      out.edges.emplace_back(a, b);
      finalize(out);
      return out;
    }
  }
  std::vector<std::pair<int, int>> missing;
  missing.reserve(static_cast<std::size_t>(total - present));
  for (int a = 0; a < g.node_count; ++a)
    for (int b = a + 1; b < g.node_count; ++b)
      if (!g.has_edge(a, b)) missing.emplace_back(a, b);
  out.edges.push_back(missing[rng.uniform_index(missing.size())]);
  finalize(out);
  return out;
}

std::optional<Graph> edge_delete(const Graph& g, Rng& rng) {
  if (g.edges.empty()) return std::nullopt;
  Graph out = g;
  out.edges.erase(out.edges.begin() +
                  static_cast<std::ptrdiff_t>(rng.uniform_index(g.edges.size())));
  return out;
}

std::vector<double> in_degrees(const Graph& g) {
  std::vector<double> deg(static_cast<std::size_t>(g.node_count), 0.0);
  for (const auto& [a, b] : g.edges) {
    deg[static_cast<std::size_t>(a)] += 1.0;
    deg[static_cast<std::size_t>(b)] += 1.0;
  }
  return deg;
}

GraphStats summary_stats(const Graph& g) {
  g.validate();
  GraphStats s;
  s.num_nodes = g.node_count;
  s.num_edges = g.edge_count();
  const auto deg = in_degrees(g);
  double max_d = deg[0], min_d = deg[0];
  for (double d : deg) {
    max_d = std::max(max_d, d);
    min_d = std::min(min_d, d);
  }
  s.mean_degree = 2.0 * s.num_edges / s.num_nodes;
  s.max_degree = max_d;
  s.min_degree = min_d;
  return s;
}

std::string graph_to_json_line(const Graph& g) {
  std::string s;
  s.reserve(24 + g.edges.size() * 12);
  s += "{\"n\":";
  s += std::to_string(g.node_count);
  s += ",\"edges\":[";
  bool first = true;
  for (const auto& [a, b] : g.edges) {
    if (!first) s += ',';
    first = false;
    s += '[';
    s += std::to_string(a);
    s += ',';
    s += std::to_string(b);
    s += ']';
  }
  s += ']';
  if (g.label) {
    s += ",\"label\":";
    s += std::to_string(*g.label);
  }
  s += '}';
  return s;
}

Graph graph_from_json_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad graph record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw std::runtime_error("bad graph record: missing \"n\" or \"edges\"");
  Graph g;
  try {
    g.node_count = j.at("n").get<int>();
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw std::runtime_error("edge is not a pair");
      g.edges.push_back(norm_edge(e[0].get<int>(), e[1].get<int>()));
    }
    if (j.contains("label") && !j.at("label").is_null()) g.label = j.at("label").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad graph record: ") + e.what());
  }
  std::sort(g.edges.begin(), g.edges.end());
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("bad graph record: ") + e.what());
  }
  return g;
}

}  // namespace poisonlab
