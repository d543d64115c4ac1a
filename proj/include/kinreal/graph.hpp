#pragma once

// Reaction-graph analysis: strongly connected components, linkage classes,
// weak reversibility and deficiency.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "kinreal/network.hpp"

namespace kinreal {

/// Directed graph over complexes; an edge i -> j is a reaction C_i -> C_j.
struct ReactionGraph {
  std::size_t node_count = 0;
  std::vector<std::vector<std::size_t>> successors;

  static ReactionGraph from_network(const Network& net) {
    ReactionGraph g{net.complex_count(), std::vector<std::vector<std::size_t>>(net.complex_count())};
    for (const auto& r : net.reactions()) g.successors[r.source].push_back(r.target);
    for (auto& s : g.successors) std::sort(s.begin(), s.end());
    return g;
  }

  /// Edges are off-diagonal entries strictly above `threshold`.
  static ReactionGraph from_kinetics(const KineticsMatrix& ak, double threshold = 0.0) {
    ReactionGraph g{ak.size(), std::vector<std::vector<std::size_t>>(ak.size())};
    for (std::size_t source = 0; source < ak.size(); ++source) {
      for (std::size_t target = 0; target < ak.size(); ++target) {
        if (source != target && ak.rate(source, target) > threshold) {
          g.successors[source].push_back(target);
        }
      }
    }
    return g;
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < node_count; ++i) {
      for (std::size_t j : successors[i]) out.emplace_back(i, j);
    }
    return out;
  }

  std::vector<bool> incident_nodes() const {
    std::vector<bool> used(node_count, false);
    for (std::size_t i = 0; i < node_count; ++i) {
      for (std::size_t j : successors[i]) used[i] = used[j] = true;
    }
    return used;
  }
};

namespace detail {

inline void canonicalize(std::vector<std::vector<std::size_t>>& groups) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

}  // namespace detail

/// Tarjan's algorithm, iterative. Every node appears in exactly one
/// component; components are sorted internally and ordered by smallest member.
inline std::vector<std::vector<std::size_t>> strongly_connected_components(
    const ReactionGraph& graph) {
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  const std::size_t n = graph.node_count;
  std::vector<std::size_t> index(n, kUnvisited), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t next_child;
  };
  std::vector<Frame> call_stack;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call_stack.push_back({root, 0});
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call_stack.empty()) {
      Frame& frame = call_stack.back();
      const auto& succ = graph.successors[frame.node];
      if (frame.next_child < succ.size()) {
        std::size_t child = succ[frame.next_child++];
        if (index[child] == kUnvisited) {
          index[child] = lowlink[child] = counter++;
          stack.push_back(child);
          on_stack[child] = true;
          call_stack.push_back({child, 0});
        } else if (on_stack[child]) {
          lowlink[frame.node] = std::min(lowlink[frame.node], index[child]);
        }
        continue;
      }
      std::size_t node = frame.node;
      call_stack.pop_back();
      if (!call_stack.empty()) {
        std::size_t parent = call_stack.back().node;
        lowlink[parent] = std::min(lowlink[parent], lowlink[node]);
      }
      if (lowlink[node] == index[node]) {
        std::vector<std::size_t> component;
        std::size_t member;
        do {
          member = stack.back();
          stack.pop_back();
          on_stack[member] = false;
          component.push_back(member);
        } while (member != node);
        components.push_back(std::move(component));
      }
    }
  }
  detail::canonicalize(components);
  return components;
}

/// Undirected connected components over complexes incident to a reaction.
inline std::vector<std::vector<std::size_t>> linkage_classes(const ReactionGraph& graph) {
  std::vector<std::size_t> parent(graph.node_count);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (auto [a, b] : graph.edges()) {
    std::size_t ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  auto used = graph.incident_nodes();
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> slot(graph.node_count, static_cast<std::size_t>(-1));
  for (std::size_t v = 0; v < graph.node_count; ++v) {
    if (!used[v]) continue;
    std::size_t root = find(v);
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = classes.size();
      classes.emplace_back();
    }
    classes[slot[root]].push_back(v);
  }
  detail::canonicalize(classes);
  return classes;
}

inline std::vector<std::vector<std::size_t>> linkage_classes(const Network& net) {
  return linkage_classes(ReactionGraph::from_network(net));
}

inline std::vector<std::vector<std::size_t>> linkage_classes(const KineticsMatrix& ak) {
  return linkage_classes(ReactionGraph::from_kinetics(ak));
}

struct WeakReversibility {
  bool weakly_reversible = true;
  /// Reactions whose endpoints lie in different strongly connected components.
  std::vector<std::pair<std::size_t, std::size_t>> witness_edges;
};

/// A graph is weakly reversible iff no edge joins two different strongly
/// connected components (then every linkage class is one SCC). The empty
/// graph is weakly reversible.
inline WeakReversibility is_weakly_reversible(const ReactionGraph& graph) {
  auto components = strongly_connected_components(graph);
  std::vector<std::size_t> component_of(graph.node_count, 0);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (std::size_t v : components[c]) component_of[v] = c;
  }
  WeakReversibility result;
  for (auto [a, b] : graph.edges()) {
    if (component_of[a] != component_of[b]) {
      result.weakly_reversible = false;
      result.witness_edges.emplace_back(a, b);
    }
  }
  return result;
}

inline WeakReversibility is_weakly_reversible(const Network& net) {
  return is_weakly_reversible(ReactionGraph::from_network(net));
}

inline WeakReversibility is_weakly_reversible(const KineticsMatrix& ak) {
  return is_weakly_reversible(ReactionGraph::from_kinetics(ak));
}

/// Exact rank of an integer matrix (fraction-free elimination with row gcd
/// reduction to keep entries small).
inline std::size_t integer_rank(std::vector<std::vector<std::int64_t>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][col] == 0) continue;
      const std::int64_t a = rows[rank][col];
      const std::int64_t b = rows[r][col];
      std::int64_t g = 0;
      for (std::size_t k = 0; k < cols; ++k) {
        rows[r][k] = rows[r][k] * a - rows[rank][k] * b;
        g = std::gcd(g, rows[r][k] < 0 ? -rows[r][k] : rows[r][k]);
      }
      if (g > 1) {
        for (auto& v : rows[r]) v /= g;
      }
    }
    ++rank;
  }
  return rank;
}

/// Deficiency m' - l - s, where m' counts complexes incident to a reaction,
/// l is the number of linkage classes and s the rank of the reaction vectors.
inline std::size_t deficiency(const Network& net) {
  auto graph = ReactionGraph::from_network(net);
  auto used = graph.incident_nodes();
  const auto used_count =
      static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
  const std::size_t classes = linkage_classes(graph).size();
  std::vector<std::vector<std::int64_t>> vectors;
  for (const auto& r : net.reactions()) {
    const auto& src = net.complexes()[r.source].coeffs;
    const auto& dst = net.complexes()[r.target].coeffs;
    std::vector<std::int64_t> v(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) v[i] = dst[i] - src[i];
    vectors.push_back(std::move(v));
  }
  const std::size_t rank = integer_rank(std::move(vectors));
  // Each linkage class of size k contributes at most k - 1 independent
  // reaction vectors, so this never underflows.
  return used_count - classes - rank;
}

}  // namespace kinreal
