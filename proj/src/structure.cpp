#include "delaynet/structure.hpp"

#include "delaynet/kinetics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace delaynet {

ComplexGraph complex_graph(const DelayedNetwork& net) {
  ComplexGraph g;
  g.nodes = complexes(net);
  const auto index = [&](const Complex& y) {
    return static_cast<std::size_t>(std::find(g.nodes.begin(), g.nodes.end(), y) - g.nodes.begin());
  };
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& rx : net.reactions) {
    const auto edge = std::make_pair(index(rx.reactant), index(rx.product));
    if (edge.first != edge.second && seen.insert(edge).second) {
      g.edges.push_back(edge);
    }
  }
  return g;
}

std::vector<std::size_t> linkage_classes(const ComplexGraph& g) {
  std::vector<std::size_t> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  const std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (const auto& [u, v] : g.edges) {
    const auto ru = find(u);
    const auto rv = find(v);
    if (ru != rv) {
      parent[std::max(ru, rv)] = std::min(ru, rv);
    }
  }
  // Relabel roots densely in node order.
  std::vector<std::size_t> label(g.nodes.size(), g.nodes.size());
  std::vector<std::size_t> out(g.nodes.size());
  std::size_t next = 0;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const auto root = find(v);
    if (label[root] == g.nodes.size()) {
      label[root] = next++;
    }
    out[v] = label[root];
  }
  return out;
}

std::size_t linkage_class_count(const ComplexGraph& g) {
  const auto labels = linkage_classes(g);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<std::size_t> strong_components(const ComplexGraph& g) {
  const std::size_t p = g.nodes.size();
  std::vector<std::vector<std::size_t>> adj(p);
  for (const auto& [u, v] : g.edges) {
    adj[u].push_back(v);
  }
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(p, unvisited);
  std::vector<std::size_t> low(p, 0);
  std::vector<bool> on_stack(p, false);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> comp(p, unvisited);
  std::size_t counter = 0;
  std::size_t comp_count = 0;

  // Iterative Tarjan: frames hold (node, next edge position).
  for (std::size_t root = 0; root < p; ++root) {
    if (index[root] != unvisited) {
      continue;
    }
    std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < adj[v].size()) {
        const std::size_t w = adj[v][pos++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comp_count;
        } while (w != v);
        ++comp_count;
      }
      const std::size_t finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return comp;
}

bool is_weakly_reversible(const ComplexGraph& g) {
  const auto scc = strong_components(g);
  return std::all_of(g.edges.begin(), g.edges.end(),
                     [&](const auto& e) { return scc[e.first] == scc[e.second]; });
}

namespace {

RationalMatrix reaction_vectors(const DelayedNetwork& net) {
  RationalMatrix rows;
  for (const auto& rx : net.reactions) {
    rows.push_back(reaction_vector(rx));
  }
  return rows;
}

}  // namespace

RationalMatrix stoich_subspace(const DelayedNetwork& net) {
  return row_space_basis(reaction_vectors(net), net.n());
}

RationalMatrix orth_complement(const DelayedNetwork& net) {
  return orthogonal_complement(reaction_vectors(net), net.n());
}

RationalMatrix kinetic_subspace(const DelayedNetwork& net) {
  RationalMatrix rows;
  for (const auto& [y, z] : aggregates(net).Z) {
    rows.push_back(z);
  }
  return row_space_basis(rows, net.n());
}

long deficiency(const DelayedNetwork& net) {
  const ComplexGraph g = complex_graph(net);
  return static_cast<long>(g.nodes.size()) - static_cast<long>(linkage_class_count(g)) -
         static_cast<long>(rank(reaction_vectors(net), net.n()));
}

StructureReport analyze_structure(const DelayedNetwork& net) {
  StructureReport report;
  const ComplexGraph g = complex_graph(net);
  report.complexes = g.nodes;
  report.linkage_class_count = linkage_class_count(g);
  report.weakly_reversible = is_weakly_reversible(g);
  report.stoich_basis = stoich_subspace(net);
  report.orth_basis = orth_complement(net);
  report.kinetic_basis = kinetic_subspace(net);
  report.deficiency = static_cast<long>(g.nodes.size()) - static_cast<long>(report.linkage_class_count) -
                      static_cast<long>(report.stoich_basis.size());
  return report;
}

bool is_wr_deficiency_zero(const DelayedNetwork& net) {
  return is_weakly_reversible(complex_graph(net)) && deficiency(net) == 0;
}

}  // namespace delaynet
