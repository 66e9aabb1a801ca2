#pragma once

#include "delaynet/linalg.hpp"
#include "delaynet/network.hpp"

#include <utility>
#include <vector>

namespace delaynet {

/// Directed reaction graph on complexes; one edge per distinct
/// (reactant, product) pair, self-loops y -> y dropped.
struct ComplexGraph {
  std::vector<Complex> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

struct StructureReport {
  std::vector<Complex> complexes;
  std::size_t linkage_class_count = 0;
  bool weakly_reversible = false;
  RationalMatrix stoich_basis;
  RationalMatrix orth_basis;
  RationalMatrix kinetic_basis;
  long deficiency = 0;
};

ComplexGraph complex_graph(const DelayedNetwork& net);

/// Component id per node (undirected connectivity), ids 0..l-1.
std::vector<std::size_t> linkage_classes(const ComplexGraph& g);
std::size_t linkage_class_count(const ComplexGraph& g);

/// Strongly connected component id per node (Tarjan).
std::vector<std::size_t> strong_components(const ComplexGraph& g);
bool is_weakly_reversible(const ComplexGraph& g);

RationalMatrix stoich_subspace(const DelayedNetwork& net);
RationalMatrix orth_complement(const DelayedNetwork& net);
/// span{Z^(y) : y in RC}; image of the non-delayed right-hand side.
RationalMatrix kinetic_subspace(const DelayedNetwork& net);

long deficiency(const DelayedNetwork& net);

StructureReport analyze_structure(const DelayedNetwork& net);

/// Weakly reversible and deficiency zero, hence complex balanced for
/// every choice of positive rates.
bool is_wr_deficiency_zero(const DelayedNetwork& net);

}  // namespace delaynet
