#pragma once

// Programmatic network builders used by the CLI and tests.

#include <cstddef>
#include <string>
#include <vector>

#include "momentflow/network.hpp"

namespace momentflow {

// Adds node j with the given terms, unit deterministic coefficients and zero
// error variance. Parents are inferred from the term supports.
inline void add_node(Network& net, std::size_t j, const std::vector<ExponentVector>& exponents) {
  NodeModel node;
  node.index = j;
  Deterministic values;
  std::vector<bool> parent(net.size(), false);
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    const std::string id = "t" + std::to_string(j + 1) + "_" + std::to_string(k);
    node.terms.push_back({exponents[k], id});
    values.values[id] = 1.0;
    for (std::size_t i = 0; i < exponents[k].size(); ++i) parent[i] = parent[i] || exponents[k][i] != 0;
  }
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (parent[i]) node.parents.push_back(i);
  }
  node.belief = values;
  node.error = GaussianError{0.0};
  net.nodes[j] = std::move(node);
}

// Empty network of m variables named Y1..Ym; the listed ones are founders
// N(0, 1), the rest await add_node.
inline Network skeleton(std::size_t m, const std::vector<std::size_t>& founders) {
  Network net;
  for (std::size_t i = 0; i < m; ++i) net.names.push_back("Y" + std::to_string(i + 1));
  net.roles.assign(m, Role::node);
  net.founders.assign(m, std::nullopt);
  net.nodes.assign(m, std::nullopt);
  for (std::size_t i : founders) {
    net.roles[i] = Role::founder;
    net.founders[i] = GaussianFounder{0.0, 1.0};
  }
  return net;
}

// Y1 a founder; every later Y_j a graphical model on the single clique
// {Y1..Y_{j-1}}, i.e. all square-free monomials in its predecessors.
inline Network complete_graphical_network(std::size_t m) {
  if (m == 0) throw DomainError("complete graph needs at least one variable");
  if (m > 16) throw DomainError("complete graph generator is limited to 16 variables");
  Network net = skeleton(m, {0});
  for (std::size_t j = 1; j < m; ++j) {
    std::vector<ExponentVector> exps;
    for (unsigned mask = 0; mask < (1u << j); ++mask) {
      ExponentVector a(m);
      for (std::size_t i = 0; i < j; ++i) a[i] = (mask >> i) & 1u;
      exps.push_back(a);
    }
    add_node(net, j, exps);
  }
  return net;
}

// Sum of every nonzero square-free monomial over all m variables.
inline UtilitySpec complete_graph_utility(std::size_t m) {
  UtilitySpec u;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    ExponentVector a(m);
    for (std::size_t i = 0; i < m; ++i) a[i] = (mask >> i) & 1u;
    u.terms.push_back({1.0, 1, a, {}});
  }
  return u;
}

}  // namespace momentflow
