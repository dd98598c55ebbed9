#pragma once

// One panel's polynomial regression model and its structural classification
// (full / simple / hierarchical / graphical).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "momentflow/belief.hpp"
#include "momentflow/exponent.hpp"

namespace momentflow {

// One monomial covariate and the id of its coefficient.
struct Term {
  ExponentVector exponents;
  std::string coeff;
  bool operator==(const Term&) const = default;
};

// Y_j = sum_terms theta * Y^a + v_j.
struct NodeModel {
  std::size_t index = 0;             // position of Y_j in the global order
  std::vector<std::size_t> parents;  // sorted, each < index
  std::vector<Term> terms;
  CoefficientBelief belief;
  ErrorMoments error;

  bool operator==(const NodeModel&) const = default;

  ExponentSet exponent_set() const {
    ExponentSet out;
    for (const auto& t : terms) out.insert(t.exponents);
    return out;
  }

  std::vector<std::string> coefficient_ids() const {
    std::vector<std::string> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(t.coeff);
    return out;
  }

  bool has_parent(std::size_t i) const {
    return std::binary_search(parents.begin(), parents.end(), i);
  }
};

enum class ModelClass { general, full, simple, hierarchical, graphical };

inline const char* to_string(ModelClass c) {
  switch (c) {
    case ModelClass::general: return "general";
    case ModelClass::full: return "full";
    case ModelClass::simple: return "simple";
    case ModelClass::hierarchical: return "hierarchical";
    case ModelClass::graphical: return "graphical";
  }
  return "general";
}

using Clique = std::vector<std::size_t>;

struct Classification {
  // Most specific label; graphical beats simple beats hierarchical beats full.
  ModelClass label = ModelClass::general;
  bool full = false;
  bool simple = false;
  bool hierarchical = false;
  bool graphical = false;
  ExponentSet corners;
  std::vector<Clique> cliques;  // maximal cliques of the interaction graph
};

struct InteractionGraph {
  std::vector<std::size_t> vertices;
  std::set<std::pair<std::size_t, std::size_t>> edges;  // (low, high)

  bool adjacent(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return edges.count({a, b}) != 0;
  }
};

// Edge {i,k} between parents iff some term has nonzero powers at both.
inline InteractionGraph interaction_graph(const NodeModel& model) {
  InteractionGraph g;
  g.vertices = model.parents;
  for (const auto& t : model.terms) {
    std::vector<std::size_t> support;
    for (std::size_t i : model.parents) {
      if (i < t.exponents.size() && t.exponents[i] != 0) support.push_back(i);
    }
    for (std::size_t x = 0; x < support.size(); ++x) {
      for (std::size_t y = x + 1; y < support.size(); ++y) g.edges.insert({support[x], support[y]});
    }
  }
  return g;
}

namespace detail {

inline void bron_kerbosch(const InteractionGraph& g, std::vector<std::size_t>& r,
                          std::vector<std::size_t> p, std::vector<std::size_t> x,
                          std::vector<Clique>& out) {
  if (p.empty() && x.empty()) {
    Clique c = r;
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
    return;
  }
  // Pivot: vertex of P u X with most neighbours in P.
  std::size_t pivot = 0;
  std::size_t best = 0;
  bool have_pivot = false;
  for (const auto* pool : {&p, &x}) {
    for (std::size_t u : *pool) {
      std::size_t n = 0;
      for (std::size_t v : p) n += g.adjacent(u, v);
      if (!have_pivot || n > best) {
        pivot = u;
        best = n;
        have_pivot = true;
      }
    }
  }
  std::vector<std::size_t> candidates;
  for (std::size_t v : p) {
    if (!g.adjacent(pivot, v)) candidates.push_back(v);
  }
  for (std::size_t v : candidates) {
    std::vector<std::size_t> p2, x2;
    for (std::size_t w : p) {
      if (g.adjacent(v, w)) p2.push_back(w);
    }
    for (std::size_t w : x) {
      if (g.adjacent(v, w)) x2.push_back(w);
    }
    r.push_back(v);
    bron_kerbosch(g, r, std::move(p2), std::move(x2), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace detail

// All maximal cliques, each sorted, the list sorted lexicographically. A graph
// without vertices has no cliques.
inline std::vector<Clique> maximal_cliques(const InteractionGraph& g) {
  std::vector<Clique> out;
  if (g.vertices.empty()) return out;
  std::vector<std::size_t> r;
  detail::bron_kerbosch(g, r, g.vertices, {}, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline ExponentVector indicator(const Clique& clique, std::size_t m) {
  ExponentVector v(m);
  for (std::size_t i : clique) v[i] = 1;
  return v;
}

inline Classification classify(const NodeModel& model) {
  Classification c;
  const ExponentSet a = model.exponent_set();
  if (a.empty()) return c;
  c.corners = corner_points(a);
  c.full = (closure(c.corners) == a);
  if (!c.full) return c;
  c.simple = (c.corners.size() == 1);
  c.hierarchical = std::all_of(c.corners.begin(), c.corners.end(), [](const ExponentVector& v) {
    return std::all_of(v.begin(), v.end(), [](unsigned x) { return x <= 1; });
  });
  c.cliques = maximal_cliques(interaction_graph(model));
  if (c.hierarchical) {
    ExponentSet indicators;
    for (const auto& q : c.cliques) indicators.insert(indicator(q, a.front().size()));
    c.graphical = (indicators == c.corners);
  }
  if (c.graphical) {
    c.label = ModelClass::graphical;
  } else if (c.simple) {
    c.label = ModelClass::simple;
  } else if (c.hierarchical) {
    c.label = ModelClass::hierarchical;
  } else {
    c.label = ModelClass::full;
  }
  return c;
}

// Exponent set and corner points of the graphical model whose interaction
// graph has the given cliques: every 0/1 vector supported inside a clique.
inline std::pair<ExponentSet, ExponentSet> graphical_exponents(const std::vector<Clique>& cliques,
                                                               std::size_t m) {
  ExponentSet corners;
  for (const auto& q : cliques) {
    for (std::size_t i : q) {
      if (i >= m) throw StructuralError("clique index outside the variable range");
    }
    corners.insert(indicator(q, m));
  }
  if (corners.empty()) return {ExponentSet{ExponentVector(m)}, ExponentSet{ExponentVector(m)}};
  corners = corner_points(corners);
  return {closure(corners), corners};
}

// 1 + sum over cliques of (2^|I| - 1).
inline std::uint64_t graphical_count_bound(const std::vector<Clique>& cliques) {
  std::uint64_t total = 1;
  for (const auto& q : cliques) {
    for (std::size_t k = 1; k <= q.size(); ++k) total += binomial(q.size(), k);
  }
  return total;
}

struct SupportViolation {
  std::size_t term = 0;
  std::string coeff;
  std::size_t variable = 0;
};

// Terms with a nonzero power on a variable that is not a parent.
inline std::vector<SupportViolation> validate_support(const NodeModel& model) {
  std::vector<SupportViolation> out;
  for (std::size_t t = 0; t < model.terms.size(); ++t) {
    const auto& e = model.terms[t].exponents;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0 && !model.has_parent(i)) {
        out.push_back({t, model.terms[t].coeff, i});
        break;
      }
    }
  }
  return out;
}

}  // namespace momentflow
