#pragma once

// Request phase of the message-passing scheme: which monomial expectations
// each panel asks of lower panels and donates to higher ones. Panel indices
// are 0-based; index m is the decision maker.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "momentflow/exponent.hpp"
#include "momentflow/model.hpp"
#include "momentflow/network.hpp"

namespace momentflow {

inline std::optional<std::size_t> leading_panel(const ExponentVector& a) { return a.leading_index(); }

// "Y2*Y3^2" with variables in index order; "1" for the zero vector.
inline std::string monomial_text(const std::vector<std::string>& names, const ExponentVector& a) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += i < names.size() ? names[i] : "Y" + std::to_string(i + 1);
    if (a[i] > 1) out += "^" + std::to_string(a[i]);
  }
  return out.empty() ? "1" : out;
}

// "E[Y2*Y3^2]".
inline std::string monomial_label(const std::vector<std::string>& names, const ExponentVector& a) {
  return "E[" + monomial_text(names, a) + "]";
}

// Inverse of monomial_text and monomial_label.
inline ExponentVector parse_monomial(const std::vector<std::string>& names, std::string_view text) {
  auto bad = [&]() { return ParseError("malformed monomial '" + std::string(text) + "'"); };
  std::string_view body = text;
  if (body.substr(0, 2) == "E[") {
    if (body.size() < 3 || body.back() != ']') throw bad();
    body = body.substr(2, body.size() - 3);
  }
  if (body.empty()) throw bad();
  ExponentVector a(names.size());
  if (body == "1") return a;
  std::size_t start = 0;
  while (start <= body.size()) {
    auto star = body.find('*', start);
    std::string_view factor = body.substr(start, star == std::string_view::npos ? std::string_view::npos : star - start);
    unsigned power = 1;
    if (auto caret = factor.find('^'); caret != std::string_view::npos) {
      const std::string digits(factor.substr(caret + 1));
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) throw bad();
      power = static_cast<unsigned>(std::stoul(digits));
      factor = factor.substr(0, caret);
    }
    std::optional<std::size_t> idx;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == factor) idx = i;
    }
    if (!idx || power == 0) throw bad();
    a[*idx] += power;
    if (star == std::string_view::npos) break;
    start = star + 1;
  }
  return a;
}

struct MessagePlan {
  std::size_t m = 0;
  std::vector<std::string> names;
  // (i, j) -> A_{i->j}; j == m is the decision maker.
  std::map<std::pair<std::size_t, std::size_t>, ExponentSet> pairs;
  std::vector<ExponentSet> donated;    // A_j^-, one per variable
  std::vector<ExponentSet> requested;  // A_j^+, one per panel including the decision maker
  // First request that caused each donated vector; nullopt for the utility.
  std::map<ExponentVector, std::optional<ExponentVector>> origin;

  bool operator==(const MessagePlan& o) const {
    return m == o.m && names == o.names && pairs == o.pairs && donated == o.donated && requested == o.requested;
  }

  std::size_t decision_maker() const noexcept { return m; }

  const ExponentSet& pair(std::size_t i, std::size_t j) const {
    static const ExponentSet empty;
    auto it = pairs.find({i, j});
    return it == pairs.end() ? empty : it->second;
  }

  std::size_t total_donations() const {
    std::size_t n = 0;
    for (const auto& s : donated) n += s.size();
    return n;
  }

  bool empty() const { return pairs.empty(); }

  // "E[Y1^2] <- E[Y1*Y2] <- U".
  std::string chain(const ExponentVector& a) const {
    std::string out = monomial_label(names, a);
    std::optional<ExponentVector> cur = a;
    for (std::size_t guard = 0; cur && guard <= m + 1; ++guard) {
      auto it = origin.find(*cur);
      if (it == origin.end()) break;
      cur = it->second;
      out += " <- " + (cur ? monomial_label(names, *cur) : std::string("U"));
    }
    return out;
  }
};

namespace detail {

// A^n for one node model, built incrementally.
class PowerCache {
 public:
  explicit PowerCache(ExponentSet base, std::size_t m) : base_(std::move(base)) {
    if (base_.empty()) base_.insert(ExponentVector(m));
    layers_.push_back(ExponentSet{ExponentVector(m)});
  }
  const ExponentSet& operator()(unsigned n) {
    while (layers_.size() <= n) layers_.push_back(sumset(layers_.back(), base_));
    return layers_[n];
  }

 private:
  ExponentSet base_;
  std::vector<ExponentSet> layers_;
};

inline void require_below(const ExponentVector& g, std::size_t j) {
  for (std::size_t i = j + 1; i < g.size(); ++i) {
    if (g[i] != 0) throw RoutingError("request " + g.to_string() + " routed to panel " + std::to_string(j + 1) +
                                      " has entries above it");
  }
}

inline void route(std::map<std::size_t, ExponentSet>& out, const ExponentVector& a) {
  if (auto lead = leading_panel(a)) out[*lead].insert(a);
}

inline std::map<std::size_t, ExponentSet> node_requests(PowerCache& powers, std::size_t j, const ExponentVector& g) {
  require_below(g, j);
  const unsigned b = g[j];
  const ExponentVector rest = g.with_entry(j, 0);
  std::map<std::size_t, ExponentSet> out;
  // k = 1 carries m_1 = 0 and is never read.
  for (unsigned k = 0; k <= b; ++k) {
    if (k == 1) continue;
    for (const auto& a : powers(b - k)) route(out, a + rest);
  }
  return out;
}

}  // namespace detail

// A_{i->j}(g) for node j = model.index, keyed by i.
inline std::map<std::size_t, ExponentSet> requests_for(const NodeModel& model, const ExponentVector& g) {
  detail::PowerCache powers(model.exponent_set(), g.size());
  return detail::node_requests(powers, model.index, g);
}

// A founder serves its own power and forwards the residual monomial.
inline std::map<std::size_t, ExponentSet> founder_requests(std::size_t j, const ExponentVector& g) {
  detail::require_below(g, j);
  std::map<std::size_t, ExponentSet> out;
  detail::route(out, g.with_entry(j, 0));
  return out;
}

inline std::map<std::size_t, ExponentSet> requests_for(const Network& net, std::size_t j, const ExponentVector& g) {
  if (net.is_founder(j)) return founder_requests(j, g);
  return requests_for(net.node(j), g);
}

namespace detail {

inline std::string violation_list(const ValidationReport& r) {
  std::string out;
  for (const auto& v : r.violations) out += "\n  [" + v.kind + "] " + v.message;
  return out;
}

// Moment orders the donate phase will need that the specs cannot supply.
inline void check_orders(const Network& net, const MessagePlan& p) {
  for (std::size_t j = 0; j < p.m; ++j) {
    for (const auto& g : p.donated[j]) {
      const unsigned b = g[j];
      const std::string& name = net.names[j];
      if (net.is_founder(j)) {
        auto avail = max_available_order(net.founder(j));
        if (avail && b > *avail) {
          throw OrderError("founder '" + name + "' needs raw moment of order " + std::to_string(b) + " but gives " +
                           std::to_string(*avail) + "; requested via " + p.chain(g));
        }
        continue;
      }
      const auto& node = net.node(j);
      auto avail = max_available_order(node.error);
      if (avail && b >= 2 && b > *avail) {
        throw OrderError("node '" + name + "' needs error moment of order " + std::to_string(b) + " but gives " +
                         std::to_string(*avail) + "; requested via " + p.chain(g));
      }
      if (const auto* r = std::get_if<IndependentRawMoments>(&node.belief)) {
        for (const auto& t : node.terms) {
          auto it = r->moments.find(t.coeff);
          if (it != r->moments.end() && b > it->second.size()) {
            throw OrderError("coefficient '" + t.coeff + "' of node '" + name + "' needs raw moment of order " +
                             std::to_string(b) + " but gives " + std::to_string(it->second.size()) +
                             "; requested via " + p.chain(g));
          }
        }
      }
    }
  }
}

}  // namespace detail

inline MessagePlan plan(const Network& net, const UtilitySpec& u) {
  const auto report = validate(net, u);
  if (!report.ok()) throw PreconditionError("cannot plan an invalid network:" + detail::violation_list(report));
  const std::size_t m = net.size();
  MessagePlan p;
  p.m = m;
  p.names = net.names;
  p.donated.assign(m, ExponentSet{});
  p.requested.assign(m + 1, ExponentSet{});

  for (const auto& a : utility_exponents(u)) {
    const std::size_t lead = *leading_panel(a);
    p.pairs[{lead, m}].insert(a);
    p.donated[lead].insert(a);
    p.origin.try_emplace(a, std::nullopt);
  }
  for (std::size_t j = m; j-- > 0;) {
    if (p.donated[j].empty()) continue;
    std::optional<detail::PowerCache> powers;
    if (!net.is_founder(j)) powers.emplace(net.node(j).exponent_set(), m);
    for (const auto& g : p.donated[j]) {
      auto reqs = powers ? detail::node_requests(*powers, j, g) : founder_requests(j, g);
      for (auto& [i, set] : reqs) {
        for (const auto& a : set) p.origin.try_emplace(a, g);
        p.donated[i].merge(set);
        p.pairs[{i, j}].merge(set);
      }
    }
  }
  for (const auto& [key, set] : p.pairs) p.requested[key.second].merge(set);
  detail::check_orders(net, p);
  return p;
}

// ---------------------------------------------------------------------------
// Closed-form shortcuts

struct CornerPlan {
  std::map<std::pair<std::size_t, std::size_t>, ExponentSet> pairs;  // (A_{i->j})*
  std::vector<ExponentSet> donated;                                   // (A_j^-)*

  const ExponentSet& pair(std::size_t i, std::size_t j) const {
    static const ExponentSet empty;
    auto it = pairs.find({i, j});
    return it == pairs.end() ? empty : it->second;
  }
};

// Corner points of every request set, computed from corners only. The
// utility monomials are taken by their closure.
inline CornerPlan full_model_corner_plan(const Network& net, const UtilitySpec& u) {
  const std::size_t m = net.size();
  std::vector<ExponentSet> node_corners(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (net.is_founder(j)) {
      node_corners[j].insert(ExponentVector(m));
      continue;
    }
    const auto c = classify(net.node(j));
    if (!c.full) throw PreconditionError("node '" + net.names[j] + "' is not a full model");
    node_corners[j] = c.corners;
  }
  CornerPlan out;
  out.donated.assign(m, ExponentSet{});
  std::vector<ExponentSet> incoming(m);
  {
    std::map<std::size_t, ExponentSet> by_lead;
    for (const auto& a : utility_exponents(u)) by_lead[*leading_panel(a)].insert(a);
    for (auto& [i, set] : by_lead) {
      out.pairs[{i, m}] = corner_points(set);
      incoming[i].merge(out.pairs[{i, m}]);
    }
  }
  for (std::size_t j = m; j-- > 0;) {
    if (incoming[j].empty()) continue;
    out.donated[j] = corner_points(incoming[j]);
    ExponentSet candidates;
    for (const auto& g : out.donated[j]) {
      const ExponentVector rest = g.with_entry(j, 0);
      for (const auto& c : powered_corners(node_corners[j], g[j])) candidates.insert(c + rest);
    }
    for (std::size_t i = 0; i < j; ++i) {
      ExponentSet cut;
      for (const auto& c : candidates) {
        if (c[i] != 0) cut.insert(c.truncated(i));
      }
      if (cut.empty()) continue;
      out.pairs[{i, j}] = corner_points(cut);
      incoming[i].merge(out.pairs[{i, j}]);
    }
  }
  return out;
}

// Highest power of each variable that must be donated when every node has at
// most one parent and is a simple model in it; c holds the utility degree of
// each variable.
inline std::vector<std::uint64_t> tree_plan(const Network& net, std::span<const unsigned> c) {
  const std::size_t m = net.size();
  if (c.size() != m) throw PreconditionError("tree_plan: one utility degree per variable required");
  std::vector<std::uint64_t> degree(m, 0);
  std::vector<std::optional<std::size_t>> parent(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (net.is_founder(j)) continue;
    const auto& node = net.node(j);
    if (node.parents.size() > 1) throw PreconditionError("tree_plan: node '" + net.names[j] + "' has several parents");
    const auto cls = classify(node);
    if (!cls.simple) throw PreconditionError("tree_plan: node '" + net.names[j] + "' is not a simple model");
    if (!node.parents.empty()) {
      parent[j] = node.parents.front();
      degree[j] = cls.corners.front()[node.parents.front()];
    }
  }
  std::vector<std::uint64_t> a(c.begin(), c.end());
  for (std::size_t k = m; k-- > 0;) {
    if (parent[k]) a[*parent[k]] = std::max(a[*parent[k]], degree[k] * a[k]);
  }
  return a;
}

// sum_j (a_j + 1)^(j-1) * a_j over 1-based j.
inline std::uint64_t donation_count(std::span<const unsigned> degrees) {
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < degrees.size(); ++j) {
    std::uint64_t term = degrees[j];
    for (std::size_t r = 0; r < j; ++r) term *= static_cast<std::uint64_t>(degrees[j]) + 1;
    total += term;
  }
  return total;
}

// a*_j(j) = 2^(m-j) for the complete graph on m variables.
inline std::vector<unsigned> complete_graph_degrees(std::size_t m) {
  std::vector<unsigned> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = 1u << (m - 1 - j);
  return out;
}

inline std::uint64_t donation_count(std::size_t m) {
  const auto d = complete_graph_degrees(m);
  return donation_count(std::span<const unsigned>(d));
}

// ---------------------------------------------------------------------------
// Text rendering

inline std::string label_set(const std::vector<std::string>& names, const ExponentSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : s) {
    if (!first) out += ", ";
    out += monomial_label(names, a);
    first = false;
  }
  return out + "}";
}

// Panels are printed 1-based; the decision maker is panel m+1.
inline std::string plan_text(const MessagePlan& p) {
  std::ostringstream os;
  for (std::size_t j = 0; j <= p.m; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const auto& s = p.pair(i, j);
      if (!s.empty()) os << "Lambda[" << i + 1 << "->" << j + 1 << "] = " << label_set(p.names, s) << '\n';
    }
    if (!p.requested[j].empty()) os << "Lambda+[" << j + 1 << "] = " << label_set(p.names, p.requested[j]) << '\n';
    if (j < p.m && !p.donated[j].empty()) {
      os << "Lambda-[" << j + 1 << "] = " << label_set(p.names, p.donated[j]) << '\n';
    }
  }
  return os.str();
}

}  // namespace momentflow
