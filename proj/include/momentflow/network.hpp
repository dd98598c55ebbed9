#pragma once

// The directed graphical model: ordered variables, founders, node models,
// decisions with their numeric overrides, and the polynomial utility.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "momentflow/belief.hpp"
#include "momentflow/exponent.hpp"
#include "momentflow/model.hpp"

namespace momentflow {

enum class Role { founder, node };

struct Network {
  std::vector<std::string> names;
  std::vector<Role> roles;
  std::vector<std::optional<FounderSpec>> founders;  // index-aligned
  std::vector<std::optional<NodeModel>> nodes;       // index-aligned
  std::vector<std::string> decisions;
  // decision -> override path -> value, e.g. "founders.Y1.mean".
  std::map<std::string, std::map<std::string, double>> overrides;

  bool operator==(const Network&) const = default;

  std::size_t size() const noexcept { return names.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    return std::nullopt;
  }

  bool is_founder(std::size_t i) const { return roles.at(i) == Role::founder; }

  const NodeModel& node(std::size_t i) const {
    if (i >= nodes.size() || !nodes[i]) throw LookupError("variable " + std::to_string(i) + " has no node model");
    return *nodes[i];
  }

  const FounderSpec& founder(std::size_t i) const {
    if (i >= founders.size() || !founders[i]) throw LookupError("variable " + std::to_string(i) + " has no founder spec");
    return *founders[i];
  }

  // Parents of i (empty for founders).
  std::vector<std::size_t> parents_of(std::size_t i) const {
    if (i < nodes.size() && nodes[i]) return nodes[i]->parents;
    return {};
  }
};

// k * sign * rho(d) * Y^a. An empty rho map means rho(d) = 1 for every d.
struct UtilityTerm {
  double weight = 1.0;
  int sign = 1;
  ExponentVector exponents;
  std::map<std::string, double> rho;
  bool operator==(const UtilityTerm&) const = default;
};

// Decision cost k_d * rho(d), subtracted from the score.
struct CostTerm {
  double weight = 0.0;
  std::map<std::string, double> rho;
  bool operator==(const CostTerm&) const = default;
};

struct UtilitySpec {
  std::vector<UtilityTerm> terms;
  std::optional<CostTerm> cost;
  bool operator==(const UtilitySpec&) const = default;
};

inline double rho_for(const std::map<std::string, double>& rho, const std::string& decision) {
  if (rho.empty()) return 1.0;
  auto it = rho.find(decision);
  if (it == rho.end()) throw LookupError("no utility coefficient for decision '" + decision + "'");
  return it->second;
}

// Exponent vectors whose expectations the decision maker needs; constant
// terms need none.
inline ExponentSet utility_exponents(const UtilitySpec& u) {
  ExponentSet out;
  for (const auto& t : u.terms) {
    if (!t.exponents.is_zero()) out.insert(t.exponents);
  }
  return out;
}

struct Violation {
  std::string kind;
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  bool has(std::string_view kind) const {
    for (const auto& v : violations) {
      if (v.kind == kind) return true;
    }
    return false;
  }
};

namespace detail {

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto dot = path.find('.', start);
    parts.emplace_back(path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

inline unsigned parse_order(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used == s.size() && v >= 1) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  throw LookupError("override path '" + path + "': bad moment order '" + s + "'");
}

// Applies one override in place. Throws LookupError on unknown paths.
inline void apply_override(Network& net, const std::string& path, double value) {
  const auto p = split_path(path);
  auto bad = [&]() { return LookupError("unknown override path '" + path + "'"); };
  if (p.size() < 3) throw bad();
  auto idx = net.index_of(p[1]);
  if (!idx) throw LookupError("override path '" + path + "' names unknown variable '" + p[1] + "'");
  if (p[0] == "founders") {
    if (!net.founders[*idx]) throw bad();
    auto& spec = *net.founders[*idx];
    if (auto* g = std::get_if<GaussianFounder>(&spec); g && p.size() == 3) {
      if (p[2] == "mean") {
        g->mean = value;
        return;
      }
      if (p[2] == "variance") {
        g->variance = value;
        return;
      }
    }
    if (auto* r = std::get_if<RawMomentFounder>(&spec); r && p.size() == 4 && p[2] == "moments") {
      unsigned k = parse_order(p[3], path);
      if (k > r->moments.size()) throw bad();
      r->moments[k - 1] = value;
      return;
    }
    throw bad();
  }
  if (p[0] == "nodes") {
    if (!net.nodes[*idx]) throw bad();
    auto& node = *net.nodes[*idx];
    if (p[2] == "coeff" && p.size() == 4) {
      set_coefficient_mean(node.belief, p[3], value);
      return;
    }
    if (p[2] == "coeff" && p.size() == 6 && p[4] == "moments") {
      set_raw_moment(node.belief, p[3], parse_order(p[5], path), value);
      return;
    }
    if (p[2] == "error") {
      if (auto* g = std::get_if<GaussianError>(&node.error); g && p.size() == 4 && p[3] == "variance") {
        g->variance = value;
        return;
      }
      if (auto* r = std::get_if<ExplicitRawError>(&node.error); r && p.size() == 5 && p[3] == "moments") {
        unsigned k = parse_order(p[4], path);
        if (k > r->moments.size()) throw bad();
        r->moments[k - 1] = value;
        return;
      }
    }
  }
  throw bad();
}

}  // namespace detail

// The network as seen under one decision: its numeric overrides applied.
inline Network resolve_decision(const Network& net, const std::string& decision) {
  Network out = net;
  if (!net.decisions.empty() &&
      std::find(net.decisions.begin(), net.decisions.end(), decision) == net.decisions.end()) {
    throw LookupError("unknown decision '" + decision + "'");
  }
  auto it = net.overrides.find(decision);
  if (it == net.overrides.end()) return out;
  for (const auto& [path, value] : it->second) detail::apply_override(out, path, value);
  return out;
}

// Decisions to evaluate; a network without declared decisions has the single
// implicit decision "default".
inline std::vector<std::string> decision_labels(const Network& net) {
  if (net.decisions.empty()) return {"default"};
  return net.decisions;
}

// Hash of everything structural: names, roles, parents, term exponents and
// coefficient ids. Numeric beliefs do not contribute.
inline std::uint64_t structural_fingerprint(const Network& net) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  auto mix_str = [&](const std::string& s) {
    mix(s.size());
    for (char c : s) mix(static_cast<unsigned char>(c));
  };
  mix(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    mix_str(net.names[i]);
    mix(net.roles[i] == Role::founder ? 1 : 2);
    if (i < net.nodes.size() && net.nodes[i]) {
      const auto& n = *net.nodes[i];
      mix(n.parents.size());
      for (auto p : n.parents) mix(p);
      mix(n.terms.size());
      for (const auto& t : n.terms) {
        mix_str(t.coeff);
        for (auto e : t.exponents) mix(e);
      }
    }
  }
  return h;
}

inline ValidationReport validate(const Network& net, const UtilitySpec& utility) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string msg) { report.violations.push_back({std::move(kind), std::move(msg)}); };
  const std::size_t m = net.size();
  if (net.roles.size() != m || net.founders.size() != m || net.nodes.size() != m) {
    add("structure", "per-variable arrays disagree in length");
    return report;
  }
  std::set<std::string> seen;
  for (const auto& n : net.names) {
    if (!seen.insert(n).second) add("name", "duplicate variable name '" + n + "'");
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::string& name = net.names[i];
    if (net.roles[i] == Role::founder) {
      if (net.nodes[i] && !net.nodes[i]->parents.empty()) {
        add("founder-parents", "founder '" + name + "' declares parents");
      } else if (net.nodes[i]) {
        add("role", "founder '" + name + "' also has a node model");
      }
      if (!net.founders[i]) {
        add("missing-founder", "founder '" + name + "' has no moment specification");
      } else {
        for (auto& p : founder_problems(*net.founders[i])) add("founder", name + ": " + p);
      }
      continue;
    }
    if (net.founders[i]) add("role", "node '" + name + "' also has a founder specification");
    if (!net.nodes[i]) {
      add("missing-model", "node '" + name + "' has no regression model");
      continue;
    }
    const auto& node = *net.nodes[i];
    if (node.index != i) add("structure", "node '" + name + "' carries index " + std::to_string(node.index));
    for (std::size_t p : node.parents) {
      if (p >= i) {
        add("order", "node '" + name + "' has parent '" + (p < m ? net.names[p] : std::to_string(p)) +
                         "' that does not precede it");
      }
    }
    std::set<std::string> ids;
    std::set<ExponentVector> exps;
    for (const auto& t : node.terms) {
      if (t.exponents.size() != m) {
        add("term-length", "node '" + name + "' term '" + t.coeff + "' has the wrong exponent length");
        continue;
      }
      if (!ids.insert(t.coeff).second) add("duplicate-coefficient", "node '" + name + "' repeats coefficient '" + t.coeff + "'");
      if (!exps.insert(t.exponents).second) add("duplicate-term", "node '" + name + "' repeats monomial " + t.exponents.to_string());
    }
    for (const auto& v : validate_support(node)) {
      if (node.terms[v.term].exponents.size() != m) continue;
      add("support", "node '" + name + "' term '" + v.coeff + "' uses non-parent '" + net.names[v.variable] + "'");
    }
    const auto known = belief_ids(node.belief);
    for (const auto& t : node.terms) {
      if (!known.count(t.coeff)) add("missing-belief", "node '" + name + "' has no belief for coefficient '" + t.coeff + "'");
    }
    for (auto& p : belief_problems(node.belief)) add("belief", name + ": " + p);
    for (auto& p : error_problems(node.error)) add("error", name + ": " + p);
  }
  auto check_rho = [&](const std::map<std::string, double>& rho, const std::string& where) {
    if (rho.empty()) return;
    for (const auto& d : decision_labels(net)) {
      if (!rho.count(d)) add("rho", where + " has no coefficient for decision '" + d + "'");
    }
    for (const auto& [d, v] : rho) {
      if (!std::isfinite(v)) add("rho", where + " coefficient for '" + d + "' is not finite");
    }
  };
  for (std::size_t k = 0; k < utility.terms.size(); ++k) {
    const auto& t = utility.terms[k];
    const std::string where = "utility term " + std::to_string(k + 1);
    if (t.exponents.size() != m) add("utility-unknown-variable", where + " references a variable outside the network");
    if (!std::isfinite(t.weight)) add("utility-weight", where + " weight is not finite");
    if (t.sign != 1 && t.sign != -1) add("utility-weight", where + " sign must be +1 or -1");
    check_rho(t.rho, where);
  }
  if (utility.cost) {
    if (!std::isfinite(utility.cost->weight)) add("utility-weight", "decision cost weight is not finite");
    check_rho(utility.cost->rho, "decision cost");
  }
  for (const auto& [d, paths] : net.overrides) {
    if (std::find(net.decisions.begin(), net.decisions.end(), d) == net.decisions.end()) {
      add("override", "overrides given for undeclared decision '" + d + "'");
      continue;
    }
    Network scratch = net;
    for (const auto& [path, value] : paths) {
      try {
        detail::apply_override(scratch, path, value);
      } catch (const Error& e) {
        add("override", d + ": " + e.what());
      }
    }
  }
  return report;
}

}  // namespace momentflow
