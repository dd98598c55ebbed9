#pragma once

// Donate phase: fill the moment table panel by panel and score decisions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "momentflow/moments.hpp"
#include "momentflow/network.hpp"
#include "momentflow/planner.hpp"

namespace momentflow {

struct Evaluation {
  std::string decision;
  double score = 0.0;
  std::vector<double> contributions;  // one per utility term
  double cost = 0.0;                  // already negated; score = sum(contributions) + cost
  MomentTable table;
};

struct DecisionReport {
  std::vector<Evaluation> ranked;  // descending score
  std::string best;
  bool tie = false;  // top two within kTieTolerance
};

inline constexpr double kTieTolerance = 1e-9;

namespace detail {

inline void require_plan_matches(const Network& net, const MessagePlan& plan) {
  if (plan.m != net.size() || plan.names != net.names) {
    throw PreconditionError("plan was built for a different network");
  }
}

inline bool touches(const ExponentVector& a, const std::vector<bool>& dirty) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0 && dirty[i]) return true;
  }
  return false;
}

// Panels whose numeric spec differs between two resolutions of one network,
// closed under descendants.
inline std::vector<bool> dirty_panels(const Network& a, const Network& b) {
  const std::size_t m = a.size();
  std::vector<bool> dirty(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    dirty[j] = a.founders[j] != b.founders[j] || a.nodes[j] != b.nodes[j];
    for (std::size_t p : a.parents_of(j)) dirty[j] = dirty[j] || dirty[p];
  }
  return dirty;
}

// With a base evaluation and dirty set, entries not touching a dirty panel
// are copied instead of recomputed.
inline Evaluation evaluate_resolved(const Network& resolved, const UtilitySpec& u, const MessagePlan& plan,
                                    const std::string& decision, const EngineLimits& limits,
                                    const Evaluation* base = nullptr, const std::vector<bool>* dirty = nullptr) {
  const std::size_t m = resolved.size();
  Evaluation out;
  out.decision = decision;
  out.table = MomentTable(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::string& name = resolved.names[j];
    for (const auto& g : plan.donated[j]) {
      if (base && !touches(g, *dirty)) {
        const auto* e = base->table.entry(g);
        if (e) {
          out.table.insert(g, e->value, e->provenance);
          continue;
        }
      }
      const ExponentVector rest = g.with_entry(j, 0);
      if (resolved.is_founder(j)) {
        const double v = founder_raw_moment(resolved.founder(j), g[j], name) * out.table.at(rest);
        out.table.insert(g, v, Provenance::founder);
      } else {
        out.table.insert(g, node_moment(resolved.node(j), g[j], rest, out.table, limits, name), Provenance::propagated);
      }
    }
  }
  double total = 0.0;
  for (const auto& t : u.terms) {
    if (!t.exponents.is_zero()) out.table.mark(t.exponents, Provenance::requested);
    const double c = t.weight * t.sign * rho_for(t.rho, decision) * out.table.at(t.exponents);
    out.contributions.push_back(c);
    total += c;
  }
  if (u.cost) out.cost = -u.cost->weight * rho_for(u.cost->rho, decision);
  out.score = total + out.cost;
  return out;
}

}  // namespace detail

inline Evaluation evaluate(const Network& net, const UtilitySpec& u, const MessagePlan& plan, const std::string& decision,
                           const EngineLimits& limits = {}) {
  detail::require_plan_matches(net, plan);
  if (net.size() > limits.max_variables) throw OrderError("network exceeds the variable cap");
  return detail::evaluate_resolved(resolve_decision(net, decision), u, plan, decision, limits);
}

inline Evaluation evaluate(const Network& net, const UtilitySpec& u, const std::string& decision,
                           const EngineLimits& limits = {}) {
  return evaluate(net, u, plan(net, u), decision, limits);
}

// Scores every decision. With reuse, each decision after the first recomputes
// only the entries downstream of specs its overrides change.
inline DecisionReport rank(const Network& net, const UtilitySpec& u, const MessagePlan& plan,
                           const std::vector<std::string>& decisions, const EngineLimits& limits = {},
                           bool reuse = true) {
  if (decisions.empty()) throw PreconditionError("rank needs at least one decision");
  detail::require_plan_matches(net, plan);
  DecisionReport report;
  const Network first = resolve_decision(net, decisions.front());
  report.ranked.push_back(detail::evaluate_resolved(first, u, plan, decisions.front(), limits));
  for (std::size_t k = 1; k < decisions.size(); ++k) {
    const Network resolved = resolve_decision(net, decisions[k]);
    if (reuse) {
      const auto dirty = detail::dirty_panels(first, resolved);
      report.ranked.push_back(
          detail::evaluate_resolved(resolved, u, plan, decisions[k], limits, &report.ranked.front(), &dirty));
    } else {
      report.ranked.push_back(detail::evaluate_resolved(resolved, u, plan, decisions[k], limits));
    }
  }
  std::stable_sort(report.ranked.begin(), report.ranked.end(),
                   [](const Evaluation& a, const Evaluation& b) { return a.score > b.score; });
  report.best = report.ranked.front().decision;
  report.tie = report.ranked.size() > 1 &&
               std::abs(report.ranked[0].score - report.ranked[1].score) < kTieTolerance;
  return report;
}

inline DecisionReport rank(const Network& net, const UtilitySpec& u, const EngineLimits& limits = {}) {
  return rank(net, u, plan(net, u), decision_labels(net), limits);
}

}  // namespace momentflow
