#pragma once

// JSON network documents and machine-readable reports.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "momentflow/evaluator.hpp"
#include "momentflow/network.hpp"
#include "momentflow/oracle.hpp"
#include "momentflow/planner.hpp"

namespace momentflow {

using Json = nlohmann::ordered_json;

struct NetworkDocument {
  Network network;
  UtilitySpec utility;
  bool operator==(const NetworkDocument&) const = default;
};

namespace detail {

inline ParseError field_error(const std::string& where, const std::string& what) {
  return ParseError(where + ": " + what);
}

inline const Json& need(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw field_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw field_error(where, std::string("missing field '") + key + "'");
  return *it;
}

inline double number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw field_error(where, "expected a number");
  return v.get<double>();
}

inline std::string text(const Json& v, const std::string& where) {
  if (!v.is_string()) throw field_error(where, "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> numbers(const Json& v, const std::string& where) {
  if (!v.is_array()) throw field_error(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::map<std::string, double> number_map(const Json& v, const std::string& where) {
  if (!v.is_object()) throw field_error(where, "expected an object of numbers");
  std::map<std::string, double> out;
  for (const auto& [k, x] : v.items()) out[k] = number(x, where + "." + k);
  return out;
}

inline std::size_t variable(const Network& net, const std::string& name, const std::string& where) {
  auto idx = net.index_of(name);
  if (!idx) throw field_error(where, "unknown variable '" + name + "'");
  return *idx;
}

inline ExponentVector exponents(const Network& net, const Json& v, const std::string& where) {
  if (!v.is_object()) throw field_error(where, "expected an object mapping variable names to powers");
  ExponentVector a(net.size());
  for (const auto& [name, p] : v.items()) {
    if (!p.is_number_integer() || p.get<long long>() < 0) throw field_error(where + "." + name, "power must be a non-negative integer");
    a[variable(net, name, where)] = static_cast<unsigned>(p.get<long long>());
  }
  return a;
}

inline Json exponents_json(const Network& net, const ExponentVector& a) {
  Json out = Json::object();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0) out[net.names[i]] = a[i];
  }
  return out;
}

inline CoefficientBelief parse_belief(const Json& v, const std::string& where) {
  if (!v.is_object() || v.size() != 1) throw field_error(where, "expected one of deterministic, independent, gaussian");
  const auto& [kind, body] = *v.items().begin();
  if (kind == "deterministic") return Deterministic{number_map(body, where + ".deterministic")};
  if (kind == "independent") {
    if (!body.is_object()) throw field_error(where + ".independent", "expected an object");
    IndependentRawMoments r;
    for (const auto& [id, list] : body.items()) r.moments[id] = numbers(list, where + ".independent." + id);
    return r;
  }
  if (kind == "gaussian") {
    const std::string w = where + ".gaussian";
    GaussianJoint g;
    const auto& ids = need(body, "ids", w);
    if (!ids.is_array()) throw field_error(w + ".ids", "expected an array of strings");
    for (std::size_t i = 0; i < ids.size(); ++i) g.ids.push_back(text(ids[i], w + ".ids[" + std::to_string(i) + "]"));
    g.mean = numbers(need(body, "mean", w), w + ".mean");
    const auto& cov = need(body, "covariance", w);
    if (!cov.is_array()) throw field_error(w + ".covariance", "expected an array of rows");
    for (std::size_t i = 0; i < cov.size(); ++i) g.covariance.push_back(numbers(cov[i], w + ".covariance[" + std::to_string(i) + "]"));
    return g;
  }
  throw field_error(where, "unknown belief kind '" + kind + "'");
}

inline Json belief_json(const CoefficientBelief& b) {
  Json out;
  if (const auto* d = std::get_if<Deterministic>(&b)) {
    out["deterministic"] = Json::object();
    for (const auto& [id, v] : d->values) out["deterministic"][id] = v;
  } else if (const auto* r = std::get_if<IndependentRawMoments>(&b)) {
    out["independent"] = Json::object();
    for (const auto& [id, v] : r->moments) out["independent"][id] = v;
  } else {
    const auto& g = std::get<GaussianJoint>(b);
    out["gaussian"] = {{"ids", g.ids}, {"mean", g.mean}, {"covariance", g.covariance}};
  }
  return out;
}

inline ErrorMoments parse_error_spec(const Json& v, const std::string& where) {
  if (!v.is_object() || v.size() != 1) throw field_error(where, "expected one of gaussian, moments");
  if (v.contains("gaussian")) return GaussianError{number(need(v["gaussian"], "variance", where + ".gaussian"), where + ".gaussian.variance")};
  if (v.contains("moments")) return ExplicitRawError{numbers(v["moments"], where + ".moments")};
  throw field_error(where, "unknown error kind");
}

inline Json error_json(const ErrorMoments& e) {
  if (const auto* g = std::get_if<GaussianError>(&e)) return {{"gaussian", {{"variance", g->variance}}}};
  return {{"moments", std::get<ExplicitRawError>(e).moments}};
}

inline FounderSpec parse_founder(const Json& v, const std::string& where) {
  if (!v.is_object() || v.size() != 1) throw field_error(where, "expected one of gaussian, moments");
  if (v.contains("gaussian")) {
    const auto& g = v["gaussian"];
    return GaussianFounder{number(need(g, "mean", where + ".gaussian"), where + ".gaussian.mean"),
                           number(need(g, "variance", where + ".gaussian"), where + ".gaussian.variance")};
  }
  if (v.contains("moments")) return RawMomentFounder{numbers(v["moments"], where + ".moments")};
  throw field_error(where, "unknown founder kind");
}

inline Json founder_json(const FounderSpec& f) {
  if (const auto* g = std::get_if<GaussianFounder>(&f)) return {{"gaussian", {{"mean", g->mean}, {"variance", g->variance}}}};
  return {{"moments", std::get<RawMomentFounder>(f).moments}};
}

}  // namespace detail

inline NetworkDocument parse_document(const Json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw ParseError("document: expected a JSON object");
  for (const auto& [key, v] : doc.items()) {
    static const std::set<std::string> known{"variables", "founders", "nodes", "utility", "decisions", "overrides", "description"};
    if (!known.count(key)) throw ParseError("document: unknown top-level field '" + key + "'");
  }
  NetworkDocument out;
  Network& net = out.network;
  const auto& vars = need(doc, "variables", "document");
  if (!vars.is_array()) throw ParseError("variables: expected an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string w = "variables[" + std::to_string(i) + "]";
    net.names.push_back(text(need(vars[i], "name", w), w + ".name"));
    const std::string role = text(need(vars[i], "role", w), w + ".role");
    if (role == "founder") {
      net.roles.push_back(Role::founder);
    } else if (role == "node") {
      net.roles.push_back(Role::node);
    } else {
      throw field_error(w + ".role", "expected 'founder' or 'node', got '" + role + "'");
    }
  }
  const std::size_t m = net.size();
  net.founders.assign(m, std::nullopt);
  net.nodes.assign(m, std::nullopt);

  if (doc.contains("founders")) {
    const auto& f = doc["founders"];
    if (!f.is_object()) throw ParseError("founders: expected an object");
    for (const auto& [name, spec] : f.items()) {
      const std::string w = "founders." + name;
      net.founders[variable(net, name, "founders")] = parse_founder(spec, w);
    }
  }
  if (doc.contains("nodes")) {
    const auto& nodes = doc["nodes"];
    if (!nodes.is_object()) throw ParseError("nodes: expected an object");
    for (const auto& [name, spec] : nodes.items()) {
      const std::string w = "nodes." + name;
      NodeModel node;
      node.index = variable(net, name, "nodes");
      if (spec.contains("parents")) {
        const auto& ps = spec["parents"];
        if (!ps.is_array()) throw field_error(w + ".parents", "expected an array of names");
        for (std::size_t i = 0; i < ps.size(); ++i) {
          node.parents.push_back(variable(net, text(ps[i], w + ".parents"), w + ".parents[" + std::to_string(i) + "]"));
        }
        std::sort(node.parents.begin(), node.parents.end());
        node.parents.erase(std::unique(node.parents.begin(), node.parents.end()), node.parents.end());
      }
      const auto& terms = need(spec, "terms", w);
      if (!terms.is_array()) throw field_error(w + ".terms", "expected an array");
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string tw = w + ".terms[" + std::to_string(k) + "]";
        Term t;
        t.exponents = terms[k].contains("exponents") ? exponents(net, terms[k]["exponents"], tw + ".exponents")
                                                     : ExponentVector(m);
        t.coeff = text(need(terms[k], "coeff", tw), tw + ".coeff");
        node.terms.push_back(std::move(t));
      }
      node.belief = parse_belief(need(spec, "coeff_belief", w), w + ".coeff_belief");
      node.error = spec.contains("error") ? parse_error_spec(spec["error"], w + ".error") : ErrorMoments{GaussianError{0.0}};
      net.nodes[node.index] = std::move(node);
    }
  }
  if (doc.contains("decisions")) {
    const auto& d = doc["decisions"];
    if (!d.is_array()) throw ParseError("decisions: expected an array");
    for (std::size_t i = 0; i < d.size(); ++i) net.decisions.push_back(text(d[i], "decisions[" + std::to_string(i) + "]"));
  }
  if (doc.contains("overrides")) {
    const auto& o = doc["overrides"];
    if (!o.is_object()) throw ParseError("overrides: expected an object");
    for (const auto& [d, paths] : o.items()) net.overrides[d] = number_map(paths, "overrides." + d);
  }
  if (doc.contains("utility")) {
    const auto& u = doc["utility"];
    if (!u.is_object()) throw ParseError("utility: expected an object");
    if (u.contains("terms")) {
      const auto& terms = u["terms"];
      if (!terms.is_array()) throw ParseError("utility.terms: expected an array");
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string w = "utility.terms[" + std::to_string(k) + "]";
        if (!terms[k].is_object()) throw field_error(w, "expected an object");
        UtilityTerm t;
        t.weight = terms[k].contains("weight") ? number(terms[k]["weight"], w + ".weight") : 1.0;
        if (terms[k].contains("sign")) {
          if (!terms[k]["sign"].is_number_integer()) throw field_error(w + ".sign", "expected +1 or -1");
          t.sign = terms[k]["sign"].get<int>();
        }
        t.exponents = terms[k].contains("exponents") ? exponents(net, terms[k]["exponents"], w + ".exponents")
                                                     : ExponentVector(m);
        if (terms[k].contains("rho")) t.rho = number_map(terms[k]["rho"], w + ".rho");
        out.utility.terms.push_back(std::move(t));
      }
    }
    if (u.contains("cost")) {
      CostTerm c;
      c.weight = number(need(u["cost"], "weight", "utility.cost"), "utility.cost.weight");
      if (u["cost"].contains("rho")) c.rho = number_map(u["cost"]["rho"], "utility.cost.rho");
      out.utility.cost = c;
    }
  }
  return out;
}

inline NetworkDocument parse_document_text(std::string_view source) {
  Json doc;
  try {
    doc = Json::parse(source.begin(), source.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_document(doc);
}

inline NetworkDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_document_text(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Json to_json(const NetworkDocument& d) {
  using namespace detail;
  const Network& net = d.network;
  Json out;
  out["variables"] = Json::array();
  for (std::size_t i = 0; i < net.size(); ++i) {
    out["variables"].push_back({{"name", net.names[i]}, {"role", net.roles[i] == Role::founder ? "founder" : "node"}});
  }
  out["founders"] = Json::object();
  out["nodes"] = Json::object();
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net.founders[i]) out["founders"][net.names[i]] = founder_json(*net.founders[i]);
    if (!net.nodes[i]) continue;
    const auto& node = *net.nodes[i];
    Json n;
    n["parents"] = Json::array();
    for (auto p : node.parents) n["parents"].push_back(net.names[p]);
    n["terms"] = Json::array();
    for (const auto& t : node.terms) n["terms"].push_back({{"exponents", exponents_json(net, t.exponents)}, {"coeff", t.coeff}});
    n["coeff_belief"] = belief_json(node.belief);
    n["error"] = error_json(node.error);
    out["nodes"][net.names[i]] = std::move(n);
  }
  Json u;
  u["terms"] = Json::array();
  for (const auto& t : d.utility.terms) {
    Json jt{{"weight", t.weight}, {"sign", t.sign}, {"exponents", exponents_json(net, t.exponents)}};
    if (!t.rho.empty()) jt["rho"] = t.rho;
    u["terms"].push_back(std::move(jt));
  }
  if (d.utility.cost) {
    u["cost"] = {{"weight", d.utility.cost->weight}};
    if (!d.utility.cost->rho.empty()) u["cost"]["rho"] = d.utility.cost->rho;
  }
  out["utility"] = std::move(u);
  out["decisions"] = net.decisions;
  out["overrides"] = Json::object();
  for (const auto& [dec, paths] : net.overrides) out["overrides"][dec] = paths;
  return out;
}

// ---------------------------------------------------------------------------
// Plans

inline Json to_json(const MessagePlan& p) {
  auto labels = [&](const ExponentSet& s) {
    Json a = Json::array();
    for (const auto& v : s) a.push_back(monomial_label(p.names, v));
    return a;
  };
  Json out;
  out["variables"] = p.names;
  out["decision_maker"] = p.m + 1;
  out["panels"] = Json::array();
  for (std::size_t j = 0; j <= p.m; ++j) {
    Json panel{{"panel", j + 1}, {"name", j < p.m ? p.names[j] : std::string("U")}};
    panel["requested"] = labels(p.requested[j]);
    panel["donated"] = j < p.m ? labels(p.donated[j]) : Json::array();
    out["panels"].push_back(std::move(panel));
  }
  out["pairs"] = Json::array();
  for (const auto& [key, set] : p.pairs) {
    out["pairs"].push_back({{"from", key.first + 1}, {"to", key.second + 1}, {"moments", labels(set)}});
  }
  out["total_donations"] = p.total_donations();
  return out;
}

inline MessagePlan plan_from_json(const Json& doc) {
  using namespace detail;
  MessagePlan p;
  const auto& vars = need(doc, "variables", "plan");
  for (const auto& v : vars) p.names.push_back(text(v, "plan.variables"));
  p.m = p.names.size();
  p.donated.assign(p.m, ExponentSet{});
  p.requested.assign(p.m + 1, ExponentSet{});
  const auto& pairs = need(doc, "pairs", "plan");
  if (!pairs.is_array()) throw ParseError("plan.pairs: expected an array");
  for (const auto& e : pairs) {
    const auto from = need(e, "from", "plan.pairs").get<std::size_t>();
    const auto to = need(e, "to", "plan.pairs").get<std::size_t>();
    if (from == 0 || to == 0 || from >= to || to > p.m + 1) throw ParseError("plan.pairs: bad panel indices");
    ExponentSet set;
    for (const auto& label : need(e, "moments", "plan.pairs")) set.insert(parse_monomial(p.names, text(label, "plan.pairs.moments")));
    p.donated[from - 1].merge(set);
    p.requested[to - 1].merge(set);
    p.pairs[{from - 1, to - 1}] = std::move(set);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Decision reports

inline Json to_json(const DecisionReport& r) {
  Json out;
  out["best"] = r.best;
  out["tie"] = r.tie;
  out["decisions"] = Json::array();
  for (const auto& e : r.ranked) {
    out["decisions"].push_back({{"decision", e.decision}, {"score", e.score}, {"contributions", e.contributions}, {"cost", e.cost}});
  }
  return out;
}

inline DecisionReport report_from_json(const Json& doc) {
  using namespace detail;
  DecisionReport r;
  r.best = text(need(doc, "best", "report"), "report.best");
  r.tie = need(doc, "tie", "report").get<bool>();
  for (const auto& e : need(doc, "decisions", "report")) {
    Evaluation ev;
    ev.decision = text(need(e, "decision", "report.decisions"), "report.decisions.decision");
    ev.score = number(need(e, "score", "report.decisions"), "report.decisions.score");
    ev.contributions = numbers(need(e, "contributions", "report.decisions"), "report.decisions.contributions");
    ev.cost = number(need(e, "cost", "report.decisions"), "report.decisions.cost");
    r.ranked.push_back(std::move(ev));
  }
  return r;
}

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Aligned table: rank, decision, score, then one column per utility term.
inline std::string report_text(const DecisionReport& r) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"rank", "decision", "score"};
  const std::size_t terms = r.ranked.empty() ? 0 : r.ranked.front().contributions.size();
  for (std::size_t k = 0; k < terms; ++k) head.push_back("term" + std::to_string(k + 1));
  const bool has_cost = std::any_of(r.ranked.begin(), r.ranked.end(), [](const Evaluation& e) { return e.cost != 0.0; });
  if (has_cost) head.push_back("cost");
  rows.push_back(head);
  for (std::size_t i = 0; i < r.ranked.size(); ++i) {
    const auto& e = r.ranked[i];
    std::vector<std::string> row{std::to_string(i + 1), e.decision, format_number(e.score)};
    for (double c : e.contributions) row.push_back(format_number(c));
    if (has_cost) row.push_back(format_number(e.cost));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      os << row[c];
      if (c + 1 < row.size()) os << std::string(width[c] - row[c].size(), ' ');
    }
    os << '\n';
  }
  os << "best: " << r.best << (r.tie ? " (tie)" : "") << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Verification reports

inline Json to_json(const ComparisonReport& r) {
  Json out;
  out["z_threshold"] = r.z_threshold;
  out["pass"] = r.pass();
  out["rows"] = Json::array();
  for (const auto& row : r.rows) {
    Json j{{"moment", row.label}, {"exact", row.exact}, {"estimate", row.estimate}, {"se", row.se},
           {"flagged", row.flagged}, {"exact_mismatch", row.exact_mismatch}};
    j["z"] = std::isfinite(row.z) ? Json(row.z) : Json(nullptr);
    out["rows"].push_back(std::move(j));
  }
  return out;
}

inline std::string comparison_text(const ComparisonReport& r) {
  std::size_t w = 6;
  for (const auto& row : r.rows) w = std::max(w, row.label.size());
  std::ostringstream os;
  os << "moment" << std::string(w - 6, ' ') << "  exact            estimate         se           z\n";
  for (const auto& row : r.rows) {
    os << row.label << std::string(w - row.label.size(), ' ') << "  ";
    auto cell = [&](double v, std::size_t width) {
      std::string s = format_number(v);
      os << s << std::string(s.size() < width ? width - s.size() : 1, ' ');
    };
    cell(row.exact, 17);
    cell(row.estimate, 17);
    cell(row.se, 13);
    os << (std::isfinite(row.z) ? format_number(row.z) : std::string("inf"));
    if (row.flagged) os << (row.exact_mismatch ? "  MISMATCH" : "  FLAGGED");
    os << '\n';
  }
  os << (r.pass() ? "pass" : "fail") << " (|z| <= " << format_number(r.z_threshold) << ")\n";
  return os.str();
}

}  // namespace momentflow
