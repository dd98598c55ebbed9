#pragma once

// Command-line driver. run_cli is the whole program; tools/momentflow.cpp
// only forwards argv to it.
//
// Exit codes: 0 success, 1 validation or verification failure, 2 usage or
// parse error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "momentflow/document.hpp"
#include "momentflow/evaluator.hpp"
#include "momentflow/generators.hpp"
#include "momentflow/model.hpp"
#include "momentflow/oracle.hpp"
#include "momentflow/planner.hpp"

namespace momentflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

namespace cli_detail {

struct UsageError : Error {
  using Error::Error;
};

inline void require_decision(const Network& net, const std::string& d) {
  const auto labels = decision_labels(net);
  if (std::find(labels.begin(), labels.end(), d) == labels.end()) throw UsageError("unknown decision '" + d + "'");
}

inline bool print_violations(const ValidationReport& r, std::ostream& out) {
  for (const auto& v : r.violations) out << "[" << v.kind << "] " << v.message << '\n';
  return r.ok();
}

inline std::string set_text(const std::vector<std::string>& names, const ExponentSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : s) {
    out += (first ? "" : ", ") + monomial_text(names, a);
    first = false;
  }
  return out + "}";
}

struct NodeSummary {
  std::string name;
  std::string label;
  ExponentSet corners;
  CountBounds bounds;
  std::optional<std::uint64_t> graphical_bound;
};

inline std::vector<NodeSummary> summarise(const Network& net) {
  std::vector<NodeSummary> out;
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (net.is_founder(j) || !net.nodes[j]) continue;
    const auto c = classify(*net.nodes[j]);
    NodeSummary s{net.names[j], to_string(c.label), c.corners, {}, std::nullopt};
    if (!c.corners.empty()) s.bounds = count_bounds(c.corners);
    if (c.graphical) s.graphical_bound = graphical_count_bound(c.cliques);
    out.push_back(std::move(s));
  }
  return out;
}

inline int emit_summary(const Network& net, const UtilitySpec& u, bool json, std::ostream& out) {
  const auto rows = summarise(net);
  std::optional<std::size_t> total;
  if (validate(net, u).ok()) total = plan(net, u).total_donations();
  if (json) {
    Json doc;
    doc["nodes"] = Json::array();
    for (const auto& r : rows) {
      Json n{{"node", r.name}, {"class", r.label}, {"corners", Json::array()},
             {"bounds", {r.bounds.lower, r.bounds.upper}}};
      for (const auto& c : r.corners) n["corners"].push_back(monomial_text(net.names, c));
      if (r.graphical_bound) n["graphical_bound"] = *r.graphical_bound;
      doc["nodes"].push_back(std::move(n));
    }
    doc["total_donations"] = total ? Json(*total) : Json(nullptr);
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  std::size_t wn = 4, wc = 5, wk = 7;
  for (const auto& r : rows) {
    wn = std::max(wn, r.name.size());
    wc = std::max(wc, r.label.size());
    wk = std::max(wk, set_text(net.names, r.corners).size());
  }
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  out << pad("node", wn) << "  " << pad("class", wc) << "  " << pad("corners", wk) << "  bounds\n";
  for (const auto& r : rows) {
    out << pad(r.name, wn) << "  " << pad(r.label, wc) << "  " << pad(set_text(net.names, r.corners), wk) << "  ("
        << r.bounds.lower << "," << r.bounds.upper << ")";
    if (r.graphical_bound) out << "  graphical bound " << *r.graphical_bound;
    out << '\n';
  }
  if (total) out << "total donations: " << *total << '\n';
  return kExitOk;
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << body;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Exact moment propagation and expected-utility scoring for polynomial regression networks",
               "momentflow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "momentflow 1.0.0");

  std::string file, format = "text", decision, out_path;
  bool rank_all = false;
  std::uint64_t samples = 1000000, seed = 1, chunk = 16384;
  double z = 4.0;
  unsigned threads = 0;
  std::vector<std::string> oracle_overrides;
  std::size_t complete_graph = 0;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };
  auto* validate_cmd = app.add_subcommand("validate", "Check a network document");
  validate_cmd->add_option("file", file, "Network document")->required();

  auto* plan_cmd = app.add_subcommand("plan", "Print the request/donate sets of every panel");
  plan_cmd->add_option("file", file, "Network document")->required();
  add_format(plan_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Score one decision or rank all of them");
  eval_cmd->add_option("file", file, "Network document")->required();
  auto* dec_opt = eval_cmd->add_option("--decision", decision, "Decision to score");
  eval_cmd->add_flag("--rank", rank_all, "Rank every decision (default)")->excludes(dec_opt);
  eval_cmd->add_option("--out", out_path, "Also write the JSON report here");
  add_format(eval_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Compare exact moments with a Monte Carlo estimate");
  verify_cmd->add_option("file", file, "Network document")->required();
  verify_cmd->add_option("--samples", samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", seed, "Random seed");
  verify_cmd->add_option("--z", z, "Largest tolerated |z|")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--decision", decision, "Decision to verify (default: all)");
  verify_cmd->add_option("--chunk", chunk, "Samples per random substream")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--threads", threads, "Worker threads (0: automatic)");
  verify_cmd->add_option("--oracle-override", oracle_overrides,
                         "PATH=VALUE applied to the simulated network only (fault injection)");
  add_format(verify_cmd);

  auto* classify_cmd = app.add_subcommand("classify", "Model class, corner points and term bounds per node");
  classify_cmd->add_option("file", file, "Network document")->required();
  add_format(classify_cmd);

  auto* count_cmd = app.add_subcommand("count", "Complexity report, or the complete-graph donation count");
  auto* count_file = count_cmd->add_option("file", file, "Network document");
  count_cmd->add_option("--complete-graph", complete_graph, "Use the complete graphical network on M variables")
      ->check(CLI::Range(1, 16))
      ->excludes(count_file);
  add_format(count_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const bool json = format == "json";
    if (count_cmd->parsed() && complete_graph > 0) {
      const auto net = complete_graphical_network(complete_graph);
      const auto p = plan(net, complete_graph_utility(complete_graph));
      const auto formula = donation_count(complete_graph);
      if (json) {
        out << Json{{"m", complete_graph}, {"formula", formula}, {"planner", p.total_donations()}}.dump(2) << '\n';
      } else {
        out << "complete graph m=" << complete_graph << "\nformula: " << formula << "\nplanner: " << p.total_donations()
            << '\n';
      }
      return formula == p.total_donations() ? kExitOk : kExitFailure;
    }
    if (count_cmd->parsed() && file.empty()) throw UsageError("count needs a file or --complete-graph");

    const NetworkDocument doc = load_document(file);
    const Network& net = doc.network;
    const UtilitySpec& u = doc.utility;
    const auto report = validate(net, u);

    if (validate_cmd->parsed()) {
      if (!print_violations(report, out)) return kExitFailure;
      out << "ok: " << net.size() << " variables, " << decision_labels(net).size() << " decision(s)\n";
      return kExitOk;
    }
    if (classify_cmd->parsed() || count_cmd->parsed()) {
      if (!report.ok()) {
        print_violations(report, err);
        return kExitFailure;
      }
      return emit_summary(net, u, json, out);
    }
    if (!report.ok()) {
      print_violations(report, err);
      return kExitFailure;
    }
    const MessagePlan p = plan(net, u);

    if (plan_cmd->parsed()) {
      out << (json ? to_json(p).dump(2) + "\n" : plan_text(p));
      return kExitOk;
    }
    if (eval_cmd->parsed()) {
      std::vector<std::string> decisions = decision_labels(net);
      if (!decision.empty()) {
        require_decision(net, decision);
        decisions = {decision};
      }
      const auto r = rank(net, u, p, decisions);
      const std::string body = to_json(r).dump(2) + "\n";
      if (!out_path.empty()) write_file(out_path, body);
      out << (json ? body : report_text(r));
      return kExitOk;
    }
    if (verify_cmd->parsed()) {
      std::vector<std::string> decisions = decision_labels(net);
      if (!decision.empty()) {
        require_decision(net, decision);
        decisions = {decision};
      }
      Network simulated = net;
      for (const auto& spec : oracle_overrides) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw UsageError("--oracle-override expects PATH=VALUE");
        double value = 0.0;
        try {
          value = std::stod(spec.substr(eq + 1));
        } catch (const std::exception&) {
          throw UsageError("--oracle-override value is not a number: '" + spec + "'");
        }
        detail::apply_override(simulated, spec.substr(0, eq), value);
      }
      bool pass = true;
      Json all = Json::array();
      OracleOptions opts;
      opts.chunk_size = chunk;
      opts.threads = threads;
      for (const auto& d : decisions) {
        const auto exact = evaluate(net, u, p, d);
        ExponentSet targets;
        for (const auto& [a, e] : exact.table) targets.insert(a);
        const auto sim = simulate(simulated, d, targets, u, samples, seed, opts);
        const auto cmp = compare(exact, sim, z, net.names);
        pass = pass && cmp.pass();
        if (json) {
          Json j = to_json(cmp);
          j["decision"] = d;
          j["samples"] = samples;
          j["seed"] = seed;
          all.push_back(std::move(j));
        } else {
          out << "decision " << d << " (samples " << samples << ", seed " << seed << ")\n" << comparison_text(cmp);
        }
      }
      if (json) out << all.dump(2) << '\n';
      return pass ? kExitOk : kExitFailure;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace momentflow
