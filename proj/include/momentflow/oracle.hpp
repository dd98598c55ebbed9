#pragma once

// Forward-simulation oracle: draw coefficients, errors and founders, run the
// network, and estimate monomial moments and the expected utility.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "momentflow/evaluator.hpp"
#include "momentflow/network.hpp"

namespace momentflow {

struct OracleOptions {
  std::uint64_t chunk_size = 16384;
  unsigned threads = 0;  // 0: hardware concurrency, capped by MOMENTFLOW_THREADS
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
  bool operator==(const Estimate&) const = default;
};

struct SimulationResult {
  std::string decision;
  std::map<ExponentVector, Estimate> moments;
  Estimate utility;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::uint64_t chunk_size = 0;
  std::size_t chunks = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  return splitmix64(splitmix64(seed) ^ splitmix64(chunk + 0x632be59bd9b4e019ull));
}

// Running mean and sum of squared deviations.
struct Welford {
  double n = 0.0, mean = 0.0, m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }

  Estimate estimate() const {
    Estimate e;
    e.mean = mean;
    e.n = static_cast<std::uint64_t>(n);
    e.se = n > 1.0 ? std::sqrt(std::max(m2, 0.0) / (n - 1.0) / n) : 0.0;
    return e;
  }
};

struct SampledNode {
  std::vector<std::vector<std::pair<std::size_t, unsigned>>> terms;  // sparse monomials
  Eigen::VectorXd mean;
  Eigen::MatrixXd factor;  // factor * factor^T = covariance; empty when deterministic
  double error_sd = 0.0;
};

struct Sampler {
  std::size_t m = 0;
  std::vector<std::optional<std::pair<double, double>>> founders;  // mean, sd
  std::vector<std::optional<SampledNode>> nodes;
  std::vector<std::vector<std::pair<std::size_t, unsigned>>> targets;
  std::vector<std::vector<std::pair<std::size_t, unsigned>>> utility_terms;
  std::vector<double> utility_weights;
  double utility_offset = 0.0;
};

inline std::vector<std::pair<std::size_t, unsigned>> sparse(const ExponentVector& a) {
  std::vector<std::pair<std::size_t, unsigned>> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0) out.emplace_back(i, a[i]);
  }
  return out;
}

inline double monomial(const std::vector<std::pair<std::size_t, unsigned>>& s, const std::vector<double>& y) {
  double r = 1.0;
  for (const auto& [i, p] : s) {
    const double v = y[i];
    for (unsigned k = 0; k < p; ++k) r *= v;
  }
  return r;
}

inline Eigen::MatrixXd psd_factor(const std::vector<std::vector<double>>& cov) {
  const auto n = static_cast<Eigen::Index>(cov.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = cov[i][j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

inline Sampler build_sampler(const Network& net, const std::string& decision, const ExponentSet& targets,
                             const UtilitySpec& u) {
  std::vector<std::string> problems;
  const std::size_t m = net.size();
  for (std::size_t j = 0; j < m; ++j) {
    const std::string& name = net.names[j];
    if (net.is_founder(j)) {
      if (!std::holds_alternative<GaussianFounder>(net.founder(j))) problems.push_back("founder '" + name + "' given by raw moments");
      continue;
    }
    const auto& node = net.node(j);
    if (std::holds_alternative<IndependentRawMoments>(node.belief)) problems.push_back("node '" + name + "' coefficients given by raw moments");
    if (std::holds_alternative<ExplicitRawError>(node.error)) problems.push_back("node '" + name + "' error given by raw moments");
  }
  if (!problems.empty()) {
    std::string msg = "network is not samplable:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw CapabilityError(msg);
  }

  const Network r = resolve_decision(net, decision);
  Sampler s;
  s.m = m;
  s.founders.resize(m);
  s.nodes.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (r.is_founder(j)) {
      const auto& g = std::get<GaussianFounder>(r.founder(j));
      s.founders[j] = std::make_pair(g.mean, std::sqrt(g.variance));
      continue;
    }
    const auto& node = r.node(j);
    SampledNode sn;
    const auto n = static_cast<Eigen::Index>(node.terms.size());
    sn.mean = Eigen::VectorXd::Zero(n);
    for (const auto& t : node.terms) sn.terms.push_back(sparse(t.exponents));
    if (const auto* d = std::get_if<Deterministic>(&node.belief)) {
      for (Eigen::Index k = 0; k < n; ++k) sn.mean(k) = d->values.at(node.terms[k].coeff);
    } else {
      const auto& g = std::get<GaussianJoint>(node.belief);
      std::vector<std::size_t> slot;
      for (const auto& t : node.terms) slot.push_back(*g.index_of(t.coeff));
      std::vector<std::vector<double>> cov(slot.size(), std::vector<double>(slot.size()));
      for (std::size_t a = 0; a < slot.size(); ++a) {
        sn.mean(static_cast<Eigen::Index>(a)) = g.mean[slot[a]];
        for (std::size_t b = 0; b < slot.size(); ++b) cov[a][b] = g.covariance[slot[a]][slot[b]];
      }
      sn.factor = psd_factor(cov);
    }
    sn.error_sd = std::sqrt(std::get<GaussianError>(node.error).variance);
    s.nodes[j] = std::move(sn);
  }
  for (const auto& a : targets) {
    a.require_same_length(ExponentVector(m), "simulation target");
    s.targets.push_back(sparse(a));
  }
  for (const auto& t : u.terms) {
    const double w = t.weight * t.sign * rho_for(t.rho, decision);
    if (t.exponents.is_zero()) {
      s.utility_offset += w;
    } else {
      s.utility_terms.push_back(sparse(t.exponents));
      s.utility_weights.push_back(w);
    }
  }
  if (u.cost) s.utility_offset -= u.cost->weight * rho_for(u.cost->rho, decision);
  return s;
}

struct ChunkResult {
  std::vector<Welford> targets;
  Welford utility;
};

inline ChunkResult run_chunk(const Sampler& s, std::uint64_t seed, std::uint64_t chunk, std::uint64_t count) {
  std::mt19937_64 rng(chunk_seed(seed, chunk));
  std::normal_distribution<double> z(0.0, 1.0);
  ChunkResult out;
  out.targets.resize(s.targets.size());
  std::vector<double> y(s.m, 0.0);
  Eigen::VectorXd draw, theta;
  for (std::uint64_t r = 0; r < count; ++r) {
    for (std::size_t j = 0; j < s.m; ++j) {
      if (s.founders[j]) {
        y[j] = s.founders[j]->first + s.founders[j]->second * z(rng);
        continue;
      }
      const auto& node = *s.nodes[j];
      if (node.factor.size() != 0) {
        draw.resize(node.factor.cols());
        for (Eigen::Index k = 0; k < draw.size(); ++k) draw(k) = z(rng);
        theta = node.mean + node.factor * draw;
      } else {
        theta = node.mean;
      }
      double v = 0.0;
      for (std::size_t k = 0; k < node.terms.size(); ++k) v += theta(static_cast<Eigen::Index>(k)) * monomial(node.terms[k], y);
      y[j] = v + node.error_sd * z(rng);
    }
    for (std::size_t k = 0; k < s.targets.size(); ++k) out.targets[k].add(monomial(s.targets[k], y));
    double u = s.utility_offset;
    for (std::size_t k = 0; k < s.utility_terms.size(); ++k) u += s.utility_weights[k] * monomial(s.utility_terms[k], y);
    out.utility.add(u);
  }
  return out;
}

inline unsigned thread_budget(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MOMENTFLOW_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

}  // namespace detail

// Estimates E[Y^a] for every target and the expected utility under one
// decision. Results depend on (seed, samples, chunk size) only.
inline SimulationResult simulate(const Network& net, const std::string& decision, const ExponentSet& targets,
                                 const UtilitySpec& u, std::uint64_t samples, std::uint64_t seed,
                                 const OracleOptions& options = {}) {
  if (samples == 0) throw DomainError("simulate: sample count must be positive");
  if (options.chunk_size == 0) throw DomainError("simulate: chunk size must be positive");
  const auto report = validate(net, u);
  if (!report.ok()) throw PreconditionError("cannot simulate an invalid network:" + detail::violation_list(report));
  const detail::Sampler sampler = detail::build_sampler(net, decision, targets, u);

  const std::uint64_t chunks = (samples + options.chunk_size - 1) / options.chunk_size;
  std::vector<detail::ChunkResult> results(chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      const std::uint64_t count = std::min(options.chunk_size, samples - c * options.chunk_size);
      results[c] = detail::run_chunk(sampler, seed, c, count);
    }
  };
  const unsigned threads = std::min<std::uint64_t>(detail::thread_budget(options.threads), chunks);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<detail::Welford> totals(sampler.targets.size());
  detail::Welford utility;
  for (const auto& r : results) {
    for (std::size_t k = 0; k < totals.size(); ++k) totals[k].merge(r.targets[k]);
    utility.merge(r.utility);
  }
  SimulationResult out;
  out.decision = decision;
  out.seed = seed;
  out.samples = samples;
  out.chunk_size = options.chunk_size;
  out.chunks = static_cast<std::size_t>(chunks);
  std::size_t k = 0;
  for (const auto& a : targets) out.moments.emplace(a, totals[k++].estimate());
  out.utility = utility.estimate();
  return out;
}

struct ComparisonRow {
  std::string label;
  double exact = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool flagged = false;
  bool exact_mismatch = false;  // zero SE but a discrepancy
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double z_threshold = 4.0;
  bool pass() const {
    return std::none_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.flagged; });
  }
};

namespace detail {

inline ComparisonRow compare_one(std::string label, double exact, const Estimate& e, double threshold) {
  ComparisonRow row{std::move(label), exact, e.mean, e.se, 0.0, false, false};
  const double diff = exact - e.mean;
  if (e.se > 0.0) {
    row.z = diff / e.se;
    row.flagged = !(std::abs(row.z) <= threshold);
  } else if (std::abs(diff) > 1e-9 * std::max(1.0, std::abs(exact))) {
    row.exact_mismatch = true;
    row.flagged = true;
    row.z = diff > 0 ? HUGE_VAL : -HUGE_VAL;
  }
  return row;
}

}  // namespace detail

// One row per moment present in both the table and the simulation.
inline ComparisonReport compare(const MomentTable& exact, const SimulationResult& sim, double z_threshold = 4.0,
                                const std::vector<std::string>& names = {}) {
  ComparisonReport report;
  report.z_threshold = z_threshold;
  for (const auto& [a, e] : sim.moments) {
    auto v = exact.find(a);
    if (!v || a.is_zero()) continue;
    report.rows.push_back(detail::compare_one(monomial_label(names, a), *v, e, z_threshold));
  }
  return report;
}

// Moments plus one "U" row for the expected utility.
inline ComparisonReport compare(const Evaluation& exact, const SimulationResult& sim, double z_threshold = 4.0,
                                const std::vector<std::string>& names = {}) {
  auto report = compare(exact.table, sim, z_threshold, names);
  report.rows.push_back(detail::compare_one("U", exact.score, sim.utility, z_threshold));
  return report;
}

}  // namespace momentflow
