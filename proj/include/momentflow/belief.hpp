#pragma once

// Expectation oracles for regression coefficients, observation errors and
// founder variables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "momentflow/error.hpp"

namespace momentflow {

inline constexpr unsigned kDefaultThetaDegreeCap = 16;

// ---------------------------------------------------------------------------
// Coefficient beliefs

// Point-mass coefficients.
struct Deterministic {
  std::map<std::string, double> values;
  bool operator==(const Deterministic&) const = default;
};

// Mutually independent coefficients given by raw moments E[t^1..t^K].
struct IndependentRawMoments {
  std::map<std::string, std::vector<double>> moments;
  bool operator==(const IndependentRawMoments&) const = default;
};

// Jointly Gaussian coefficients.
struct GaussianJoint {
  std::vector<std::string> ids;
  std::vector<double> mean;
  std::vector<std::vector<double>> covariance;
  bool operator==(const GaussianJoint&) const = default;

  std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == id) return i;
    }
    return std::nullopt;
  }
};

using CoefficientBelief = std::variant<Deterministic, IndependentRawMoments, GaussianJoint>;

inline std::set<std::string> belief_ids(const CoefficientBelief& belief) {
  std::set<std::string> out;
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          for (const auto& [id, v] : b.values) out.insert(id);
        } else if constexpr (std::is_same_v<T, IndependentRawMoments>) {
          for (const auto& [id, v] : b.moments) out.insert(id);
        } else {
          out.insert(b.ids.begin(), b.ids.end());
        }
      },
      belief);
  return out;
}

inline bool is_symmetric_psd(const std::vector<std::vector<double>>& cov) {
  const auto n = static_cast<Eigen::Index>(cov.size());
  Eigen::MatrixXd m(n, n);
  double scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(cov[i].size()) != n) return false;
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = cov[i][j];
      if (!std::isfinite(m(i, j))) return false;
      scale = std::max(scale, std::abs(m(i, j)));
    }
  }
  if (n == 0) return true;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  return eig.eigenvalues().minCoeff() >= -1e-10 * scale;
}

// Human-readable problems with a belief; empty when well formed.
inline std::vector<std::string> belief_problems(const CoefficientBelief& belief) {
  std::vector<std::string> out;
  if (const auto* g = std::get_if<GaussianJoint>(&belief)) {
    const std::size_t n = g->ids.size();
    if (g->mean.size() != n) out.push_back("gaussian belief: mean length differs from id count");
    if (g->covariance.size() != n) {
      out.push_back("gaussian belief: covariance row count differs from id count");
    } else if (!is_symmetric_psd(g->covariance)) {
      out.push_back("gaussian belief: covariance is not symmetric positive semi-definite");
    }
    std::set<std::string> unique(g->ids.begin(), g->ids.end());
    if (unique.size() != n) out.push_back("gaussian belief: duplicate coefficient id");
  }
  return out;
}

namespace detail {

// E[prod X_i^{k_i}] for X ~ N(mean, cov) by the Stein recursion
// E[X_j X^k] = mean_j E[X^k] + sum_i k_i cov_ji E[X^{k - e_i}].
class GaussianRawMoments {
 public:
  GaussianRawMoments(std::vector<double> mean, std::vector<std::vector<double>> cov)
      : mean_(std::move(mean)), cov_(std::move(cov)) {}

  double operator()(std::vector<unsigned> powers) {
    auto it = std::find_if(powers.begin(), powers.end(), [](unsigned p) { return p != 0; });
    if (it == powers.end()) return 1.0;
    if (auto hit = memo_.find(powers); hit != memo_.end()) return hit->second;
    const std::vector<unsigned> key = powers;
    const auto j = static_cast<std::size_t>(it - powers.begin());
    --powers[j];
    double value = mean_[j] * (*this)(powers);
    for (std::size_t i = 0; i < powers.size(); ++i) {
      if (powers[i] == 0 || cov_[j][i] == 0.0) continue;
      const double k = powers[i];
      --powers[i];
      value += k * cov_[j][i] * (*this)(powers);
      ++powers[i];
    }
    memo_.emplace(key, value);
    return value;
  }

 private:
  std::vector<double> mean_;
  std::vector<std::vector<double>> cov_;
  std::map<std::vector<unsigned>, double> memo_;
};

inline double raw_moment_from_list(const std::vector<double>& list, unsigned k, std::string_view what) {
  if (k == 0) return 1.0;
  if (k > list.size()) {
    throw OrderError(std::string(what) + ": raw moment of order " + std::to_string(k) +
                     " required but only " + std::to_string(list.size()) + " given");
  }
  return list[k - 1];
}

}  // namespace detail

// Memoising evaluator of E[prod theta^t] for a fixed belief and a fixed list
// of coefficient ids; powers are given aligned with that list.
class ThetaMomentCache {
 public:
  ThetaMomentCache(const CoefficientBelief& belief, std::vector<std::string> ids,
                   unsigned degree_cap = kDefaultThetaDegreeCap)
      : belief_(&belief), ids_(std::move(ids)), cap_(degree_cap) {
    if (const auto* g = std::get_if<GaussianJoint>(belief_)) {
      for (const auto& id : ids_) {
        auto idx = g->index_of(id);
        if (!idx) throw LookupError("coefficient '" + id + "' missing from gaussian belief");
        slots_.push_back(*idx);
      }
      gaussian_.emplace(g->mean, g->covariance);
    } else {
      const auto known = belief_ids(*belief_);
      for (const auto& id : ids_) {
        if (!known.count(id)) throw LookupError("coefficient '" + id + "' missing from belief");
      }
    }
  }

  double operator()(std::span<const unsigned> powers) {
    if (powers.size() != ids_.size()) {
      throw StructuralError("theta power vector length differs from coefficient list");
    }
    const unsigned degree = std::accumulate(powers.begin(), powers.end(), 0u);
    if (degree > cap_) {
      throw OrderError("coefficient product of total degree " + std::to_string(degree) +
                       " exceeds the cap of " + std::to_string(cap_));
    }
    if (degree == 0) return 1.0;
    return std::visit(
        [&](const auto& b) -> double {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, Deterministic>) {
            double r = 1.0;
            for (std::size_t i = 0; i < powers.size(); ++i) {
              if (powers[i] != 0) r *= std::pow(b.values.at(ids_[i]), static_cast<int>(powers[i]));
            }
            return r;
          } else if constexpr (std::is_same_v<T, IndependentRawMoments>) {
            double r = 1.0;
            for (std::size_t i = 0; i < powers.size(); ++i) {
              if (powers[i] != 0) {
                r *= detail::raw_moment_from_list(b.moments.at(ids_[i]), powers[i],
                                                  "coefficient '" + ids_[i] + "'");
              }
            }
            return r;
          } else {
            std::vector<unsigned> full(b.ids.size(), 0u);
            for (std::size_t i = 0; i < powers.size(); ++i) full[slots_[i]] += powers[i];
            return (*gaussian_)(std::move(full));
          }
        },
        *belief_);
  }

 private:
  const CoefficientBelief* belief_;
  std::vector<std::string> ids_;
  unsigned cap_;
  std::vector<std::size_t> slots_;
  std::optional<detail::GaussianRawMoments> gaussian_;
};

// E[prod_id theta_id^power] under the belief.
inline double theta_product_moment(const CoefficientBelief& belief,
                                   const std::map<std::string, unsigned>& powers,
                                   unsigned degree_cap = kDefaultThetaDegreeCap) {
  std::vector<std::string> ids;
  std::vector<unsigned> p;
  for (const auto& [id, k] : powers) {
    ids.push_back(id);
    p.push_back(k);
  }
  ThetaMomentCache cache(belief, std::move(ids), degree_cap);
  return cache(p);
}

// Sets the mean of one coefficient: the value of a deterministic coefficient,
// the mean of a gaussian one. Independent raw-moment beliefs have no single
// mean to move; use set_raw_moment instead.
inline void set_coefficient_mean(CoefficientBelief& belief, const std::string& id, double value) {
  if (auto* d = std::get_if<Deterministic>(&belief)) {
    auto it = d->values.find(id);
    if (it == d->values.end()) throw LookupError("unknown coefficient '" + id + "'");
    it->second = value;
  } else if (auto* g = std::get_if<GaussianJoint>(&belief)) {
    auto idx = g->index_of(id);
    if (!idx) throw LookupError("unknown coefficient '" + id + "'");
    g->mean[*idx] = value;
  } else {
    throw LookupError("coefficient '" + id +
                      "' has an independent raw-moment belief; override a specific moment order");
  }
}

inline void set_raw_moment(CoefficientBelief& belief, const std::string& id, unsigned order, double value) {
  auto* r = std::get_if<IndependentRawMoments>(&belief);
  if (!r) throw LookupError("coefficient '" + id + "' is not given by raw moments");
  auto it = r->moments.find(id);
  if (it == r->moments.end()) throw LookupError("unknown coefficient '" + id + "'");
  if (order == 0 || order > it->second.size()) {
    throw OrderError("coefficient '" + id + "' has no raw moment of order " + std::to_string(order));
  }
  it->second[order - 1] = value;
}

// ---------------------------------------------------------------------------
// Observation errors

// Raw error moments m_1..m_K; m_1 must be zero.
struct ExplicitRawError {
  std::vector<double> moments;
  bool operator==(const ExplicitRawError&) const = default;
};

// Centred Gaussian error with the given variance.
struct GaussianError {
  double variance = 0.0;
  bool operator==(const GaussianError&) const = default;
};

using ErrorMoments = std::variant<GaussianError, ExplicitRawError>;

inline std::uint64_t double_factorial(unsigned n) {
  std::uint64_t r = 1;
  for (unsigned k = n; k > 1; k -= 2) r *= k;
  return r;
}

inline std::vector<std::string> error_problems(const ErrorMoments& spec) {
  std::vector<std::string> out;
  if (const auto* g = std::get_if<GaussianError>(&spec)) {
    if (!(g->variance >= 0.0) || !std::isfinite(g->variance)) out.push_back("error variance must be finite and >= 0");
  } else {
    const auto& r = std::get<ExplicitRawError>(spec);
    if (!r.moments.empty() && r.moments[0] != 0.0) out.push_back("error first moment must be 0");
    if (r.moments.size() >= 2 && r.moments[1] < 0.0) out.push_back("error second moment must be >= 0");
  }
  return out;
}

// m_k = E[v^k]; m_0 = 1 and m_1 = 0 for every spec.
inline double error_moment(const ErrorMoments& spec, unsigned k, std::string_view owner = {}) {
  if (k == 0) return 1.0;
  if (k == 1) return 0.0;
  if (const auto* g = std::get_if<GaussianError>(&spec)) {
    if (k % 2 == 1) return 0.0;
    return static_cast<double>(double_factorial(k - 1)) * std::pow(g->variance, static_cast<int>(k / 2));
  }
  const auto& r = std::get<ExplicitRawError>(spec);
  if (k > r.moments.size()) {
    throw OrderError("error moment of order " + std::to_string(k) + " required for node '" +
                     std::string(owner) + "' but only " + std::to_string(r.moments.size()) + " given");
  }
  return r.moments[k - 1];
}

// ---------------------------------------------------------------------------
// Founders

// Founder given by explicit raw moments E[Y^1..Y^K].
struct RawMomentFounder {
  std::vector<double> moments;
  bool operator==(const RawMomentFounder&) const = default;
};

struct GaussianFounder {
  double mean = 0.0;
  double variance = 0.0;
  bool operator==(const GaussianFounder&) const = default;
};

using FounderSpec = std::variant<GaussianFounder, RawMomentFounder>;

inline std::vector<std::string> founder_problems(const FounderSpec& spec) {
  std::vector<std::string> out;
  if (const auto* g = std::get_if<GaussianFounder>(&spec)) {
    if (!(g->variance >= 0.0) || !std::isfinite(g->variance) || !std::isfinite(g->mean)) {
      out.push_back("founder gaussian needs finite mean and variance >= 0");
    }
  }
  return out;
}

// E[Y^k] of a single founder.
inline double founder_raw_moment(const FounderSpec& spec, unsigned k, std::string_view name = {}) {
  if (k == 0) return 1.0;
  if (const auto* g = std::get_if<GaussianFounder>(&spec)) {
    double prev2 = 1.0, prev = g->mean;
    for (unsigned n = 2; n <= k; ++n) {
      const double next = g->mean * prev + (n - 1) * g->variance * prev2;
      prev2 = prev;
      prev = next;
    }
    return prev;
  }
  return detail::raw_moment_from_list(std::get<RawMomentFounder>(spec).moments, k,
                                      "founder '" + std::string(name) + "'");
}

inline std::optional<unsigned> max_available_order(const FounderSpec& spec) {
  if (const auto* r = std::get_if<RawMomentFounder>(&spec)) return static_cast<unsigned>(r->moments.size());
  return std::nullopt;
}

inline std::optional<unsigned> max_available_order(const ErrorMoments& spec) {
  if (const auto* r = std::get_if<ExplicitRawError>(&spec)) return static_cast<unsigned>(r->moments.size());
  return std::nullopt;
}

}  // namespace momentflow
