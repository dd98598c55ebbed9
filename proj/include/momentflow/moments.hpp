#pragma once

// Exact non-central moments E[Y_j^b * Y^g] of one node from lower-order
// moments, coefficient product moments and error moments.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "momentflow/belief.hpp"
#include "momentflow/exponent.hpp"
#include "momentflow/model.hpp"
#include "momentflow/network.hpp"

namespace momentflow {

enum class Provenance { founder, propagated, requested };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::founder: return "founder";
    case Provenance::propagated: return "propagated";
    case Provenance::requested: return "requested";
  }
  return "propagated";
}

// Cache of mu_a = E[Y^a]. The zero vector is implicitly 1; entries are
// write-once.
class MomentTable {
 public:
  struct Entry {
    double value = 0.0;
    Provenance provenance = Provenance::propagated;
    bool operator==(const Entry&) const = default;
  };
  using container = std::map<ExponentVector, Entry>;

  MomentTable() = default;
  explicit MomentTable(std::size_t m) : m_(m) {}

  std::size_t dimension() const noexcept { return m_; }
  std::size_t size() const noexcept { return entries_.size(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  bool contains(const ExponentVector& a) const { return a.is_zero() || entries_.count(a) != 0; }

  std::optional<double> find(const ExponentVector& a) const {
    if (a.is_zero()) return 1.0;
    auto it = entries_.find(a);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
  }

  double at(const ExponentVector& a) const {
    if (a.size() != m_) throw StructuralError("moment lookup with exponent length " + std::to_string(a.size()));
    if (auto v = find(a)) return *v;
    throw PropagationError("moment E[Y^" + a.to_string() + "] read before it was produced");
  }

  // Inserts mu_a. Re-insertion must agree within 1e-12 relative.
  void insert(const ExponentVector& a, double value, Provenance provenance) {
    if (a.size() != m_) throw StructuralError("moment insert with exponent length " + std::to_string(a.size()));
    if (a.is_zero()) {
      if (value != 1.0) throw DomainError("the moment of the constant monomial is 1");
      return;
    }
    auto [it, inserted] = entries_.try_emplace(a, Entry{value, provenance});
    if (inserted) return;
    const double old = it->second.value;
    const double scale = std::max({std::abs(old), std::abs(value), 1e-300});
    if (std::abs(old - value) > 1e-12 * scale) {
      throw DomainError("moment E[Y^" + a.to_string() + "] re-inserted with a different value");
    }
  }

  void mark(const ExponentVector& a, Provenance provenance) {
    auto it = entries_.find(a);
    if (it != entries_.end()) it->second.provenance = provenance;
  }

  const Entry* entry(const ExponentVector& a) const {
    auto it = entries_.find(a);
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool operator==(const MomentTable&) const = default;

 private:
  std::size_t m_ = 0;
  container entries_;
};

struct EngineLimits {
  unsigned max_power = 8;          // largest node power b in one evaluation
  std::size_t max_variables = 32;  // largest network
  unsigned theta_degree_cap = kDefaultThetaDegreeCap;
};

// n! / prod parts!.
inline std::uint64_t multinomial(unsigned n, std::span<const unsigned> parts) {
  unsigned sum = 0;
  for (unsigned p : parts) sum += p;
  if (sum != n) throw DomainError("multinomial: parts sum to " + std::to_string(sum) + ", not " + std::to_string(n));
  if (n > 20) throw DomainError("multinomial: n > 20 overflows 64 bits");
  std::uint64_t r = 1;
  unsigned placed = 0;
  for (unsigned p : parts) {
    for (unsigned i = 1; i <= p; ++i) {
      ++placed;
      r = r * placed / i;  // running product of binomials stays integral
    }
  }
  return r;
}

inline std::uint64_t multinomial(unsigned n, std::initializer_list<unsigned> parts) {
  return multinomial(n, std::span<const unsigned>(parts.begin(), parts.size()));
}

// Same coefficient in floating point, for powers past the 64-bit range.
inline double multinomial_real(std::span<const unsigned> parts) {
  double r = 1.0;
  unsigned placed = 0;
  for (unsigned p : parts) {
    for (unsigned i = 1; i <= p; ++i) {
      ++placed;
      r = r * placed / i;
    }
  }
  return r;
}

// Calls fn(t) for every t in N^parts with sum(t) = n, in a fixed order.
inline void for_each_composition(unsigned n, std::size_t parts,
                                 const std::function<void(std::span<const unsigned>)>& fn) {
  if (parts == 0) {
    if (n == 0) fn({});
    return;
  }
  std::vector<unsigned> t(parts, 0u);
  t[0] = n;
  while (true) {
    fn(t);
    // Move one unit from the first nonzero slot (before the last) to its
    // right neighbour, resetting the prefix.
    std::size_t i = 0;
    while (i + 1 < parts && t[i] == 0) ++i;
    if (i + 1 >= parts) return;
    const unsigned carry = t[i] - 1;
    t[i] = 0;
    ++t[i + 1];
    t[0] = carry;
  }
}

// Every exponent vector node_moment may read for E[Y_j^b * Y^g]:
// the union over k = 0..b of A_j^{b-k} + g.
inline ExponentSet required_exponents(const NodeModel& model, unsigned b, const ExponentVector& g) {
  ExponentSet out;
  ExponentSet a = model.exponent_set();
  if (a.empty()) a.insert(ExponentVector(g.size()));
  ExponentSet layer{ExponentVector(g.size())};
  for (unsigned k = 0; k <= b; ++k) {
    out.merge(translate(layer, g));
    if (k < b) layer = sumset(layer, a);
  }
  return out;
}

// E[Y_j^b * Y^g] where g is zero at j and above. Reads mu_{a + g} from the
// table for every composition of the node's terms.
inline double node_moment(const NodeModel& model, unsigned b, const ExponentVector& g,
                          const MomentTable& table, const EngineLimits& limits = {},
                          std::string_view name = {}) {
  const std::size_t m = g.size();
  if (m > limits.max_variables) throw OrderError("network exceeds the variable cap");
  if (b > limits.max_power) {
    throw OrderError("power " + std::to_string(b) + " of node '" + std::string(name) + "' exceeds the cap of " +
                     std::to_string(limits.max_power));
  }
  for (std::size_t i = model.index; i < m; ++i) {
    if (g[i] != 0) throw RoutingError("node_moment: g has entries at or above the node's own index");
  }
  if (b == 0) return table.at(g);

  const std::size_t n_terms = model.terms.size();
  ThetaMomentCache theta(model.belief, model.coefficient_ids(), limits.theta_degree_cap);
  double total = 0.0;
  for (unsigned k = 0; k <= b; ++k) {
    const double mk = error_moment(model.error, k, name);
    if (mk == 0.0) continue;
    const double outer = static_cast<double>(binomial(b, k)) * mk;
    const unsigned n = b - k;
    double inner = 0.0;
    for_each_composition(n, n_terms, [&](std::span<const unsigned> t) {
      ExponentVector a = g;
      for (std::size_t i = 0; i < n_terms; ++i) {
        if (t[i] == 0) continue;
        const auto& e = model.terms[i].exponents;
        for (std::size_t x = 0; x < m; ++x) a[x] += t[i] * e[x];
      }
      const double coeff = n <= 20 ? static_cast<double>(multinomial(n, t)) : multinomial_real(t);
      inner += coeff * theta(t) * table.at(a);
    });
    total += outer * inner;
  }
  return total;
}

// prod over founders i of E[Y_i^{a(i)}] under the resolved network.
inline double founder_moment(const Network& net, const ExponentVector& a) {
  if (a.size() != net.size()) throw StructuralError("founder_moment: exponent length differs from network size");
  double r = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    if (!net.is_founder(i)) throw PreconditionError("founder_moment: variable '" + net.names[i] + "' is not a founder");
    r *= founder_raw_moment(net.founder(i), a[i], net.names[i]);
  }
  return r;
}

inline double founder_moment(const Network& net, const ExponentVector& a, const std::string& decision) {
  return founder_moment(resolve_decision(net, decision), a);
}

}  // namespace momentflow
