#pragma once

// Monomial exponent vectors and the set algebra built on them: product-order
// dominance, corner points, closures, powers and translations of sets.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "momentflow/error.hpp"

namespace momentflow {

// Dense exponent vector over the m globally ordered variables. Position k
// holds the power of variable k (0-based). The all-zero vector is the
// constant monomial 1.
class ExponentVector {
 public:
  using value_type = unsigned;

  ExponentVector() = default;
  explicit ExponentVector(std::size_t m) : e_(m, 0u) {}
  ExponentVector(std::initializer_list<unsigned> entries) : e_(entries) {}
  explicit ExponentVector(std::vector<unsigned> entries) : e_(std::move(entries)) {}

  static ExponentVector unit(std::size_t m, std::size_t index, unsigned power = 1) {
    ExponentVector v(m);
    v.e_.at(index) = power;
    return v;
  }

  std::size_t size() const noexcept { return e_.size(); }
  unsigned operator[](std::size_t i) const noexcept { return e_[i]; }
  unsigned& operator[](std::size_t i) noexcept { return e_[i]; }
  unsigned at(std::size_t i) const { return e_.at(i); }

  auto begin() const noexcept { return e_.begin(); }
  auto end() const noexcept { return e_.end(); }
  const std::vector<unsigned>& entries() const noexcept { return e_; }

  bool is_zero() const noexcept {
    return std::all_of(e_.begin(), e_.end(), [](unsigned x) { return x == 0; });
  }

  unsigned total_degree() const noexcept {
    unsigned d = 0;
    for (unsigned x : e_) d += x;
    return d;
  }

  // Highest position with a nonzero entry; empty for the zero vector.
  std::optional<std::size_t> leading_index() const noexcept {
    for (std::size_t i = e_.size(); i-- > 0;) {
      if (e_[i] != 0) return i;
    }
    return std::nullopt;
  }

  // Copy with every position above `index` set to zero.
  ExponentVector truncated(std::size_t index) const {
    ExponentVector r = *this;
    for (std::size_t i = index + 1; i < r.e_.size(); ++i) r.e_[i] = 0;
    return r;
  }

  ExponentVector with_entry(std::size_t index, unsigned value) const {
    ExponentVector r = *this;
    r.e_.at(index) = value;
    return r;
  }

  ExponentVector& operator+=(const ExponentVector& other) {
    require_same_length(other, "addition");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += other.e_[i];
    return *this;
  }

  friend ExponentVector operator+(ExponentVector lhs, const ExponentVector& rhs) {
    lhs += rhs;
    return lhs;
  }

  friend ExponentVector operator*(unsigned scale, ExponentVector v) {
    for (auto& x : v.e_) x *= scale;
    return v;
  }

  bool operator==(const ExponentVector&) const = default;

  // Lexicographic with the last position most significant; shorter vectors
  // sort first (vectors of different length are never mixed in one set).
  std::strong_ordering operator<=>(const ExponentVector& other) const noexcept {
    if (auto c = e_.size() <=> other.e_.size(); c != 0) return c;
    for (std::size_t i = e_.size(); i-- > 0;) {
      if (auto c = e_[i] <=> other.e_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  void require_same_length(const ExponentVector& other, const char* what) const {
    if (e_.size() != other.e_.size()) {
      throw StructuralError(std::string("exponent vector length mismatch in ") + what + ": " +
                            std::to_string(e_.size()) + " vs " + std::to_string(other.e_.size()));
    }
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < e_.size(); ++i) os << (i ? "," : "") << e_[i];
    os << ')';
    return os.str();
  }

 private:
  std::vector<unsigned> e_;
};

// Duplicate-free, deterministically ordered set of exponent vectors.
class ExponentSet {
 public:
  using container = std::set<ExponentVector>;
  using const_iterator = container::const_iterator;

  ExponentSet() = default;
  ExponentSet(std::initializer_list<ExponentVector> vs) : s_(vs) {}
  template <typename It>
  ExponentSet(It first, It last) : s_(first, last) {}

  bool insert(const ExponentVector& v) { return s_.insert(v).second; }
  bool insert(ExponentVector&& v) { return s_.insert(std::move(v)).second; }
  void merge(const ExponentSet& other) { s_.insert(other.s_.begin(), other.s_.end()); }
  bool contains(const ExponentVector& v) const { return s_.count(v) != 0; }
  bool erase(const ExponentVector& v) { return s_.erase(v) != 0; }

  std::size_t size() const noexcept { return s_.size(); }
  bool empty() const noexcept { return s_.empty(); }
  const_iterator begin() const noexcept { return s_.begin(); }
  const_iterator end() const noexcept { return s_.end(); }
  const ExponentVector& front() const { return *s_.begin(); }

  // Common vector length, or nullopt for the empty set.
  std::optional<std::size_t> dimension() const {
    if (s_.empty()) return std::nullopt;
    return s_.begin()->size();
  }

  bool is_subset_of(const ExponentSet& other) const {
    return std::includes(other.s_.begin(), other.s_.end(), s_.begin(), s_.end());
  }

  bool operator==(const ExponentSet&) const = default;

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& v : s_) {
      if (!first) out += ", ";
      out += v.to_string();
      first = false;
    }
    return out + "}";
  }

 private:
  container s_;
};

inline std::ostream& operator<<(std::ostream& os, const ExponentVector& v) { return os << v.to_string(); }
inline std::ostream& operator<<(std::ostream& os, const ExponentSet& s) { return os << s.to_string(); }

// True iff a <= b componentwise (a is dominated by b under the product order).
inline bool dominated_by(const ExponentVector& a, const ExponentVector& b) {
  a.require_same_length(b, "dominance test");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

// Maximal elements of A under the product order.
inline ExponentSet corner_points(const ExponentSet& set) {
  if (set.empty()) throw DomainError("corner_points: empty exponent set");
  std::vector<ExponentVector> members(set.begin(), set.end());
  // Sorting by descending total degree lets each candidate be checked only
  // against corners already accepted: a strict dominator has larger degree.
  std::stable_sort(members.begin(), members.end(),
                   [](const ExponentVector& x, const ExponentVector& y) {
                     return x.total_degree() > y.total_degree();
                   });
  std::vector<ExponentVector> corners;
  for (const auto& candidate : members) {
    bool dominated = std::any_of(corners.begin(), corners.end(), [&](const ExponentVector& c) {
      return dominated_by(candidate, c);
    });
    if (!dominated) corners.push_back(candidate);
  }
  return ExponentSet(corners.begin(), corners.end());
}

namespace detail {

inline void enumerate_box(const ExponentVector& corner, ExponentSet& out) {
  ExponentVector v(corner.size());
  while (true) {
    out.insert(v);
    std::size_t i = 0;
    while (i < v.size() && v[i] == corner[i]) {
      v[i] = 0;
      ++i;
    }
    if (i == v.size()) return;
    ++v[i];
  }
}

}  // namespace detail

// Every vector dominated by some member of `corners`, the zero vector included.
inline ExponentSet closure(const ExponentSet& corners) {
  ExponentSet out;
  for (const auto& c : corners) detail::enumerate_box(c, out);
  return out;
}

// Members of closure(corners) whose leading index is exactly `index`. This is
// the form a donation set takes once the zero vector and monomials owned by
// lower panels are excluded.
inline ExponentSet leading_closure(const ExponentSet& corners, std::size_t index) {
  ExponentSet out;
  for (const auto& c : corners) {
    if (index >= c.size() || c[index] == 0) continue;
    ExponentVector box = c.truncated(index);
    ExponentSet tmp;
    detail::enumerate_box(box, tmp);
    for (const auto& v : tmp) {
      if (v[index] != 0) out.insert(v);
    }
  }
  return out;
}

// {a + g : a in A, g in G}.
inline ExponentSet sumset(const ExponentSet& a, const ExponentSet& g) {
  ExponentSet out;
  for (const auto& x : a) {
    for (const auto& y : g) out.insert(x + y);
  }
  return out;
}

// All b-fold sums of members of A (with repetition); {0} for b = 0.
inline ExponentSet power_set(const ExponentSet& set, unsigned b) {
  auto m = set.dimension();
  if (!m) throw DomainError("power_set: empty exponent set");
  ExponentSet acc{ExponentVector(*m)};
  for (unsigned k = 0; k < b; ++k) acc = sumset(acc, set);
  return acc;
}

// {a + g : a in A}.
inline ExponentSet translate(const ExponentSet& set, const ExponentVector& g) {
  ExponentSet out;
  for (const auto& a : set) out.insert(a + g);
  return out;
}

// Corner points of A^b computed from the corner points of A alone.
inline ExponentSet powered_corners(const ExponentSet& corners, unsigned b) {
  if (b == 0) throw DomainError("powered_corners: power must be positive");
  return corner_points(power_set(corners, b));
}

// Corner points of the union of A^{b_i} over the given scales; only the
// largest scale contributes.
inline ExponentSet scaled_union_corners(const std::vector<unsigned>& scales,
                                        const ExponentSet& corners) {
  if (scales.empty()) throw DomainError("scaled_union_corners: no scales given");
  unsigned top = *std::max_element(scales.begin(), scales.end());
  return powered_corners(corners, top);
}

// Corner points of G + bA = {g + b*a}, using only the corners of G and A.
inline ExponentSet sum_set_corners(const ExponentSet& g_corners, unsigned b,
                                   const ExponentSet& a_corners) {
  if (b == 0) throw DomainError("sum_set_corners: scale must be positive");
  ExponentSet candidates;
  for (const auto& g : g_corners) {
    for (const auto& a : a_corners) candidates.insert(g + b * a);
  }
  return corner_points(candidates);
}

struct CountBounds {
  std::uint64_t lower = 0;
  std::uint64_t upper = 0;
  bool operator==(const CountBounds&) const = default;
};

// Bounds on the closure size: max and sum over corners of prod(a*(i) + 1).
inline CountBounds count_bounds(const ExponentSet& corners) {
  if (corners.empty()) throw DomainError("count_bounds: empty corner set");
  CountBounds out;
  for (const auto& c : corners) {
    std::uint64_t box = 1;
    for (unsigned x : c) box *= static_cast<std::uint64_t>(x) + 1;
    out.lower = std::max(out.lower, box);
    out.upper += box;
  }
  return out;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace momentflow
