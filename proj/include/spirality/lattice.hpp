#pragma once

// Slopes and finite-index sublattices of Z^2, expressed in a fixed basis of
// a torus. Lattices are stored in Hermite normal form so that two values
// compare equal exactly when they generate the same subgroup.

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spirality/error.hpp"

namespace spirality {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

template <class I>
I iabs(const I& x) {
  return x < 0 ? I(-x) : x;
}

// Result in [0, |m|).
template <class I>
I floor_mod(const I& x, const I& m) {
  I r = x % m;
  if (r < 0) r += iabs(m);
  return r;
}

template <class I>
I gcd(I a, I b) {
  a = iabs(a);
  b = iabs(b);
  while (b != 0) {
    I t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

// Returns (g, s, r) with s*a + r*b = g = gcd(a, b) >= 0.
template <class I>
std::array<I, 3> ext_gcd(const I& a, const I& b) {
  I old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    I q = old_r / r;
    I tmp = old_r - q * r;
    old_r = std::move(r);
    r = std::move(tmp);
    tmp = old_s - q * s;
    old_s = std::move(s);
    s = std::move(tmp);
    tmp = old_t - q * t;
    old_t = std::move(t);
    t = std::move(tmp);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_r, old_s, old_t};
}

template <class I>
std::int64_t narrow(const I& x) {
  if constexpr (std::is_same_v<I, std::int64_t>) {
    return x;
  } else {
    if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
      throw Error(ErrorCode::InternalInconsistency, "value exceeds 64-bit range");
    return static_cast<std::int64_t>(x);
  }
}

template <class I>
std::string to_decimal(const I& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace detail

template <class I>
struct Vec2 {
  I x{};
  I y{};

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

using IVec = Vec2<std::int64_t>;

template <class I>
I det(const Vec2<I>& u, const Vec2<I>& v) {
  return u.x * v.y - u.y * v.x;
}

/// Primitive element of Z^2 up to sign: the isotopy class of an essential
/// simple closed curve on a torus. Normalized so that p > 0, or p = 0 and q > 0.
class Slope {
 public:
  static Slope from_vector(std::int64_t p, std::int64_t q) {
    if (p == 0 && q == 0) throw Error(ErrorCode::NotPrimitive, "zero vector is not a slope");
    if (detail::gcd(p, q) != 1)
      throw Error(ErrorCode::NotPrimitive,
                  "(" + std::to_string(p) + "," + std::to_string(q) + ") is not primitive");
    if (p < 0 || (p == 0 && q < 0)) {
      p = -p;
      q = -q;
    }
    return Slope(p, q);
  }

  std::int64_t p() const noexcept { return p_; }
  std::int64_t q() const noexcept { return q_; }

  template <class I = std::int64_t>
  Vec2<I> vector() const {
    return {I(p_), I(q_)};
  }

  bool parallel_to(const Slope& other) const noexcept { return *this == other; }

  friend bool operator==(const Slope&, const Slope&) = default;
  friend auto operator<=>(const Slope&, const Slope&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Slope& s) {
    return os << '(' << s.p_ << ',' << s.q_ << ')';
  }

 private:
  Slope(std::int64_t p, std::int64_t q) : p_(p), q_(q) {}
  std::int64_t p_;
  std::int64_t q_;
};

/// k copies of a slope, e.g. a cylinder core that wraps k times, or the
/// element alpha*A*t of a boundary subgroup.
template <class I>
struct ScaledSlope {
  I k;
  Slope s;

  static ScaledSlope from_vector(const I& x, const I& y) {
    if (x == 0 && y == 0) throw Error(ErrorCode::NotPrimitive, "zero vector has no slope");
    I g = detail::gcd(x, y);
    return ScaledSlope{g, Slope::from_vector(detail::narrow(I(x / g)), detail::narrow(I(y / g)))};
  }

  Vec2<I> vector() const { return {k * s.p(), k * s.q()}; }

  friend bool operator==(const ScaledSlope&, const ScaledSlope&) = default;
};

template <class I>
ScaledSlope<I> scaled(const I& k, const Slope& s) {
  if (k < 1) throw Error(ErrorCode::InternalInconsistency, "scale factor must be positive");
  return ScaledSlope<I>{k, s};
}

template <class I>
I det(const Slope& a, const Slope& b) {
  return I(a.p()) * I(b.q()) - I(a.q()) * I(b.p());
}

/// Slopes ordered by max-norm, then p, then q. Returns the first slope t in
/// that order with |det(s, t)| = 1.
inline Slope smallest_complement(const Slope& s) {
  const std::int64_t bound = std::max(std::int64_t{1}, std::max(detail::iabs(s.p()), detail::iabs(s.q())));
  for (std::int64_t n = 1; n <= bound; ++n) {
    for (std::int64_t p = 0; p <= n; ++p) {
      for (std::int64_t q = -n; q <= n; ++q) {
        if (std::max(p, detail::iabs(q)) != n) continue;
        if (p == 0 && q <= 0) continue;
        if (detail::gcd(p, q) != 1) continue;
        if (detail::iabs(s.p() * q - s.q() * p) == 1) return Slope::from_vector(p, q);
      }
    }
  }
  throw Error(ErrorCode::InternalInconsistency, "no complementary slope found");
}

template <class I>
class BasicLattice;

template <class I>
BasicLattice<I> hnf(std::span<const Vec2<I>> gens);

/// Finite-index subgroup of Z^2 in column Hermite normal form
///     | a  b |
///     | 0  d |     a > 0, d > 0, 0 <= b < a.
/// The columns (a,0) and (b,d) generate the subgroup.
template <class I>
class BasicLattice {
 public:
  static BasicLattice full() { return BasicLattice(I(1), I(0), I(1)); }

  /// Rebuilds a lattice from stored HNF entries; throws if they are not canonical.
  static BasicLattice from_hnf(const I& a, const I& b, const I& d) {
    if (a <= 0 || d <= 0 || b < 0 || b >= a)
      throw Error(ErrorCode::RankDeficient, "entries are not in Hermite normal form");
    return BasicLattice(a, b, d);
  }

  const I& a() const noexcept { return a_; }
  const I& b() const noexcept { return b_; }
  const I& d() const noexcept { return d_; }

  I index() const { return a_ * d_; }

  bool contains(const Vec2<I>& v) const {
    if (v.y % d_ != 0) return false;
    I j = v.y / d_;
    return (v.x - b_ * j) % a_ == 0;
  }

  std::array<Vec2<I>, 2> generators() const { return {Vec2<I>{a_, I(0)}, Vec2<I>{b_, d_}}; }

  friend bool operator==(const BasicLattice&, const BasicLattice&) = default;

  friend std::ostream& operator<<(std::ostream& os, const BasicLattice& l) {
    return os << "[[" << l.a_ << ',' << l.b_ << "],[0," << l.d_ << "]]";
  }

 private:
  BasicLattice(I a, I b, I d) : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)) {}
  friend BasicLattice hnf<I>(std::span<const Vec2<I>> gens);

  I a_;
  I b_;
  I d_;
};

using Lattice = BasicLattice<BigInt>;

/// Canonical HNF of the subgroup generated by `gens`.
template <class I>
BasicLattice<I> hnf(std::span<const Vec2<I>> gens) {
  // Euclid on the second coordinate leaves one vector with y = gcd of all y's;
  // everything else collapses onto the x-axis.
  bool have_pivot = false;
  Vec2<I> pivot;
  I axis = 0;
  for (Vec2<I> v : gens) {
    if (v.y == 0) {
      axis = detail::gcd(axis, v.x);
      continue;
    }
    if (!have_pivot) {
      pivot = v;
      have_pivot = true;
      continue;
    }
    while (v.y != 0) {
      I q = pivot.y / v.y;
      pivot.x -= q * v.x;
      pivot.y -= q * v.y;
      std::swap(pivot, v);
    }
    axis = detail::gcd(axis, v.x);
  }
  if (!have_pivot || axis == 0) throw Error(ErrorCode::RankDeficient, "generators span a rank < 2 subgroup");
  if (pivot.y < 0) {
    pivot.x = -pivot.x;
    pivot.y = -pivot.y;
  }
  return BasicLattice<I>(axis, detail::floor_mod(pivot.x, axis), pivot.y);
}

template <class I>
BasicLattice<I> hnf(std::initializer_list<Vec2<I>> gens) {
  return hnf<I>(std::span<const Vec2<I>>(gens.begin(), gens.size()));
}

template <class I>
I index(const BasicLattice<I>& l) {
  return l.index();
}

template <class I>
bool contains(const BasicLattice<I>& l, const Vec2<I>& v) {
  return l.contains(v);
}

/// Z[a] + Z[b] for two non-parallel scaled slopes.
template <class I>
BasicLattice<I> span2(const ScaledSlope<I>& a, const ScaledSlope<I>& b) {
  if (a.s.parallel_to(b.s)) throw Error(ErrorCode::ParallelSlopes, "span2 of parallel slopes");
  return hnf<I>({a.vector(), b.vector()});
}

/// True iff the primitive element generated by `c` lies in `l` with `c` itself
/// not a proper multiple of another lattice element.
template <class I>
bool is_primitive_in(const BasicLattice<I>& l, const ScaledSlope<I>& c) {
  if (!l.contains(c.vector())) return false;
  // c/m in l for some m > 1 iff c/p in l for some prime p | k; checking every
  // divisor is fine at the sizes we see.
  for (I m = 2; m <= c.k; ++m) {
    if (c.k % m != 0) continue;
    ScaledSlope<I> part{I(c.k / m), c.s};
    if (l.contains(part.vector())) return false;
  }
  return true;
}

/// Basis change between the two sides of a decomposition torus: a vector in
/// the end_a basis maps to g * v in the end_b basis.
class Gluing {
 public:
  static Gluing from_rows(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    const std::int64_t det = a * d - b * c;
    if (det != 1 && det != -1)
      throw Error(ErrorCode::NotUnimodular, "gluing matrix has determinant " + std::to_string(det));
    return Gluing({a, b, c, d});
  }

  static Gluing identity() { return Gluing({1, 0, 0, 1}); }

  const std::array<std::int64_t, 4>& entries() const noexcept { return m_; }
  std::int64_t det() const noexcept { return m_[0] * m_[3] - m_[1] * m_[2]; }

  Gluing inverse() const {
    const std::int64_t s = det();
    return Gluing({s * m_[3], -s * m_[1], -s * m_[2], s * m_[0]});
  }

  template <class I>
  Vec2<I> apply(const Vec2<I>& v) const {
    return {m_[0] * v.x + m_[1] * v.y, m_[2] * v.x + m_[3] * v.y};
  }

  Slope apply(const Slope& s) const {
    Vec2<std::int64_t> v = apply(s.vector());
    return Slope::from_vector(v.x, v.y);
  }

  template <class I>
  ScaledSlope<I> apply(const ScaledSlope<I>& s) const {
    return ScaledSlope<I>{s.k, apply(s.s)};
  }

  friend bool operator==(const Gluing&, const Gluing&) = default;

 private:
  explicit Gluing(std::array<std::int64_t, 4> m) : m_(m) {}
  std::array<std::int64_t, 4> m_;
};

/// Transfers a torus subgroup across a gluing. Index is preserved.
template <class I>
BasicLattice<I> apply_gluing(const Gluing& g, const BasicLattice<I>& l) {
  auto gens = l.generators();
  return hnf<I>({g.apply(gens[0]), g.apply(gens[1])});
}

/// Integers (B, B') such that Z[c] + Z[alpha*B*t] == Z[c] + Z[alpha*B'*t'] for
/// every alpha >= 1. A unimodular change of basis moves c to (x, 0); with
/// t = (y, z) and t' = (y', z') there, B = x|z'| and B' = x|z|.
template <class I>
std::pair<I, I> compat_constants(const ScaledSlope<I>& c, const Slope& t, const Slope& t_prime) {
  const Vec2<I> cv = c.vector();
  auto [x, s, r] = detail::ext_gcd(cv.x, cv.y);
  // U = [[s, r], [-cy/x, cx/x]] has det 1 and sends c to (x, 0).
  const I row2_x = -cv.y / x;
  const I row2_y = cv.x / x;
  const I z = row2_x * t.p() + row2_y * t.q();
  const I z_prime = row2_x * t_prime.p() + row2_y * t_prime.q();
  if (z == 0 || z_prime == 0) throw Error(ErrorCode::ParallelSlopes, "slope parallel to the core");
  (void)s;
  (void)r;
  return {x * detail::iabs(z_prime), x * detail::iabs(z)};
}

}  // namespace spirality
