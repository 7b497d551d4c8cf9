#pragma once

#include <ostream>
#include <string>

#include "spirality/error.hpp"
#include "spirality/lattice.hpp"

namespace spirality {

/// Exact positive rational, always stored reduced.
class SpiralityValue {
 public:
  SpiralityValue() : num_(1), den_(1) {}

  SpiralityValue(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (num_ <= 0 || den_ <= 0)
      throw Error(ErrorCode::InternalInconsistency, "spirality values must be positive");
    reduce();
  }

  static SpiralityValue one() { return {}; }

  const BigInt& numerator() const noexcept { return num_; }
  const BigInt& denominator() const noexcept { return den_; }
  bool is_one() const { return num_ == 1 && den_ == 1; }

  SpiralityValue inverse() const { return SpiralityValue(den_, num_); }

  SpiralityValue pow(unsigned n) const {
    SpiralityValue r;
    for (unsigned i = 0; i < n; ++i) r *= *this;
    return r;
  }

  SpiralityValue& operator*=(const SpiralityValue& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    reduce();
    return *this;
  }

  friend SpiralityValue operator*(SpiralityValue a, const SpiralityValue& b) { return a *= b; }
  friend SpiralityValue operator/(SpiralityValue a, const SpiralityValue& b) { return a *= b.inverse(); }

  friend bool operator==(const SpiralityValue&, const SpiralityValue&) = default;

  std::string to_string() const { return detail::to_decimal(num_) + "/" + detail::to_decimal(den_); }

  friend std::ostream& operator<<(std::ostream& os, const SpiralityValue& v) { return os << v.to_string(); }

 private:
  void reduce() {
    BigInt g = detail::gcd(num_, den_);
    if (g != 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

}  // namespace spirality
