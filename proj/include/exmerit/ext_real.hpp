#pragma once

#include <cassert>
#include <cmath>

namespace exmerit {

/// Extended real value: either a finite double or +infinity.
///
/// Merit functions take the value +infinity outside their effective domain;
/// this type keeps that case distinct from floating-point overflow so that
/// arithmetic never mixes a sentinel into finite computations.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : value_(v) {}  // NOLINT: implicit by design

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }

  /// Finite value. Must not be called on +infinity.
  constexpr double value() const {
    assert(!infinite_);
    return value_;
  }

  /// Finite value, or `fallback` for +infinity.
  constexpr double value_or(double fallback) const {
    return infinite_ ? fallback : value_;
  }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
    if (!a.is_finite() || !b.is_finite()) return infinity();
    return ExtReal(a.value_ + b.value_);
  }

  friend constexpr bool operator<(ExtReal a, ExtReal b) {
    if (!b.is_finite()) return a.is_finite();
    if (!a.is_finite()) return false;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(ExtReal a, ExtReal b) { return !(b < a); }
  friend constexpr bool operator>(ExtReal a, ExtReal b) { return b < a; }
  friend constexpr bool operator>=(ExtReal a, ExtReal b) { return !(a < b); }
  friend constexpr bool operator==(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace exmerit
