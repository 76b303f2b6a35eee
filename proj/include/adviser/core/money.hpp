#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace adviser {

// Currency amount held as an integer count of tenths of a unit, so the
// 0.1 phone-call cost and every budget comparison are exact.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money tenths(std::int64_t t) {
    Money m;
    m.tenths_ = t;
    return m;
  }
  static Money units(double u) { return tenths(std::llround(u * 10.0)); }

  constexpr std::int64_t in_tenths() const { return tenths_; }
  constexpr double in_units() const { return static_cast<double>(tenths_) / 10.0; }

  constexpr Money& operator+=(Money o) {
    tenths_ += o.tenths_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    tenths_ -= o.tenths_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return a += b; }
  friend constexpr Money operator-(Money a, Money b) { return a -= b; }
  friend constexpr Money operator*(Money a, std::int64_t k) { return tenths(a.tenths_ * k); }
  friend constexpr Money operator*(std::int64_t k, Money a) { return tenths(a.tenths_ * k); }
  friend constexpr auto operator<=>(Money, Money) = default;

  // Exact decimal rendering, e.g. "36.3" or "-0.5".
  std::string str() const {
    const std::int64_t mag = std::llabs(tenths_);
    std::string s = tenths_ < 0 ? "-" : "";
    s += std::to_string(mag / 10);
    s += '.';
    s += std::to_string(mag % 10);
    return s;
  }

 private:
  std::int64_t tenths_ = 0;
};

}  // namespace adviser
