#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <string>
#include <string_view>

namespace qlab {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "1/4" or "0/7" (non-negative, no sign, no spaces).
Rational parse_rational(std::string_view text);

/// Canonical text form: "1/8", "0", "1".
std::string to_string(const Rational& r);

/// An exact probability in [0, 1].
class ExactProb {
 public:
  ExactProb() = default;
  explicit ExactProb(Rational value);
  ExactProb(long num, long den) : ExactProb(Rational(num) / den) {}

  static ExactProb zero() { return ExactProb(); }
  static ExactProb one() { return ExactProb(Rational(1)); }
  static ExactProb parse(std::string_view text);

  const Rational& value() const noexcept { return value_; }
  std::string str() const { return to_string(value_); }

  friend ExactProb operator*(const ExactProb& a, const ExactProb& b) {
    return ExactProb(a.value_ * b.value_);
  }
  ExactProb& operator*=(const ExactProb& o) {
    value_ *= o.value_;
    return *this;
  }
  friend bool operator==(const ExactProb& a, const ExactProb& b) {
    return a.value_ == b.value_;
  }
  friend auto operator<=>(const ExactProb& a, const ExactProb& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Rational value_{0};
};

}  // namespace qlab
