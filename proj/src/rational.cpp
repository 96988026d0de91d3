#include "qlab/rational.hpp"

#include "qlab/errors.hpp"

#include <algorithm>
#include <cctype>

namespace qlab {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const auto num = text.substr(0, slash);
  const auto den =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den))
    throw InvalidProbability("not a non-negative rational: '" + std::string(text) + "'");
  const boost::multiprecision::cpp_int d{std::string(den)};
  if (d == 0) throw InvalidProbability("zero denominator: '" + std::string(text) + "'");
  const boost::multiprecision::cpp_int n{std::string(num)};
  return Rational(n, d);
}

std::string to_string(const Rational& r) { return r.str(); }

ExactProb::ExactProb(Rational value) : value_(std::move(value)) {
  if (value_ < 0 || value_ > 1)
    throw InvalidProbability("value outside [0,1]: " + to_string(value_));
}

ExactProb ExactProb::parse(std::string_view text) { return ExactProb(parse_rational(text)); }

}  // namespace qlab
