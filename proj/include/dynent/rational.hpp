#pragma once

// Exact rational arithmetic used by the Markov machinery and the fermionic
// path probabilities. All chain data (transition probabilities, measures)
// stays rational; entropies convert to double at the last step.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

namespace dynent {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// num/den as a double without overflowing the intermediate conversions;
// both operands may be thousands of bits wide.
inline double big_ratio_to_double(const BigInt& num, const BigInt& den) {
  if (num.is_zero()) return 0.0;
  if (den.is_zero()) throw std::domain_error("big_ratio_to_double: zero denominator");
  const bool negative = (num < 0) != (den < 0);
  const BigInt n = abs(num), d = abs(den);
  const auto bn = static_cast<long>(boost::multiprecision::msb(n));
  const auto bd = static_cast<long>(boost::multiprecision::msb(d));
  const long sn = bn > 62 ? bn - 62 : 0;
  const long sd = bd > 62 ? bd - 62 : 0;
  const auto mn = static_cast<double>(static_cast<std::uint64_t>(n >> sn));
  const auto md = static_cast<double>(static_cast<std::uint64_t>(d >> sd));
  const double v = std::ldexp(mn / md, static_cast<int>(sn - sd));
  return negative ? -v : v;
}

inline double to_double(const Rational& q) {
  return big_ratio_to_double(numerator(q), denominator(q));
}

inline std::string to_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

}  // namespace dynent
