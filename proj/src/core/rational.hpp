// Exact integer/rational arithmetic for the combinatorial identities.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace ncx {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt big_factorial(int n) {
  BigInt r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

inline BigInt big_pow2(int n) { return BigInt(1) << n; }

inline Rational rat_pow(const Rational& x, int n) {
  Rational r = 1;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

}  // namespace ncx
