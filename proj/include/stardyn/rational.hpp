#pragma once

// Exact rational arithmetic used by every map, witness and certificate.

#include <boost/multiprecision/gmp.hpp>

#include <string>

namespace stardyn {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// "num/den" with den > 0; integers still carry "/1" so the wire form is uniform.
inline std::string to_string(const Rational& q)
{
  return numerator(q).str() + "/" + denominator(q).str();
}

// Accepts "num/den" or a bare integer.
Rational parse_rational(const std::string& text);

}  // namespace stardyn
