#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace tslp {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// log2 of a positive integer, accurate to ~1e-15 relative.
double log2_bigint(const BigInt& x);

/// log2 of a positive rational.
double log2_rational(const BigRational& r);

}  // namespace tslp
