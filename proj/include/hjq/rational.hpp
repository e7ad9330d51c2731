#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "hjq/errors.hpp"

namespace hjq {

// Exact rational coefficients. Arbitrary precision so cancellation in
// long division chains can never overflow.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) {
    if (den == 0) throw Error("rational with zero denominator");
    return Rational(Integer(num), Integer(den));
}

inline bool is_zero(const Rational& r) { return r.is_zero(); }

inline std::string to_string(const Rational& r) { return r.str(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

} // namespace hjq
