#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace orderbench {

/// Exact rational used for every metric value; converted to floating point only for rendering.
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& r);

/// Inverse of to_string. Throws DataError on malformed input.
Rational parse_rational(std::string_view text);

/// Rounds to one decimal place, half away from zero, and returns the result in tenths.
int round_to_tenths(const Rational& r);

/// Renders a tenths count as a decimal label, e.g. 2 -> "0.2", 10 -> "1.0".
std::string tenths_label(int tenths);

} // namespace orderbench
