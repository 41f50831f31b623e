#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace tasched {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Fixed-point decimal rendering, rounded half away from zero.
std::string format_decimal(const Rational& r, int digits = 6);

}  // namespace tasched
