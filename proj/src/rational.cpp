#include "tasched/rational.hpp"

#include <stdexcept>

namespace tasched {

std::string format_decimal(const Rational& r, int digits) {
  if (digits < 0) throw std::invalid_argument("format_decimal: negative digit count");
  using boost::multiprecision::cpp_int;
  const bool negative = r < 0;
  const Rational a = negative ? Rational(-r) : r;
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const cpp_int num = boost::multiprecision::numerator(a) * scale;
  const cpp_int den = boost::multiprecision::denominator(a);
  cpp_int q = num / den;
  if ((num % den) * 2 >= den) ++q;
  std::string s = q.str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  if (negative && q != 0) s.insert(0, "-");
  return s;
}

}  // namespace tasched
