#ifndef PREFIA_RATIONAL_HPP
#define PREFIA_RATIONAL_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace prefia {

using Rational = boost::rational<std::int64_t>;

// "num/den" in lowest terms, always with an explicit denominator ("1/1").
std::string to_fraction_string(const Rational& r);

// Fixed-point rendering rounded half away from zero, e.g. 5/14 -> "0.3571".
std::string to_decimal_string(const Rational& r, int places = 4);

// Accepts "num/den" or a bare integer. Throws ParseError otherwise.
Rational parse_fraction(std::string_view text);

}  // namespace prefia

#endif  // PREFIA_RATIONAL_HPP
