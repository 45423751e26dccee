#include "prefia/rational.hpp"

#include <charconv>
#include <cstdlib>

#include "prefia/error.hpp"

namespace prefia {

std::string to_fraction_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string to_decimal_string(const Rational& r, int places) {
  std::int64_t scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;

  const bool negative = r.numerator() < 0;
  const std::int64_t num = negative ? -r.numerator() : r.numerator();
  const std::int64_t den = r.denominator();

  // round(|num| * scale / den), half away from zero
  std::int64_t whole = num / den;
  std::int64_t rem = num % den;
  std::int64_t frac_scaled = (rem * scale * 2 + den) / (2 * den);
  if (frac_scaled == scale) {
    ++whole;
    frac_scaled = 0;
  }

  std::string out = (negative && (whole != 0 || frac_scaled != 0)) ? "-" : "";
  out += std::to_string(whole);
  if (places > 0) {
    std::string frac = std::to_string(frac_scaled);
    out += '.';
    out.append(static_cast<std::size_t>(places) - frac.size(), '0');
    out += frac;
  }
  return out;
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::ParseError,
                "not a rational number: '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational parse_fraction(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  std::int64_t num = parse_int(text.substr(0, slash), text);
  std::int64_t den = parse_int(text.substr(slash + 1), text);
  if (den == 0) {
    throw Error(ErrorCode::ParseError,
                "zero denominator: '" + std::string(text) + "'");
  }
  return Rational(num, den);
}

}  // namespace prefia
