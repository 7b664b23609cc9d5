#include "layerforge/rational.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <stdexcept>

namespace layerforge {
namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t value = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (s.empty() || ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("invalid rational '" + std::string(whole) + "'");
  }
  return value;
}

std::int64_t pow10(int e, std::string_view whole) {
  std::int64_t p = 1;
  for (int i = 0; i < e; ++i) {
    if (p > std::numeric_limits<std::int64_t>::max() / 10) {
      throw std::invalid_argument("rational out of range '" + std::string(whole) + "'");
    }
    p *= 10;
  }
  return p;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  int exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    exponent = static_cast<int>(parse_int(s.substr(e + 1), whole));
    s = s.substr(0, e);
  }
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  int frac_digits = 0;
  bool seen_point = false;
  for (char c : s) {
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw std::invalid_argument("invalid rational '" + std::string(whole) + "'");
    }
  }
  if (digits.empty()) {
    throw std::invalid_argument("invalid rational '" + std::string(whole) + "'");
  }
  // Strip leading zeros so long zero-padded literals still fit.
  auto nz = digits.find_first_not_of('0');
  digits = nz == std::string::npos ? "0" : digits.substr(nz);
  Rational value(parse_int(digits, whole));
  exponent -= frac_digits;
  if (exponent >= 0) {
    value *= pow10(exponent, whole);
  } else {
    value /= pow10(-exponent, whole);
  }
  return negative ? -value : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto begin = text.find_first_not_of(" \t");
  auto end = text.find_last_not_of(" \t");
  if (begin == std::string_view::npos) {
    throw std::invalid_argument("empty rational");
  }
  std::string_view s = text.substr(begin, end - begin + 1);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::int64_t num = parse_int(s.substr(0, slash), text);
    std::int64_t den = parse_int(s.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (s.find_first_of(".eE") != std::string_view::npos) return parse_decimal(s, text);
  return Rational(parse_int(s, text));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

bool has_finite_decimal(const Rational& r) {
  std::int64_t d = r.denominator();
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

std::string to_decimal(const Rational& r) {
  if (!has_finite_decimal(r)) {
    throw std::domain_error("no finite decimal for " + to_string(r));
  }
  if (r.denominator() == 1) return std::to_string(r.numerator());
  std::int64_t num = r.numerator();
  std::int64_t den = r.denominator();
  std::string sign = num < 0 ? "-" : "";
  std::int64_t a = num < 0 ? -num : num;
  std::string out = sign + std::to_string(a / den) + ".";
  std::int64_t rem = a % den;
  while (rem != 0) {
    rem *= 10;
    out.push_back(static_cast<char>('0' + rem / den));
    rem %= den;
  }
  return out;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

std::int64_t ceil(const Rational& r) { return ceil_div(r.numerator(), r.denominator()); }

}  // namespace layerforge
