#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace layerforge {

// Exact rational used for every weight, objective value and scaling factor.
using Rational = boost::rational<std::int64_t>;

// Accepts "p", "p/q", "-p/q" and plain decimals such as "1.25" or "3e-2".
// Throws std::invalid_argument on anything else or a zero denominator.
Rational parse_rational(std::string_view text);

// "p" when the denominator is one, "p/q" otherwise.
std::string to_string(const Rational& r);

// Exact decimal text when the denominator is 2^a * 5^b; otherwise throws
// std::domain_error.
std::string to_decimal(const Rational& r);

bool has_finite_decimal(const Rational& r);

std::int64_t ceil_div(std::int64_t a, std::int64_t b);

// Smallest integer >= r.
std::int64_t ceil(const Rational& r);

}  // namespace layerforge
