#pragma once

#include <cstdint>
#include <string_view>

#include <boost/rational.hpp>

namespace fspec {

/// Parses "p/q" (integers, exact ratio rounded once) or a decimal literal.
/// Throws Error(parse) on anything else.
double parse_real(std::string_view text);

using Rational = boost::rational<std::int64_t>;

/// Exact value of "p/q", an integer or a finite decimal such as "0.75".
Rational parse_rational(std::string_view text);

}  // namespace fspec
