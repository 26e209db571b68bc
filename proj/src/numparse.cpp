#include "fspec/numparse.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/rational.hpp>

#include "fspec/error.hpp"

namespace fspec {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    fail(ErrorCode::parse, "not a number: '" + std::string(whole) + "'");
  return v;
}

}  // namespace

double parse_real(std::string_view text) {
  const std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::int64_t p = parse_int(trim(s.substr(0, slash)), s);
    std::int64_t q = parse_int(trim(s.substr(slash + 1)), s);
    if (q == 0) fail(ErrorCode::parse, "zero denominator in '" + std::string(s) + "'");
    boost::rational<std::int64_t> r(p, q);
    // exact when both parts fit in a double mantissa
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
  }
  std::string buf(s);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::parse, "not a number: '" + buf + "'");
  }
  if (used != buf.size() || !std::isfinite(v)) fail(ErrorCode::parse, "not a number: '" + buf + "'");
  return v;
}

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::int64_t p = parse_int(trim(s.substr(0, slash)), s);
    std::int64_t q = parse_int(trim(s.substr(slash + 1)), s);
    if (q == 0) fail(ErrorCode::parse, "zero denominator in '" + std::string(s) + "'");
    return Rational(p, q);
  }
  std::string_view body = s;
  bool neg = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto dot = body.find('.');
  std::string digits(body.substr(0, dot));
  std::int64_t den = 1;
  if (dot != std::string_view::npos) {
    std::string_view frac = body.substr(dot + 1);
    if (frac.size() > 15) fail(ErrorCode::parse, "too many decimals for an exact value: '" + std::string(s) + "'");
    digits += frac;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 18)
    fail(ErrorCode::parse, "not an exact number: '" + std::string(s) + "'");
  std::int64_t num = parse_int(digits, s);
  return Rational(neg ? -num : num, den);
}

}  // namespace fspec
