#include "ucnc/rational.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace ucnc {
namespace {

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

mpz_class parse_integer(const std::string& s) {
  if (!is_integer_literal(s)) throw std::invalid_argument("not an integer: '" + s + "'");
  return mpz_class(s[0] == '+' ? s.substr(1) : s, 10);
}

// Exact value of a decimal literal such as "-12.5e-3".
Rational parse_decimal(const std::string& s) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
    negative = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long long fraction_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++fraction_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("malformed number: '" + s + "'");
  long long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("malformed number: '" + s + "'");
    std::string exp_text = s.substr(pos + 1);
    if (!is_integer_literal(exp_text)) throw std::invalid_argument("malformed exponent: '" + s + "'");
    exponent = std::stoll(exp_text);
    if (exponent > 400 || exponent < -400) throw std::invalid_argument("exponent out of range: '" + s + "'");
  }
  mpz_class mantissa(digits, 10);
  long long scale = exponent - fraction_digits;
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational value = scale >= 0 ? Rational(mantissa * power) : Rational(mantissa, power);
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational limit_denominator(const Rational& value, std::int64_t max_den) {
  if (value.get_den() <= max_den) return value;
  // Continued-fraction convergents with a final semiconvergent check.
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  mpz_class n = value.get_num();
  mpz_class d = value.get_den();
  const mpz_class bound = max_den;
  while (true) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    mpz_class q2 = q0 + a * q1;
    if (q2 > bound) break;
    mpz_class p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    mpz_class r = n - a * d;
    n = d;
    d = r;
    if (d == 0) break;
  }
  mpz_class k = (bound - q0) / q1;
  Rational lower(p0 + k * p1, q0 + k * q1);
  Rational upper(p1, q1);
  lower.canonicalize();
  upper.canonicalize();
  return abs(upper - value) <= abs(lower - value) ? upper : lower;
}

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    mpz_class num = parse_integer(trim(s.substr(0, slash)));
    mpz_class den = parse_integer(trim(s.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
    Rational value(num, den);
    value.canonicalize();
    return value;
  }
  if (is_integer_literal(s)) return Rational(parse_integer(s));
  return limit_denominator(parse_decimal(s), kMaxDenominator);
}

Rational rational_from_double(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (result.ec != std::errc()) throw std::invalid_argument("cannot format double");
  return parse_rational(std::string_view(buffer, static_cast<std::size_t>(result.ptr - buffer)));
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

}  // namespace ucnc
