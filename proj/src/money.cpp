#include "gabm/money.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "gabm/errors.hpp"

namespace gabm {

Money Money::from_dollars(double dollars) {
  return Money(static_cast<int64_t>(std::llround(dollars * 100.0)));
}

Money Money::parse(std::string_view text) {
  size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  std::string_view s = text.substr(b, e - b);
  if (!s.empty() && s.front() == '$') s.remove_prefix(1);
  if (s.empty()) throw ParseError(ParseError::Kind::bad_amount, "empty currency amount");
  if (s.front() == '-')
    throw ParseError(ParseError::Kind::bad_amount,
                     "negative currency amount: " + std::string(text));

  int64_t whole = 0;
  size_t i = 0;
  bool any_digit = false;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
    whole = whole * 10 + (s[i] - '0');
    any_digit = true;
  }
  int64_t frac = 0;
  if (i < s.size()) {
    if (s[i] != '.')
      throw ParseError(ParseError::Kind::bad_amount,
                       "malformed currency amount: " + std::string(text));
    ++i;
    size_t digits = 0;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, ++digits)
      frac = frac * 10 + (s[i] - '0');
    if (digits == 0 || digits > 2)
      throw ParseError(ParseError::Kind::bad_amount,
                       "currency amount needs 1-2 decimals: " + std::string(text));
    if (digits == 1) frac *= 10;
    any_digit = true;
  }
  if (!any_digit || i != s.size())
    throw ParseError(ParseError::Kind::bad_amount,
                     "malformed currency amount: " + std::string(text));
  return Money(whole * 100 + frac);
}

std::string Money::str() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld",
                static_cast<long long>(cents_ / 100),
                static_cast<long long>(cents_ % 100));
  return buf;
}

std::string Money::str_with_symbol() const { return "$" + str(); }

}  // namespace gabm
