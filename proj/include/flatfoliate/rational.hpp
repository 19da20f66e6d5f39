#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "flatfoliate/error.hpp"

namespace flatfoliate {

using Integer = mpz_class;
using Rational = mpq_class;  // GMP keeps it reduced with a positive denominator

/// p/q in lowest terms; mpq_class(p, q) alone does not reduce.
inline Rational ratio(const Integer& p, const Integer& q) {
  if (q == 0) throw Error(ErrorCode::InvalidCounts, "zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

inline int sign(const Integer& x) { return sgn(x); }
inline int sign(const Rational& x) { return sgn(x); }

/// Parses "p/q", "p" or "-p/q". The denominator must be positive.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&](const char* why) {
    return Error(ErrorCode::ParseError, "rational '" + s + "': " + why);
  };
  if (s.empty()) throw bad("empty");
  auto valid_int = [](std::string_view t, bool allow_sign) {
    if (t.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (t[0] == '-' || t[0] == '+')) i = 1;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  if (!valid_int(num, true)) throw bad("bad numerator");
  if (!valid_int(den, false)) throw bad("bad denominator");
  Integer d(den);
  if (d == 0) throw bad("zero denominator");
  Rational r{Integer(num), d};
  r.canonicalize();
  return r;
}

/// Always "p/q", so zero prints as "0/1".
inline std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

/// k (k+1) ... (k+n), the number of ordered sheet tuples around a type-I vertex.
inline Integer rising_product(std::int64_t k, int n) {
  Integer p = 1;
  for (int i = 0; i <= n; ++i) p *= Integer(static_cast<long>(k + i));
  return p;
}

inline Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline Integer binomial(int n, int k) {
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return b;
}

}  // namespace flatfoliate
