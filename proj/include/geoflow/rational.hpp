#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace geoflow {

/// Exact scalar used whenever rank decisions must not depend on float tolerance.
using Rat = mpq_class;

/// Parses "p/q", "p", or a decimal literal such as "-0.25" into an exact rational.
inline Rat parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    Rat r;
    if (r.set_str(text, 10) != 0) throw std::invalid_argument("bad rational literal: " + text);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
    r.canonicalize();
    return r;
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) {
    Rat r;
    if (r.set_str(text, 10) != 0) throw std::invalid_argument("bad integer literal: " + text);
    return r;
  }
  // decimal: digits after the dot become a power-of-ten denominator
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const std::size_t frac_len = text.size() - dot - 1;
  if (frac_len == 0) throw std::invalid_argument("bad decimal literal: " + text);
  mpz_class num;
  if (num.set_str(digits, 10) != 0) throw std::invalid_argument("bad decimal literal: " + text);
  mpz_class den = 1;
  for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
  Rat r(num, den);
  r.canonicalize();
  return r;
}

/// Exact conversion: every finite double is a dyadic rational.
inline Rat rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  Rat r(x);
  r.canonicalize();
  return r;
}

inline std::string rational_to_string(const Rat& r) { return r.get_str(); }

// Small scalar shims so the closure and algebra code can run on both Rat and double.
namespace scal {

inline double to_double(double x) { return x; }
inline double to_double(const Rat& x) { return x.get_d(); }

inline double abs_val(double x) { return std::abs(x); }
inline Rat abs_val(const Rat& x) { return x >= 0 ? x : Rat(-x); }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rat& x) { return sgn(x) == 0; }

template <class S> constexpr bool is_exact = false;
template <> inline constexpr bool is_exact<Rat> = true;

}  // namespace scal

}  // namespace geoflow
