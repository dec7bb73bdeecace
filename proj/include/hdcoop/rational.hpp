#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace hdcoop {

using Rational = mpq_class;

// Canonical p/q (the two-argument mpq constructor does not reduce).
Rational ratio(long p, long q);
std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);  // "p/q", integers, or finite decimals
Rational rpos(const Rational& q);
Rational rmax(const Rational& a, const Rational& b);
Rational rmin(const Rational& a, const Rational& b);

// Nonnegative rational extended by +infinity.
struct ExtRational {
  bool infinite = false;
  Rational value = 0;

  static ExtRational inf() { return {true, 0}; }
  static ExtRational of(const Rational& q) { return {false, q}; }
  bool operator==(const ExtRational& o) const {
    return infinite == o.infinite && (infinite || value == o.value);
  }
  bool operator<(const ExtRational& o) const {
    if (infinite) return false;
    if (o.infinite) return true;
    return value < o.value;
  }
};

std::string to_string(const ExtRational& d);
double to_double(const ExtRational& d);

}  // namespace hdcoop
