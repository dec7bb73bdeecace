#include "hdcoop/rational.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace hdcoop {

Rational ratio(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational q(s.substr(0, slash) + "/" + s.substr(slash + 1));
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return q;
  }
  bool neg = false;
  size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  mpz_class num = 0, den = 1;
  bool dot = false, digits = false;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '.' && !dot) {
      dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      num = num * 10 + (ch - '0');
      if (dot) den *= 10;
      digits = true;
    } else {
      throw std::invalid_argument("not a rational: " + text);
    }
  }
  if (!digits) throw std::invalid_argument("not a rational: " + text);
  Rational q(num, den);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

Rational rpos(const Rational& q) { return q > 0 ? q : Rational(0); }
Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }
Rational rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }

std::string to_string(const ExtRational& d) {
  return d.infinite ? std::string("inf") : to_string(d.value);
}

double to_double(const ExtRational& d) {
  return d.infinite ? std::numeric_limits<double>::infinity() : d.value.get_d();
}

}  // namespace hdcoop
