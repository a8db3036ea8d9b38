#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bvflow {

// (-1)^k for any integer k.
inline int sgn_pow(long k) { return (k % 2 == 0) ? 1 : -1; }
inline bool odd(long k) { return k % 2 != 0; }

enum class ScalarMode { Rational, Float };

template <class T> struct Scalar;

template <> struct Scalar<mpq_class> {
  static constexpr bool exact = true;
  static constexpr ScalarMode mode = ScalarMode::Rational;
  static mpq_class from_int(long n) { return mpq_class(n); }
  static mpq_class frac(long n, long d) {
    mpq_class q(n, d);
    q.canonicalize();
    return q;
  }
  static bool is_zero(const mpq_class& x) { return sgn(x) == 0; }
  static mpq_class abs(const mpq_class& x) { return ::abs(x); }
  static double to_double(const mpq_class& x) { return x.get_d(); }
  static std::string str(const mpq_class& x) { return x.get_str(); }
  // Accepts "p", "p/q" and "-p/q".
  static mpq_class parse(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal '" + s + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  }
  static mpq_class from_double(double) {
    throw std::invalid_argument("float literal in rational mode; use \"p/q\" strings");
  }
};

template <> struct Scalar<double> {
  static constexpr bool exact = false;
  static constexpr ScalarMode mode = ScalarMode::Float;
  static double from_int(long n) { return static_cast<double>(n); }
  static double frac(long n, long d) { return static_cast<double>(n) / static_cast<double>(d); }
  static bool is_zero(double x) { return x == 0.0; }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static std::string str(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  static double parse(const std::string& s) {
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad scalar literal '" + s + "'");
    }
  }
  static double from_double(double x) { return x; }
};

}  // namespace bvflow
