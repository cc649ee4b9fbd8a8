#pragma once

#include <string>
#include <utility>
#include <vector>

#include "borderlab/scalar.hpp"

namespace borderlab {

// Univariate polynomial over Q, coefficients low to high, no trailing zeros.
class QPoly {
 public:
  QPoly() = default;
  QPoly(const Rational& c) { if (sgn(c) != 0) c_.push_back(c); }  // NOLINT(google-explicit-constructor)
  QPoly(long c) : QPoly(Rational(c)) {}                            // NOLINT(google-explicit-constructor)
  explicit QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

  static QPoly x() { return QPoly(std::vector<Rational>{Rational(0), Rational(1)}); }

  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& lead() const { return c_.back(); }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }

  Rational eval(const Rational& x) const;
  QPoly monic() const;
  std::string to_string() const;

  friend QPoly operator+(const QPoly& a, const QPoly& b);
  friend QPoly operator-(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  QPoly operator-() const;
  friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

  // Returns (quotient, remainder); divisor nonzero.
  static std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
  static QPoly gcd(QPoly a, QPoly b);

 private:
  void trim() {
    while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

template <>
struct ScalarTraits<QPoly> {
  static constexpr const char* name = "qpoly";
  static QPoly zero() { return {}; }
  static QPoly one() { return QPoly(1); }
  static bool is_zero(const QPoly& x) { return x.is_zero(); }
  static std::string str(const QPoly& x) { return x.to_string(); }
};

}  // namespace borderlab
