#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace borderlab {

using Rational = mpq_class;
using Integer = mpz_class;

class BadPrime : public std::runtime_error {
 public:
  explicit BadPrime(const std::string& what) : std::runtime_error(what) {}
};

Rational parse_rational(const std::string& s);
std::string to_string(const Rational& x);

// ---------------------------------------------------------------- prime field

bool is_prime_u64(std::uint64_t n);

// Word-sized primes just below 2^61, descending.
const std::array<std::uint64_t, 16>& prime_table();
std::uint64_t prime_for_seed(std::uint64_t seed);

class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p);
  std::uint64_t modulus() const { return p_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p_ - b; }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p_);
  }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t inv(std::uint64_t a) const;

  // Shoup precomputation for repeated multiplication by a fixed b.
  std::uint64_t shoup(std::uint64_t b) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(b) << 64) / p_);
  }
  std::uint64_t mul_shoup(std::uint64_t a, std::uint64_t b, std::uint64_t bs) const {
    std::uint64_t q = static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * bs) >> 64);
    std::uint64_t r = a * b - q * p_;
    return r >= p_ ? r - p_ : r;
  }

  std::uint64_t from_integer(const Integer& z) const;
  std::uint64_t from_int64(long long z) const;
  // Throws BadPrime when p divides the denominator.
  std::uint64_t from_rational(const Rational& x) const;

 private:
  std::uint64_t p_;
};

struct Fp {
  std::uint64_t value = 0;
  std::uint64_t modulus = 2;

  friend bool operator==(const Fp& a, const Fp& b) { return a.value == b.value && a.modulus == b.modulus; }
  friend Fp operator+(const Fp& a, const Fp& b);
  friend Fp operator-(const Fp& a, const Fp& b);
  friend Fp operator*(const Fp& a, const Fp& b);
  friend Fp operator/(const Fp& a, const Fp& b);
};

Fp reduce_mod_p(const Rational& x, std::uint64_t p);
std::string to_string(const Fp& x);

// ---------------------------------------------------------------- BigFloat

int digits_to_bits(int digits);
int bits_to_digits(long bits);
constexpr int kDefaultDigits = 60;

class BigFloat {
 public:
  BigFloat();
  explicit BigFloat(long bits);
  BigFloat(double v, long bits);
  BigFloat(const Rational& q, long bits);
  BigFloat(const std::string& decimal, long bits);
  BigFloat(const BigFloat& o);
  BigFloat(BigFloat&& o) noexcept;
  BigFloat& operator=(const BigFloat& o);
  BigFloat& operator=(BigFloat&& o) noexcept;
  ~BigFloat();

  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }
  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  std::string to_string(int digits) const;
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b);
  BigFloat operator-() const;
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }

  static BigFloat sqrt(const BigFloat& a);
  static BigFloat cbrt(const BigFloat& a);
  static BigFloat abs(const BigFloat& a);
  static BigFloat pi(long bits);

 private:
  mpfr_t v_;
};

// ---------------------------------------------------------------- BigComplex

class BigComplex {
 public:
  BigComplex() = default;
  explicit BigComplex(long bits) : re_(bits), im_(bits) {}
  BigComplex(BigFloat re, BigFloat im) : re_(std::move(re)), im_(std::move(im)) {}
  BigComplex(const Rational& re, long bits) : re_(re, bits), im_(bits) {}

  // Parses "a+bi", "a-bi", "a", "bi".
  static BigComplex parse(const std::string& s, long bits);

  const BigFloat& re() const { return re_; }
  const BigFloat& im() const { return im_; }
  long precision() const { return std::min(re_.precision(), im_.precision()); }
  int digits() const { return bits_to_digits(precision()); }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  BigFloat abs() const;
  double abs_double() const;
  BigComplex conj() const { return BigComplex(re_, -im_); }
  std::string to_string(int digits) const;

  friend BigComplex operator+(const BigComplex& a, const BigComplex& b);
  friend BigComplex operator-(const BigComplex& a, const BigComplex& b);
  friend BigComplex operator*(const BigComplex& a, const BigComplex& b);
  friend BigComplex operator/(const BigComplex& a, const BigComplex& b);
  BigComplex operator-() const { return BigComplex(-re_, -im_); }

 private:
  BigFloat re_, im_;
};

std::string to_string(const BigComplex& x);

// ---------------------------------------------------------------- Q(zeta_12)

// c0 + c1 z + c2 z^2 + c3 z^3 modulo z^4 - z^2 + 1.
class Cyclotomic12 {
 public:
  Cyclotomic12() = default;
  Cyclotomic12(const Rational& r) { c_[0] = r; }  // NOLINT(google-explicit-constructor)
  Cyclotomic12(long r) { c_[0] = r; }             // NOLINT(google-explicit-constructor)
  Cyclotomic12(Rational c0, Rational c1, Rational c2, Rational c3) : c_{c0, c1, c2, c3} {}

  static Cyclotomic12 zeta_pow(long k);
  static Cyclotomic12 parse(const std::string& s);

  const Rational& coeff(int i) const { return c_[static_cast<std::size_t>(i)]; }
  bool is_zero() const { return c_[0] == 0 && c_[1] == 0 && c_[2] == 0 && c_[3] == 0; }
  Cyclotomic12 inverse() const;
  std::string to_string() const;

  friend Cyclotomic12 operator+(const Cyclotomic12& a, const Cyclotomic12& b);
  friend Cyclotomic12 operator-(const Cyclotomic12& a, const Cyclotomic12& b);
  friend Cyclotomic12 operator*(const Cyclotomic12& a, const Cyclotomic12& b);
  friend Cyclotomic12 operator/(const Cyclotomic12& a, const Cyclotomic12& b);
  Cyclotomic12 operator-() const { return Cyclotomic12(-c_[0], -c_[1], -c_[2], -c_[3]); }
  friend bool operator==(const Cyclotomic12& a, const Cyclotomic12& b) { return a.c_ == b.c_; }

 private:
  std::array<Rational, 4> c_{};
};

std::string to_string(const Cyclotomic12& x);

BigComplex to_complex(const Cyclotomic12& x, int digits);
BigComplex to_complex(const Rational& x, int digits);

// ---------------------------------------------------------------- scalar traits

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr const char* name = "rational";
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static Rational parse(const std::string& s) { return parse_rational(s); }
  static std::string str(const Rational& x) { return to_string(x); }
};

template <>
struct ScalarTraits<Cyclotomic12> {
  static constexpr const char* name = "cyclotomic12";
  static Cyclotomic12 zero() { return {}; }
  static Cyclotomic12 one() { return Cyclotomic12(1); }
  static bool is_zero(const Cyclotomic12& x) { return x.is_zero(); }
  static Cyclotomic12 parse(const std::string& s) { return Cyclotomic12::parse(s); }
  static std::string str(const Cyclotomic12& x) { return x.to_string(); }
};

template <>
struct ScalarTraits<BigComplex> {
  static constexpr const char* name = "complex";
  static BigComplex zero() { return {}; }
  static BigComplex one() { return BigComplex(Rational(1), digits_to_bits(kDefaultDigits)); }
  static bool is_zero(const BigComplex& x) { return x.is_zero(); }
  static BigComplex parse(const std::string& s) { return BigComplex::parse(s, digits_to_bits(kDefaultDigits)); }
  static std::string str(const BigComplex& x) { return x.to_string(x.digits()); }
};

}  // namespace borderlab
