#include "borderlab/scalar.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

namespace borderlab {

Rational parse_rational(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (!t.empty() && t[0] == '+') t.erase(0, 1);
  if (t.empty()) throw std::invalid_argument("empty rational literal");
  Rational q;
  if (q.set_str(t, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& x) { return x.get_str(); }

// ---------------------------------------------------------------- primes

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for 64-bit integers.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

const std::array<std::uint64_t, 16>& prime_table() {
  static const std::array<std::uint64_t, 16> table = {
      2305843009213693951ull, 2305843009213693921ull, 2305843009213693907ull, 2305843009213693723ull,
      2305843009213693693ull, 2305843009213693669ull, 2305843009213693613ull, 2305843009213693561ull,
      2305843009213693549ull, 2305843009213693487ull, 2305843009213693421ull, 2305843009213693373ull,
      2305843009213693277ull, 2305843009213693193ull, 2305843009213693153ull, 2305843009213693133ull};
  return table;
}

std::uint64_t prime_for_seed(std::uint64_t seed) { return prime_table()[seed % prime_table().size()]; }

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
  if (p >= (1ull << 63) || !is_prime_u64(p)) throw std::invalid_argument("modulus is not a word-sized prime: " + std::to_string(p));
}

std::uint64_t PrimeField::pow(std::uint64_t a, std::uint64_t e) const { return powmod(a, e, p_); }

std::uint64_t PrimeField::inv(std::uint64_t a) const {
  if (a % p_ == 0) throw std::domain_error("inverse of zero in prime field");
  return powmod(a, p_ - 2, p_);
}

std::uint64_t PrimeField::from_integer(const Integer& z) const {
  if (z.fits_slong_p()) return from_int64(z.get_si());
  Integer r = z % Integer(std::to_string(p_));
  if (r < 0) r += Integer(std::to_string(p_));
  return std::stoull(r.get_str());
}

std::uint64_t PrimeField::from_int64(long long z) const {
  long long m = static_cast<long long>(p_);
  long long r = z % m;
  if (r < 0) r += m;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t PrimeField::from_rational(const Rational& x) const {
  std::uint64_t den = from_integer(x.get_den());
  if (den == 0) throw BadPrime("prime " + std::to_string(p_) + " divides denominator of " + x.get_str());
  return mul(from_integer(x.get_num()), inv(den));
}

namespace {
void same_modulus(const Fp& a, const Fp& b) {
  if (a.modulus != b.modulus) throw std::invalid_argument("prime field kind mismatch");
}
}  // namespace

Fp operator+(const Fp& a, const Fp& b) {
  same_modulus(a, b);
  return {PrimeField(a.modulus).add(a.value, b.value), a.modulus};
}
Fp operator-(const Fp& a, const Fp& b) {
  same_modulus(a, b);
  return {a.value >= b.value ? a.value - b.value : a.value + a.modulus - b.value, a.modulus};
}
Fp operator*(const Fp& a, const Fp& b) {
  same_modulus(a, b);
  return {mulmod(a.value, b.value, a.modulus), a.modulus};
}
Fp operator/(const Fp& a, const Fp& b) {
  same_modulus(a, b);
  if (b.value == 0) throw std::domain_error("division by zero in prime field");
  return {mulmod(a.value, powmod(b.value, a.modulus - 2, a.modulus), a.modulus), a.modulus};
}

Fp reduce_mod_p(const Rational& x, std::uint64_t p) {
  PrimeField f(p);
  return {f.from_rational(x), p};
}

std::string to_string(const Fp& x) { return std::to_string(x.value) + " mod " + std::to_string(x.modulus); }

// ---------------------------------------------------------------- BigFloat

int digits_to_bits(int digits) { return static_cast<int>(std::ceil(digits * 3.321928094887362)) + 16; }
int bits_to_digits(long bits) { return static_cast<int>(std::floor((bits - 16) / 3.321928094887362)); }

BigFloat::BigFloat() : BigFloat(static_cast<long>(digits_to_bits(kDefaultDigits))) {}
BigFloat::BigFloat(long bits) {
  mpfr_init2(v_, bits);
  mpfr_set_zero(v_, 1);
}
BigFloat::BigFloat(double v, long bits) {
  mpfr_init2(v_, bits);
  mpfr_set_d(v_, v, MPFR_RNDN);
}
BigFloat::BigFloat(const Rational& q, long bits) {
  mpfr_init2(v_, bits);
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}
BigFloat::BigFloat(const std::string& decimal, long bits) {
  mpfr_init2(v_, bits);
  if (mpfr_set_str(v_, decimal.c_str(), 10, MPFR_RNDN) != 0 && !mpfr_number_p(v_))
    throw std::invalid_argument("bad decimal literal: " + decimal);
}
BigFloat::BigFloat(const BigFloat& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}
BigFloat::BigFloat(BigFloat&& o) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, o.v_);
}
BigFloat& BigFloat::operator=(const BigFloat& o) {
  if (this != &o) {
    mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}
BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}
BigFloat::~BigFloat() { mpfr_clear(v_); }

std::string BigFloat::to_string(int digits) const {
  if (mpfr_zero_p(v_)) return "0";
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

namespace {
long maxprec(const BigFloat& a, const BigFloat& b) { return std::max(a.precision(), b.precision()); }
}  // namespace

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
  BigFloat r(maxprec(a, b));
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
BigFloat operator-(const BigFloat& a, const BigFloat& b) {
  BigFloat r(maxprec(a, b));
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
BigFloat operator*(const BigFloat& a, const BigFloat& b) {
  BigFloat r(maxprec(a, b));
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
BigFloat operator/(const BigFloat& a, const BigFloat& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  BigFloat r(maxprec(a, b));
  mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}
BigFloat BigFloat::operator-() const {
  BigFloat r(precision());
  mpfr_neg(r.get(), v_, MPFR_RNDN);
  return r;
}
BigFloat BigFloat::sqrt(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_sqrt(r.get(), a.get(), MPFR_RNDN);
  return r;
}
BigFloat BigFloat::cbrt(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_cbrt(r.get(), a.get(), MPFR_RNDN);
  return r;
}
BigFloat BigFloat::abs(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_abs(r.get(), a.get(), MPFR_RNDN);
  return r;
}
BigFloat BigFloat::pi(long bits) {
  BigFloat r(bits);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

// ---------------------------------------------------------------- BigComplex

BigComplex BigComplex::parse(const std::string& s, long bits) {
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (t.empty()) throw std::invalid_argument("empty complex literal");
  if (t.back() != 'i') return BigComplex(BigFloat(t, bits), BigFloat(bits));
  t.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string re = split == std::string::npos ? "0" : t.substr(0, split);
  std::string im = split == std::string::npos ? t : t.substr(split);
  if (im == "+" || im.empty()) im = "1";
  if (im == "-") im = "-1";
  if (im[0] == '+') im.erase(0, 1);
  return BigComplex(BigFloat(re, bits), BigFloat(im, bits));
}

BigFloat BigComplex::abs() const {
  BigFloat r(precision());
  mpfr_hypot(r.get(), re_.get(), im_.get(), MPFR_RNDN);
  return r;
}

double BigComplex::abs_double() const { return abs().to_double(); }

std::string BigComplex::to_string(int digits) const {
  std::string r = re_.to_string(digits);
  std::string i = im_.to_string(digits);
  if (i[0] != '-') i = "+" + i;
  return r + i + "i";
}

BigComplex operator+(const BigComplex& a, const BigComplex& b) { return {a.re_ + b.re_, a.im_ + b.im_}; }
BigComplex operator-(const BigComplex& a, const BigComplex& b) { return {a.re_ - b.re_, a.im_ - b.im_}; }
BigComplex operator*(const BigComplex& a, const BigComplex& b) {
  if (b.im_.is_zero()) return {a.re_ * b.re_, a.im_ * b.re_};
  return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
}
BigComplex operator/(const BigComplex& a, const BigComplex& b) {
  BigFloat d = b.re_ * b.re_ + b.im_ * b.im_;
  if (d.is_zero()) throw std::domain_error("division by zero");
  return {(a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d};
}

std::string to_string(const BigComplex& x) { return x.to_string(x.digits()); }

// ---------------------------------------------------------------- Cyclotomic12

Cyclotomic12 operator+(const Cyclotomic12& a, const Cyclotomic12& b) {
  return {a.c_[0] + b.c_[0], a.c_[1] + b.c_[1], a.c_[2] + b.c_[2], a.c_[3] + b.c_[3]};
}
Cyclotomic12 operator-(const Cyclotomic12& a, const Cyclotomic12& b) {
  return {a.c_[0] - b.c_[0], a.c_[1] - b.c_[1], a.c_[2] - b.c_[2], a.c_[3] - b.c_[3]};
}
Cyclotomic12 operator*(const Cyclotomic12& a, const Cyclotomic12& b) {
  std::array<Rational, 7> p{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) p[static_cast<std::size_t>(i + j)] += a.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j)];
  // z^6 = -1, z^5 = z^3 - z, z^4 = z^2 - 1.
  p[0] -= p[6];
  p[3] += p[5];
  p[1] -= p[5];
  p[2] += p[4];
  p[0] -= p[4];
  return {p[0], p[1], p[2], p[3]};
}

Cyclotomic12 Cyclotomic12::zeta_pow(long k) {
  long e = ((k % 12) + 12) % 12;
  Cyclotomic12 r(1);
  Cyclotomic12 z(0, 1, 0, 0);
  for (long i = 0; i < e; ++i) r = r * z;
  return r;
}

Cyclotomic12 Cyclotomic12::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero in Q(zeta12)");
  // Solve M y = e0 where column j of M holds the coordinates of x * z^j.
  std::array<std::array<Rational, 5>, 4> m{};
  Cyclotomic12 col = *this;
  Cyclotomic12 z(0, 1, 0, 0);
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = col.c_[static_cast<std::size_t>(i)];
    col = col * z;
  }
  m[0][4] = 1;
  for (std::size_t c = 0; c < 4; ++c) {
    std::size_t piv = c;
    while (sgn(m[piv][c]) == 0) ++piv;
    std::swap(m[piv], m[c]);
    Rational inv = 1 / m[c][c];
    for (std::size_t k = c; k < 5; ++k) m[c][k] *= inv;
    for (std::size_t r = 0; r < 4; ++r) {
      if (r == c || sgn(m[r][c]) == 0) continue;
      Rational f = m[r][c];
      for (std::size_t k = c; k < 5; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return {m[0][4], m[1][4], m[2][4], m[3][4]};
}

Cyclotomic12 operator/(const Cyclotomic12& a, const Cyclotomic12& b) { return a * b.inverse(); }

Cyclotomic12 Cyclotomic12::parse(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (t.empty()) throw std::invalid_argument("empty cyclotomic literal");
  Cyclotomic12 acc;
  std::size_t pos = 0;
  while (pos < t.size()) {
    int sign = 1;
    if (t[pos] == '+' || t[pos] == '-') {
      sign = t[pos] == '-' ? -1 : 1;
      ++pos;
    }
    std::size_t end = pos;
    while (end < t.size() && t[end] != '+' && t[end] != '-') ++end;
    std::string term = t.substr(pos, end - pos);
    if (term.empty()) throw std::invalid_argument("bad cyclotomic literal: " + s);
    Rational coef(1);
    long power = 0;
    std::size_t zpos = term.find('z');
    if (zpos == std::string::npos) {
      coef = parse_rational(term);
    } else {
      std::string pre = term.substr(0, zpos);
      if (!pre.empty() && pre.back() == '*') pre.pop_back();
      if (!pre.empty()) coef = parse_rational(pre);
      std::string post = term.substr(zpos + 1);
      if (post.empty()) {
        power = 1;
      } else if (post[0] == '^') {
        power = std::stol(post.substr(1));
      } else {
        throw std::invalid_argument("bad cyclotomic literal: " + s);
      }
    }
    acc = acc + Cyclotomic12(coef * sign) * zeta_pow(power);
    pos = end;
  }
  return acc;
}

std::string Cyclotomic12::to_string() const {
  std::string out;
  for (int i = 0; i < 4; ++i) {
    const Rational& c = c_[static_cast<std::size_t>(i)];
    if (sgn(c) == 0) continue;
    std::string mono = i == 0 ? "" : (i == 1 ? "z" : "z^" + std::to_string(i));
    std::string body;
    Rational a = abs(c);
    if (i == 0) {
      body = a.get_str();
    } else {
      body = a == 1 ? mono : a.get_str() + "*" + mono;
    }
    if (sgn(c) < 0) {
      out += "-" + body;
    } else {
      out += (out.empty() ? "" : "+") + body;
    }
  }
  return out.empty() ? "0" : out;
}

std::string to_string(const Cyclotomic12& x) { return x.to_string(); }

BigComplex to_complex(const Cyclotomic12& x, int digits) {
  long bits = digits_to_bits(digits);
  BigFloat half(Rational(1, 2), bits);
  BigFloat s3h = BigFloat::sqrt(BigFloat(Rational(3), bits)) * half;
  // z = s3/2 + i/2, z^2 = 1/2 + i s3/2, z^3 = i.
  BigFloat c0(x.coeff(0), bits), c1(x.coeff(1), bits), c2(x.coeff(2), bits), c3(x.coeff(3), bits);
  BigFloat re = c0 + c1 * s3h + c2 * half;
  BigFloat im = c1 * half + c2 * s3h + c3;
  return {re, im};
}

BigComplex to_complex(const Rational& x, int digits) { return BigComplex(x, digits_to_bits(digits)); }

}  // namespace borderlab
