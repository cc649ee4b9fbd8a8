#include "borderlab/decomp.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "borderlab/linalg.hpp"
#include "embedded.hpp"

namespace borderlab {

using json = nlohmann::json;

// ---------------------------------------------------------------- helpers

BigComplex as_complex(const Rational& x, int digits) { return to_complex(x, digits); }
BigComplex as_complex(const Cyclotomic12& x, int digits) { return to_complex(x, digits); }
BigComplex as_complex(const BigComplex& x, int digits) {
  long bits = digits_to_bits(digits);
  BigFloat re(bits), im(bits);
  mpfr_set(re.get(), x.re().get(), MPFR_RNDN);
  mpfr_set(im.get(), x.im().get(), MPFR_RNDN);
  return {std::move(re), std::move(im)};
}

namespace {

double magnitude(const Rational& x) { return std::fabs(x.get_d()); }
double magnitude(const Cyclotomic12& x) { return to_complex(x, 20).abs_double(); }

template <class S>
LaurentPoly<BigComplex> poly_to_complex(const LaurentPoly<S>& f, int digits) {
  LaurentPoly<BigComplex> r;
  for (const auto& [e, c] : f.terms()) r.add_term(e, as_complex(c, digits));
  return r;
}

std::string index_string(const Dims& d, std::uint64_t x) {
  std::size_t k = x % d[2];
  std::size_t j = (x / d[2]) % d[1];
  std::size_t i = x / (static_cast<std::uint64_t>(d[1]) * d[2]);
  return "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
}

template <class S>
void check_shape(const BorderDecomposition<S>& d) {
  for (std::size_t s = 0; s < d.terms.size(); ++s)
    for (int f = 0; f < 3; ++f)
      if (d.vec(d.terms[s], f).size() != d.dims[static_cast<std::size_t>(f)])
        throw std::invalid_argument("term " + std::to_string(s) + " has a factor vector of wrong length");
  if (d.symmetric && (d.dims[0] != d.dims[1] || d.dims[1] != d.dims[2]))
    throw std::invalid_argument("symmetric decomposition needs equal factor dims");
}

template <class S>
std::optional<int> lowest_of(const LaurentVec<S>& v) {
  std::optional<int> lo;
  for (const auto& e : v)
    if (!e.is_zero()) lo = lo ? std::min(*lo, e.lowest()) : e.lowest();
  return lo;
}

}  // namespace

// ---------------------------------------------------------------- expansion

template <class S>
Expansion<S> expand(const BorderDecomposition<S>& d, int max_exp) {
  check_shape(d);
  using Contribution = std::tuple<int, std::uint64_t, S>;
  Expansion<S> out;
  out.dims = d.dims;
  std::vector<std::vector<Contribution>> parts(d.terms.size());
  const long n = static_cast<long>(d.terms.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (long s = 0; s < n; ++s) {
    const auto& term = d.terms[static_cast<std::size_t>(s)];
    if (term.coeff.is_zero()) continue;
    const auto& va = d.vec(term, 0);
    const auto& vb = d.vec(term, 1);
    const auto& vc = d.vec(term, 2);
    auto la = lowest_of(va), lb = lowest_of(vb), lc = lowest_of(vc);
    if (!la || !lb || !lc) continue;
    const int floor_bc = *lb + *lc;
    auto& part = parts[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < va.size(); ++i) {
      if (va[i].is_zero() || term.coeff.lowest() + va[i].lowest() + floor_bc > max_exp) continue;
      LaurentPoly<S> ca = term.coeff * va[i];
      for (std::size_t j = 0; j < vb.size(); ++j) {
        if (vb[j].is_zero() || ca.lowest() + vb[j].lowest() + *lc > max_exp) continue;
        LaurentPoly<S> cab = ca * vb[j];
        if (cab.is_zero()) continue;
        for (std::size_t k = 0; k < vc.size(); ++k) {
          if (vc[k].is_zero() || cab.lowest() + vc[k].lowest() > max_exp) continue;
          const std::uint64_t x = out.index(i, j, k);
          for (const auto& [e1, c1] : cab.terms()) {
            for (const auto& [e2, c2] : vc[k].terms()) {
              if (e1 + e2 > max_exp) break;
              part.emplace_back(e1 + e2, x, c1 * c2);
            }
          }
        }
      }
    }
  }
  for (const auto& part : parts) {
    for (const auto& [e, x, v] : part) {
      out.lowest_raw = std::min(out.lowest_raw, e);
      auto& slot = out.coeff[e];
      auto it = slot.find(x);
      if (it == slot.end()) {
        slot.emplace(x, v);
      } else {
        it->second = it->second + v;
      }
    }
  }
  // Drop exact cancellations so "identically zero" is structural.
  for (auto it = out.coeff.begin(); it != out.coeff.end();) {
    auto& slot = it->second;
    for (auto jt = slot.begin(); jt != slot.end();) {
      if (ScalarTraits<S>::is_zero(jt->second)) {
        jt = slot.erase(jt);
      } else {
        ++jt;
      }
    }
    it = slot.empty() ? out.coeff.erase(it) : std::next(it);
  }
  return out;
}

template Expansion<Rational> expand(const BorderDecomposition<Rational>&, int);
template Expansion<Cyclotomic12> expand(const BorderDecomposition<Cyclotomic12>&, int);
template Expansion<BigComplex> expand(const BorderDecomposition<BigComplex>&, int);

template <class S>
NumDecomposition to_numeric(const BorderDecomposition<S>& d, int digits) {
  NumDecomposition r;
  r.dims = d.dims;
  r.symmetric = d.symmetric;
  r.source = d.source;
  r.index_perm = d.index_perm;
  r.scale = as_complex(d.scale, digits);
  r.tolerance = d.tolerance;
  r.data_digits = d.data_digits;
  r.terms.reserve(d.terms.size());
  for (const auto& t : d.terms) {
    DecompTerm<BigComplex> u;
    u.coeff = poly_to_complex(t.coeff, digits);
    for (const auto& e : t.a) u.a.push_back(poly_to_complex(e, digits));
    for (const auto& e : t.b) u.b.push_back(poly_to_complex(e, digits));
    for (const auto& e : t.c) u.c.push_back(poly_to_complex(e, digits));
    r.terms.push_back(std::move(u));
  }
  return r;
}

template NumDecomposition to_numeric(const BorderDecomposition<Rational>&, int);
template NumDecomposition to_numeric(const BorderDecomposition<Cyclotomic12>&, int);
template NumDecomposition to_numeric(const BorderDecomposition<BigComplex>&, int);

// ---------------------------------------------------------------- identifications

namespace {

std::optional<std::size_t> exact_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (r * r == n) return r;
  return std::nullopt;
}

std::vector<std::string> split_plus(const std::string& name) {
  std::vector<std::string> out;
  std::stringstream ss(name);
  std::string tok;
  while (std::getline(ss, tok, '+'))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

}  // namespace

std::vector<std::string> index_identifications(const Dims& dims) {
  bool squares = exact_sqrt(dims[0]) && exact_sqrt(dims[1]) && exact_sqrt(dims[2]);
  bool bc = dims[1] == dims[2];
  std::vector<std::string> out;
  for (int use_bc = 0; use_bc < 2; ++use_bc) {
    if (use_bc && !bc) continue;
    for (int sw = 0; sw < 2; ++sw) {
      if (sw && !squares) continue;
      for (int rev = 0; rev < 2; ++rev) {
        std::string name;
        if (sw) name += "swap";
        if (rev) name += std::string(name.empty() ? "" : "+") + "reverse";
        if (use_bc) name += std::string(name.empty() ? "" : "+") + "bc";
        out.push_back(name.empty() ? "id" : name);
      }
    }
  }
  return out;
}

QTensor apply_identification(const QTensor& t, const std::string& name) {
  QTensor r = t;
  for (const auto& tok : split_plus(name)) {
    if (tok == "id") continue;
    const Dims d = r.dims();
    if (tok == "bc") {
      r = r.permuted({0, 2, 1});
    } else if (tok == "swap" || tok == "reverse") {
      std::array<std::size_t, 3> n{};
      if (tok == "swap") {
        for (std::size_t f = 0; f < 3; ++f) {
          auto s = exact_sqrt(d[f]);
          if (!s) throw std::invalid_argument("swap needs square factor dims");
          n[f] = *s;
        }
      }
      auto map = [&](std::size_t f, std::size_t x) {
        if (tok == "reverse") return d[f] - 1 - x;
        return (x % n[f]) * n[f] + x / n[f];
      };
      QTensor u(d[0], d[1], d[2], !r.is_dense());
      r.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) {
        u.set(map(0, i), map(1, j), map(2, k), v);
      });
      r = std::move(u);
    } else {
      throw std::invalid_argument("unknown index identification '" + tok + "'");
    }
  }
  return r;
}

// ---------------------------------------------------------------- scale match

namespace {

struct Residual {
  double max_entry = 0;
  double frobenius = 0;
};

// |X - lambda * T| over the union of supports; X given sparsely by linear index.
Residual residual_against(const std::map<std::uint64_t, BigComplex>& x, const QTensor& t, const BigComplex& lambda,
                          int digits) {
  Residual r;
  long bits = digits_to_bits(digits);
  BigFloat fro(bits);
  auto account = [&](const BigComplex& diff) {
    BigFloat a = diff.abs();
    fro = fro + a * a;
    r.max_entry = std::max(r.max_entry, a.to_double());
  };
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) {
    std::uint64_t idx = t.index(i, j, k);
    BigComplex tv = lambda * as_complex(v, digits);
    auto it = x.find(idx);
    account(it == x.end() ? -tv : it->second - tv);
  });
  for (const auto& [idx, v] : x) {
    std::size_t k = idx % t.dims()[2];
    std::size_t j = (idx / t.dims()[2]) % t.dims()[1];
    std::size_t i = idx / (static_cast<std::uint64_t>(t.dims()[1]) * t.dims()[2]);
    if (sgn(t.at(i, j, k)) == 0) account(v);
  }
  r.frobenius = BigFloat::sqrt(fro).to_double();
  return r;
}

ScaleMatch match_sparse(const std::map<std::uint64_t, BigComplex>& x, const Dims& dims, const QTensor& t,
                        int digits) {
  ScaleMatch best;
  best.permutation = "none";
  best.lambda = BigComplex(Rational(0), digits_to_bits(digits));
  for (const auto& name : index_identifications(t.dims())) {
    QTensor st = apply_identification(t, name);
    if (st.dims() != dims) continue;
    long bits = digits_to_bits(digits);
    BigComplex num(bits);
    Rational den = 0;
    st.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) {
      auto it = x.find(st.index(i, j, k));
      if (it != x.end()) num = num + it->second * as_complex(v, digits);
      den += v * v;
    });
    BigComplex lambda = sgn(den) == 0 ? BigComplex(bits) : num / as_complex(den, digits);
    Residual r = residual_against(x, st, lambda, digits);
    if (r.max_entry < best.residual) {
      best.residual = r.max_entry;
      best.lambda = lambda;
      best.permutation = name;
    }
  }
  return best;
}

std::map<std::uint64_t, BigComplex> sparse_of(const Tensor3<BigComplex>& x) {
  std::map<std::uint64_t, BigComplex> m;
  x.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const BigComplex& v) {
    m.emplace(x.index(i, j, k), v);
  });
  return m;
}

}  // namespace

ScaleMatch scale_match(const Tensor3<BigComplex>& x, const QTensor& t, int digits) {
  return match_sparse(sparse_of(x), x.dims(), t, digits);
}

template <class S>
ScaleMatch scale_match(const BorderDecomposition<S>& d, const QTensor& t, int digits) {
  auto e = expand(to_numeric(d, digits), 0);
  auto it = e.coeff.find(0);
  std::map<std::uint64_t, BigComplex> x0 = it == e.coeff.end() ? std::map<std::uint64_t, BigComplex>{} : it->second;
  return match_sparse(x0, d.dims, t, digits);
}

template ScaleMatch scale_match(const BorderDecomposition<Rational>&, const QTensor&, int);
template ScaleMatch scale_match(const BorderDecomposition<Cyclotomic12>&, const QTensor&, int);
template ScaleMatch scale_match(const BorderDecomposition<BigComplex>&, const QTensor&, int);

// ---------------------------------------------------------------- verification

std::string VerificationReport::to_json() const {
  json j;
  j["mode"] = mode;
  j["terms"] = terms;
  j["lowest_exponent"] = lowest_exponent;
  json neg = json::object();
  for (const auto& [e, r] : negative_residual) neg[std::to_string(e)] = r;
  j["negative_residual"] = neg;
  j["max_negative_residual"] = max_negative_residual;
  j["t0_max_residual"] = t0_max_residual;
  j["t0_frobenius"] = t0_frobenius;
  j["scale"] = scale;
  j["permutation"] = permutation;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  if (!witness.empty()) j["witness"] = witness;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j.dump();
}

namespace {

template <class S>
VerificationReport verify_exact_impl(const BorderDecomposition<S>& d, const QTensor& t) {
  if (d.dims != t.dims()) throw std::invalid_argument("decomposition and target dims differ");
  VerificationReport rep;
  rep.mode = "exact";
  rep.terms = d.terms.size();
  rep.scale = ScalarTraits<S>::str(d.scale);
  rep.permutation = d.index_perm;
  auto e = expand(d, 0);
  rep.lowest_exponent = e.lowest_raw;
  bool ok = true;
  for (const auto& [ex, slot] : e.coeff) {
    if (ex >= 0) break;
    double m = 0;
    for (const auto& [x, v] : slot) m = std::max(m, magnitude(v));
    rep.negative_residual[ex] = m;
    rep.max_negative_residual = std::max(rep.max_negative_residual, m);
    if (ok && !slot.empty()) {
      ok = false;
      const auto& [x, v] = *slot.begin();
      rep.witness = "t^" + std::to_string(ex) + " coefficient at " + index_string(d.dims, x) + " is " +
                    ScalarTraits<S>::str(v);
    }
  }
  QTensor st = apply_identification(t, d.index_perm);
  std::map<std::uint64_t, S> diff;
  if (auto it = e.coeff.find(0); it != e.coeff.end()) diff = it->second;
  st.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) {
    std::uint64_t x = st.index(i, j, k);
    S sv = d.scale * S(v);
    auto it = diff.find(x);
    if (it == diff.end()) {
      diff.emplace(x, -sv);
    } else {
      it->second = it->second - sv;
    }
  });
  double fro = 0;
  for (const auto& [x, v] : diff) {
    if (ScalarTraits<S>::is_zero(v)) continue;
    double m = magnitude(v);
    rep.t0_max_residual = std::max(rep.t0_max_residual, m);
    fro += m * m;
    if (ok) {
      ok = false;
      rep.witness = "t^0 coefficient minus scale*T at " + index_string(d.dims, x) + " is " + ScalarTraits<S>::str(v);
    }
  }
  rep.t0_frobenius = std::sqrt(fro);
  rep.pass = ok;
  return rep;
}

}  // namespace

VerificationReport verify_exact(const QDecomposition& d, const QTensor& t) { return verify_exact_impl(d, t); }
VerificationReport verify_exact(const CycDecomposition& d, const QTensor& t) { return verify_exact_impl(d, t); }

template <class S>
VerificationReport verify_numeric(const BorderDecomposition<S>& d, const QTensor& t, const NumericOptions& opts) {
  if (opts.digits < 15) throw std::invalid_argument("numeric verification needs at least 15 digits");
  VerificationReport rep;
  rep.mode = "numeric:" + std::to_string(opts.digits);
  rep.digits = opts.digits;
  rep.terms = d.terms.size();
  if (d.data_digits > 0 && d.data_digits < opts.digits)
    rep.warnings.push_back("data carries " + std::to_string(d.data_digits) + " significant digits, below the requested " +
                           std::to_string(opts.digits));
  if (opts.tolerance > 0) {
    rep.tolerance = opts.tolerance;
  } else if (d.tolerance > 0) {
    rep.tolerance = d.tolerance;
  } else {
    rep.tolerance = std::pow(10.0, -(opts.digits - 5));
  }
  NumDecomposition nd = to_numeric(d, opts.digits);
  auto e = expand(nd, 0);
  rep.lowest_exponent = e.lowest_raw;
  for (const auto& [ex, slot] : e.coeff) {
    if (ex >= 0) break;
    double m = 0;
    for (const auto& [x, v] : slot) m = std::max(m, v.abs_double());
    rep.negative_residual[ex] = m;
    rep.max_negative_residual = std::max(rep.max_negative_residual, m);
  }
  std::map<std::uint64_t, BigComplex> x0;
  if (auto it = e.coeff.find(0); it != e.coeff.end()) x0 = it->second;
  if (d.dims != t.dims()) {
    rep.t0_max_residual = std::numeric_limits<double>::infinity();
    rep.t0_frobenius = rep.t0_max_residual;
    rep.permutation = "none";
    rep.witness = "decomposition and target dims differ";
    rep.pass = false;
    return rep;
  }
  BigComplex lambda;
  std::string perm;
  if (opts.match) {
    ScaleMatch m = match_sparse(x0, d.dims, t, opts.digits);
    lambda = m.lambda;
    perm = m.permutation;
  } else {
    lambda = nd.scale;
    perm = d.index_perm;
  }
  Residual r = residual_against(x0, apply_identification(t, perm), lambda, opts.digits);
  rep.t0_max_residual = r.max_entry;
  rep.t0_frobenius = r.frobenius;
  rep.scale = lambda.to_string(std::min(opts.digits, 30));
  rep.permutation = perm;
  rep.pass = rep.max_negative_residual <= rep.tolerance && rep.t0_max_residual <= rep.tolerance;
  return rep;
}

template VerificationReport verify_numeric(const BorderDecomposition<Rational>&, const QTensor&, const NumericOptions&);
template VerificationReport verify_numeric(const BorderDecomposition<Cyclotomic12>&, const QTensor&,
                                           const NumericOptions&);
template VerificationReport verify_numeric(const BorderDecomposition<BigComplex>&, const QTensor&,
                                           const NumericOptions&);

VerificationReport verify_numeric_any(const AnyDecomposition& d, const QTensor& t, const NumericOptions& opts) {
  return std::visit([&](const auto& x) { return verify_numeric(x, t, opts); }, d);
}

// ---------------------------------------------------------------- built-ins

namespace {

template <class S>
LaurentVec<S> basis_vec(std::size_t n) {
  return LaurentVec<S>(n);
}

using QL = LaurentPoly<Rational>;

QL mono(long c, int e) { return QL(Rational(c), e); }

}  // namespace

QDecomposition builtin_cw(int q) {
  if (q < 1) throw std::invalid_argument("cw needs q >= 1");
  const auto n = static_cast<std::size_t>(q + 1);
  QDecomposition d;
  d.dims = {n, n, n};
  d.symmetric = true;
  d.source = "cw:" + std::to_string(q);
  // t^-2 (a0 + t a_alpha)^3
  for (std::size_t a = 1; a < n; ++a) {
    DecompTerm<Rational> term;
    term.coeff = mono(1, -2);
    term.a = basis_vec<Rational>(n);
    term.a[0] = mono(1, 0);
    term.a[a] = mono(1, 1);
    d.terms.push_back(std::move(term));
  }
  // -t^-3 (a0 + t^2 sum a_alpha)^3
  DecompTerm<Rational> big;
  big.coeff = mono(-1, -3);
  big.a = basis_vec<Rational>(n);
  big.a[0] = mono(1, 0);
  for (std::size_t a = 1; a < n; ++a) big.a[a] = mono(1, 2);
  d.terms.push_back(std::move(big));
  // -(q t^-2 - t^-3) a0^3
  DecompTerm<Rational> corr;
  corr.coeff = mono(-q, -2) + mono(1, -3);
  corr.a = basis_vec<Rational>(n);
  corr.a[0] = mono(1, 0);
  d.terms.push_back(std::move(corr));
  return d;
}

QDecomposition builtin_skewcw(int q) {
  if (q < 2 || q % 2 != 0) throw std::invalid_argument("skewcw needs even q >= 2");
  const int p = q / 2;
  const auto n = static_cast<std::size_t>(q + 1);
  QDecomposition d;
  d.dims = {n, n, n};
  d.source = "skewcw:" + std::to_string(q);
  auto vec = [&](std::size_t idx, long c, int e) {
    LaurentVec<Rational> v = basis_vec<Rational>(n);
    v[0] = mono(1, 0);
    v[idx] = mono(c, e);
    return v;
  };
  // t^-3 times three rank-one terms per xi; their t^-2 parts cancel against the big term.
  for (int xi = 1; xi <= p; ++xi) {
    auto x = static_cast<std::size_t>(xi);
    auto y = static_cast<std::size_t>(xi + p);
    DecompTerm<Rational> t1{mono(1, -3), vec(x, 1, 2), vec(x, -1, 2), vec(y, -1, 1)};
    DecompTerm<Rational> t2{mono(1, -3), vec(x, -1, 2), vec(y, -1, 1), vec(x, 1, 2)};
    DecompTerm<Rational> t3{mono(1, -3), vec(y, -1, 1), vec(x, 1, 2), vec(x, -1, 2)};
    d.terms.push_back(std::move(t1));
    d.terms.push_back(std::move(t2));
    d.terms.push_back(std::move(t3));
  }
  // t^-5 (a0 + t^3 sum a_{xi+p}) (x) (b0 + ...) (x) (c0 + ...)
  DecompTerm<Rational> big;
  big.coeff = mono(1, -5);
  for (auto* v : {&big.a, &big.b, &big.c}) {
    *v = basis_vec<Rational>(n);
    (*v)[0] = mono(1, 0);
    for (int xi = 1; xi <= p; ++xi) (*v)[static_cast<std::size_t>(xi + p)] = mono(1, 3);
  }
  d.terms.push_back(std::move(big));
  // -((3q/2) t^-3 + t^-5) a0 (x) b0 (x) c0
  DecompTerm<Rational> corr;
  corr.coeff = QL(Rational(-3 * q) / 2, -3) + mono(-1, -5);
  for (auto* v : {&corr.a, &corr.b, &corr.c}) {
    *v = basis_vec<Rational>(n);
    (*v)[0] = mono(1, 0);
  }
  d.terms.push_back(std::move(corr));
  return d;
}

QDecomposition builtin_skewcw2_rank5() {
  QDecomposition d;
  d.dims = {3, 3, 3};
  d.source = "skewcw2-rank5";
  auto v = [](long x0, long x1, long x2) {
    return LaurentVec<Rational>{mono(x0, 0), mono(x1, 0), mono(x2, 0)};
  };
  const Rational half(1, 2);
  d.terms.push_back({mono(1, 0), v(1, 0, 0), v(0, 1, -1), v(0, 1, 1)});
  d.terms.push_back({QL(-half, 0), v(1, 1, 0), v(1, 0, -1), v(1, 0, 1)});
  d.terms.push_back({QL(-half, 0), v(1, -1, 0), v(1, 0, 1), v(1, 0, -1)});
  d.terms.push_back({QL(half, 0), v(1, 0, 1), v(1, -1, 0), v(1, 1, 0)});
  d.terms.push_back({QL(half, 0), v(1, 0, -1), v(1, 1, 0), v(1, -1, 0)});
  return d;
}

// ---------------------------------------------------------------- det3-17

const Det3Radicals& det3_radicals() {
  // 5^(5/6)/5, (1 + (2/5) sqrt 5)^(1/3), (1 - (2/5) sqrt 5)^(1/3); real cube roots.
  static const Det3Radicals r{
      "0.76472449133173001385626648508534938598903387134518926882661699266135040470057160033",
      "1.23735021900421350160468767881460474792854449094412209660473935005282316260237240829",
      "0.47262572767248348774842119372925536193951061959893282777812235739147275790180080796"};
  return r;
}

std::vector<int> det3_weights() { return {-5, -4, -3, -1, 0, 1, 3, 4, 5}; }

namespace {

struct Det3Entry {
  int row, col, zeta, radical;  // radical: 0 none, 1 c55, 2 cplus, 3 cminus
};

const std::vector<std::vector<Det3Entry>>& det3_table() {
  static const std::vector<std::vector<Det3Entry>> t{
      {{0, 0, 6, 0}, {1, 1, 6, 0}, {2, 2, 0, 0}},
      {{0, 0, 0, 0}, {1, 1, 0, 0}},
      {{0, 0, 6, 0}, {1, 2, 8, 0}, {2, 1, 4, 0}},
      {{0, 0, 4, 0}, {1, 2, 6, 0}},
      {{0, 0, 5, 0}, {2, 1, 0, 0}},
      {{0, 0, 3, 0}, {2, 2, 0, 0}},
      {{0, 1, 10, 0}, {0, 2, 8, 0}, {1, 2, 8, 0}, {2, 0, 6, 0}},
      {{0, 1, 8, 0}, {0, 2, 6, 0}, {1, 2, 6, 0}},
      {{0, 1, 0, 0}, {0, 2, 0, 0}, {2, 0, 6, 0}},
      {{0, 1, 6, 0}, {1, 0, 6, 0}, {2, 2, 6, 0}},
      {{0, 1, 11, 0}, {2, 0, 0, 0}},
      {{0, 1, 9, 0}, {2, 2, 6, 0}},
      {{0, 2, 0, 0}, {1, 0, 6, 0}, {2, 1, 6, 0}},
      {{0, 2, 0, 0}, {1, 1, 4, 0}, {2, 0, 2, 0}, {2, 1, 0, 0}},
      {{0, 2, 6, 0}, {1, 1, 10, 0}},
      {{0, 1, 2, 1}, {0, 2, 2, 2}, {1, 0, 8, 3}},
      {{0, 1, 8, 1}, {0, 2, 2, 3}, {1, 0, 8, 2}},
  };
  return t;
}

NumDecomposition monomial_waring(const std::vector<std::vector<MonomialEntry>>& entries, std::size_t dim,
                                 int digits) {
  NumDecomposition d;
  d.dims = {dim, dim, dim};
  d.symmetric = true;
  d.scale = as_complex(Rational(1), digits);
  for (const auto& m : entries) {
    DecompTerm<BigComplex> term;
    term.coeff = LaurentPoly<BigComplex>(as_complex(Rational(1), digits), 0);
    term.a.assign(dim, LaurentPoly<BigComplex>());
    for (const auto& e : m) term.a[e.index] = LaurentPoly<BigComplex>(e.value, e.exponent);
    d.terms.push_back(std::move(term));
  }
  return d;
}

}  // namespace

std::vector<std::vector<MonomialEntry>> det3_17_entries(int digits) {
  const long bits = digits_to_bits(digits);
  const auto& rad = det3_radicals();
  const std::array<std::string, 4> rs{"1", rad.c55, rad.cplus, rad.cminus};
  const auto w = det3_weights();
  std::vector<std::vector<MonomialEntry>> out;
  for (const auto& m : det3_table()) {
    std::vector<MonomialEntry> v;
    for (const auto& e : m) {
      auto idx = static_cast<std::size_t>(3 * e.row + e.col);
      BigComplex value = to_complex(Cyclotomic12::zeta_pow(e.zeta), digits) *
                         BigComplex(BigFloat(rs[static_cast<std::size_t>(e.radical)], bits), BigFloat(bits));
      v.push_back({idx, std::move(value), w[idx]});
    }
    out.push_back(std::move(v));
  }
  return out;
}

NumDecomposition builtin_det3_17(int digits) {
  NumDecomposition d = monomial_waring(det3_17_entries(digits), 9, digits);
  d.source = "det3-17";
  d.tolerance = 1e-40;
  d.data_digits = 80;
  return d;
}

// ---------------------------------------------------------------- skewcw4sq-42

namespace {

const json& skewcw4sq_data() {
  static const json j = json::parse(embedded::skewcw4sq42_json());
  return j;
}

}  // namespace

std::vector<int> skewcw4sq_weights() { return skewcw4sq_data().at("weights").get<std::vector<int>>(); }

std::vector<std::vector<MonomialEntry>> skewcw4sq_42_entries(int digits) {
  const json& j = skewcw4sq_data();
  const long bits = digits_to_bits(digits);
  std::vector<BigComplex> z;
  for (const auto& s : j.at("z")) z.push_back(BigComplex::parse(s.get<std::string>(), bits));
  const auto w = skewcw4sq_weights();
  const auto size = j.at("matrix_size").get<std::size_t>();
  std::vector<std::vector<MonomialEntry>> out;
  for (const auto& term : j.at("terms")) {
    std::vector<MonomialEntry> v;
    for (const auto& e : term) {
      std::size_t idx = e.at("row").get<std::size_t>() * size + e.at("col").get<std::size_t>();
      BigComplex value = to_complex(Cyclotomic12::zeta_pow(e.at("zeta").get<long>()), digits);
      for (const auto& f : e.at("z")) {
        auto k = f.at(0).get<std::size_t>();
        int ex = f.at(1).get<int>();
        const BigComplex& base = z.at(k);
        for (int r = 0; r < std::abs(ex); ++r) value = ex > 0 ? value * base : value / base;
      }
      v.push_back({idx, std::move(value), w.at(idx)});
    }
    out.push_back(std::move(v));
  }
  return out;
}

NumDecomposition builtin_skewcw4sq_42(int digits) {
  NumDecomposition d = monomial_waring(skewcw4sq_42_entries(digits), 25, digits);
  d.source = "skewcw4sq-42";
  d.tolerance = 1e-14;
  d.data_digits = 16;
  return d;
}

// ---------------------------------------------------------------- registry

std::vector<std::string> builtin_names() {
  return {"cw:q", "skewcw:q", "skewcw2-rank5", "det3-17", "skewcw4sq-42"};
}

namespace {

int parse_q(const std::string& name, const std::string& prefix) {
  std::string rest = name.substr(prefix.size());
  std::size_t used = 0;
  int q = 0;
  try {
    q = std::stoi(rest, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != rest.size()) throw std::invalid_argument("bad built-in name '" + name + "'");
  return q;
}

}  // namespace

AnyDecomposition builtin(const std::string& name, int digits) {
  if (name.rfind("cw:", 0) == 0) return builtin_cw(parse_q(name, "cw:"));
  if (name.rfind("skewcw:", 0) == 0) return builtin_skewcw(parse_q(name, "skewcw:"));
  if (name == "skewcw2-rank5") return builtin_skewcw2_rank5();
  if (name == "det3-17") return builtin_det3_17(digits);
  if (name == "skewcw4sq-42") return builtin_skewcw4sq_42(digits);
  throw std::invalid_argument("unknown built-in decomposition '" + name + "'");
}

std::string builtin_target(const std::string& name) {
  if (name.rfind("cw:", 0) == 0 || name.rfind("skewcw:", 0) == 0) return name;
  if (name == "skewcw2-rank5") return "skewcw:2";
  if (name == "det3-17") return "det:3";
  if (name == "skewcw4sq-42") return "skewcw:4^2";
  throw std::invalid_argument("unknown built-in decomposition '" + name + "'");
}

// ---------------------------------------------------------------- omega

double omega_bound(int q, int k, double r, bool /*skew*/) {
  if (q < 2 || k < 1 || r < 1) throw std::invalid_argument("omega_bound needs q >= 2, k >= 1, R >= 1");
  double v = (std::log(4.0 / 27.0) + 3.0 / k * std::log(r)) / std::log(static_cast<double>(q));
  // 10 significant digits
  if (v == 0) return 0;
  double scale = std::pow(10.0, 9 - static_cast<int>(std::floor(std::log10(std::fabs(v)))));
  return std::round(v * scale) / scale;
}

// ---------------------------------------------------------------- files

namespace {

template <class S>
std::string field_name(int digits) {
  if constexpr (std::is_same_v<S, BigComplex>) return "complex:" + std::to_string(digits);
  return ScalarTraits<S>::name;
}

template <class S>
json poly_json(const LaurentPoly<S>& f) {
  json a = json::array();
  for (const auto& [e, c] : f.terms()) a.push_back({e, ScalarTraits<S>::str(c)});
  return a;
}

template <class S>
json vec_json(const LaurentVec<S>& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back(poly_json(e));
  return a;
}

template <class S>
std::string to_json_impl(const BorderDecomposition<S>& d) {
  json j;
  j["dims"] = {d.dims[0], d.dims[1], d.dims[2]};
  int digits = kDefaultDigits;
  if constexpr (std::is_same_v<S, BigComplex>) digits = d.scale.digits();
  j["field"] = field_name<S>(digits);
  j["symmetric"] = d.symmetric;
  j["scale"] = ScalarTraits<S>::str(d.scale);
  j["index_perm"] = d.index_perm;
  if (!d.source.empty()) j["source"] = d.source;
  if (d.tolerance > 0) j["tolerance"] = d.tolerance;
  if (d.data_digits > 0) j["data_digits"] = d.data_digits;
  json terms = json::array();
  for (const auto& t : d.terms) {
    json u;
    u["coeff"] = poly_json(t.coeff);
    u["vecA"] = vec_json(t.a);
    if (!d.symmetric) {
      u["vecB"] = vec_json(t.b);
      u["vecC"] = vec_json(t.c);
    }
    terms.push_back(std::move(u));
  }
  j["terms"] = std::move(terms);
  return j.dump();
}

template <class S, class Parse>
BorderDecomposition<S> from_json_impl(const json& j, Parse parse) {
  BorderDecomposition<S> d;
  auto dims = j.at("dims").get<std::vector<std::size_t>>();
  if (dims.size() != 3) throw std::invalid_argument("decomposition dims must have three entries");
  d.dims = {dims[0], dims[1], dims[2]};
  d.symmetric = j.value("symmetric", false);
  d.scale = parse(j.value("scale", std::string("1")));
  d.index_perm = j.value("index_perm", std::string("id"));
  d.source = j.value("source", std::string());
  d.tolerance = j.value("tolerance", 0.0);
  d.data_digits = j.value("data_digits", 0);
  auto poly = [&](const json& a) {
    LaurentPoly<S> f;
    for (const auto& m : a) f.add_term(m.at(0).get<int>(), parse(m.at(1).get<std::string>()));
    return f;
  };
  auto vec = [&](const json& a) {
    LaurentVec<S> v;
    for (const auto& e : a) v.push_back(poly(e));
    return v;
  };
  for (const auto& t : j.at("terms")) {
    DecompTerm<S> u;
    u.coeff = poly(t.at("coeff"));
    u.a = vec(t.at("vecA"));
    if (!d.symmetric) {
      u.b = vec(t.at("vecB"));
      u.c = vec(t.at("vecC"));
    }
    d.terms.push_back(std::move(u));
  }
  check_shape(d);
  return d;
}

}  // namespace

std::string decomposition_to_json(const AnyDecomposition& d) {
  return std::visit([](const auto& x) { return to_json_impl(x); }, d);
}

AnyDecomposition decomposition_from_json(const std::string& text) {
  json j = json::parse(text);
  std::string field = j.value("field", std::string("rational"));
  if (field == "rational") return from_json_impl<Rational>(j, [](const std::string& s) { return parse_rational(s); });
  if (field == "cyclotomic12")
    return from_json_impl<Cyclotomic12>(j, [](const std::string& s) { return Cyclotomic12::parse(s); });
  if (field.rfind("complex", 0) == 0) {
    int digits = kDefaultDigits;
    if (field.size() > 8 && field[7] == ':') digits = std::stoi(field.substr(8));
    long bits = digits_to_bits(digits);
    return from_json_impl<BigComplex>(j, [bits](const std::string& s) { return BigComplex::parse(s, bits); });
  }
  throw std::invalid_argument("unsupported decomposition field '" + field + "'");
}

}  // namespace borderlab
