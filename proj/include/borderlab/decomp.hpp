#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "borderlab/laurent.hpp"
#include "borderlab/tensor.hpp"

namespace borderlab {

template <class S>
using LaurentVec = std::vector<LaurentPoly<S>>;

template <class S>
struct DecompTerm {
  LaurentPoly<S> coeff;
  LaurentVec<S> a, b, c;  // b and c unused for symmetric decompositions
};

template <class S>
struct BorderDecomposition {
  Dims dims{1, 1, 1};
  bool symmetric = false;
  std::string source;
  std::string index_perm = "id";
  S scale = ScalarTraits<S>::one();
  double tolerance = 0;  // verification tolerance carried by the data; 0 derives it from digits
  int data_digits = 0;   // significant digits of inexact data; 0 when exact
  std::vector<DecompTerm<S>> terms;

  std::size_t size() const { return terms.size(); }
  const LaurentVec<S>& vec(const DecompTerm<S>& t, int f) const {
    if (symmetric || f == 0) return t.a;
    return f == 1 ? t.b : t.c;
  }
};

using QDecomposition = BorderDecomposition<Rational>;
using CycDecomposition = BorderDecomposition<Cyclotomic12>;
using NumDecomposition = BorderDecomposition<BigComplex>;
using AnyDecomposition = std::variant<QDecomposition, CycDecomposition, NumDecomposition>;

// Laurent coefficient tensors (sparse, by linear index) for exponents <= max_exp.
template <class S>
struct Expansion {
  Dims dims{1, 1, 1};
  std::map<int, std::map<std::uint64_t, S>> coeff;
  int lowest_raw = 0;  // lowest exponent among term contributions, before cancellation
  std::uint64_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (static_cast<std::uint64_t>(i) * dims[1] + j) * dims[2] + k;
  }
};

// Expands sum_s coeff_s (x) a_s (x) b_s (x) c_s keeping exponents <= max_exp. Terms are
// expanded in parallel and summed in ascending term order.
template <class S>
Expansion<S> expand(const BorderDecomposition<S>& d, int max_exp = 0);

// ---------------------------------------------------------------- reports

struct VerificationReport {
  std::string mode;
  int digits = 0;
  std::size_t terms = 0;
  int lowest_exponent = 0;
  std::map<int, double> negative_residual;  // max |entry| per negative exponent
  double max_negative_residual = 0;
  double t0_max_residual = 0;
  double t0_frobenius = 0;
  std::string scale = "1";
  std::string permutation = "id";
  double tolerance = 0;
  bool pass = false;
  std::string witness;
  std::vector<std::string> warnings;
  std::string to_json() const;
};

VerificationReport verify_exact(const QDecomposition& d, const QTensor& t);
VerificationReport verify_exact(const CycDecomposition& d, const QTensor& t);

struct NumericOptions {
  int digits = kDefaultDigits;
  double tolerance = -1;  // default 10^-(digits - 5)
  bool match = true;      // choose scale and index identification by scale_match
};

template <class S>
VerificationReport verify_numeric(const BorderDecomposition<S>& d, const QTensor& t, const NumericOptions& opts = {});
VerificationReport verify_numeric_any(const AnyDecomposition& d, const QTensor& t, const NumericOptions& opts = {});

// ---------------------------------------------------------------- scale match

// Index identifications: "id", "swap" (pair-flattening order), "reverse" (basis order),
// and "bc" (exchange the B and C slots), combined with '+'.
std::vector<std::string> index_identifications(const Dims& dims);
QTensor apply_identification(const QTensor& t, const std::string& name);

struct ScaleMatch {
  BigComplex lambda;
  std::string permutation = "id";
  double residual = std::numeric_limits<double>::infinity();
};

// Best (lambda, identification) for X ~ lambda * sigma(T) over the natural identifications.
ScaleMatch scale_match(const Tensor3<BigComplex>& x, const QTensor& t, int digits = kDefaultDigits);
template <class S>
ScaleMatch scale_match(const BorderDecomposition<S>& d, const QTensor& t, int digits = kDefaultDigits);

// ---------------------------------------------------------------- built-ins

QDecomposition builtin_cw(int q);
QDecomposition builtin_skewcw(int q);
QDecomposition builtin_skewcw2_rank5();
NumDecomposition builtin_det3_17(int digits = kDefaultDigits);
NumDecomposition builtin_skewcw4sq_42(int digits = kDefaultDigits);

// cw:q, skewcw:q, skewcw2-rank5, det3-17, skewcw4sq-42.
AnyDecomposition builtin(const std::string& name, int digits = kDefaultDigits);
std::vector<std::string> builtin_names();
// Catalog spec of the tensor a built-in decomposes.
std::string builtin_target(const std::string& name);

// Raw tight-weight data for the monomial built-ins: entry value and position weight.
struct MonomialEntry {
  std::size_t index;
  BigComplex value;
  int exponent;
};
std::vector<std::vector<MonomialEntry>> det3_17_entries(int digits);
std::vector<std::vector<MonomialEntry>> skewcw4sq_42_entries(int digits);
std::vector<int> det3_weights();
std::vector<int> skewcw4sq_weights();

// Radical constants of the 17-term data as shipped decimal strings.
struct Det3Radicals {
  std::string c55, cplus, cminus;
};
const Det3Radicals& det3_radicals();

// ---------------------------------------------------------------- omega

double omega_bound(int q, int k, double r, bool skew = false);

// ---------------------------------------------------------------- files

std::string decomposition_to_json(const AnyDecomposition& d);
AnyDecomposition decomposition_from_json(const std::string& text);

// ---------------------------------------------------------------- helpers

BigComplex as_complex(const Rational& x, int digits);
BigComplex as_complex(const Cyclotomic12& x, int digits);
BigComplex as_complex(const BigComplex& x, int digits);

template <class S>
NumDecomposition to_numeric(const BorderDecomposition<S>& d, int digits);

// t -> c t
template <class S>
BorderDecomposition<S> reparametrized(const BorderDecomposition<S>& d, const S& c) {
  BorderDecomposition<S> r = d;
  for (auto& term : r.terms) {
    term.coeff = term.coeff.rescaled(c);
    for (auto* v : {&term.a, &term.b, &term.c})
      for (auto& e : *v) e = e.rescaled(c);
  }
  return r;
}

}  // namespace borderlab
