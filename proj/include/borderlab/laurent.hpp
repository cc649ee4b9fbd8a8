#pragma once

#include <map>
#include <string>
#include <utility>

#include "borderlab/scalar.hpp"

namespace borderlab {

// Sparse Laurent polynomial in t; zero coefficients are never stored.
template <class S>
class LaurentPoly {
 public:
  using Traits = ScalarTraits<S>;
  using Map = std::map<int, S>;

  LaurentPoly() = default;
  explicit LaurentPoly(const S& c, int e = 0) { add_term(e, c); }

  static LaurentPoly monomial(const S& c, int e) { return LaurentPoly(c, e); }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  int lowest() const { return terms_.begin()->first; }
  int highest() const { return terms_.rbegin()->first; }

  S coeff(int e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Traits::zero() : it->second;
  }

  void add_term(int e, const S& c) {
    if (Traits::is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
      return;
    }
    it->second = it->second + c;
    if (Traits::is_zero(it->second)) terms_.erase(it);
  }

  LaurentPoly shifted(int k) const {
    LaurentPoly r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e + k, c);
    return r;
  }

  // Substitute t -> c t.
  LaurentPoly rescaled(const S& c) const {
    LaurentPoly r;
    for (const auto& [e, v] : terms_) {
      S f = Traits::one();
      S base = e >= 0 ? c : Traits::one() / c;
      for (int k = 0; k < (e >= 0 ? e : -e); ++k) f = f * base;
      r.add_term(e, v * f);
    }
    return r;
  }

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
    return r;
  }
  LaurentPoly operator-() const {
    LaurentPoly r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
  }
  friend LaurentPoly operator*(const S& s, const LaurentPoly& a) {
    LaurentPoly r;
    for (const auto& [e, c] : a.terms_) r.add_term(e, s * c);
    return r;
  }
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib) {
      if (ia->first != ib->first || !Traits::is_zero(ia->second - ib->second)) return false;
    }
    return true;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + Traits::str(c) + ")";
      if (e != 0) out += "*t^" + std::to_string(e);
    }
    return out;
  }

 private:
  Map terms_;
};

template <class S>
LaurentPoly<S> laurent_multiply(const LaurentPoly<S>& f, const LaurentPoly<S>& g) {
  return f * g;
}

}  // namespace borderlab
