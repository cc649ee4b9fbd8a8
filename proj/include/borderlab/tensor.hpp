#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "borderlab/matrix.hpp"
#include "borderlab/scalar.hpp"

namespace borderlab {

enum class Factor { A = 0, B = 1, C = 2 };

Factor parse_factor(const std::string& s);
const char* factor_name(Factor f);

using Dims = std::array<std::size_t, 3>;

// Order-3 tensor; dense up to kDenseLimit entries, ordered sparse map beyond.
template <class S>
class Tensor3 {
 public:
  using Traits = ScalarTraits<S>;
  static constexpr std::uint64_t kDenseLimit = 20000000;

  Tensor3() = default;
  Tensor3(std::size_t da, std::size_t db, std::size_t dc, bool force_sparse = false) : dims_{da, db, dc} {
    if (da == 0 || db == 0 || dc == 0) throw std::invalid_argument("tensor dimensions must be positive");
    dense_ = !force_sparse && total() <= kDenseLimit;
    if (dense_) data_.assign(total(), Traits::zero());
  }

  const Dims& dims() const { return dims_; }
  std::size_t dim(Factor f) const { return dims_[static_cast<std::size_t>(f)]; }
  std::size_t dim(int f) const { return dims_[static_cast<std::size_t>(f)]; }
  std::uint64_t total() const {
    return static_cast<std::uint64_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  bool is_dense() const { return dense_; }

  std::uint64_t index(std::size_t i, std::size_t j, std::size_t k) const {
    if (i >= dims_[0] || j >= dims_[1] || k >= dims_[2]) throw std::out_of_range("tensor index out of range");
    return (static_cast<std::uint64_t>(i) * dims_[1] + j) * dims_[2] + k;
  }

  S at(std::size_t i, std::size_t j, std::size_t k) const {
    std::uint64_t x = index(i, j, k);
    if (dense_) return data_[x];
    auto it = sparse_.find(x);
    return it == sparse_.end() ? Traits::zero() : it->second;
  }

  void set(std::size_t i, std::size_t j, std::size_t k, const S& v) {
    std::uint64_t x = index(i, j, k);
    if (dense_) {
      data_[x] = v;
    } else if (Traits::is_zero(v)) {
      sparse_.erase(x);
    } else {
      sparse_[x] = v;
    }
  }

  void add(std::size_t i, std::size_t j, std::size_t k, const S& v) {
    if (Traits::is_zero(v)) return;
    set(i, j, k, at(i, j, k) + v);
  }

  // Visits nonzero entries in increasing linear index order.
  template <class F>
  void for_each_nonzero(F&& f) const {
    if (dense_) {
      std::uint64_t x = 0;
      for (std::size_t i = 0; i < dims_[0]; ++i)
        for (std::size_t j = 0; j < dims_[1]; ++j)
          for (std::size_t k = 0; k < dims_[2]; ++k, ++x)
            if (!Traits::is_zero(data_[x])) f(i, j, k, data_[x]);
    } else {
      for (const auto& [x, v] : sparse_) {
        std::size_t k = x % dims_[2];
        std::size_t j = (x / dims_[2]) % dims_[1];
        std::size_t i = x / (static_cast<std::uint64_t>(dims_[1]) * dims_[2]);
        f(i, j, k, v);
      }
    }
  }

  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for_each_nonzero([&](std::size_t, std::size_t, std::size_t, const S&) { ++n; });
    return n;
  }

  Tensor3 to_sparse() const {
    Tensor3 t(dims_[0], dims_[1], dims_[2], true);
    for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const S& v) { t.set(i, j, k, v); });
    return t;
  }

  Tensor3 to_dense() const {
    if (total() > kDenseLimit) throw std::length_error("tensor too large for dense storage");
    Tensor3 t(dims_[0], dims_[1], dims_[2]);
    for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const S& v) { t.set(i, j, k, v); });
    return t;
  }

  // Result axis r takes the old axis perm[r].
  Tensor3 permuted(const std::array<int, 3>& perm) const {
    Tensor3 t(dims_[static_cast<std::size_t>(perm[0])], dims_[static_cast<std::size_t>(perm[1])],
              dims_[static_cast<std::size_t>(perm[2])]);
    for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const S& v) {
      std::array<std::size_t, 3> old{i, j, k};
      t.set(old[static_cast<std::size_t>(perm[0])], old[static_cast<std::size_t>(perm[1])],
            old[static_cast<std::size_t>(perm[2])], v);
    });
    return t;
  }

  friend bool operator==(const Tensor3& x, const Tensor3& y) {
    if (x.dims_ != y.dims_) return false;
    bool eq = true;
    x.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const S& v) {
      if (eq && !Traits::is_zero(v - y.at(i, j, k))) eq = false;
    });
    y.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const S& v) {
      if (eq && !Traits::is_zero(v - x.at(i, j, k))) eq = false;
    });
    return eq;
  }

 private:
  Dims dims_{1, 1, 1};
  bool dense_ = true;
  std::vector<S> data_;
  std::map<std::uint64_t, S> sparse_;
};

using QTensor = Tensor3<Rational>;

// Row-major pair flattening (i, i') -> i * d' + i'.
template <class S>
Tensor3<S> kronecker(const Tensor3<S>& t, const Tensor3<S>& u) {
  const Dims& d = t.dims();
  const Dims& e = u.dims();
  Tensor3<S> r(d[0] * e[0], d[1] * e[1], d[2] * e[2]);
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const S& v) {
    u.for_each_nonzero([&](std::size_t i2, std::size_t j2, std::size_t k2, const S& w) {
      r.set(i * e[0] + i2, j * e[1] + j2, k * e[2] + k2, v * w);
    });
  });
  return r;
}

template <class S>
Tensor3<S> kronecker_power(const Tensor3<S>& t, int k) {
  if (k < 1) throw std::invalid_argument("Kronecker power must be at least 1");
  Tensor3<S> r = t;
  for (int s = 1; s < k; ++s) r = kronecker(r, t);
  return r;
}

// Moves the chosen factor to the first axis, keeping the cyclic order of the others.
template <class S>
Tensor3<S> with_factor_first(const Tensor3<S>& t, Factor f) {
  switch (f) {
    case Factor::A: return t;
    case Factor::B: return t.permuted({1, 2, 0});
    case Factor::C: return t.permuted({2, 0, 1});
  }
  return t;
}

// ---------------------------------------------------------------- catalog

QTensor cw(int q);
QTensor skewcw(int q);
// cw(q) in a basis where the quadratic form on M is split (x_xi x_{xi+p} pairs);
// isomorphic to cw(q) over C and diagonal for its maximal torus. For q = 2 this is
// the permutation form sum_sigma a_s1 b_s2 c_s3.
QTensor cw_split(int q);
QTensor eps3();
QTensor matmul(int l, int m, int n);
QTensor unit(int r);
QTensor zero_tensor(std::size_t da, std::size_t db, std::size_t dc);
QTensor random_tensor(std::size_t da, std::size_t db, std::size_t dc, std::uint64_t seed, int bound = 9);
// Kronecker-square forms: perm(3) = cw_split(2)^{(x)2}, det(3) = eps3^{(x)2}.
QTensor perm_tensor(int n);
QTensor det_tensor(int n);
// Coefficient forms with entries 1/6 and sgn/6 on the symmetric positions.
QTensor perm_poly_tensor(int n);
QTensor det_poly_tensor(int n);

// Parses "cw:2", "skewcw:4", "matmul:2" or "matmul:2,3,4", "unit:3", "eps3", "perm:3",
// "det:3", "permpoly:3", "detpoly:3", "zero:3,3,3", "random:3,3,3,seed", "cwsplit:2";
// an optional "^k" suffix takes a Kronecker power.
QTensor catalog(const std::string& spec);
std::vector<std::string> catalog_names();

// ---------------------------------------------------------------- spaces

// Subspace of dA x dB matrices given by an independent basis.
template <class S>
struct MatrixSpace {
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::vector<Matrix<S>> basis;
  std::size_t dim() const { return basis.size(); }
};

using QMatrixSpace = MatrixSpace<Rational>;

// Builds a space from spanning matrices, keeping an independent subset in order.
QMatrixSpace make_matrix_space(std::size_t d1, std::size_t d2, const std::vector<QMatrix>& span);

// Images of the dual basis of `factor` as matrices on the other two factors in
// (A,B,C) order; zero and dependent images dropped.
QMatrixSpace slice_space(const QTensor& t, Factor factor);
// All images, including zero ones, indexed by the basis of `factor`.
std::vector<QMatrix> slices(const QTensor& t, Factor factor);

std::array<bool, 3> is_concise(const QTensor& t);
bool is_1generic(const QTensor& t, Factor factor);

// ---------------------------------------------------------------- files

struct ModTensor {
  std::uint64_t p = 2;
  QTensor t;
};

using AnyTensor = std::variant<QTensor, Tensor3<Cyclotomic12>, Tensor3<BigComplex>, ModTensor>;

std::string tensor_to_json(const QTensor& t);
std::string tensor_to_json(const Tensor3<Cyclotomic12>& t);
std::string tensor_to_json(const Tensor3<BigComplex>& t);
std::string tensor_to_json(const ModTensor& t);
AnyTensor tensor_from_json(const std::string& text);

}  // namespace borderlab
