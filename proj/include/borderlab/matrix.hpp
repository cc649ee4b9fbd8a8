#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "borderlab/scalar.hpp"

namespace borderlab {

// Dense row-major matrix over an exact or numeric scalar.
template <class S>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<S> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, ScalarTraits<S>::zero()) {}
  Matrix(std::size_t r, std::size_t c, const S& fill) : rows(r), cols(c), a(r * c, fill) {}

  S& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = ScalarTraits<S>::one();
    return m;
  }

  bool is_zero() const {
    for (const S& x : a)
      if (!ScalarTraits<S>::is_zero(x)) return false;
    return true;
  }

  Matrix transposed() const {
    Matrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) return false;
    for (std::size_t k = 0; k < x.a.size(); ++k)
      if (!ScalarTraits<S>::is_zero(x.a[k] - y.a[k])) return false;
    return true;
  }
};

using QMatrix = Matrix<Rational>;
using QVector = std::vector<Rational>;

// Dense matrix over F_p stored as canonical representatives.
struct ModMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t p = 2;
  std::vector<std::uint64_t> a;

  ModMatrix() = default;
  ModMatrix(std::size_t r, std::size_t c, std::uint64_t prime) : rows(r), cols(c), p(prime), a(r * c, 0) {}
  std::uint64_t& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  std::uint64_t operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Throws BadPrime if some denominator vanishes mod p.
ModMatrix reduce_mod_p(const QMatrix& m, std::uint64_t p);

}  // namespace borderlab
