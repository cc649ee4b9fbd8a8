#include "borderlab/linalg.hpp"

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>

namespace borderlab {

// ---------------------------------------------------------------- threads

namespace {
std::atomic<int> g_threads{0};
}

int thread_count() {
  int n = g_threads.load();
  if (n > 0) return n;
  if (const char* env = std::getenv("BORDERLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 0); }

// ---------------------------------------------------------------- helpers

ModMatrix reduce_mod_p(const QMatrix& m, std::uint64_t p) {
  PrimeField f(p);
  ModMatrix r(m.rows, m.cols, p);
  for (std::size_t x = 0; x < m.a.size(); ++x)
    if (sgn(m.a[x]) != 0) r.a[x] = f.from_rational(m.a[x]);
  return r;
}

std::vector<std::vector<Integer>> integer_rows(const QMatrix& m) {
  std::vector<std::vector<Integer>> out(m.rows, std::vector<Integer>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < m.cols; ++j) {
      const Rational& v = m(i, j);
      if (sgn(v) != 0 && v.get_den() != 1) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    }
    for (std::size_t j = 0; j < m.cols; ++j) {
      const Rational& v = m(i, j);
      if (sgn(v) == 0) continue;
      Integer q = l / v.get_den();
      out[i][j] = q * v.get_num();
    }
  }
  return out;
}

namespace {

ModMatrix reduce_rows(const std::vector<std::vector<Integer>>& rows, std::size_t cols, std::uint64_t p) {
  PrimeField f(p);
  ModMatrix r(rows.size(), cols, p);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (sgn(rows[i][j]) != 0) r(i, j) = f.from_integer(rows[i][j]);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- exact

std::size_t rank_exact(const QMatrix& m) {
  if (m.rows == 0 || m.cols == 0) return 0;
  auto a = integer_rows(m);
  std::size_t rows = m.rows, cols = m.cols;
  Integer prev = 1;
  std::size_t r = 0;
  Integer tmp;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (sgn(a[i][c]) == 0) continue;
      if (piv == rows || mpz_cmpabs(a[i][c].get_mpz_t(), a[piv][c].get_mpz_t()) > 0) piv = i;
    }
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    const Integer& p = a[r][c];
    for (std::size_t i = r + 1; i < rows; ++i) {
      Integer& lead = a[i][c];
      if (sgn(lead) == 0) {
        for (std::size_t j = c + 1; j < cols; ++j) {
          if (sgn(a[i][j]) == 0) continue;
          mpz_mul(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), p.get_mpz_t());
          mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
        }
        continue;
      }
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_mul(tmp.get_mpz_t(), p.get_mpz_t(), a[i][j].get_mpz_t());
        mpz_submul(tmp.get_mpz_t(), lead.get_mpz_t(), a[r][j].get_mpz_t());
        mpz_divexact(a[i][j].get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
      }
      lead = 0;
    }
    prev = p;
    ++r;
  }
  return r;
}

std::size_t rank_exact(const Matrix<Cyclotomic12>& m) {
  if (m.rows == 0 || m.cols == 0) return 0;
  Matrix<Cyclotomic12> a = m;
  Cyclotomic12 prev(1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols && r < a.rows; ++c) {
    std::size_t piv = a.rows;
    for (std::size_t i = r; i < a.rows; ++i)
      if (!a(i, c).is_zero()) {
        piv = i;
        break;
      }
    if (piv == a.rows) continue;
    for (std::size_t j = 0; j < a.cols; ++j) std::swap(a(piv, j), a(r, j));
    Cyclotomic12 p = a(r, c);
    Cyclotomic12 prev_inv = prev.inverse();
    for (std::size_t i = r + 1; i < a.rows; ++i) {
      Cyclotomic12 lead = a(i, c);
      for (std::size_t j = c + 1; j < a.cols; ++j) a(i, j) = (p * a(i, j) - lead * a(r, j)) * prev_inv;
      a(i, c) = Cyclotomic12();
    }
    prev = p;
    ++r;
  }
  return r;
}

std::vector<std::size_t> rref_exact(QMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t piv = m.rows;
    for (std::size_t i = r; i < m.rows; ++i)
      if (sgn(m(i, c)) != 0) {
        piv = i;
        break;
      }
    if (piv == m.rows) continue;
    for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(piv, j), m(r, j));
    Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols; ++j)
      if (sgn(m(r, j)) != 0) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r || sgn(m(i, c)) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols; ++j)
        if (sgn(m(r, j)) != 0) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

namespace {

template <class V, class Get, class Zero, class Neg>
std::vector<V> kernel_from_rref(std::size_t cols, const std::vector<std::size_t>& pivots, Get&& get, Zero&& zero,
                                Neg&& neg_one_entry) {
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<V> out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    V v(cols, zero());
    v[f] = neg_one_entry(true);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = neg_one_entry(false) * get(r, f);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::vector<QVector> kernel_basis_exact(const QMatrix& m) {
  QMatrix a = m;
  auto pivots = rref_exact(a);
  return kernel_from_rref<QVector>(
      m.cols, pivots, [&](std::size_t r, std::size_t f) { return a(r, f); }, [] { return Rational(0); },
      [](bool one) { return Rational(one ? 1 : -1); });
}

std::vector<std::vector<Cyclotomic12>> kernel_basis(const Matrix<Cyclotomic12>& m) {
  Matrix<Cyclotomic12> a = m;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols && r < a.rows; ++c) {
    std::size_t piv = a.rows;
    for (std::size_t i = r; i < a.rows; ++i)
      if (!a(i, c).is_zero()) {
        piv = i;
        break;
      }
    if (piv == a.rows) continue;
    for (std::size_t j = 0; j < a.cols; ++j) std::swap(a(piv, j), a(r, j));
    Cyclotomic12 inv = a(r, c).inverse();
    for (std::size_t j = c; j < a.cols; ++j) a(r, j) = a(r, j) * inv;
    for (std::size_t i = 0; i < a.rows; ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      Cyclotomic12 f = a(i, c);
      for (std::size_t j = c; j < a.cols; ++j) a(i, j) = a(i, j) - f * a(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return kernel_from_rref<std::vector<Cyclotomic12>>(
      a.cols, pivots, [&](std::size_t row, std::size_t f) { return a(row, f); }, [] { return Cyclotomic12(); },
      [](bool one) { return Cyclotomic12(one ? 1 : -1); });
}

// ---------------------------------------------------------------- modular

std::vector<std::size_t> rref_modp(ModMatrix& m) {
  PrimeField f(m.p);
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t piv = m.rows;
    for (std::size_t i = r; i < m.rows; ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv == m.rows) continue;
    if (piv != r)
      std::swap_ranges(m.a.begin() + static_cast<std::ptrdiff_t>(piv * m.cols),
                       m.a.begin() + static_cast<std::ptrdiff_t>((piv + 1) * m.cols),
                       m.a.begin() + static_cast<std::ptrdiff_t>(r * m.cols));
    std::uint64_t inv = f.inv(m(r, c));
    std::uint64_t invs = f.shoup(inv);
    for (std::size_t j = c; j < m.cols; ++j) m(r, j) = f.mul_shoup(m(r, j), inv, invs);
    const std::uint64_t* prow = &m.a[r * m.cols];
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r) continue;
      std::uint64_t lead = m(i, c);
      if (lead == 0) continue;
      std::uint64_t ls = f.shoup(lead);
      std::uint64_t* row = &m.a[i * m.cols];
      for (std::size_t j = c; j < m.cols; ++j)
        if (prow[j] != 0) row[j] = f.sub(row[j], f.mul_shoup(prow[j], lead, ls));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

namespace {

template <bool Parallel>
std::size_t echelon_rank(ModMatrix& m, std::vector<std::size_t>* pivots) {
  PrimeField f(m.p);
  std::size_t r = 0;
  std::size_t cols = m.cols;
  if (pivots) pivots->clear();
  for (std::size_t c = 0; c < cols && r < m.rows; ++c) {
    std::size_t piv = m.rows;
    for (std::size_t i = r; i < m.rows; ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv == m.rows) continue;
    if (piv != r)
      std::swap_ranges(m.a.begin() + static_cast<std::ptrdiff_t>(piv * cols),
                       m.a.begin() + static_cast<std::ptrdiff_t>((piv + 1) * cols),
                       m.a.begin() + static_cast<std::ptrdiff_t>(r * cols));
    std::uint64_t inv = f.inv(m(r, c));
    const std::uint64_t* prow = &m.a[r * cols];
    std::size_t rows = m.rows;
    std::uint64_t* base = m.a.data();
    auto eliminate = [&](std::size_t i) {
      std::uint64_t* row = base + i * cols;
      if (row[c] == 0) return;
      std::uint64_t factor = f.mul(row[c], inv);
      std::uint64_t fs = f.shoup(factor);
      row[c] = 0;
      for (std::size_t j = c + 1; j < cols; ++j) {
        std::uint64_t pv = prow[j];
        if (pv != 0) row[j] = f.sub(row[j], f.mul_shoup(pv, factor, fs));
      }
    };
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
      for (std::size_t i = r + 1; i < rows; ++i) eliminate(i);
    } else {
      for (std::size_t i = r + 1; i < rows; ++i) eliminate(i);
    }
    if (pivots) pivots->push_back(c);
    ++r;
  }
  return r;
}

}  // namespace

std::size_t rank_modp(ModMatrix m, std::vector<std::size_t>* pivots) { return echelon_rank<true>(m, pivots); }

std::size_t rank_modp_serial(ModMatrix m, std::vector<std::size_t>* pivots) {
  return echelon_rank<false>(m, pivots);
}

std::string RankCertificate::to_json() const {
  nlohmann::json j;
  j["rank"] = rank;
  j["method"] = method;
  if (method == "mod-p") j["prime"] = prime;
  j["seed"] = seed;
  return j.dump();
}

std::optional<Rational> rational_reconstruct(const Integer& a, const Integer& m) {
  Integer bound;
  Integer half = m / 2;
  mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
  Integer r0 = m, r1 = a % m;
  if (r1 < 0) r1 += m;
  Integer t0 = 0, t1 = 1;
  while (r1 > bound) {
    Integer q = r0 / r1;
    Integer r2 = r0 - q * r1;
    Integer t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (sgn(t1) == 0 || abs(t1) > bound) return std::nullopt;
  Integer g = gcd(r1, t1);
  if (g != 1) return std::nullopt;
  Rational q(r1, t1);
  q.canonicalize();
  return q;
}

std::optional<Rational> rational_reconstruct(std::uint64_t a, std::uint64_t p) {
  Integer A, P;
  mpz_import(A.get_mpz_t(), 1, 1, sizeof(a), 0, 0, &a);
  mpz_import(P.get_mpz_t(), 1, 1, sizeof(p), 0, 0, &p);
  return rational_reconstruct(A, P);
}

namespace {

Integer to_integer(std::uint64_t v) {
  Integer z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return z;
}

bool verify_kernel(const std::vector<std::vector<Integer>>& rows, const std::vector<QVector>& kernel) {
  std::vector<std::vector<std::size_t>> support(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      if (sgn(rows[i][j]) != 0) support[i].push_back(j);
  Integer acc, term;
  for (const auto& v : kernel) {
    Integer l = 1;
    for (const auto& x : v)
      if (sgn(x) != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    std::vector<Integer> w(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
      if (sgn(v[j]) != 0) w[j] = (l / v[j].get_den()) * v[j].get_num();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      acc = 0;
      for (std::size_t j : support[i])
        if (sgn(w[j]) != 0) mpz_addmul(acc.get_mpz_t(), rows[i][j].get_mpz_t(), w[j].get_mpz_t());
      if (sgn(acc) != 0) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<QVector> kernel_basis(const QMatrix& m) {
  if (m.cols == 0) return {};
  if (m.rows == 0) return kernel_basis_exact(m);
  auto rows = integer_rows(m);
  const auto& primes = prime_table();
  std::vector<std::size_t> pivots;
  std::vector<std::size_t> free_cols;
  std::vector<std::vector<Integer>> residues;  // per kernel vector, values at pivot columns
  Integer modulus = 1;
  constexpr std::size_t kMaxPrimes = 8;
  for (std::size_t pi = 0; pi < kMaxPrimes; ++pi) {
    std::uint64_t p = primes[pi];
    ModMatrix a = reduce_rows(rows, m.cols, p);
    auto piv = rref_modp(a);
    if (pi > 0 && piv != pivots) {
      if (piv.size() < pivots.size()) continue;
      modulus = 1;  // earlier primes were unlucky
    }
    if (modulus == 1) {
      pivots = piv;
      std::vector<bool> is_pivot(m.cols, false);
      for (std::size_t c : pivots) is_pivot[c] = true;
      free_cols.clear();
      for (std::size_t c = 0; c < m.cols; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
      residues.assign(free_cols.size(), std::vector<Integer>(pivots.size()));
    }
    PrimeField f(p);
    Integer P = to_integer(p);
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      for (std::size_t r = 0; r < pivots.size(); ++r) {
        Integer v = to_integer(f.neg(a(r, free_cols[k])));
        if (modulus == 1) {
          residues[k][r] = v;
        } else {
          // CRT: x = old + modulus * ((v - old) * modulus^{-1} mod P)
          Integer inv;
          mpz_invert(inv.get_mpz_t(), modulus.get_mpz_t(), P.get_mpz_t());
          Integer d = (v - residues[k][r]) % P;
          if (d < 0) d += P;
          d = (d * inv) % P;
          residues[k][r] += modulus * d;
        }
      }
    }
    modulus *= P;
    std::vector<QVector> kernel;
    bool ok = true;
    for (std::size_t k = 0; k < free_cols.size() && ok; ++k) {
      QVector v(m.cols, Rational(0));
      v[free_cols[k]] = 1;
      for (std::size_t r = 0; r < pivots.size(); ++r) {
        auto q = rational_reconstruct(residues[k][r], modulus);
        if (!q) {
          ok = false;
          break;
        }
        v[pivots[r]] = *q;
      }
      kernel.push_back(std::move(v));
    }
    if (ok && verify_kernel(rows, kernel)) return kernel;
  }
  return kernel_basis_exact(m);
}

std::size_t rank_certified(const QMatrix& m) { return m.cols - kernel_basis(m).size(); }

std::vector<std::size_t> independent_subset(const std::vector<QVector>& vs) {
  if (vs.empty()) return {};
  std::size_t n = vs[0].size();
  QMatrix cols(n, vs.size());
  for (std::size_t c = 0; c < vs.size(); ++c) {
    if (vs[c].size() != n) throw std::invalid_argument("vectors of different lengths");
    for (std::size_t i = 0; i < n; ++i) cols(i, c) = vs[c][i];
  }
  auto rows = integer_rows(cols);
  ModMatrix a = reduce_rows(rows, vs.size(), prime_table()[0]);
  std::vector<std::size_t> piv;
  rank_modp_serial(a, &piv);
  if (piv.size() == vs.size()) return piv;
  std::size_t rank = rank_certified(cols);
  if (rank == piv.size()) {
    // Independent mod p implies independent over Q, so equal rank makes them a basis.
    return piv;
  }
  QMatrix e = cols;
  return rref_exact(e);
}

std::vector<QVector> intersect(const std::vector<std::vector<QVector>>& spaces, std::size_t ambient) {
  std::vector<QVector> annihilators;
  for (const auto& space : spaces) {
    if (space.empty()) return {};
    QMatrix s(space.size(), ambient);
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (space[i].size() != ambient) throw std::invalid_argument("subspace vector has wrong length");
      for (std::size_t j = 0; j < ambient; ++j) s(i, j) = space[i][j];
    }
    auto ann = kernel_basis(s);
    annihilators.insert(annihilators.end(), ann.begin(), ann.end());
  }
  QMatrix stack(annihilators.size(), ambient);
  for (std::size_t i = 0; i < annihilators.size(); ++i)
    for (std::size_t j = 0; j < ambient; ++j) stack(i, j) = annihilators[i][j];
  if (annihilators.empty()) {
    std::vector<QVector> all;
    for (std::size_t j = 0; j < ambient; ++j) {
      QVector e(ambient, Rational(0));
      e[j] = 1;
      all.push_back(std::move(e));
    }
    return all;
  }
  return kernel_basis(stack);
}

// ---------------------------------------------------------------- parametric

Matrix<QPoly> smith_normal_form(Matrix<QPoly> a) {
  std::size_t rows = a.rows, cols = a.cols;
  std::size_t n = std::min(rows, cols);
  auto swap_rows = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < cols; ++c) std::swap(a(i, c), a(j, c));
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < rows; ++r) std::swap(a(r, i), a(r, j));
  };
  for (std::size_t k = 0; k < n; ++k) {
    while (true) {
      std::size_t bi = rows, bj = cols;
      int bd = std::numeric_limits<int>::max();
      for (std::size_t i = k; i < rows; ++i)
        for (std::size_t j = k; j < cols; ++j)
          if (!a(i, j).is_zero() && a(i, j).degree() < bd) {
            bd = a(i, j).degree();
            bi = i;
            bj = j;
          }
      if (bi == rows) return a;
      swap_rows(k, bi);
      swap_cols(k, bj);
      QPoly p = a(k, k);
      bool clean = true;
      for (std::size_t i = k + 1; i < rows; ++i) {
        if (a(i, k).is_zero()) continue;
        QPoly q = QPoly::divmod(a(i, k), p).first;
        for (std::size_t c = k; c < cols; ++c)
          if (!a(k, c).is_zero()) a(i, c) = a(i, c) - q * a(k, c);
        if (!a(i, k).is_zero()) clean = false;
      }
      for (std::size_t j = k + 1; j < cols; ++j) {
        if (a(k, j).is_zero()) continue;
        QPoly q = QPoly::divmod(a(k, j), p).first;
        for (std::size_t r = k; r < rows; ++r)
          if (!a(r, k).is_zero()) a(r, j) = a(r, j) - q * a(r, k);
        if (!a(k, j).is_zero()) clean = false;
      }
      if (!clean) continue;
      bool divisible = true;
      for (std::size_t i = k + 1; i < rows && divisible; ++i)
        for (std::size_t j = k + 1; j < cols; ++j)
          if (!a(i, j).is_zero() && !QPoly::divmod(a(i, j), p).second.is_zero()) {
            for (std::size_t c = k; c < cols; ++c) a(k, c) = a(k, c) + a(i, c);
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    a(k, k) = a(k, k).monic();
  }
  return a;
}

ParametricRank rank_parametric(const Matrix<QPoly>& m, std::size_t max_dim) {
  if (m.rows > max_dim || m.cols > max_dim)
    throw DimensionBudget("parametric rank limited to dimension " + std::to_string(max_dim));
  ParametricRank out;
  if (m.rows == 0 || m.cols == 0) return out;
  Matrix<QPoly> s = smith_normal_form(m);
  for (std::size_t k = 0; k < std::min(s.rows, s.cols); ++k) {
    if (s(k, k).is_zero()) break;
    out.invariant_factors.push_back(s(k, k));
    ++out.generic_rank;
    if (s(k, k).is_constant()) ++out.min_rank;
  }
  out.exceptional = out.invariant_factors.empty() ? QPoly(1) : out.invariant_factors.back();
  return out;
}

// ---------------------------------------------------------------- min rank

std::uint64_t projective_point_count(std::uint64_t p, std::size_t d) {
  unsigned __int128 n = 0, pk = 1;
  for (std::size_t i = 0; i < d; ++i) {
    n += pk;
    pk *= p;
    if (n > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(n);
}

std::vector<std::uint64_t> projective_point(std::uint64_t idx, std::uint64_t p, std::size_t d) {
  std::vector<std::uint64_t> v(d, 0);
  // Block for a leading 1 at position f holds p^{d-1-f} points; the last position comes first.
  std::uint64_t block = 1;
  for (std::size_t f = d; f-- > 0;) {
    if (idx < block) {
      v[f] = 1;
      for (std::size_t j = d; j-- > f + 1;) {
        v[j] = idx % p;
        idx /= p;
      }
      return v;
    }
    idx -= block;
    block *= p;
  }
  throw std::out_of_range("projective point index out of range");
}

namespace {

struct SmallModSpace {
  std::uint64_t p;
  std::size_t rows, cols, d;
  std::vector<std::uint64_t> basis;  // d * rows * cols

  SmallModSpace(const std::vector<QMatrix>& b, std::uint64_t prime) : p(prime), d(b.size()) {
    if (b.empty()) throw std::invalid_argument("minimum rank needs a nonempty basis");
    if (!is_prime_u64(p) || p > (1ull << 31)) throw std::invalid_argument("minimum rank needs a small prime");
    rows = b[0].rows;
    cols = b[0].cols;
    basis.assign(d * rows * cols, 0);
    PrimeField f(p);
    for (std::size_t s = 0; s < d; ++s) {
      Integer l = 1;
      for (const auto& x : b[s].a)
        if (sgn(x) != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
      for (std::size_t x = 0; x < rows * cols; ++x) {
        const Rational& v = b[s].a[x];
        if (sgn(v) != 0) basis[s * rows * cols + x] = f.from_integer((l / v.get_den()) * v.get_num());
      }
    }
  }

  std::size_t rank_at(const std::vector<std::uint64_t>& coef, std::vector<std::uint64_t>& work) const {
    std::size_t n = rows * cols;
    work.assign(n, 0);
    for (std::size_t s = 0; s < d; ++s) {
      if (coef[s] == 0) continue;
      const std::uint64_t* b = &basis[s * n];
      for (std::size_t x = 0; x < n; ++x) work[x] = (work[x] + coef[s] * b[x]) % p;
    }
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
      std::size_t piv = rows;
      for (std::size_t i = r; i < rows; ++i)
        if (work[i * cols + c] != 0) {
          piv = i;
          break;
        }
      if (piv == rows) continue;
      if (piv != r)
        for (std::size_t j = 0; j < cols; ++j) std::swap(work[piv * cols + j], work[r * cols + j]);
      std::uint64_t inv = PrimeField(p).inv(work[r * cols + c]);
      for (std::size_t i = r + 1; i < rows; ++i) {
        std::uint64_t lead = work[i * cols + c];
        if (lead == 0) continue;
        std::uint64_t fct = lead * inv % p;
        for (std::size_t j = c; j < cols; ++j)
          work[i * cols + j] = (work[i * cols + j] + (p - fct) * work[r * cols + j]) % p;
      }
      ++r;
    }
    return r;
  }
};

void check_budget(std::uint64_t total, std::uint64_t budget) {
  if (total > budget)
    throw BudgetExceeded("projective space has " + std::to_string(total) + " points, budget " +
                         std::to_string(budget));
}

MinRankResult finish(const SmallModSpace& sp, std::uint64_t total, std::size_t rho, std::uint64_t idx) {
  MinRankResult res;
  res.rho = rho;
  res.prime = sp.p;
  res.points = total;
  res.witness = projective_point(idx, sp.p, sp.d);
  return res;
}

}  // namespace

MinRankResult min_rank_certificate_serial(const std::vector<QMatrix>& basis, std::uint64_t p,
                                          std::uint64_t budget) {
  SmallModSpace sp(basis, p);
  std::uint64_t total = projective_point_count(p, sp.d);
  check_budget(total, budget);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::uint64_t best_idx = 0;
  std::vector<std::uint64_t> work;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::size_t r = sp.rank_at(projective_point(idx, p, sp.d), work);
    if (r < best) {
      best = r;
      best_idx = idx;
    }
  }
  return finish(sp, total, best, best_idx);
}

MinRankResult min_rank_certificate(const std::vector<QMatrix>& basis, std::uint64_t p, std::uint64_t budget,
                                   const ProgressFn& progress) {
  SmallModSpace sp(basis, p);
  std::uint64_t total = projective_point_count(p, sp.d);
  check_budget(total, budget);
  constexpr std::uint64_t kChunk = 1000000;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::uint64_t best_idx = 0;
  for (std::uint64_t start = 0; start < total; start += kChunk) {
    std::uint64_t end = std::min(total, start + kChunk);
    auto n = static_cast<std::int64_t>(end - start);
#pragma omp parallel num_threads(thread_count())
    {
      std::size_t lbest = std::numeric_limits<std::size_t>::max();
      std::uint64_t lidx = 0;
      std::vector<std::uint64_t> work;
#pragma omp for schedule(static)
      for (std::int64_t t = 0; t < n; ++t) {
        std::uint64_t idx = start + static_cast<std::uint64_t>(t);
        std::size_t r = sp.rank_at(projective_point(idx, p, sp.d), work);
        if (r < lbest || (r == lbest && idx < lidx)) {
          lbest = r;
          lidx = idx;
        }
      }
#pragma omp critical
      {
        if (lbest < best || (lbest == best && lidx < best_idx)) {
          best = lbest;
          best_idx = lidx;
        }
      }
    }
    if (progress) progress(end, total);
  }
  return finish(sp, total, best, best_idx);
}

std::string MinRankResult::to_json() const {
  nlohmann::json j;
  j["rho"] = rho;
  j["prime"] = prime;
  j["points"] = points;
  j["witness"] = witness;
  return j.dump();
}

}  // namespace borderlab
