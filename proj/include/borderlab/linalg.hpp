#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "borderlab/matrix.hpp"
#include "borderlab/poly.hpp"
#include "borderlab/scalar.hpp"

namespace borderlab {

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

class DimensionBudget : public std::runtime_error {
 public:
  explicit DimensionBudget(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------- threads

// Thread count used by parallel kernels; BORDERLAB_THREADS overrides the default.
int thread_count();
void set_thread_count(int n);

// ---------------------------------------------------------------- exact

// Fraction-free Bareiss elimination with largest-magnitude pivots.
std::size_t rank_exact(const QMatrix& m);
std::size_t rank_exact(const Matrix<Cyclotomic12>& m);

// Reduced row echelon form over Q; returns pivot columns.
std::vector<std::size_t> rref_exact(QMatrix& m);

std::vector<QVector> kernel_basis_exact(const QMatrix& m);
std::vector<std::vector<Cyclotomic12>> kernel_basis(const Matrix<Cyclotomic12>& m);

// Right kernel over Q. Solves mod p, lifts by rational reconstruction and checks
// M v = 0 exactly; falls back to exact elimination when lifting fails.
std::vector<QVector> kernel_basis(const QMatrix& m);

// Exact rank over Q via the lifted kernel (rank = cols - kernel size).
std::size_t rank_certified(const QMatrix& m);

// Basis of the intersection of subspaces (each given by spanning vectors).
std::vector<QVector> intersect(const std::vector<std::vector<QVector>>& spaces, std::size_t ambient);

// Indices (ascending) of a subset forming a basis of the span.
std::vector<std::size_t> independent_subset(const std::vector<QVector>& vs);

// ---------------------------------------------------------------- modular

struct RankCertificate {
  std::size_t rank = 0;
  std::string method = "mod-p";
  std::uint64_t prime = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> pivots;
  std::string to_json() const;
};

// Row-parallel Gaussian elimination; identical result for any thread count.
std::size_t rank_modp(ModMatrix m, std::vector<std::size_t>* pivots = nullptr);
// Serial reference used in tests and benchmarks.
std::size_t rank_modp_serial(ModMatrix m, std::vector<std::size_t>* pivots = nullptr);

// Reduced row echelon form mod p in place; returns pivot columns.
std::vector<std::size_t> rref_modp(ModMatrix& m);

// Rational reconstruction of a mod m with |num|, den <= sqrt(m/2).
std::optional<Rational> rational_reconstruct(const Integer& a, const Integer& m);
std::optional<Rational> rational_reconstruct(std::uint64_t a, std::uint64_t p);

// Rows scaled by the lcm of their denominators.
std::vector<std::vector<Integer>> integer_rows(const QMatrix& m);

// ---------------------------------------------------------------- parametric

struct ParametricRank {
  std::size_t generic_rank = 0;
  std::size_t min_rank = 0;
  // Monic invariant factors of the Smith form over Q[x].
  std::vector<QPoly> invariant_factors;
  // Last nonzero invariant factor: the rank drops exactly at its roots.
  QPoly exceptional;
};

ParametricRank rank_parametric(const Matrix<QPoly>& m, std::size_t max_dim = 64);
Matrix<QPoly> smith_normal_form(Matrix<QPoly> m);

// ---------------------------------------------------------------- min rank

struct MinRankResult {
  std::size_t rho = 0;
  std::uint64_t prime = 0;
  std::uint64_t points = 0;
  std::vector<std::uint64_t> witness;
  std::string to_json() const;
};

std::uint64_t projective_point_count(std::uint64_t p, std::size_t d);
// Normalized representative (first nonzero coordinate 1) of index idx in lexicographic order.
std::vector<std::uint64_t> projective_point(std::uint64_t idx, std::uint64_t p, std::size_t d);

using ProgressFn = std::function<void(std::uint64_t done, std::uint64_t total)>;

// Minimum F_p-rank over all points of P(span(basis) (x) F_p); basis matrices integral.
MinRankResult min_rank_certificate(const std::vector<QMatrix>& basis, std::uint64_t p, std::uint64_t budget,
                                   const ProgressFn& progress = nullptr);
MinRankResult min_rank_certificate_serial(const std::vector<QMatrix>& basis, std::uint64_t p,
                                          std::uint64_t budget);

}  // namespace borderlab
