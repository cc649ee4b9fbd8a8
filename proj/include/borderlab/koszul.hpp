#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "borderlab/linalg.hpp"
#include "borderlab/tensor.hpp"

namespace borderlab {

struct KoszulBound {
  std::string tensor;
  Factor factor = Factor::A;
  int p = 0;
  std::size_t restriction_dim = 0;
  std::uint64_t seed = 0;
  std::uint64_t prime = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 0;
  std::size_t bound = 0;
  RankCertificate certificate;
  std::string to_json() const;
};

// Matrix of Lambda^p A (x) B* -> Lambda^{p+1} A (x) C for the chosen factor in the role of A.
// Rows: sorted (p+1)-subsets x C basis; columns: sorted p-subsets x B basis.
QMatrix koszul_map(const QTensor& t, Factor factor, int p);
// Same matrix reduced mod prime, built without rational intermediates.
ModMatrix koszul_map_modp(const QTensor& t, Factor factor, int p, std::uint64_t prime);

// Composes the chosen factor with a seeded projection onto target_dim coordinates
// (entries uniform in [-9, 9]); identity = true keeps the tensor when target_dim = dim.
QTensor restrict_generic(const QTensor& t, Factor factor, std::size_t target_dim, std::uint64_t seed,
                         bool identity = false);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

struct KoszulOptions {
  std::size_t exact_limit = 512;  // use exact rank when max(rows, cols) <= this
  bool force_exact = false;
  std::uint64_t prime = 0;  // 0 = table prime selected by seed
};

// Maximum bound over seeds; validity does not depend on genericity.
KoszulBound lower_bound(const QTensor& t, Factor factor, int p, const std::vector<std::uint64_t>& seeds,
                        const KoszulOptions& opts = {}, const std::string& name = "");

struct BoundRow {
  std::string tensor;  // catalog spec
  int power = 1;
  int p = 1;
  Factor factor = Factor::A;
};

struct BoundRowResult {
  BoundRow row;
  bool skipped = false;
  std::string reason;
  KoszulBound result;
};

struct TableOptions {
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t long_running_dim = 6000;
  bool force = false;
  std::uint64_t memory_budget = 2ull << 30;  // bytes for the modular matrix
  KoszulOptions koszul;
};

std::size_t koszul_matrix_dim(const Dims& dims, Factor factor, int p);
std::vector<BoundRowResult> bound_table(const std::vector<BoundRow>& rows, const TableOptions& opts = {});

}  // namespace borderlab
