#include "borderlab/koszul.hpp"

#include <json.hpp>

#include <tuple>
#include <unordered_map>

#include "borderlab/rng.hpp"

namespace borderlab {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace {

// Sorted k-subsets of {0..n-1} in lexicographic order, as bitmasks.
std::vector<std::uint64_t> subsets(std::size_t n, std::size_t k) {
  std::vector<std::uint64_t> out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return out;
  while (true) {
    std::uint64_t mask = 0;
    for (auto i : idx) mask |= 1ull << i;
    out.push_back(mask);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

template <class Emit>
void koszul_entries(const QTensor& t, int p, Emit&& emit) {
  const Dims& d = t.dims();
  if (p < 0 || static_cast<std::size_t>(p) >= d[0]) throw std::invalid_argument("Koszul degree p out of range");
  if (d[0] > 63) throw std::invalid_argument("Koszul flattening supports at most 63 coordinates on the factor");
  auto src = subsets(d[0], static_cast<std::size_t>(p));
  auto dst = subsets(d[0], static_cast<std::size_t>(p) + 1);
  std::unordered_map<std::uint64_t, std::size_t> dst_index;
  dst_index.reserve(dst.size() * 2);
  for (std::size_t u = 0; u < dst.size(); ++u) dst_index[dst[u]] = u;
  // Group tensor entries by i.
  std::vector<std::vector<std::tuple<std::size_t, std::size_t, Rational>>> by_i(d[0]);
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) { by_i[i].emplace_back(j, k, v); });
  for (std::size_t s = 0; s < src.size(); ++s) {
    std::uint64_t S = src[s];
    for (std::size_t i = 0; i < d[0]; ++i) {
      if (S & (1ull << i) || by_i[i].empty()) continue;
      int below = __builtin_popcountll(S & ((1ull << i) - 1));
      bool neg = below % 2 == 1;
      std::size_t u = dst_index.at(S | (1ull << i));
      for (const auto& [j, k, v] : by_i[i]) emit(u * d[2] + k, s * d[1] + j, v, neg);
    }
  }
}

}  // namespace

QMatrix koszul_map(const QTensor& t0, Factor factor, int p) {
  QTensor t = with_factor_first(t0, factor);
  const Dims& d = t.dims();
  if (p < 0 || static_cast<std::size_t>(p) >= d[0]) throw std::invalid_argument("Koszul degree p out of range");
  QMatrix m(binomial(d[0], static_cast<std::uint64_t>(p) + 1) * d[2], binomial(d[0], static_cast<std::uint64_t>(p)) * d[1]);
  koszul_entries(t, p, [&](std::size_t r, std::size_t c, const Rational& v, bool neg) {
    if (neg)
      m(r, c) -= v;
    else
      m(r, c) += v;
  });
  return m;
}

ModMatrix koszul_map_modp(const QTensor& t0, Factor factor, int p, std::uint64_t prime) {
  QTensor t = with_factor_first(t0, factor);
  const Dims& d = t.dims();
  if (p < 0 || static_cast<std::size_t>(p) >= d[0]) throw std::invalid_argument("Koszul degree p out of range");
  PrimeField f(prime);
  ModMatrix m(binomial(d[0], static_cast<std::uint64_t>(p) + 1) * d[2], binomial(d[0], static_cast<std::uint64_t>(p)) * d[1],
              prime);
  koszul_entries(t, p, [&](std::size_t r, std::size_t c, const Rational& v, bool neg) {
    std::uint64_t x = f.from_rational(v);
    m(r, c) = neg ? f.sub(m(r, c), x) : f.add(m(r, c), x);
  });
  return m;
}

QTensor restrict_generic(const QTensor& t, Factor factor, std::size_t target_dim, std::uint64_t seed, bool identity) {
  auto f = static_cast<std::size_t>(factor);
  std::size_t n = t.dims()[f];
  if (target_dim == 0 || target_dim > n) throw std::invalid_argument("restriction dimension out of range");
  if (identity && target_dim == n) return t;
  SeededRng rng(seed);
  std::vector<long> proj(target_dim * n);
  for (auto& x : proj) x = static_cast<long>(rng.uniform_int(-9, 9));
  Dims nd = t.dims();
  nd[f] = target_dim;
  QTensor r(nd[0], nd[1], nd[2]);
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) {
    std::array<std::size_t, 3> x{i, j, k};
    std::size_t src = x[f];
    for (std::size_t a = 0; a < target_dim; ++a) {
      long c = proj[a * n + src];
      if (c == 0) continue;
      x[f] = a;
      r.add(x[0], x[1], x[2], Rational(c) * v);
    }
  });
  return r;
}

std::size_t koszul_matrix_dim(const Dims& dims, Factor factor, int p) {
  auto f = static_cast<std::size_t>(factor);
  std::size_t other1 = dims[(f + 1) % 3], other2 = dims[(f + 2) % 3];
  auto n = static_cast<std::uint64_t>(2 * p + 1);
  return std::max(binomial(n, static_cast<std::uint64_t>(p)) * other1,
                  binomial(n, static_cast<std::uint64_t>(p) + 1) * other2);
}

KoszulBound lower_bound(const QTensor& t, Factor factor, int p, const std::vector<std::uint64_t>& seeds,
                        const KoszulOptions& opts, const std::string& name) {
  if (p < 0) throw std::invalid_argument("p must be nonnegative");
  auto target = static_cast<std::size_t>(2 * p + 1);
  if (target > t.dim(factor)) throw std::invalid_argument("2p+1 exceeds the factor dimension");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  std::uint64_t denom = binomial(target - 1, static_cast<std::uint64_t>(p));
  KoszulBound best;
  bool have = false;
  for (std::uint64_t seed : seeds) {
    QTensor r = with_factor_first(restrict_generic(t, factor, target, seed), factor);
    KoszulBound kb;
    kb.tensor = name;
    kb.factor = factor;
    kb.p = p;
    kb.restriction_dim = target;
    kb.seed = seed;
    std::size_t rows = binomial(target, static_cast<std::uint64_t>(p) + 1) * r.dims()[2];
    std::size_t cols = binomial(target, static_cast<std::uint64_t>(p)) * r.dims()[1];
    kb.rows = rows;
    kb.cols = cols;
    if (opts.force_exact || std::max(rows, cols) <= opts.exact_limit) {
      kb.rank = rank_exact(koszul_map(r, Factor::A, p));
      kb.certificate.method = "exact";
    } else {
      std::uint64_t prime = opts.prime ? opts.prime : prime_for_seed(seed);
      for (std::size_t attempt = 0;; ++attempt) {
        try {
          kb.rank = rank_modp(koszul_map_modp(r, Factor::A, p, prime));
          break;
        } catch (const BadPrime&) {
          if (attempt + 1 >= prime_table().size()) throw;
          prime = prime_for_seed(seed + attempt + 1);
        }
      }
      kb.prime = prime;
      kb.certificate.method = "mod-p";
      kb.certificate.prime = prime;
    }
    kb.certificate.rank = kb.rank;
    kb.certificate.seed = seed;
    kb.bound = static_cast<std::size_t>((kb.rank + denom - 1) / denom);
    if (!have || kb.bound > best.bound) {
      best = kb;
      have = true;
    }
  }
  return best;
}

std::vector<BoundRowResult> bound_table(const std::vector<BoundRow>& rows, const TableOptions& opts) {
  std::vector<BoundRowResult> out(rows.size());
  auto n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (std::int64_t idx = 0; idx < n; ++idx) {
    const BoundRow& row = rows[static_cast<std::size_t>(idx)];
    BoundRowResult& res = out[static_cast<std::size_t>(idx)];
    res.row = row;
    try {
      QTensor base = catalog(row.tensor);
      Dims dims = base.dims();
      for (int k = 1; k < row.power; ++k)
        for (std::size_t a = 0; a < 3; ++a) dims[a] *= base.dims()[a];
      std::size_t dim = koszul_matrix_dim(dims, row.factor, row.p);
      if (dim > opts.long_running_dim && !opts.force) {
        res.skipped = true;
        res.reason = "long-running (matrix dimension " + std::to_string(dim) + ")";
        continue;
      }
      if (static_cast<std::uint64_t>(dim) * dim * 8 > opts.memory_budget)
        throw BudgetExceeded("matrix dimension " + std::to_string(dim) + " exceeds the memory budget");
      QTensor t = kronecker_power(base, row.power);
      res.result = lower_bound(t, row.factor, row.p, opts.seeds, opts.koszul,
                               row.tensor + (row.power > 1 ? "^" + std::to_string(row.power) : ""));
    } catch (const BudgetExceeded& e) {
      res.skipped = true;
      res.reason = e.what();
    }
  }
  return out;
}

std::string KoszulBound::to_json() const {
  nlohmann::json j;
  j["tensor"] = tensor;
  j["factor"] = factor_name(factor);
  j["p"] = p;
  j["restriction_dim"] = restriction_dim;
  j["seed"] = seed;
  j["prime"] = prime;
  j["matrix"] = {rows, cols};
  j["rank"] = rank;
  j["bound"] = bound;
  j["certificate"] = nlohmann::json::parse(certificate.to_json());
  return j.dump();
}

}  // namespace borderlab
