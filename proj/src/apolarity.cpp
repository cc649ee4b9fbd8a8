#include "borderlab/apolarity.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <omp.h>

#include <json.hpp>

#include "borderlab/rng.hpp"

namespace borderlab {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- linear systems

// Column of a test matrix: entries c0 + c1 * x_var on sparse rows.
struct SysColumn {
  int var = -1;
  std::vector<std::pair<std::size_t, ParamEntry>> entries;
};

std::size_t constant_rank(const QMatrix& m) {
  if (m.rows == 0 || m.cols == 0) return 0;
  if (std::max(m.rows, m.cols) <= 400) return rank_exact(m);
  // rank_certified lifts a kernel; keep the kernel on the short side.
  return m.cols > m.rows ? rank_certified(m.transposed()) : rank_certified(m);
}

std::vector<QPoly> coprime_base(const std::vector<QPoly>& polys) {
  std::vector<QPoly> base;
  for (const auto& p : polys)
    if (!p.is_constant()) base.push_back(p.monic());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < base.size() && !changed; ++a) {
      for (std::size_t b = a + 1; b < base.size() && !changed; ++b) {
        QPoly g = QPoly::gcd(base[a], base[b]);
        if (g.is_constant()) continue;
        std::vector<QPoly> next;
        for (std::size_t c = 0; c < base.size(); ++c)
          if (c != a && c != b) next.push_back(base[c]);
        for (const QPoly& q : {g, QPoly::divmod(base[a], g).first, QPoly::divmod(base[b], g).first})
          if (!q.is_constant()) next.push_back(q.monic());
        base = std::move(next);
        changed = true;
      }
    }
  }
  return base;
}

struct ComponentResult {
  int var = -1;  // the single parameter, -1 when constant or relaxed
  bool relaxed = false;
  std::size_t generic_kernel = 0;
  std::size_t max_kernel = 0;  // used when relaxed
  std::vector<QPoly> factors;  // nonconstant invariant factors (single parameter)
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : p_(n) { std::iota(p_.begin(), p_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (p_[x] != x) x = p_[x] = p_[p_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { p_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> p_;
};

Rational random_value(SeededRng& rng) { return Rational(static_cast<long>(rng.uniform_int(2, 997))); }

ComponentResult analyze_component(const std::vector<const SysColumn*>& cols, std::size_t nrows) {
  ComponentResult res;
  std::set<int> vars;
  for (const auto* c : cols)
    if (c->var >= 0) vars.insert(c->var);
  const std::size_t ncols = cols.size();

  auto specialize = [&](const std::map<int, Rational>& values) {
    QMatrix m(nrows, ncols);
    for (std::size_t j = 0; j < ncols; ++j) {
      Rational x = cols[j]->var >= 0 ? values.at(cols[j]->var) : Rational(0);
      for (const auto& [r, e] : cols[j]->entries) m(r, j) = e.c0 + e.c1 * x;
    }
    return m;
  };

  if (vars.empty()) {
    res.generic_kernel = ncols - constant_rank(specialize({}));
    return res;
  }

  if (vars.size() == 1) {
    // Rows of [c0 | c1] spanning the row space keep the rank at every x.
    std::vector<QVector> rowvecs(nrows, QVector(2 * ncols, Rational(0)));
    for (std::size_t j = 0; j < ncols; ++j)
      for (const auto& [r, e] : cols[j]->entries) {
        rowvecs[r][j] = e.c0;
        rowvecs[r][ncols + j] = e.c1;
      }
    auto keep = independent_subset(rowvecs);
    Matrix<QPoly> m(keep.size(), ncols);
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t j = 0; j < ncols; ++j)
        m(a, j) = QPoly(std::vector<Rational>{rowvecs[keep[a]][j], rowvecs[keep[a]][ncols + j]});
    try {
      ParametricRank pr = rank_parametric(m);
      res.var = *vars.begin();
      res.generic_kernel = ncols - pr.generic_rank;
      for (const auto& f : pr.invariant_factors)
        if (!f.is_constant()) res.factors.push_back(f);
      return res;
    } catch (const DimensionBudget&) {
      // fall through to the relaxation
    }
  }

  // Each parametric column is replaced by its two constant parts; the source vectors
  // stay independent, so the kernel bounds the kernel at every parameter value.
  res.relaxed = true;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> split;
  for (const auto* c : cols) {
    std::vector<std::pair<std::size_t, Rational>> c0, c1;
    for (const auto& [r, e] : c->entries) {
      if (sgn(e.c0) != 0) c0.emplace_back(r, e.c0);
      if (sgn(e.c1) != 0) c1.emplace_back(r, e.c1);
    }
    split.push_back(std::move(c0));
    if (c->var >= 0) split.push_back(std::move(c1));
  }
  QMatrix relaxed(nrows, split.size());
  for (std::size_t j = 0; j < split.size(); ++j)
    for (const auto& [r, v] : split[j]) relaxed(r, j) = v;
  res.max_kernel = split.size() - constant_rank(relaxed);

  SeededRng rng(0x5eed + vars.size());
  std::map<int, Rational> values;
  for (int v : vars) values[v] = random_value(rng);
  res.generic_kernel = ncols - constant_rank(specialize(values));
  return res;
}

TestOutcome analyze(const std::vector<SysColumn>& cols, std::size_t threshold) {
  TestOutcome out;
  out.threshold = threshold;
  std::unordered_map<std::size_t, std::size_t> row_id;
  for (const auto& c : cols)
    for (const auto& [r, e] : c.entries) row_id.emplace(r, row_id.size());
  const std::size_t nc = cols.size();
  UnionFind uf(nc + row_id.size());
  for (std::size_t j = 0; j < nc; ++j)
    for (const auto& [r, e] : cols[j].entries) uf.unite(j, nc + row_id.at(r));

  std::map<std::size_t, std::vector<std::size_t>> comp_cols;
  for (std::size_t j = 0; j < nc; ++j) comp_cols[uf.find(j)].push_back(j);

  std::map<int, std::vector<QPoly>> factors_by_var;
  std::set<int> all_vars;
  for (const auto& c : cols)
    if (c.var >= 0) all_vars.insert(c.var);

  for (const auto& [root, members] : comp_cols) {
    // local rows
    std::unordered_map<std::size_t, std::size_t> local;
    std::vector<SysColumn> localized;
    localized.reserve(members.size());
    for (std::size_t j : members) {
      SysColumn c;
      c.var = cols[j].var;
      for (const auto& [r, e] : cols[j].entries) {
        auto it = local.emplace(r, local.size()).first;
        c.entries.emplace_back(it->second, e);
      }
      localized.push_back(std::move(c));
    }
    std::vector<const SysColumn*> ptrs;
    for (const auto& c : localized) ptrs.push_back(&c);
    ComponentResult cr = analyze_component(ptrs, local.size());
    out.kernel_generic += cr.generic_kernel;
    if (cr.relaxed) {
      out.exact = false;
      out.kernel_max += cr.max_kernel;
    } else {
      out.kernel_max += cr.generic_kernel;
      if (cr.var >= 0) {
        auto& fs = factors_by_var[cr.var];
        fs.insert(fs.end(), cr.factors.begin(), cr.factors.end());
      }
    }
  }

  for (const auto& [var, fs] : factors_by_var) {
    auto base = coprime_base(fs);
    std::size_t best = 0;
    std::vector<std::pair<QPoly, std::size_t>> drops;
    for (const auto& g : base) {
      std::size_t drop = 0;
      for (const auto& f : fs)
        if (!QPoly::gcd(f, g).is_constant()) ++drop;
      best = std::max(best, drop);
      drops.emplace_back(g, drop);
    }
    out.kernel_max += best;
    if (all_vars.size() == 1 && out.exact && out.kernel_generic < threshold) {
      for (const auto& [g, drop] : drops)
        if (out.kernel_generic + drop >= threshold) out.special.push_back(g);
    }
  }
  if (all_vars.size() == 1) out.param_var = *all_vars.begin();
  return out;
}

std::size_t pair_index(std::size_t a, std::size_t b, std::size_t n) {
  // a < b
  return a * n - a * (a + 1) / 2 + (b - a - 1);
}

ParamEntry scaled(const ParamEntry& e, int s) {
  if (s > 0) return e;
  return {-e.c0, -e.c1};
}

json param_to_json(const ParamEntry& e) { return json::array({to_string(e.c0), to_string(e.c1)}); }

json poly_to_json(const QPoly& p) {
  json a = json::array();
  for (const auto& c : p.coeffs()) a.push_back(to_string(c));
  return a;
}

// Basis vectors evaluated at x.
std::vector<QVector> evaluated(const CandidateSpace& e, const Rational& x) {
  std::vector<QVector> out;
  for (const auto& v : e.basis) {
    QVector q(e.d1 * e.d2, Rational(0));
    for (const auto& [idx, pe] : v.coords) q[idx] = v.var >= 0 ? pe.c0 + pe.c1 * x : pe.c0;
    out.push_back(std::move(q));
  }
  return out;
}

std::size_t span_rank(const std::vector<QVector>& vs, std::size_t n) {
  QMatrix m(vs.size(), n);
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = 0; b < n; ++b) m(a, b) = vs[a][b];
  return constant_rank(m);
}

Rational rational_pow(const Rational& b, long e) {
  Integer num = b.get_num(), den = b.get_den();
  Integer pn, pd;
  unsigned long ue = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_pow_ui(pn.get_mpz_t(), num.get_mpz_t(), ue);
  mpz_pow_ui(pd.get_mpz_t(), den.get_mpz_t(), ue);
  Rational r = e >= 0 ? Rational(pn, pd) : Rational(pd, pn);
  r.canonicalize();
  return r;
}

std::size_t third_factor(const std::array<int, 3>& grade) {
  for (std::size_t f = 0; f < 3; ++f)
    if (grade[f] == 0) return f;
  throw std::invalid_argument("grade must have one zero entry");
}

void check_grade(const std::array<int, 3>& g) {
  int ones = 0;
  for (int x : g) {
    if (x != 0 && x != 1) throw std::invalid_argument("grade entries must be 0 or 1");
    ones += x;
  }
  if (ones != 2) throw std::invalid_argument("grade must have two nonzero entries");
}

}  // namespace

// ---------------------------------------------------------------- spaces

int CandidateSpace::num_params() const {
  std::set<int> vars;
  for (const auto& v : basis)
    if (v.var >= 0) vars.insert(v.var);
  return static_cast<int>(vars.size());
}

std::array<Factor, 2> CandidateSpace::factors() const {
  std::size_t z = third_factor(grade);
  std::array<Factor, 2> out{};
  std::size_t k = 0;
  for (std::size_t f = 0; f < 3; ++f)
    if (f != z) out[k++] = static_cast<Factor>(f);
  return out;
}

std::string CandidateSpace::to_json() const {
  json j;
  j["grade"] = grade;
  j["d1"] = d1;
  j["d2"] = d2;
  j["marked"] = marked;
  j["relaxed"] = relaxed;
  j["label"] = label;
  json b = json::array();
  for (const auto& v : basis) {
    json coords = json::array();
    for (const auto& [idx, e] : v.coords) {
      json c = param_to_json(e);
      c.insert(c.begin(), idx);
      coords.push_back(c);
    }
    b.push_back({{"var", v.var}, {"coords", coords}});
  }
  j["basis"] = b;
  return j.dump();
}

CandidateSpace CandidateSpace::from_json(const std::string& text) {
  json j = json::parse(text);
  CandidateSpace e;
  e.grade = j.at("grade").get<std::array<int, 3>>();
  check_grade(e.grade);
  e.d1 = j.at("d1").get<std::size_t>();
  e.d2 = j.at("d2").get<std::size_t>();
  e.marked = j.value("marked", std::size_t{0});
  e.relaxed = j.value("relaxed", false);
  e.label = j.value("label", std::string());
  for (const auto& v : j.at("basis")) {
    SpaceVector sv;
    sv.var = v.value("var", -1);
    for (const auto& c : v.at("coords")) {
      auto idx = c.at(0).get<std::size_t>();
      if (idx >= e.d1 * e.d2) throw std::invalid_argument("candidate coordinate out of range");
      ParamEntry pe{parse_rational(c.at(1).get<std::string>()),
                    c.size() > 2 ? parse_rational(c.at(2).get<std::string>()) : Rational(0)};
      sv.coords[idx] = pe;
    }
    e.basis.push_back(std::move(sv));
  }
  return e;
}

CandidateSpace space_from_matrices(const std::array<int, 3>& grade, const std::vector<QMatrix>& ms) {
  check_grade(grade);
  CandidateSpace e;
  e.grade = grade;
  if (ms.empty()) throw std::invalid_argument("space needs at least one matrix");
  e.d1 = ms[0].rows;
  e.d2 = ms[0].cols;
  for (const auto& m : ms) {
    if (m.rows != e.d1 || m.cols != e.d2) throw std::invalid_argument("matrices differ in shape");
    SpaceVector v;
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = 0; j < m.cols; ++j)
        if (sgn(m(i, j)) != 0) v.coords[i * e.d2 + j] = {m(i, j), Rational(0)};
    e.basis.push_back(std::move(v));
  }
  return e;
}

CandidateSpace slice_candidate(const QTensor& t, const std::array<int, 3>& grade) {
  check_grade(grade);
  auto f = static_cast<Factor>(third_factor(grade));
  QMatrixSpace s = slice_space(t, f);
  CandidateSpace e;
  e.grade = grade;
  e.d1 = s.d1;
  e.d2 = s.d2;
  for (const auto& m : s.basis) {
    SpaceVector v;
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = 0; j < m.cols; ++j)
        if (sgn(m(i, j)) != 0) v.coords[i * e.d2 + j] = {m(i, j), Rational(0)};
    e.basis.push_back(std::move(v));
  }
  e.marked = e.basis.size();
  e.label = "slices";
  return e;
}

CandidateSpace with_slices(const QTensor& t, const CandidateSpace& complement) {
  CandidateSpace e = slice_candidate(t, complement.grade);
  if (e.d1 != complement.d1 || e.d2 != complement.d2) throw std::invalid_argument("complement has wrong shape");
  e.basis.insert(e.basis.end(), complement.basis.begin(), complement.basis.end());
  e.relaxed = complement.relaxed;
  e.label = complement.label;
  return e;
}

SpaceVector unit_vector(std::size_t d2, std::size_t i, std::size_t j, const Rational& c) {
  SpaceVector v;
  v.coords[i * d2 + j] = {c, Rational(0)};
  return v;
}

// ---------------------------------------------------------------- outcomes

std::string TestOutcome::status() const {
  if (pass_generic()) return "pass";
  if (pass_some()) return exact ? "pass-special" : "inconclusive";
  return "refuted";
}

std::string TestOutcome::to_json() const {
  json j;
  j["threshold"] = threshold;
  j["kernel_generic"] = kernel_generic;
  j["kernel_max"] = kernel_max;
  j["exact"] = exact;
  j["status"] = status();
  json sp = json::array();
  for (const auto& p : special) sp.push_back(poly_to_json(p));
  j["special"] = sp;
  if (param_var >= 0) j["param_var"] = param_var;
  return j.dump();
}

TestOutcome test_210(const CandidateSpace& e, std::size_t r) {
  const std::size_t n = e.d1;
  std::vector<SysColumn> cols;
  cols.reserve(e.dim() * n);
  for (const auto& v : e.basis) {
    for (std::size_t l = 0; l < n; ++l) {
      SysColumn c;
      c.var = v.var;
      for (const auto& [idx, pe] : v.coords) {
        std::size_t i = idx / e.d2, j = idx % e.d2;
        if (i == l) continue;
        std::size_t row = (i < l ? pair_index(i, l, n) : pair_index(l, i, n)) * e.d2 + j;
        c.entries.emplace_back(row, scaled(pe, i < l ? 1 : -1));
      }
      cols.push_back(std::move(c));
    }
  }
  return analyze(cols, r);
}

TestOutcome test_120(const CandidateSpace& e, std::size_t r) {
  const std::size_t n = e.d2;
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<SysColumn> cols;
  cols.reserve(e.dim() * n);
  for (const auto& v : e.basis) {
    for (std::size_t l = 0; l < n; ++l) {
      SysColumn c;
      c.var = v.var;
      for (const auto& [idx, pe] : v.coords) {
        std::size_t i = idx / e.d2, j = idx % e.d2;
        if (j == l) continue;
        std::size_t row = i * pairs + (j < l ? pair_index(j, l, n) : pair_index(l, j, n));
        c.entries.emplace_back(row, scaled(pe, j < l ? 1 : -1));
      }
      cols.push_back(std::move(c));
    }
  }
  return analyze(cols, r);
}

TestOutcome test_111(const CandidateSpace& e110, const CandidateSpace& e101, const CandidateSpace& e011,
                     std::size_t r) {
  const std::size_t da = e110.d1, db = e110.d2, dc = e101.d2;
  if (e101.d1 != da || e011.d1 != db || e011.d2 != dc) throw std::invalid_argument("(111) spaces have mismatched shapes");
  const std::size_t n = da * db * dc;
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * db + j) * dc + k; };
  constexpr int kOffset = 1 << 20;
  auto var_of = [&](int v, int slot) { return v < 0 ? -1 : v + slot * kOffset; };
  std::vector<SysColumn> cols;
  // alpha: E110 (x) C appears in both equations
  for (const auto& v : e110.basis)
    for (std::size_t k = 0; k < dc; ++k) {
      SysColumn c;
      c.var = var_of(v.var, 0);
      for (const auto& [idx, pe] : v.coords) {
        std::size_t x = at(idx / db, idx % db, k);
        c.entries.emplace_back(x, pe);
        c.entries.emplace_back(n + x, pe);
      }
      cols.push_back(std::move(c));
    }
  // beta: E101 (x) B
  for (const auto& v : e101.basis)
    for (std::size_t j = 0; j < db; ++j) {
      SysColumn c;
      c.var = var_of(v.var, 1);
      for (const auto& [idx, pe] : v.coords) c.entries.emplace_back(at(idx / dc, j, idx % dc), scaled(pe, -1));
      cols.push_back(std::move(c));
    }
  // gamma: E011 (x) A
  for (const auto& v : e011.basis)
    for (std::size_t i = 0; i < da; ++i) {
      SysColumn c;
      c.var = var_of(v.var, 2);
      for (const auto& [idx, pe] : v.coords) c.entries.emplace_back(n + at(i, idx / dc, idx % dc), scaled(pe, -1));
      cols.push_back(std::move(c));
    }
  return analyze(cols, r);
}

// ---------------------------------------------------------------- kernels

std::string KappaSplit::to_json() const {
  json j;
  j["free"] = free;
  j["pure"] = pure;
  j["mixed"] = mixed;
  j["total"] = total;
  return j.dump();
}

KappaSplit kappa_split(const QTensor& t, const CandidateSpace& complement, bool mirror) {
  if (complement.num_params() != 0) throw std::invalid_argument("kappa split needs a constant complement");
  CandidateSpace sl = slice_candidate(t, complement.grade);
  CandidateSpace full = with_slices(t, complement);
  const std::size_t n = full.d1 * full.d2;
  if (span_rank(evaluated(full, 0), n) != full.dim())
    throw std::invalid_argument("complement meets the slice space or is dependent");
  auto kernel = [&](const CandidateSpace& e) {
    return (mirror ? test_120(e, 0) : test_210(e, 0)).kernel_generic;
  };
  KappaSplit k;
  k.free = kernel(sl);
  k.pure = kernel(complement);
  k.total = kernel(full);
  k.mixed = k.total - k.free - k.pure;
  return k;
}

std::size_t FlagProfile::bound() const {
  std::size_t b = 0;
  for (std::size_t j = 0; j < s.size(); ++j) b += (j + 1) * s[j];
  return b;
}

FlagProfile cartan_bound(const CandidateSpace& complement, bool flag_in_second, int seeds) {
  if (complement.num_params() != 0) throw std::invalid_argument("flag profile needs a constant complement");
  const std::size_t dim = complement.dim();
  const std::size_t target = flag_in_second ? complement.d1 : complement.d2;  // image factor
  const std::size_t source = flag_in_second ? complement.d2 : complement.d1;  // flag factor
  FlagProfile best;
  for (int seed = 0; seed < std::max(seeds, 1); ++seed) {
    SeededRng rng(static_cast<std::uint64_t>(seed) * 7919 + 17);
    FlagProfile prof;
    std::size_t prev = 0;
    std::vector<std::vector<Rational>> functionals;
    for (std::size_t j = 1; j <= source && prev < dim; ++j) {
      std::vector<Rational> f(source);
      for (auto& x : f) x = Rational(static_cast<long>(rng.uniform_int(-9, 9)));
      functionals.push_back(std::move(f));
      QMatrix m(dim, j * target);
      for (std::size_t a = 0; a < dim; ++a)
        for (const auto& [idx, pe] : complement.basis[a].coords) {
          std::size_t x = idx / complement.d2, y = idx % complement.d2;
          std::size_t img = flag_in_second ? x : y, src = flag_in_second ? y : x;
          for (std::size_t q = 0; q < j; ++q) m(a, q * target + img) += pe.c0 * functionals[q][src];
        }
      std::size_t rho = constant_rank(m);
      prof.s.push_back(rho - prev);
      prev = rho;
    }
    if (best.s.empty() || prof.s > best.s) best = prof;
  }
  return best;
}

std::string FlagCheck::to_json() const {
  json j;
  j["refuted"] = refuted;
  j["generic_ranks"] = generic_ranks;
  j["first_refuted"] = first_refuted;
  return j.dump();
}

FlagCheck flag_filtration_check(const std::vector<std::vector<QMatrix>>& filtration, std::uint64_t seed) {
  FlagCheck out;
  SeededRng rng(seed + 101);
  for (std::size_t level = 0; level < filtration.size(); ++level) {
    const auto& ms = filtration[level];
    if (ms.empty()) throw std::invalid_argument("filtration level is empty");
    QMatrix g(ms[0].rows, ms[0].cols);
    for (const auto& m : ms) {
      if (m.rows != g.rows || m.cols != g.cols) throw std::invalid_argument("filtration matrices differ in shape");
      Rational c(static_cast<long>(rng.uniform_int(1, 97)));
      for (std::size_t k = 0; k < g.a.size(); ++k) g.a[k] += c * m.a[k];
    }
    std::size_t rk = rank_exact(g);
    out.generic_ranks.push_back(rk);
    if (!out.refuted && rk > 2 * (level + 1)) {
      out.refuted = true;
      out.first_refuted = level + 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------- torus

TorusWeights torus_weights(const QTensor& t) {
  const Dims& d = t.dims();
  const std::size_t n = d[0] + d[1] + d[2];
  std::vector<std::array<std::size_t, 3>> support;
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational&) { support.push_back({i, j, k}); });
  QMatrix m(support.size(), n);
  for (std::size_t r = 0; r < support.size(); ++r) {
    m(r, support[r][0]) = 1;
    m(r, d[0] + support[r][1]) = 1;
    m(r, d[0] + d[1] + support[r][2]) = 1;
  }
  auto ker = kernel_basis_exact(m);
  TorusWeights tw;
  tw.dim = ker.size();
  for (std::size_t f = 0; f < 3; ++f) tw.w[f].assign(d[f], std::vector<long>(tw.dim, 0));
  for (std::size_t b = 0; b < ker.size(); ++b) {
    Integer l = 1, g = 0;
    for (const auto& x : ker[b]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
    for (const auto& x : ker[b]) {
      Integer v = x.get_num() * (l / x.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    }
    if (g == 0) g = 1;
    std::size_t c = 0;
    for (std::size_t f = 0; f < 3; ++f)
      for (std::size_t i = 0; i < d[f]; ++i, ++c) {
        Integer v = ker[b][c].get_num() * (l / ker[b][c].get_den()) / g;
        tw.w[f][i][b] = v.get_si();
      }
  }
  return tw;
}

bool is_torus_fixed(const CandidateSpace& e, const TorusWeights& tw, const std::vector<Rational>& point,
                    const Rational& x) {
  if (point.size() != tw.dim) throw std::invalid_argument("torus point has wrong dimension");
  auto fs = e.factors();
  const auto& w1 = tw.w[static_cast<std::size_t>(fs[0])];
  const auto& w2 = tw.w[static_cast<std::size_t>(fs[1])];
  auto base = evaluated(e, x);
  auto moved = base;
  for (auto& v : moved)
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
      if (sgn(v[idx]) == 0) continue;
      std::size_t i = idx / e.d2, j = idx % e.d2;
      Rational s = 1;
      for (std::size_t k = 0; k < tw.dim; ++k) s *= rational_pow(point[k], w1[i][k] + w2[j][k]);
      v[idx] *= s;
    }
  const std::size_t n = e.d1 * e.d2;
  std::size_t r0 = span_rank(base, n);
  auto both = base;
  both.insert(both.end(), moved.begin(), moved.end());
  return span_rank(both, n) == r0;
}

std::vector<WeightClass> weight_classes(const QTensor& t, const std::array<int, 3>& grade, const TorusWeights& tw) {
  CandidateSpace sl = slice_candidate(t, grade);
  auto fs = sl.factors();
  const auto& w1 = tw.w[static_cast<std::size_t>(fs[0])];
  const auto& w2 = tw.w[static_cast<std::size_t>(fs[1])];
  std::vector<WeightClass> classes;
  std::map<std::vector<long>, std::size_t> by_weight;
  std::vector<std::size_t> class_of(sl.d1 * sl.d2);
  for (std::size_t i = 0; i < sl.d1; ++i)
    for (std::size_t j = 0; j < sl.d2; ++j) {
      std::vector<long> w(tw.dim);
      for (std::size_t k = 0; k < tw.dim; ++k) w[k] = w1[i][k] + w2[j][k];
      auto [it, fresh] = by_weight.emplace(w, classes.size());
      if (fresh) classes.push_back(WeightClass{w, {}, {}, {}});
      classes[it->second].coords.push_back(i * sl.d2 + j);
      class_of[i * sl.d2 + j] = it->second;
    }
  for (const auto& v : sl.basis) {
    std::size_t c = class_of[v.coords.begin()->first];
    for (const auto& [idx, pe] : v.coords)
      if (class_of[idx] != c) throw std::runtime_error("slice is not a torus weight vector");
    classes[c].slice_part.push_back(v);
  }
  for (auto& wc : classes) {
    std::map<std::size_t, std::size_t> pos;
    for (std::size_t a = 0; a < wc.coords.size(); ++a) pos[wc.coords[a]] = a;
    std::vector<QVector> vs;
    for (const auto& v : wc.slice_part) {
      QVector q(wc.coords.size(), Rational(0));
      for (const auto& [idx, pe] : v.coords) q[pos.at(idx)] = pe.c0;
      vs.push_back(std::move(q));
    }
    for (std::size_t a = 0; a < wc.coords.size(); ++a) {
      QVector q(wc.coords.size(), Rational(0));
      q[a] = 1;
      vs.push_back(std::move(q));
    }
    for (std::size_t s : independent_subset(vs))
      if (s >= wc.slice_part.size()) wc.complement.push_back(wc.coords[s - wc.slice_part.size()]);
  }
  return classes;
}

std::vector<CandidateSpace> torus_candidates(const QTensor& t, const std::array<int, 3>& grade, std::size_t r,
                                             const TorusWeights& tw, const EnumerationOptions& opts) {
  auto classes = weight_classes(t, grade, tw);
  CandidateSpace sl = slice_candidate(t, grade);
  std::vector<CandidateSpace> out;
  if (r < sl.dim()) return out;
  const std::size_t need = r - sl.dim();
  std::vector<std::size_t> open;
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (!classes[c].complement.empty()) open.push_back(c);

  // Ordered slice basis: class order, so marked vectors stay grouped by weight.
  CandidateSpace head = sl;
  head.basis.clear();
  for (const auto& wc : classes) head.basis.insert(head.basis.end(), wc.slice_part.begin(), wc.slice_part.end());

  std::vector<std::size_t> k(open.size(), 0);
  auto emit = [&]() {
    // per class options: list of (vectors, label)
    std::vector<std::vector<std::pair<std::vector<SpaceVector>, std::string>>> options;
    bool relaxed = false;
    for (std::size_t a = 0; a < open.size(); ++a) {
      if (k[a] == 0) continue;
      const auto& wc = classes[open[a]];
      const std::size_t dw = wc.complement.size();
      std::string tag = "w" + std::to_string(open[a]) + ":";
      std::vector<SpaceVector> all;
      for (std::size_t idx : wc.complement) all.push_back(unit_vector(sl.d2, idx / sl.d2, idx % sl.d2));
      if (k[a] == dw) {
        options.push_back({{all, tag + std::to_string(dw)}});
      } else if (dw == 2 && k[a] == 1) {
        SpaceVector fam;
        fam.var = 0;  // renumbered below
        fam.coords[wc.complement[0]] = {Rational(0), Rational(1)};
        fam.coords[wc.complement[1]] = {Rational(1), Rational(0)};
        options.push_back({{{all[0]}, tag + "pt"}, {{fam}, tag + "fam"}});
      } else {
        relaxed = true;
        options.push_back({{all, tag + "rel" + std::to_string(k[a])}});
      }
    }
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
      if (out.size() >= opts.budget) throw BudgetExceeded("candidate enumeration exceeds the budget");
      CandidateSpace e = head;
      e.relaxed = relaxed;
      e.label.clear();
      int next_var = 0;
      for (std::size_t a = 0; a < options.size(); ++a) {
        const auto& [vecs, tag] = options[a][pick[a]];
        for (auto v : vecs) {
          if (v.var >= 0) v.var = next_var++;
          e.basis.push_back(std::move(v));
        }
        if (!e.label.empty()) e.label += ' ';
        e.label += tag;
      }
      if (e.label.empty()) e.label = "slices";
      out.push_back(std::move(e));
      std::size_t a = 0;
      while (a < options.size() && ++pick[a] == options[a].size()) pick[a++] = 0;
      if (a == options.size()) break;
    }
  };

  // compositions of `need` with k[a] <= dim of class complement
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t a, std::size_t left) {
    if (a == open.size()) {
      if (left == 0) emit();
      return;
    }
    std::size_t cap = classes[open[a]].complement.size();
    for (std::size_t x = 0; x <= std::min(cap, left); ++x) {
      k[a] = x;
      rec(a + 1, left - x);
    }
    k[a] = 0;
  };
  rec(0, need);
  return out;
}

const std::array<std::array<int, 3>, 3>& two_factor_grades() {
  static const std::array<std::array<int, 3>, 3> g{{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}}};
  return g;
}

namespace {

bool specials_meet(const TestOutcome& a, const TestOutcome& b) {
  if (a.pass_generic() || b.pass_generic()) return true;
  for (const auto& p : a.special)
    for (const auto& q : b.special)
      if (!QPoly::gcd(p, q).is_constant()) return true;
  return false;
}

json verdict_json(const CandidateVerdict& v, bool with_space) {
  json j;
  if (with_space) j["space"] = json::parse(v.space.to_json());
  j["label"] = v.space.label;
  j["dim"] = v.space.dim();
  j["params"] = v.space.num_params();
  j["relaxed"] = v.space.relaxed;
  j["left"] = json::parse(v.left.to_json());
  j["right"] = json::parse(v.right.to_json());
  j["survives"] = v.survives;
  j["common_special"] = v.common_special;
  return j;
}

}  // namespace

std::string SearchReport::to_json(bool full) const {
  json j;
  j["tensor"] = tensor;
  j["r"] = r;
  j["torus_dim"] = torus_dim;
  j["candidates"] = candidates;
  j["survivors"] = survivors;
  j["families"] = families;
  j["families_refuted"] = families_refuted;
  j["relaxed"] = relaxed;
  j["triples"] = triples;
  j["triples_passing"] = triples_passing;
  j["triples_inconclusive"] = triples_inconclusive;
  j["max_111"] = max_111;
  j["no_triple_passes"] = no_triple_passes();
  json p = json::array();
  for (const auto& tr : passing) p.push_back({tr[0].space.label, tr[1].space.label, tr[2].space.label});
  j["passing"] = p;
  if (full) {
    json v = json::array();
    for (const auto& g : verdicts) {
      json a = json::array();
      for (const auto& x : g) a.push_back(verdict_json(x, true));
      v.push_back(a);
    }
    j["verdicts"] = v;
  }
  return j.dump();
}

SearchReport lower_bound_search(const QTensor& t, std::size_t r, const EnumerationOptions& opts,
                                const std::string& name) {
  SearchReport rep;
  rep.tensor = name;
  rep.r = r;
  TorusWeights tw = torus_weights(t);
  rep.torus_dim = tw.dim;
  std::array<std::vector<std::size_t>, 3> alive;
  for (std::size_t g = 0; g < 3; ++g) {
    auto cands = torus_candidates(t, two_factor_grades()[g], r, tw, opts);
    rep.candidates[g] = cands.size();
    auto& verdicts = rep.verdicts[g];
    verdicts.resize(cands.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
    for (std::size_t c = 0; c < cands.size(); ++c) {
      try {
        CandidateVerdict v;
        v.space = cands[c];
        v.left = test_210(v.space, r);
        v.right = test_120(v.space, r);
        if (v.space.num_params() == 1 && v.left.exact && v.right.exact) v.common_special = specials_meet(v.left, v.right);
        v.survives = v.left.pass_some() && v.right.pass_some() && v.common_special;
        verdicts[c] = std::move(v);
      } catch (...) {
#pragma omp critical
        err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    for (std::size_t c = 0; c < verdicts.size(); ++c) {
      const auto& v = verdicts[c];
      if (v.space.num_params() > 0) {
        ++rep.families[g];
        if (!v.survives) ++rep.families_refuted[g];
      }
      if (v.space.relaxed) ++rep.relaxed[g];
      if (v.survives) alive[g].push_back(c);
    }
    rep.survivors[g] = alive[g].size();
  }

  const std::uint64_t total = static_cast<std::uint64_t>(alive[0].size()) * alive[1].size() * alive[2].size();
  if (total > opts.budget) throw BudgetExceeded("triple enumeration exceeds the budget");
  rep.triples = total;
  std::vector<TestOutcome> outcomes(total);
  std::exception_ptr err;
  const std::size_t n1 = alive[1].size(), n2 = alive[2].size();
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (std::uint64_t x = 0; x < total; ++x) {
    try {
      std::size_t a = x / (n1 * n2), b = (x / n2) % n1, c = x % n2;
      outcomes[x] = test_111(rep.verdicts[0][alive[0][a]].space, rep.verdicts[1][alive[1][b]].space,
                             rep.verdicts[2][alive[2][c]].space, r);
    } catch (...) {
#pragma omp critical
      err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  for (std::uint64_t x = 0; x < total; ++x) {
    std::size_t a = x / (n1 * n2), b = (x / n2) % n1, c = x % n2;
    const auto& o = outcomes[x];
    std::array<const CandidateVerdict*, 3> tr{&rep.verdicts[0][alive[0][a]], &rep.verdicts[1][alive[1][b]],
                                              &rep.verdicts[2][alive[2][c]]};
    rep.max_111 = std::max(rep.max_111, o.kernel_max);
    if (!o.pass_some()) continue;
    bool sure = o.exact && !tr[0]->space.relaxed && !tr[1]->space.relaxed && !tr[2]->space.relaxed;
    if (sure) {
      ++rep.triples_passing;
      if (rep.passing.size() < 16) rep.passing.push_back({*tr[0], *tr[1], *tr[2]});
    } else {
      ++rep.triples_inconclusive;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- constructions

WeakCandidate weak_candidate(std::size_t m, std::size_t r) {
  WeakCandidate wc;
  wc.m = m;
  wc.r = r;
  std::size_t k = 0, t = 0, tp = 0;
  auto isqrt = [](std::size_t x) {
    std::size_t s = 0;
    while ((s + 1) * (s + 1) <= x) ++s;
    return s;
  };
  if (r == 2 * m && m >= 9 && m != 10 && m != 15) {
    k = isqrt(m);
    t = k + (m - k * k + 1) / 2;
    tp = k + (m - k * k) / 2;
  } else if (r > m && isqrt(r - m) * isqrt(r - m) == r - m && 2 * m <= isqrt(r - m) * isqrt(r - m) * (isqrt(r - m) - 1)) {
    k = isqrt(r - m);
    t = tp = k;
  } else {
    throw std::invalid_argument("weak construction needs r = 2m (m >= 9, m != 10, 15) or r = m + k^2 with m <= (k^3 - k^2)/2");
  }
  if (t > m || tp > m) throw std::invalid_argument("weak construction does not fit in dimension m");
  wc.k = k;
  for (std::size_t g = 0; g < 3; ++g) {
    CandidateSpace e;
    e.grade = two_factor_grades()[g];
    e.d1 = e.d2 = m;
    e.label = "weak";
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) e.basis.push_back(unit_vector(m, i, j));
    for (std::size_t i = k; i < tp; ++i) e.basis.push_back(unit_vector(m, i, 0));
    for (std::size_t j = k; j < t; ++j) e.basis.push_back(unit_vector(m, 0, j));
    wc.complements[g] = std::move(e);
  }
  return wc;
}

QTensor weak_witness_tensor(std::size_t m, std::size_t r) {
  WeakCandidate wc = weak_candidate(m, r);
  std::set<std::size_t> pattern;
  for (const auto& v : wc.complements[0].basis) pattern.insert(v.coords.begin()->first);
  auto safe = [&](std::size_t d) {
    for (std::size_t i = 0; i < m; ++i)
      if (pattern.count(i * m + (i + d) % m)) return false;
    return true;
  };
  // A (x) B pairs shift by d, A (x) C by 2d, B (x) C by d.
  for (std::size_t d = 1; d < m; ++d) {
    if (!safe(d) || !safe((2 * d) % m)) continue;
    QTensor t(m, m, m);
    for (std::size_t i = 0; i < m; ++i) t.set(i, (i + d) % m, (i + 2 * d) % m, Rational(1));
    return t;
  }
  throw std::runtime_error("no admissible shift for the witness tensor");
}

std::string EmptyCorBound::to_json() const {
  json j;
  j["m"] = m;
  j["rho"] = certificate.rho;
  j["certificate"] = json::parse(certificate.to_json());
  j["bound"] = bound;
  return j.dump();
}

EmptyCorBound emptycor_bound(const QTensor& t, Factor factor, std::uint64_t p, std::uint64_t budget) {
  QMatrixSpace s = slice_space(t, factor);
  if (s.dim() == 0) throw std::invalid_argument("slice space is zero");
  std::vector<QMatrix> basis;
  for (auto m : s.basis) {
    Integer l = 1;
    for (const auto& x : m.a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
    for (auto& x : m.a) x *= Rational(l);
    basis.push_back(std::move(m));
  }
  EmptyCorBound out;
  out.m = s.dim();
  out.certificate = min_rank_certificate(basis, p, budget);
  out.bound = out.m + out.certificate.rho - 1;
  return out;
}

}  // namespace borderlab
