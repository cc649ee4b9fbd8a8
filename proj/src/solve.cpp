#include "borderlab/solve.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include <omp.h>

#include <json.hpp>

#include "borderlab/linalg.hpp"
#include "borderlab/rng.hpp"

namespace borderlab {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- exact simplex

// a . x (rel) b with x free; rel -1 is <=, 0 is =, 1 is >=.
struct LpRow {
  std::vector<std::pair<std::size_t, Rational>> a;
  int rel = 0;
  Rational b;
};

// Phase-one simplex with Bland's rule on x = u - v, u, v >= 0.
std::optional<std::vector<Rational>> lp_feasible(const std::vector<LpRow>& rows, std::size_t n) {
  const std::size_t m = rows.size();
  if (m == 0) return std::vector<Rational>(n, Rational(0));
  std::size_t cols = 2 * n;
  std::vector<std::size_t> slack(m, SIZE_MAX), art(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    if (rows[i].rel != 0) slack[i] = cols++;
  std::vector<int> flip(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (sgn(rows[i].b) < 0) flip[i] = -1;
    int slack_coef = rows[i].rel == -1 ? 1 : -1;
    if (rows[i].rel == 0 || slack_coef * flip[i] < 0) art[i] = cols++;
  }
  const std::size_t width = cols + 1;
  std::vector<Rational> tab((m + 1) * width, Rational(0));
  auto at = [&](std::size_t i, std::size_t j) -> Rational& { return tab[i * width + j]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rational f(flip[i]);
    for (const auto& [k, v] : rows[i].a) {
      at(i, k) += f * v;
      at(i, n + k) -= f * v;
    }
    if (slack[i] != SIZE_MAX) at(i, slack[i]) = f * Rational(rows[i].rel == -1 ? 1 : -1);
    at(i, cols) = f * rows[i].b;
    if (art[i] != SIZE_MAX) {
      at(i, art[i]) = 1;
      basis[i] = art[i];
    } else {
      basis[i] = slack[i];
    }
  }
  // reduced costs of the phase-one objective (sum of artificials)
  for (std::size_t i = 0; i < m; ++i) {
    if (art[i] == SIZE_MAX) continue;
    for (std::size_t j = 0; j < width; ++j)
      if (sgn(at(i, j)) != 0) at(m, j) -= at(i, j);
  }
  for (std::size_t i = 0; i < m; ++i)
    if (art[i] != SIZE_MAX) at(m, art[i]) = 0;

  while (true) {
    std::size_t enter = SIZE_MAX;
    for (std::size_t j = 0; j < cols; ++j)
      if (sgn(at(m, j)) < 0) {
        enter = j;
        break;
      }
    if (enter == SIZE_MAX) break;
    std::size_t leave = SIZE_MAX;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(at(i, enter)) <= 0) continue;
      Rational ratio = at(i, cols) / at(i, enter);
      if (leave == SIZE_MAX || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == SIZE_MAX) break;  // unbounded direction cannot occur in phase one
    Rational piv = at(leave, enter);
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < width; ++j)
      if (sgn(at(leave, j)) != 0) {
        at(leave, j) /= piv;
        nz.push_back(j);
      }
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      Rational f = at(i, enter);
      if (sgn(f) == 0) continue;
      for (std::size_t j : nz) at(i, j) -= f * at(leave, j);
    }
    basis[leave] = enter;
  }
  if (sgn(at(m, cols)) != 0) return std::nullopt;
  std::vector<Rational> x(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) x[basis[i]] += at(i, cols);
    else if (basis[i] < 2 * n) x[basis[i] - n] -= at(i, cols);
  }
  return x;
}

// ---------------------------------------------------------------- weight LP

struct WeightSystem {
  Dims dims{};
  bool symmetric = false;
  std::size_t nvars = 0;
  std::size_t solves = 0;

  WeightSystem(const Dims& d, bool sym) : dims(d), symmetric(sym) {
    nvars = sym ? d[0] : d[0] + d[1] + d[2];
  }
  std::size_t var(int f, std::size_t i) const {
    if (symmetric) return i;
    std::size_t off = 0;
    for (int g = 0; g < f; ++g) off += dims[static_cast<std::size_t>(g)];
    return off + i;
  }
  LpRow triple_row(const Triple& x, int rel, long b) const {
    std::map<std::size_t, Rational> acc;
    for (int f = 0; f < 3; ++f) acc[var(f, x[static_cast<std::size_t>(f)])] += 1;
    LpRow r;
    for (auto& [k, v] : acc) r.a.emplace_back(k, v);
    r.rel = rel;
    r.b = b;
    return r;
  }
  Rational eval(const LpRow& r, const std::vector<Rational>& x) const {
    Rational s = 0;
    for (const auto& [k, v] : r.a) s += v * x[k];
    return s;
  }
  bool satisfied(const LpRow& r, const std::vector<Rational>& x) const {
    Rational s = eval(r, x);
    if (r.rel == 0) return s == r.b;
    return r.rel < 0 ? s <= r.b : s >= r.b;
  }

  // Cutting planes: solve on a working set, add violated rows until none remain.
  std::optional<std::vector<Rational>> solve(const std::vector<LpRow>& fixed, const std::vector<LpRow>& lazy) {
    std::vector<LpRow> work = fixed;
    std::vector<char> used(lazy.size(), 0);
    while (true) {
      ++solves;
      auto x = lp_feasible(work, nvars);
      if (!x) return std::nullopt;
      bool added = false;
      for (std::size_t i = 0; i < lazy.size(); ++i)
        if (!used[i] && !satisfied(lazy[i], *x)) {
          used[i] = 1;
          work.push_back(lazy[i]);
          added = true;
        }
      if (!added) return x;
    }
  }

  // Adds order rows on ties until every factor is injective.
  std::optional<std::vector<Rational>> solve_injective(std::vector<LpRow> fixed, const std::vector<LpRow>& lazy,
                                                       std::uint64_t limit) {
    auto x = solve(fixed, lazy);
    if (!x) return std::nullopt;
    int nf = symmetric ? 1 : 3;
    for (int f = 0; f < nf; ++f)
      for (std::size_t i = 0; i < dims[static_cast<std::size_t>(f)]; ++i)
        for (std::size_t j = i + 1; j < dims[static_cast<std::size_t>(f)]; ++j) {
          if ((*x)[var(f, i)] != (*x)[var(f, j)]) continue;
          if (solves > limit) return std::nullopt;
          for (int dir = 0; dir < 2; ++dir) {
            LpRow o;
            std::size_t hi = var(f, dir == 0 ? j : i), lo = var(f, dir == 0 ? i : j);
            o.a = {{hi, Rational(1)}, {lo, Rational(-1)}};
            o.rel = 1;
            o.b = 1;
            auto next = fixed;
            next.push_back(o);
            auto y = solve_injective(next, lazy, limit);
            if (y) return y;
          }
          return std::nullopt;
        }
    return x;
  }

  TightWeights to_weights(const std::vector<Rational>& x) const {
    Integer l = 1, g = 0;
    for (const auto& v : x) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
    std::vector<Integer> z;
    for (const auto& v : x) {
      z.push_back(v.get_num() * (l / v.get_den()));
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.back().get_mpz_t());
    }
    if (g == 0) g = 1;
    TightWeights w;
    w.symmetric = symmetric;
    for (int f = 0; f < 3; ++f) {
      auto& wf = w.w[static_cast<std::size_t>(f)];
      for (std::size_t i = 0; i < dims[static_cast<std::size_t>(f)]; ++i) {
        Integer v = z[var(f, i)] / g;
        if (!v.fits_slong_p()) throw std::overflow_error("weight does not fit in a long");
        wf.push_back(v.get_si());
      }
    }
    return w;
  }
};

std::vector<Triple> support_triples(const QTensor& t, bool symmetric) {
  std::set<Triple> s;
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational&) {
    Triple x{i, j, k};
    if (symmetric) std::sort(x.begin(), x.end());
    s.insert(x);
  });
  return {s.begin(), s.end()};
}

void check_symmetric_dims(const Dims& d) {
  if (d[0] != d[1] || d[1] != d[2]) throw std::invalid_argument("symmetric weights need equal dimensions");
}

Complex to_cd(const BigComplex& z) { return {z.re().to_double(), z.im().to_double()}; }
Complex to_cd(const Rational& q) { return {q.get_d(), 0.0}; }
Complex to_cd(const Cyclotomic12& c) { return to_cd(to_complex(c, 30)); }

json complex_array(const std::vector<Complex>& x) {
  json a = json::array();
  for (const auto& z : x) a.push_back({z.real(), z.imag()});
  return a;
}

double norm2(const std::vector<Complex>& f) {
  double s = 0;
  for (const auto& z : f) s += std::norm(z);
  return std::sqrt(s);
}

double norm_inf(const std::vector<Complex>& f) {
  double s = 0;
  for (const auto& z : f) s = std::max(s, std::abs(z));
  return s;
}

std::size_t numeric_rank(const Eigen::MatrixXcd& j) {
  if (j.rows() == 0 || j.cols() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(j);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  double cut = 1e-8 * s(0);
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > cut) ++r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- tight weights

TightWeights TightWeights::symmetric_from(const std::vector<long>& w) {
  TightWeights t;
  t.w = {w, w, w};
  t.symmetric = true;
  return t;
}

std::string TightWeights::to_json() const {
  json j;
  j["symmetric"] = symmetric;
  if (symmetric) j["w"] = w[0];
  else j["w"] = {w[0], w[1], w[2]};
  return j.dump();
}

TightWeights TightWeights::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("symmetric", false)) return symmetric_from(j.at("w").get<std::vector<long>>());
  TightWeights t;
  for (std::size_t f = 0; f < 3; ++f) t.w[f] = j.at("w").at(f).get<std::vector<long>>();
  return t;
}

bool is_standard_tight(const QTensor& t, const TightWeights& w) {
  const Dims& d = t.dims();
  for (std::size_t f = 0; f < 3; ++f) {
    if (w.w[f].size() != d[f]) throw std::invalid_argument("weight vector has wrong length");
    std::set<long> seen(w.w[f].begin(), w.w[f].end());
    if (seen.size() != w.w[f].size()) return false;
  }
  bool ok = true;
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational&) {
    if (w.sum({i, j, k}) != 0) ok = false;
  });
  return ok;
}

std::vector<Triple> all_triples(const Dims& d, bool symmetric) {
  std::vector<Triple> out;
  if (symmetric) {
    check_symmetric_dims(d);
    for (std::size_t i = 0; i < d[0]; ++i)
      for (std::size_t j = i; j < d[0]; ++j)
        for (std::size_t k = j; k < d[0]; ++k) out.push_back({i, j, k});
  } else {
    for (std::size_t i = 0; i < d[0]; ++i)
      for (std::size_t j = 0; j < d[1]; ++j)
        for (std::size_t k = 0; k < d[2]; ++k) out.push_back({i, j, k});
  }
  return out;
}

std::size_t equation_count(const Dims& d, const TightWeights& w, bool multisets) {
  std::size_t n = 0;
  for (const auto& x : all_triples(d, multisets))
    if (w.sum(x) <= 0) ++n;
  return n;
}

Partition induced_partition(const QTensor& t, const TightWeights& w) {
  auto sup = support_triples(t, w.symmetric);
  std::set<Triple> s(sup.begin(), sup.end());
  Partition p;
  for (const auto& x : all_triples(t.dims(), w.symmetric)) {
    if (s.count(x)) continue;
    (w.sum(x) <= 0 ? p.le : p.gt).push_back(x);
  }
  return p;
}

LpOutcome weights_from_lp(const QTensor& t, const std::vector<Triple>& le, const std::vector<Triple>& gt,
                          bool symmetric) {
  if (symmetric) check_symmetric_dims(t.dims());
  WeightSystem ws(t.dims(), symmetric);
  std::vector<LpRow> fixed, lazy;
  for (const auto& x : support_triples(t, symmetric)) fixed.push_back(ws.triple_row(x, 0, 0));
  for (const auto& x : le) lazy.push_back(ws.triple_row(x, -1, 0));
  for (const auto& x : gt) lazy.push_back(ws.triple_row(x, 1, 1));
  LpOutcome out;
  auto x = ws.solve_injective(fixed, lazy, std::numeric_limits<std::uint64_t>::max());
  out.lp_solves = ws.solves;
  if (!x) return out;
  out.feasible = true;
  out.weights = ws.to_weights(*x);
  return out;
}

std::string SearchOutcome::to_json() const {
  json j;
  j["feasible"] = feasible;
  if (feasible) j["weights"] = json::parse(weights.to_json());
  j["count"] = count;
  j["complete"] = complete;
  j["nodes"] = nodes;
  return j.dump();
}

SearchOutcome search_min_equations(const QTensor& t, bool symmetric, std::uint64_t budget,
                                   const std::optional<TightWeights>& incumbent) {
  if (symmetric) check_symmetric_dims(t.dims());
  WeightSystem ws(t.dims(), symmetric);
  auto sup = support_triples(t, symmetric);
  std::set<Triple> sup_set(sup.begin(), sup.end());
  std::vector<Triple> free;
  for (const auto& x : all_triples(t.dims(), symmetric))
    if (!sup_set.count(x)) free.push_back(x);
  std::vector<LpRow> fixed;
  for (const auto& x : sup) fixed.push_back(ws.triple_row(x, 0, 0));

  SearchOutcome out;
  out.count = std::numeric_limits<std::size_t>::max();
  if (incumbent && is_standard_tight(t, *incumbent) && incumbent->symmetric == symmetric) {
    out.feasible = true;
    out.weights = *incumbent;
    out.count = equation_count(t.dims(), *incumbent, symmetric);
  }
  auto x0 = ws.solve_injective(fixed, {}, budget);
  if (!x0) {
    out.nodes = ws.solves;
    out.complete = ws.solves <= budget;
    return out;
  }
  bool exhausted = false;
  std::vector<LpRow> decided;
  std::size_t le_count = sup.size();

  std::function<void(std::size_t, const std::vector<Rational>&)> dfs = [&](std::size_t idx,
                                                                          const std::vector<Rational>& x) {
    if (exhausted) return;
    if (le_count >= out.count) return;
    if (idx == free.size()) {
      out.feasible = true;
      out.count = le_count;
      out.weights = ws.to_weights(x);
      return;
    }
    const Triple& tr = free[idx];
    LpRow gt_row = ws.triple_row(tr, 1, 1), le_row = ws.triple_row(tr, -1, 0);
    auto branch = [&](const LpRow& row, bool is_le) {
      if (exhausted) return;
      if (is_le && le_count + 1 >= out.count) return;
      std::optional<std::vector<Rational>> y;
      if (ws.satisfied(row, x)) {
        y = x;
      } else {
        if (ws.solves >= budget) {
          exhausted = true;
          return;
        }
        auto all = fixed;
        all.insert(all.end(), decided.begin(), decided.end());
        all.push_back(row);
        y = ws.solve_injective(all, {}, budget);
        if (ws.solves >= budget && !y) {
          exhausted = true;
          return;
        }
      }
      if (!y) return;
      decided.push_back(row);
      if (is_le) ++le_count;
      dfs(idx + 1, *y);
      decided.pop_back();
      if (is_le) --le_count;
    };
    branch(gt_row, false);
    branch(le_row, true);
  };
  dfs(0, *x0);
  out.nodes = ws.solves;
  out.complete = !exhausted;
  return out;
}

// ---------------------------------------------------------------- problems

std::size_t TightProblem::unknowns() const {
  return symmetric ? r * dims[0] : r * (dims[0] + dims[1] + dims[2]);
}

std::size_t TightProblem::offset(int factor) const {
  if (symmetric) return 0;
  std::size_t off = 0;
  for (int g = 0; g < factor; ++g) off += r * dims[static_cast<std::size_t>(g)];
  return off;
}

std::size_t TightProblem::var(int factor, std::size_t s, std::size_t i) const {
  if (symmetric) return s * dims[0] + i;
  return offset(factor) + s * dims[static_cast<std::size_t>(factor)] + i;
}

std::string TightProblem::to_json() const {
  json j;
  j["dims"] = dims;
  j["symmetric"] = symmetric;
  j["r"] = r;
  if (weights) j["weights"] = json::parse(weights->to_json());
  j["equations"] = eqs;
  json tg = json::array();
  for (const auto& v : target) tg.push_back(to_string(v));
  j["target"] = tg;
  j["exponent"] = exponent;
  j["unknowns"] = unknowns();
  return j.dump();
}

TightProblem TightProblem::from_json(const std::string& text) {
  json j = json::parse(text);
  TightProblem p;
  p.dims = j.at("dims").get<Dims>();
  p.symmetric = j.value("symmetric", false);
  p.r = j.at("r").get<std::size_t>();
  if (j.contains("weights")) p.weights = TightWeights::from_json(j.at("weights").dump());
  p.eqs = j.at("equations").get<std::vector<Triple>>();
  for (const auto& s : j.at("target")) p.target.push_back(parse_rational(s.get<std::string>()));
  p.exponent = j.value("exponent", std::vector<long>(p.eqs.size(), 0));
  if (p.target.size() != p.eqs.size() || p.exponent.size() != p.eqs.size())
    throw std::invalid_argument("problem arrays differ in length");
  for (const auto& e : p.eqs)
    for (std::size_t f = 0; f < 3; ++f)
      if (e[f] >= p.dims[f]) throw std::invalid_argument("equation index out of range");
  return p;
}

TightProblem equations(const QTensor& t, const TightWeights& w, std::size_t r) {
  if (!is_standard_tight(t, w)) throw std::invalid_argument("weights are not tight for this tensor");
  TightProblem p;
  p.dims = t.dims();
  p.symmetric = w.symmetric;
  p.r = r;
  p.weights = w;
  for (const auto& x : all_triples(t.dims(), w.symmetric)) {
    long s = w.sum(x);
    if (s > 0) continue;
    p.eqs.push_back(x);
    p.target.push_back(s == 0 ? t.at(x[0], x[1], x[2]) : Rational(0));
    p.exponent.push_back(s);
  }
  return p;
}

TightProblem full_problem(const QTensor& t, std::size_t r, bool symmetric) {
  TightProblem p;
  p.dims = t.dims();
  p.symmetric = symmetric;
  p.r = r;
  for (const auto& x : all_triples(t.dims(), symmetric)) {
    p.eqs.push_back(x);
    p.target.push_back(t.at(x[0], x[1], x[2]));
    p.exponent.push_back(0);
  }
  return p;
}

std::vector<Complex> residual(const TightProblem& p, const std::vector<Complex>& x) {
  if (x.size() != p.unknowns()) throw std::invalid_argument("parameter vector has wrong length");
  std::vector<Complex> f(p.eqs.size());
  for (std::size_t e = 0; e < p.eqs.size(); ++e) {
    const auto& [i, j, k] = p.eqs[e];
    Complex s = 0;
    for (std::size_t t = 0; t < p.r; ++t) s += x[p.var(0, t, i)] * x[p.var(1, t, j)] * x[p.var(2, t, k)];
    f[e] = s - p.target[e].get_d();
  }
  return f;
}

std::vector<BigComplex> residual(const TightProblem& p, const std::vector<BigComplex>& x, int digits) {
  if (x.size() != p.unknowns()) throw std::invalid_argument("parameter vector has wrong length");
  const long bits = digits_to_bits(digits);
  std::vector<BigComplex> f;
  f.reserve(p.eqs.size());
  for (std::size_t e = 0; e < p.eqs.size(); ++e) {
    const auto& [i, j, k] = p.eqs[e];
    BigComplex s(bits);
    for (std::size_t t = 0; t < p.r; ++t) s = s + x[p.var(0, t, i)] * x[p.var(1, t, j)] * x[p.var(2, t, k)];
    f.push_back(s - BigComplex(p.target[e], bits));
  }
  return f;
}

Eigen::MatrixXcd jacobian(const TightProblem& p, const std::vector<Complex>& x) {
  Eigen::MatrixXcd jm = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(p.eqs.size()),
                                               static_cast<Eigen::Index>(p.unknowns()));
  for (std::size_t e = 0; e < p.eqs.size(); ++e) {
    const auto& [i, j, k] = p.eqs[e];
    auto row = static_cast<Eigen::Index>(e);
    for (std::size_t t = 0; t < p.r; ++t) {
      std::size_t va = p.var(0, t, i), vb = p.var(1, t, j), vc = p.var(2, t, k);
      jm(row, static_cast<Eigen::Index>(va)) += x[vb] * x[vc];
      jm(row, static_cast<Eigen::Index>(vb)) += x[va] * x[vc];
      jm(row, static_cast<Eigen::Index>(vc)) += x[va] * x[vb];
    }
  }
  return jm;
}

Eigen::MatrixXcd jacobian_fd(const TightProblem& p, const std::vector<Complex>& x, double h) {
  Eigen::MatrixXcd jm(static_cast<Eigen::Index>(p.eqs.size()), static_cast<Eigen::Index>(p.unknowns()));
  auto y = x;
  for (std::size_t c = 0; c < x.size(); ++c) {
    y[c] = x[c] + h;
    auto fp = residual(p, y);
    y[c] = x[c] - h;
    auto fm = residual(p, y);
    y[c] = x[c];
    for (std::size_t e = 0; e < fp.size(); ++e)
      jm(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(c)) = (fp[e] - fm[e]) / (2 * h);
  }
  return jm;
}

// ---------------------------------------------------------------- solving

std::string SolveResult::to_json() const {
  json j;
  j["residual"] = residual;
  j["max_residual"] = max_residual;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["jac_rank"] = jac_rank;
  j["free_params"] = free_params;
  j["gauge_dim"] = gauge_dim;
  j["isolated"] = isolated;
  j["seed"] = seed;
  j["state"] = state;
  j["x"] = complex_array(x);
  return j.dump();
}

SolveResult SolveResult::from_json(const std::string& text) {
  json j = json::parse(text);
  SolveResult r;
  r.residual = j.value("residual", 0.0);
  r.max_residual = j.value("max_residual", 0.0);
  r.iterations = j.value("iterations", std::size_t{0});
  r.converged = j.value("converged", false);
  r.jac_rank = j.value("jac_rank", std::size_t{0});
  r.free_params = j.value("free_params", std::size_t{0});
  r.gauge_dim = j.value("gauge_dim", std::size_t{0});
  r.isolated = j.value("isolated", false);
  r.seed = j.value("seed", std::uint64_t{0});
  r.state = j.value("state", std::vector<int>{});
  for (const auto& z : j.at("x")) r.x.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return r;
}

std::size_t gauge_dimension(const TightProblem& p, const LmConfig& cfg) {
  return (p.symmetric ? 0 : 2 * p.r) + cfg.symmetry_dim;
}

std::vector<Complex> random_start(const TightProblem& p, std::uint64_t seed) {
  SeededRng rng(seed);
  const double s = std::sqrt(0.5);
  std::vector<Complex> x(p.unknowns());
  for (auto& z : x) {
    double re = rng.normal();
    double im = rng.normal();
    z = Complex(s * re, s * im);
  }
  return x;
}

SolveResult lm_solve_from(const TightProblem& p, std::vector<Complex> x, const LmConfig& cfg,
                          const std::vector<int>& state) {
  SolveResult res;
  res.state = state.empty() ? std::vector<int>(x.size(), 0) : state;
  if (res.state.size() != x.size()) throw std::invalid_argument("state vector has wrong length");
  std::vector<Eigen::Index> free;
  for (std::size_t c = 0; c < x.size(); ++c)
    if (res.state[c] != 1) free.push_back(static_cast<Eigen::Index>(c));
  auto f = residual(p, x);
  double cost = norm2(f);
  res.history.push_back(cost);
  double lambda = cfg.lambda0;
  const auto nf = static_cast<Eigen::Index>(free.size());
  while (res.iterations < cfg.max_iter && cost >= cfg.tol && nf > 0) {
    ++res.iterations;
    Eigen::MatrixXcd full = jacobian(p, x);
    Eigen::MatrixXcd jm(full.rows(), nf);
    for (Eigen::Index c = 0; c < nf; ++c) jm.col(c) = full.col(free[static_cast<std::size_t>(c)]);
    Eigen::VectorXcd fv(static_cast<Eigen::Index>(f.size()));
    for (std::size_t e = 0; e < f.size(); ++e) fv(static_cast<Eigen::Index>(e)) = f[e];
    Eigen::MatrixXcd a = jm.adjoint() * jm;
    Eigen::VectorXcd g = jm.adjoint() * fv;
    bool accepted = false;
    bool small_step = false;
    while (lambda < 1e16) {
      Eigen::MatrixXcd damped = a;
      damped.diagonal().array() += lambda;
      Eigen::LLT<Eigen::MatrixXcd> llt(damped);
      if (llt.info() != Eigen::Success) {
        lambda *= 10;
        continue;
      }
      Eigen::VectorXcd step = -llt.solve(g);
      auto y = x;
      double xnorm = 0;
      for (Eigen::Index c = 0; c < nf; ++c) {
        y[static_cast<std::size_t>(free[static_cast<std::size_t>(c)])] += step(c);
        xnorm += std::norm(x[static_cast<std::size_t>(free[static_cast<std::size_t>(c)])]);
      }
      auto fy = residual(p, y);
      double cy = norm2(fy);
      if (cy < cost) {
        small_step = step.norm() < cfg.steptol * (std::sqrt(xnorm) + cfg.steptol);
        x = std::move(y);
        f = std::move(fy);
        cost = cy;
        res.history.push_back(cost);
        lambda = std::max(lambda / 10, 1e-20);
        accepted = true;
        break;
      }
      lambda *= 10;
    }
    if (!accepted || small_step) break;
  }
  res.x = std::move(x);
  res.residual = cost;
  res.max_residual = norm_inf(f);
  res.converged = cost < cfg.tol;
  res.free_params = free.size();
  res.gauge_dim = gauge_dimension(p, cfg);
  return res;
}

SolveResult lm_solve(const TightProblem& p, const LmConfig& cfg, std::uint64_t seed) {
  SolveResult r = lm_solve_from(p, random_start(p, seed), cfg);
  r.seed = seed;
  return r;
}

namespace {

std::size_t best_index(const std::vector<SolveResult>& rs) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < rs.size(); ++k)
    if (rs[k].residual < rs[best].residual) best = k;
  return best;
}

}  // namespace

SolveResult multi_start(const TightProblem& p, const LmConfig& cfg, std::uint64_t seed, std::size_t starts) {
  if (starts == 0) throw std::invalid_argument("need at least one start");
  std::vector<SolveResult> rs(starts);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (std::size_t k = 0; k < starts; ++k) {
    try {
      rs[k] = lm_solve(p, cfg, seed + k);
    } catch (...) {
#pragma omp critical
      err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return rs[best_index(rs)];
}

SolveResult multi_start_serial(const TightProblem& p, const LmConfig& cfg, std::uint64_t seed, std::size_t starts) {
  if (starts == 0) throw std::invalid_argument("need at least one start");
  std::vector<SolveResult> rs;
  for (std::size_t k = 0; k < starts; ++k) rs.push_back(lm_solve(p, cfg, seed + k));
  return rs[best_index(rs)];
}

void fill_isolation(const TightProblem& p, const LmConfig& cfg, SolveResult& res) {
  if (res.state.size() != res.x.size()) res.state.assign(res.x.size(), 0);
  Eigen::MatrixXcd full = jacobian(p, res.x);
  std::vector<Eigen::Index> free;
  for (std::size_t c = 0; c < res.x.size(); ++c)
    if (res.state[c] != 1) free.push_back(static_cast<Eigen::Index>(c));
  Eigen::MatrixXcd jm(full.rows(), static_cast<Eigen::Index>(free.size()));
  for (std::size_t c = 0; c < free.size(); ++c) jm.col(static_cast<Eigen::Index>(c)) = full.col(free[c]);
  res.free_params = free.size();
  res.gauge_dim = gauge_dimension(p, cfg);
  res.jac_rank = numeric_rank(jm);
  res.isolated = res.jac_rank + res.gauge_dim >= res.free_params;
}

SolveResult sparsify(const TightProblem& p, const SolveResult& input, const SparsifyConfig& cfg) {
  SolveResult cur = input;
  if (cur.state.size() != cur.x.size()) cur.state.assign(cur.x.size(), 0);
  auto full_rank = [&](SolveResult& r) {
    fill_isolation(p, cfg.lm, r);
    return r.jac_rank == r.free_params;
  };
  if (full_rank(cur)) return cur;
  const std::array<Complex, 5> snaps{Complex(0, 0), Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)};
  while (true) {
    std::size_t pick = SIZE_MAX;
    for (std::size_t c = 0; c < cur.x.size(); ++c)
      if (cur.state[c] == 0 && (pick == SIZE_MAX || std::abs(cur.x[c]) < std::abs(cur.x[pick]))) pick = c;
    if (pick == SIZE_MAX) break;
    Complex value = 0;
    double best = cfg.snap;
    for (const auto& s : snaps)
      if (std::abs(cur.x[pick] - s) <= best) {
        best = std::abs(cur.x[pick] - s);
        value = s;
      }
    auto x = cur.x;
    x[pick] = value;
    auto state = cur.state;
    state[pick] = 1;
    SolveResult trial = lm_solve_from(p, x, cfg.lm, state);
    if (trial.residual < cfg.accept_tol) {
      trial.seed = cur.seed;
      cur = std::move(trial);
      if (full_rank(cur)) break;
    } else {
      cur.state[pick] = 2;
    }
  }
  fill_isolation(p, cfg.lm, cur);
  return cur;
}

// ---------------------------------------------------------------- decompositions

NumDecomposition assemble_decomposition(const TightProblem& p, const std::vector<Complex>& x, int digits) {
  if (x.size() != p.unknowns()) throw std::invalid_argument("parameter vector has wrong length");
  const long bits = digits_to_bits(digits);
  NumDecomposition d;
  d.dims = p.dims;
  d.symmetric = p.symmetric;
  d.source = "solve";
  d.scale = BigComplex(Rational(1), bits);
  d.data_digits = 16;
  auto value = [&](Complex z) { return BigComplex(BigFloat(z.real(), bits), BigFloat(z.imag(), bits)); };
  for (std::size_t s = 0; s < p.r; ++s) {
    DecompTerm<BigComplex> term;
    term.coeff = LaurentPoly<BigComplex>(BigComplex(Rational(1), bits), 0);
    for (int f = 0; f < (p.symmetric ? 1 : 3); ++f) {
      auto& v = f == 0 ? term.a : (f == 1 ? term.b : term.c);
      std::size_t dim = p.dims[static_cast<std::size_t>(f)];
      v.assign(dim, LaurentPoly<BigComplex>());
      for (std::size_t i = 0; i < dim; ++i) {
        int e = p.weights ? static_cast<int>(p.weights->w[static_cast<std::size_t>(f)][i]) : 0;
        v[i] = LaurentPoly<BigComplex>(value(x[p.var(f, s, i)]), e);
      }
    }
    d.terms.push_back(std::move(term));
  }
  return d;
}

std::vector<BigComplex> parameters_from_decomposition(const NumDecomposition& d, const TightProblem& p) {
  if (d.dims != p.dims || d.symmetric != p.symmetric || d.size() != p.r)
    throw std::invalid_argument("decomposition does not match the problem shape");
  const long bits = d.scale.precision();
  std::vector<BigComplex> x(p.unknowns(), BigComplex(bits));
  for (std::size_t s = 0; s < p.r; ++s) {
    const auto& term = d.terms[s];
    if (term.coeff.size() != 1 || term.coeff.lowest() != 0 ||
        (term.coeff.coeff(0) - BigComplex(Rational(1), bits)).abs_double() > 1e-30)
      throw std::invalid_argument("term coefficient is not the constant 1");
    for (int f = 0; f < (p.symmetric ? 1 : 3); ++f) {
      const auto& v = d.vec(term, f);
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].is_zero()) continue;
        long e = p.weights ? p.weights->w[static_cast<std::size_t>(f)][i] : 0;
        if (v[i].size() != 1 || v[i].lowest() != e) throw std::invalid_argument("entry is not the tight monomial");
        x[p.var(f, s, i)] = v[i].coeff(static_cast<int>(e));
      }
    }
  }
  return x;
}

std::string CrossCheck::to_json() const {
  json j;
  j["name"] = name;
  j["path"] = path;
  j["compared"] = compared;
  j["max_diff"] = max_diff;
  j["pass"] = pass;
  return j.dump();
}

namespace {

template <class S>
Complex eval_laurent(const LaurentPoly<S>& l, Complex t) {
  Complex s = 0;
  for (const auto& [e, c] : l.terms()) s += to_cd(c) * std::pow(t, e);
  return s;
}

template <class S>
std::pair<int, int> exponent_span(const LaurentPoly<S>& l) {
  if (l.is_zero()) return {std::numeric_limits<int>::max(), std::numeric_limits<int>::min()};
  return {l.lowest(), l.highest()};
}

// Laurent coefficients from evaluations on roots of unity, compared to the expansion.
template <class S>
CrossCheck sampled_check(const BorderDecomposition<S>& d, double tol) {
  CrossCheck cc;
  cc.path = "sampling";
  int lo = 0, hi = 0;
  bool first = true;
  for (const auto& term : d.terms) {
    auto [cl, ch] = exponent_span(term.coeff);
    int tl = cl, th = ch;
    for (int f = 0; f < 3; ++f) {
      int fl = std::numeric_limits<int>::max(), fh = std::numeric_limits<int>::min();
      for (const auto& e : d.vec(term, f)) {
        auto [a, b] = exponent_span(e);
        fl = std::min(fl, a);
        fh = std::max(fh, b);
      }
      tl += fl;
      th += fh;
    }
    lo = first ? tl : std::min(lo, tl);
    hi = first ? th : std::max(hi, th);
    first = false;
  }
  std::size_t n = 1;
  while (n < static_cast<std::size_t>(hi - lo + 1)) n *= 2;
  const Dims& dm = d.dims;
  const std::size_t total = dm[0] * dm[1] * dm[2];
  std::vector<std::vector<Complex>> samples(n, std::vector<Complex>(total));
  const double tau = 6.283185307179586;
  for (std::size_t k = 0; k < n; ++k) {
    Complex t = std::polar(1.0, tau * static_cast<double>(k) / static_cast<double>(n));
    for (const auto& term : d.terms) {
      Complex c = eval_laurent(term.coeff, t);
      std::array<std::vector<Complex>, 3> v;
      for (int f = 0; f < 3; ++f)
        for (const auto& e : d.vec(term, f)) v[static_cast<std::size_t>(f)].push_back(eval_laurent(e, t));
      for (std::size_t i = 0; i < dm[0]; ++i)
        for (std::size_t j = 0; j < dm[1]; ++j) {
          Complex cij = c * v[0][i] * v[1][j];
          for (std::size_t l = 0; l < dm[2]; ++l) samples[k][(i * dm[1] + j) * dm[2] + l] += cij * v[2][l];
        }
    }
  }
  auto ex = expand(d, 0);
  for (int e = lo; e <= 0; ++e) {
    const auto it = ex.coeff.find(e);
    for (std::size_t x = 0; x < total; ++x) {
      Complex acc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        Complex t = std::polar(1.0, -tau * static_cast<double>(k) * e / static_cast<double>(n));
        acc += samples[k][x] * t;
      }
      acc /= static_cast<double>(n);
      Complex ref = 0;
      if (it != ex.coeff.end()) {
        auto jt = it->second.find(x);
        if (jt != it->second.end()) ref = to_cd(jt->second);
      }
      cc.max_diff = std::max(cc.max_diff, std::abs(acc - ref));
      ++cc.compared;
    }
  }
  cc.pass = cc.max_diff <= tol;
  return cc;
}

}  // namespace

CrossCheck cross_check(const std::string& builtin_name, double tol) {
  const int digits = 30;
  AnyDecomposition any = builtin(builtin_name, digits);
  QTensor t = catalog(builtin_target(builtin_name));
  CrossCheck cc;
  if (builtin_name == "det3-17" || builtin_name == "skewcw4sq-42") {
    auto wi = builtin_name == "det3-17" ? det3_weights() : skewcw4sq_weights();
    TightWeights w = TightWeights::symmetric_from(std::vector<long>(wi.begin(), wi.end()));
    const auto& d = std::get<NumDecomposition>(any);
    TightProblem p = equations(t, w, d.size());
    auto big = parameters_from_decomposition(d, p);
    std::vector<Complex> x;
    for (const auto& z : big) x.push_back(to_cd(z));
    auto f = residual(p, x);
    auto ex = expand(d, 0);
    cc.path = "equations";
    for (std::size_t e = 0; e < p.eqs.size(); ++e) {
      const auto& [i, j, k] = p.eqs[e];
      Complex ref = 0;
      auto it = ex.coeff.find(static_cast<int>(p.exponent[e]));
      if (it != ex.coeff.end()) {
        auto jt = it->second.find(ex.index(i, j, k));
        if (jt != it->second.end()) ref = to_cd(jt->second);
      }
      Complex mine = f[e] + p.target[e].get_d();
      cc.max_diff = std::max(cc.max_diff, std::abs(mine - ref));
      ++cc.compared;
    }
    cc.pass = cc.max_diff <= tol;
  } else {
    cc = std::visit([&](const auto& d) { return sampled_check(d, tol); }, any);
  }
  cc.name = builtin_name;
  return cc;
}

}  // namespace borderlab
