#include "borderlab/tensor.hpp"

#include <json.hpp>

#include <sstream>

#include "borderlab/linalg.hpp"
#include "borderlab/rng.hpp"

namespace borderlab {

using nlohmann::json;

Factor parse_factor(const std::string& s) {
  if (s == "A" || s == "a") return Factor::A;
  if (s == "B" || s == "b") return Factor::B;
  if (s == "C" || s == "c") return Factor::C;
  throw std::invalid_argument("factor must be A, B or C: " + s);
}

const char* factor_name(Factor f) {
  switch (f) {
    case Factor::A: return "A";
    case Factor::B: return "B";
    case Factor::C: return "C";
  }
  return "?";
}

// ---------------------------------------------------------------- catalog

QTensor cw(int q) {
  if (q < 1) throw std::invalid_argument("cw requires q >= 1");
  auto n = static_cast<std::size_t>(q) + 1;
  QTensor t(n, n, n);
  for (std::size_t j = 1; j < n; ++j) {
    t.set(0, j, j, 1);
    t.set(j, 0, j, 1);
    t.set(j, j, 0, 1);
  }
  return t;
}

QTensor skewcw(int q) {
  if (q < 2 || q % 2 != 0) throw std::invalid_argument("skewcw requires even q >= 2");
  auto n = static_cast<std::size_t>(q) + 1;
  auto p = static_cast<std::size_t>(q / 2);
  QTensor t(n, n, n);
  for (std::size_t x = 1; x <= p; ++x) {
    std::size_t y = x + p;
    t.set(0, x, y, 1);
    t.set(0, y, x, -1);
    t.set(x, 0, y, -1);
    t.set(y, 0, x, 1);
    t.set(x, y, 0, 1);
    t.set(y, x, 0, -1);
  }
  return t;
}

QTensor cw_split(int q) {
  if (q < 1) throw std::invalid_argument("cwsplit requires q >= 1");
  auto n = static_cast<std::size_t>(q) + 1;
  auto p = static_cast<std::size_t>(q / 2);
  auto partner = [&](std::size_t j) {
    if (j <= p) return j + p;
    if (j <= 2 * p) return j - p;
    return j;
  };
  QTensor t(n, n, n);
  for (std::size_t j = 1; j < n; ++j) {
    std::size_t k = partner(j);
    t.set(0, j, k, 1);
    t.set(j, 0, k, 1);
    t.set(j, k, 0, 1);
  }
  return t;
}

QTensor eps3() { return skewcw(2); }

QTensor matmul(int l, int m, int n) {
  if (l < 1 || m < 1 || n < 1) throw std::invalid_argument("matmul dimensions must be positive");
  auto L = static_cast<std::size_t>(l), M = static_cast<std::size_t>(m), N = static_cast<std::size_t>(n);
  QTensor t(L * M, M * N, N * L);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < N; ++k) t.set(i * M + j, j * N + k, k * L + i, 1);
  return t;
}

QTensor unit(int r) {
  if (r < 1) throw std::invalid_argument("unit requires r >= 1");
  auto n = static_cast<std::size_t>(r);
  QTensor t(n, n, n);
  for (std::size_t i = 0; i < n; ++i) t.set(i, i, i, 1);
  return t;
}

QTensor zero_tensor(std::size_t da, std::size_t db, std::size_t dc) { return QTensor(da, db, dc); }

QTensor random_tensor(std::size_t da, std::size_t db, std::size_t dc, std::uint64_t seed, int bound) {
  SeededRng rng(seed);
  QTensor t(da, db, dc);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j)
      for (std::size_t k = 0; k < dc; ++k) t.set(i, j, k, Rational(static_cast<long>(rng.uniform_int(-bound, bound))));
  return t;
}

namespace {

void require_n3(int n, const char* what) {
  if (n != 3) throw std::invalid_argument(std::string(what) + "(n) is only provided for n = 3");
}

int perm_sign(const std::array<int, 3>& s) {
  int inv = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      if (s[static_cast<std::size_t>(a)] > s[static_cast<std::size_t>(b)]) ++inv;
  return inv % 2 ? -1 : 1;
}

// Sum over sigma of weight(sigma)/6 on all slot orderings of x_{0 s0} x_{1 s1} x_{2 s2}.
QTensor poly_tensor(bool signed_terms) {
  QTensor t(9, 9, 9);
  std::array<int, 3> s{0, 1, 2};
  do {
    Rational v(signed_terms ? perm_sign(s) : 1, 6);
    std::array<std::size_t, 3> idx{};
    for (std::size_t r = 0; r < 3; ++r) idx[r] = r * 3 + static_cast<std::size_t>(s[r]);
    std::array<int, 3> pi{0, 1, 2};
    do {
      t.set(idx[static_cast<std::size_t>(pi[0])], idx[static_cast<std::size_t>(pi[1])],
            idx[static_cast<std::size_t>(pi[2])], v);
    } while (std::next_permutation(pi.begin(), pi.end()));
  } while (std::next_permutation(s.begin(), s.end()));
  return t;
}

std::vector<long long> parse_int_list(const std::string& s) {
  std::vector<long long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty catalog parameter");
    std::size_t used = 0;
    long long v = std::stoll(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad catalog parameter: " + item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

QTensor perm_tensor(int n) {
  require_n3(n, "perm");
  return kronecker(cw_split(2), cw_split(2));
}

QTensor det_tensor(int n) {
  require_n3(n, "det");
  return kronecker(eps3(), eps3());
}

QTensor perm_poly_tensor(int n) {
  require_n3(n, "permpoly");
  return poly_tensor(false);
}

QTensor det_poly_tensor(int n) {
  require_n3(n, "detpoly");
  return poly_tensor(true);
}

QTensor catalog(const std::string& spec) {
  std::string body = spec;
  int power = 1;
  if (auto caret = body.find('^'); caret != std::string::npos) {
    power = std::stoi(body.substr(caret + 1));
    body = body.substr(0, caret);
  }
  std::string name = body;
  std::vector<long long> args;
  if (auto colon = body.find(':'); colon != std::string::npos) {
    name = body.substr(0, colon);
    args = parse_int_list(body.substr(colon + 1));
  }
  auto arg = [&](std::size_t i) {
    if (i >= args.size()) throw std::invalid_argument("missing parameter for catalog entry " + spec);
    return static_cast<int>(args[i]);
  };
  auto nargs = [&](std::size_t n) {
    if (args.size() != n) throw std::invalid_argument("wrong parameter count for catalog entry " + spec);
  };
  QTensor t;
  if (name == "cw") {
    nargs(1);
    t = cw(arg(0));
  } else if (name == "skewcw") {
    nargs(1);
    t = skewcw(arg(0));
  } else if (name == "cwsplit") {
    nargs(1);
    t = cw_split(arg(0));
  } else if (name == "eps3") {
    nargs(0);
    t = eps3();
  } else if (name == "matmul") {
    if (args.size() == 1) {
      t = matmul(arg(0), arg(0), arg(0));
    } else {
      nargs(3);
      t = matmul(arg(0), arg(1), arg(2));
    }
  } else if (name == "unit") {
    nargs(1);
    t = unit(arg(0));
  } else if (name == "perm") {
    nargs(1);
    t = perm_tensor(arg(0));
  } else if (name == "det") {
    nargs(1);
    t = det_tensor(arg(0));
  } else if (name == "permpoly") {
    nargs(1);
    t = perm_poly_tensor(arg(0));
  } else if (name == "detpoly") {
    nargs(1);
    t = det_poly_tensor(arg(0));
  } else if (name == "zero") {
    nargs(3);
    if (arg(0) < 1 || arg(1) < 1 || arg(2) < 1) throw std::invalid_argument("zero dims must be positive");
    t = zero_tensor(static_cast<std::size_t>(arg(0)), static_cast<std::size_t>(arg(1)),
                    static_cast<std::size_t>(arg(2)));
  } else if (name == "random") {
    nargs(4);
    if (arg(0) < 1 || arg(1) < 1 || arg(2) < 1) throw std::invalid_argument("random dims must be positive");
    t = random_tensor(static_cast<std::size_t>(arg(0)), static_cast<std::size_t>(arg(1)),
                      static_cast<std::size_t>(arg(2)), static_cast<std::uint64_t>(args[3]));
  } else {
    throw std::invalid_argument("unknown catalog tensor: " + name);
  }
  return power == 1 ? t : kronecker_power(t, power);
}

std::vector<std::string> catalog_names() {
  return {"cw:q", "skewcw:q", "cwsplit:q", "eps3", "matmul:n", "matmul:l,m,n", "unit:r", "perm:3", "det:3",
          "permpoly:3", "detpoly:3", "zero:a,b,c", "random:a,b,c,seed"};
}

// ---------------------------------------------------------------- spaces

namespace {

QVector flatten(const QMatrix& m) { return m.a; }

}  // namespace

QMatrixSpace make_matrix_space(std::size_t d1, std::size_t d2, const std::vector<QMatrix>& span) {
  QMatrixSpace s;
  s.d1 = d1;
  s.d2 = d2;
  std::vector<QVector> vs;
  vs.reserve(span.size());
  for (const auto& m : span) {
    if (m.rows != d1 || m.cols != d2) throw std::invalid_argument("matrix space member has wrong shape");
    vs.push_back(flatten(m));
  }
  for (std::size_t i : independent_subset(vs)) s.basis.push_back(span[i]);
  return s;
}

std::vector<QMatrix> slices(const QTensor& t, Factor factor) {
  const Dims& d = t.dims();
  std::size_t f = static_cast<std::size_t>(factor);
  std::size_t r1 = f == 0 ? 1 : 0;
  std::size_t r2 = f == 2 ? 1 : 2;
  std::vector<QMatrix> out(d[f], QMatrix(d[r1], d[r2]));
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) {
    std::array<std::size_t, 3> x{i, j, k};
    out[x[f]](x[r1], x[r2]) = v;
  });
  return out;
}

QMatrixSpace slice_space(const QTensor& t, Factor factor) {
  auto all = slices(t, factor);
  std::vector<QMatrix> nonzero;
  for (auto& m : all)
    if (!m.is_zero()) nonzero.push_back(std::move(m));
  std::size_t f = static_cast<std::size_t>(factor);
  std::size_t r1 = f == 0 ? 1 : 0;
  std::size_t r2 = f == 2 ? 1 : 2;
  return make_matrix_space(t.dims()[r1], t.dims()[r2], nonzero);
}

std::array<bool, 3> is_concise(const QTensor& t) {
  std::array<bool, 3> out{};
  for (int f = 0; f < 3; ++f) {
    auto fac = static_cast<Factor>(f);
    out[static_cast<std::size_t>(f)] = slice_space(t, fac).dim() == t.dim(fac);
  }
  return out;
}

bool is_1generic(const QTensor& t, Factor factor) {
  const Dims& d = t.dims();
  if (d[0] != d[1] || d[1] != d[2]) throw std::invalid_argument("1-genericity needs equal dimensions");
  std::size_t m = d[0];
  auto sl = slices(t, factor);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    SeededRng rng(seed * 7919 + 17);
    std::vector<long long> coef(sl.size());
    for (auto& c : coef) c = rng.uniform_int(-9, 9);
    QMatrix comb(m, m);
    for (std::size_t s = 0; s < sl.size(); ++s) {
      if (coef[s] == 0) continue;
      for (std::size_t x = 0; x < comb.a.size(); ++x)
        if (sgn(sl[s].a[x]) != 0) comb.a[x] += Rational(static_cast<long>(coef[s])) * sl[s].a[x];
    }
    std::uint64_t p = prime_for_seed(seed);
    std::size_t r = 0;
    try {
      r = rank_modp(reduce_mod_p(comb, p));
    } catch (const BadPrime&) {
      r = rank_exact(comb);
    }
    if (r == m && rank_exact(comb) == m) return true;
  }
  return false;
}

// ---------------------------------------------------------------- files

namespace {

template <class S, class F>
json entries_json(const Tensor3<S>& t, F&& str) {
  json e = json::array();
  t.for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const S& v) {
    e.push_back(json::array({i, j, k, str(v)}));
  });
  return e;
}

template <class S>
json header(const Tensor3<S>& t, const std::string& field) {
  json j;
  j["dims"] = {t.dims()[0], t.dims()[1], t.dims()[2]};
  j["field"] = field;
  return j;
}

template <class S, class P>
Tensor3<S> read_entries(const json& j, P&& parse) {
  auto dims = j.at("dims").get<std::vector<std::size_t>>();
  if (dims.size() != 3) throw std::invalid_argument("tensor file needs three dims");
  Tensor3<S> t(dims[0], dims[1], dims[2]);
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 4) throw std::invalid_argument("tensor entry must be [i,j,k,value]");
    std::string v = e[3].is_string() ? e[3].get<std::string>() : e[3].dump();
    t.add(e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<std::size_t>(), parse(v));
  }
  return t;
}

}  // namespace

std::string tensor_to_json(const QTensor& t) {
  json j = header(t, "rational");
  j["entries"] = entries_json(t, [](const Rational& v) { return to_string(v); });
  return j.dump();
}

std::string tensor_to_json(const Tensor3<Cyclotomic12>& t) {
  json j = header(t, "cyclotomic12");
  j["entries"] = entries_json(t, [](const Cyclotomic12& v) { return v.to_string(); });
  return j.dump();
}

std::string tensor_to_json(const Tensor3<BigComplex>& t) {
  int digits = kDefaultDigits;
  t.for_each_nonzero(
      [&](std::size_t, std::size_t, std::size_t, const BigComplex& v) { digits = std::min(digits, v.digits()); });
  json j = header(t, "complex:" + std::to_string(digits));
  j["entries"] = entries_json(t, [&](const BigComplex& v) { return v.to_string(digits); });
  return j.dump();
}

std::string tensor_to_json(const ModTensor& t) {
  json j = header(t.t, "fp:" + std::to_string(t.p));
  j["entries"] = entries_json(t.t, [&](const Rational& v) { return std::to_string(reduce_mod_p(v, t.p).value); });
  return j.dump();
}

AnyTensor tensor_from_json(const std::string& text) {
  json j = json::parse(text);
  std::string field = j.value("field", "rational");
  if (field == "rational") return read_entries<Rational>(j, parse_rational);
  if (field == "cyclotomic12") return read_entries<Cyclotomic12>(j, Cyclotomic12::parse);
  if (field.rfind("complex", 0) == 0) {
    int digits = kDefaultDigits;
    if (field.size() > 8) digits = std::stoi(field.substr(8));
    long bits = digits_to_bits(digits);
    return read_entries<BigComplex>(j, [&](const std::string& s) { return BigComplex::parse(s, bits); });
  }
  if (field.rfind("fp:", 0) == 0) {
    std::uint64_t p = std::stoull(field.substr(3));
    if (!is_prime_u64(p)) throw std::invalid_argument("fp modulus is not prime");
    ModTensor mt;
    mt.p = p;
    mt.t = read_entries<Rational>(j, [&](const std::string& s) { return Rational(reduce_mod_p(parse_rational(s), p).value); });
    return mt;
  }
  throw std::invalid_argument("unknown tensor field: " + field);
}

}  // namespace borderlab
