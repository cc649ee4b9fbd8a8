#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "borderlab/decomp.hpp"
#include "borderlab/tensor.hpp"

namespace borderlab {

using Complex = std::complex<double>;
using Triple = std::array<std::size_t, 3>;

// ---------------------------------------------------------------- tight weights

struct TightWeights {
  std::array<std::vector<long>, 3> w;
  bool symmetric = false;

  static TightWeights symmetric_from(const std::vector<long>& w);
  long sum(const Triple& x) const { return w[0][x[0]] + w[1][x[1]] + w[2][x[2]]; }
  std::string to_json() const;
  static TightWeights from_json(const std::string& text);
};

bool is_standard_tight(const QTensor& t, const TightWeights& w);

// All index triples (ordered) or multisets i <= j <= k (symmetric).
std::vector<Triple> all_triples(const Dims& d, bool symmetric);
// Triples with weight sum <= 0 (S_<=) under the chosen convention.
std::size_t equation_count(const Dims& d, const TightWeights& w, bool multisets);

struct Partition {
  std::vector<Triple> le;  // sum <= 0, off the support
  std::vector<Triple> gt;  // sum >= 1
};
Partition induced_partition(const QTensor& t, const TightWeights& w);

struct LpOutcome {
  bool feasible = false;
  TightWeights weights;
  std::size_t lp_solves = 0;
};

// Exact rational feasibility: support sums = 0, S_<= sums <= 0, S_> sums >= 1, and
// injective weights (orders branched lazily on ties). Integer weights on success.
LpOutcome weights_from_lp(const QTensor& t, const std::vector<Triple>& le, const std::vector<Triple>& gt,
                          bool symmetric);

struct SearchOutcome {
  bool feasible = false;
  TightWeights weights;
  std::size_t count = 0;  // |S_<=| including the support
  bool complete = false;  // search exhausted within the budget (count is minimal)
  std::uint64_t nodes = 0;
  std::string to_json() const;
};

// Branch and bound over off-support sign choices with LP pruning; budget counts LP solves.
SearchOutcome search_min_equations(const QTensor& t, bool symmetric, std::uint64_t budget,
                                   const std::optional<TightWeights>& incumbent = std::nullopt);

// ---------------------------------------------------------------- problems

struct TightProblem {
  Dims dims{1, 1, 1};
  bool symmetric = false;
  std::size_t r = 0;
  std::optional<TightWeights> weights;  // absent for the full equation set
  std::vector<Triple> eqs;
  std::vector<Rational> target;
  std::vector<long> exponent;  // weight sum of each equation (0 without weights)

  // Complex unknowns: r * m (symmetric) or r * (dA + dB + dC), laid out term-major per factor.
  std::size_t unknowns() const;
  std::size_t offset(int factor) const;
  std::size_t var(int factor, std::size_t s, std::size_t i) const;

  std::string to_json() const;
  static TightProblem from_json(const std::string& text);
};

// S_<= system of a tight tensor: residual sum_s A_si B_sj C_sk - T_ijk (T only at weight 0).
TightProblem equations(const QTensor& t, const TightWeights& w, std::size_t r);
// All triples, no weights.
TightProblem full_problem(const QTensor& t, std::size_t r, bool symmetric = false);

std::vector<Complex> residual(const TightProblem& p, const std::vector<Complex>& x);
std::vector<BigComplex> residual(const TightProblem& p, const std::vector<BigComplex>& x, int digits);
Eigen::MatrixXcd jacobian(const TightProblem& p, const std::vector<Complex>& x);
Eigen::MatrixXcd jacobian_fd(const TightProblem& p, const std::vector<Complex>& x, double h = 1e-6);

// ---------------------------------------------------------------- solving

struct LmConfig {
  std::size_t max_iter = 500;
  double tol = 1e-12;      // residual 2-norm
  double steptol = 1e-15;  // relative step size
  double lambda0 = 1e-3;
  std::size_t symmetry_dim = 0;  // added to the declared gauge dimension
};

struct SolveResult {
  std::vector<Complex> x;
  double residual = 0;
  double max_residual = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> history;  // accepted residual norms
  std::size_t jac_rank = 0;
  std::size_t free_params = 0;
  std::size_t gauge_dim = 0;
  bool isolated = false;
  std::uint64_t seed = 0;
  std::vector<int> state;  // per unknown: 0 free, 1 pinned, 2 frozen nonzero

  std::string to_json() const;
  static SolveResult from_json(const std::string& text);
};

std::size_t gauge_dimension(const TightProblem& p, const LmConfig& cfg);
// Complex Gaussian start with unit variance.
std::vector<Complex> random_start(const TightProblem& p, std::uint64_t seed);
SolveResult lm_solve(const TightProblem& p, const LmConfig& cfg, std::uint64_t seed);
SolveResult lm_solve_from(const TightProblem& p, std::vector<Complex> x0, const LmConfig& cfg,
                          const std::vector<int>& state = {});
// Best of `starts` runs with seeds seed, seed + 1, ...; the parallel and serial forms agree.
SolveResult multi_start(const TightProblem& p, const LmConfig& cfg, std::uint64_t seed, std::size_t starts);
SolveResult multi_start_serial(const TightProblem& p, const LmConfig& cfg, std::uint64_t seed, std::size_t starts);
// Numeric Jacobian rank on free unknowns and the isolation flag.
void fill_isolation(const TightProblem& p, const LmConfig& cfg, SolveResult& res);

struct SparsifyConfig {
  LmConfig lm;
  double accept_tol = 1e-10;
  double snap = 0.25;
};

SolveResult sparsify(const TightProblem& p, const SolveResult& res, const SparsifyConfig& cfg);

// ---------------------------------------------------------------- decompositions

NumDecomposition assemble_decomposition(const TightProblem& p, const std::vector<Complex>& x, int digits = 30);
// Monomial parameters of a decomposition whose entries are c * t^w(i).
std::vector<BigComplex> parameters_from_decomposition(const NumDecomposition& d, const TightProblem& p);

// Residual path of this module against the Laurent expansion of the decomp module.
struct CrossCheck {
  std::string name;
  std::string path;  // "equations" (tight data) or "sampling" (evaluation on roots of unity)
  std::size_t compared = 0;
  double max_diff = 0;
  bool pass = false;
  std::string to_json() const;
};

CrossCheck cross_check(const std::string& builtin_name, double tol = 1e-12);

}  // namespace borderlab
