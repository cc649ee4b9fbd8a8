#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "borderlab/linalg.hpp"
#include "borderlab/tensor.hpp"

namespace borderlab {

// ---------------------------------------------------------------- spaces

// Coordinate value c0 + c1 * x_var.
struct ParamEntry {
  Rational c0;
  Rational c1;
};

// Sparse vector in X (x) Y, coordinate i * dim(Y) + j; var < 0 means constant.
struct SpaceVector {
  int var = -1;
  std::map<std::size_t, ParamEntry> coords;
};

// A degree-one candidate E_stu inside X (x) Y for a two-factor grade.
struct CandidateSpace {
  std::array<int, 3> grade{1, 1, 0};
  std::size_t d1 = 0;  // dim X
  std::size_t d2 = 0;  // dim Y
  std::vector<SpaceVector> basis;
  std::size_t marked = 0;  // leading basis vectors spanning the slice space
  bool relaxed = false;    // superspace standing in for a positive-dimensional family
  std::string label;

  std::size_t dim() const { return basis.size(); }
  int num_params() const;
  std::array<Factor, 2> factors() const;

  std::string to_json() const;
  static CandidateSpace from_json(const std::string& text);
};

// Constant space spanned by matrices (d1 x d2).
CandidateSpace space_from_matrices(const std::array<int, 3>& grade, const std::vector<QMatrix>& ms);
// Slice space of T for a two-factor grade: grade (1,1,0) gives T(C*), and so on.
CandidateSpace slice_candidate(const QTensor& t, const std::array<int, 3>& grade);
// Slice space followed by extra vectors (the complement E').
CandidateSpace with_slices(const QTensor& t, const CandidateSpace& complement);
// Rank-one coordinate vector x_i (x) y_j.
SpaceVector unit_vector(std::size_t d2, std::size_t i, std::size_t j, const Rational& c = 1);

// ---------------------------------------------------------------- outcomes

// Kernel dimension of a linear test over every value of the candidate parameters.
struct TestOutcome {
  std::size_t threshold = 0;
  std::size_t kernel_generic = 0;
  std::size_t kernel_max = 0;  // over all complex parameter values (upper bound when !exact)
  bool exact = true;
  // Coprime polynomials whose roots raise the kernel to the threshold (single parameter).
  std::vector<QPoly> special;
  int param_var = -1;

  bool pass_generic() const { return kernel_generic >= threshold; }
  bool pass_some() const { return kernel_max >= threshold; }
  bool refuted_all() const { return kernel_max < threshold; }
  // "pass", "pass-special", "refuted", or "inconclusive" (relaxation could not refute).
  std::string status() const;
  std::string to_json() const;
};

// kernel of E (x) X -> Lambda^2 X (x) Y, i.e. dim (X (x) E) cap (S^2 X (x) Y); pass iff >= r.
TestOutcome test_210(const CandidateSpace& e, std::size_t r);
// Mirror with the two factors exchanged.
TestOutcome test_120(const CandidateSpace& e, std::size_t r);
// dim (E110 (x) C) cap (E101 (x) B) cap (E011 (x) A); pass iff >= r.
TestOutcome test_111(const CandidateSpace& e110, const CandidateSpace& e101, const CandidateSpace& e011,
                     std::size_t r);

// ---------------------------------------------------------------- kernels

struct KappaSplit {
  std::size_t free = 0;
  std::size_t pure = 0;
  std::size_t mixed = 0;
  std::size_t total = 0;
  std::string to_json() const;
};

// Split of the (210) kernel (mirror = false) or (120) kernel (mirror = true) for
// E = T(slices) + complement. Pure part is for the given complement.
KappaSplit kappa_split(const QTensor& t, const CandidateSpace& complement, bool mirror = false);

struct FlagProfile {
  std::vector<std::size_t> s;
  std::size_t bound() const;
};

// Generic-flag profile of a constant complement with the flag taken in the second
// factor (flag_in_second = true, bounds the (210) pure kernel) or the first factor.
FlagProfile cartan_bound(const CandidateSpace& complement, bool flag_in_second = true, int seeds = 3);

struct FlagCheck {
  bool refuted = false;
  std::vector<std::size_t> generic_ranks;  // per level
  std::size_t first_refuted = 0;           // 1-based level, 0 if none
  std::string to_json() const;
};

// Necessary condition on a filtration F_1 c ... c F_r of a matrix space: level j is
// refuted when its generic element has rank > 2j.
FlagCheck flag_filtration_check(const std::vector<std::vector<QMatrix>>& filtration, std::uint64_t seed = 0);

// ---------------------------------------------------------------- torus

// Integer weights of the diagonal torus stabilizing T (Lie algebra of the diagonal
// stabilizer): w[f][i] is the weight of basis vector i of factor f.
struct TorusWeights {
  std::size_t dim = 0;
  std::array<std::vector<std::vector<long>>, 3> w;
};

TorusWeights torus_weights(const QTensor& t);
// True when g . E = E for the torus element with coordinates `point` (nonzero rationals).
bool is_torus_fixed(const CandidateSpace& e, const TorusWeights& tw, const std::vector<Rational>& point,
                    const Rational& x = 0);

struct WeightClass {
  std::vector<long> weight;
  std::vector<std::size_t> coords;      // coordinates (i * d2 + j) of this weight
  std::vector<SpaceVector> slice_part;  // slice-space basis vectors in the class
  std::vector<std::size_t> complement;  // coordinate vectors completing the class
};

std::vector<WeightClass> weight_classes(const QTensor& t, const std::array<int, 3>& grade, const TorusWeights& tw);

struct EnumerationOptions {
  std::uint64_t budget = 1000000;
};

// Torus-fixed E containing the slice space with dim E = r. Classes of complement
// dimension 2 with one vector chosen give a point (x = infinity) and a one-parameter
// family; partial choices in larger classes are replaced by the full class (relaxed).
std::vector<CandidateSpace> torus_candidates(const QTensor& t, const std::array<int, 3>& grade, std::size_t r,
                                             const TorusWeights& tw, const EnumerationOptions& opts = {});

struct CandidateVerdict {
  CandidateSpace space;
  TestOutcome left;   // (210)-type
  TestOutcome right;  // (120)-type
  bool survives = false;
  bool common_special = true;  // some parameter value passes both tests
};

struct SearchReport {
  std::string tensor;
  std::size_t r = 0;
  std::size_t torus_dim = 0;
  std::array<std::size_t, 3> candidates{};
  std::array<std::size_t, 3> survivors{};
  std::array<std::size_t, 3> families{};
  std::array<std::size_t, 3> families_refuted{};
  std::array<std::size_t, 3> relaxed{};
  std::size_t triples = 0;
  std::size_t triples_passing = 0;
  std::size_t triples_inconclusive = 0;
  std::size_t max_111 = 0;
  std::vector<std::array<CandidateVerdict, 3>> passing;
  std::array<std::vector<CandidateVerdict>, 3> verdicts;
  bool no_triple_passes() const { return triples_passing == 0 && triples_inconclusive == 0; }
  std::string to_json(bool full = false) const;
};

// Grades in order (1,1,0), (1,0,1), (0,1,1).
const std::array<std::array<int, 3>, 3>& two_factor_grades();

SearchReport lower_bound_search(const QTensor& t, std::size_t r, const EnumerationOptions& opts = {},
                                const std::string& name = "");

// ---------------------------------------------------------------- constructions

struct WeakCandidate {
  std::size_t m = 0;
  std::size_t r = 0;
  std::size_t k = 0;
  std::array<CandidateSpace, 3> complements;  // grades (1,1,0), (1,0,1), (0,1,1)
};

// Explicit E' of the weak degree-three construction for r = 2m (m >= 9, m != 10, 15)
// or r = m + k^2 with m <= k^3/2 - k^2/2.
WeakCandidate weak_candidate(std::size_t m, std::size_t r);
// Concise shifted unit tensor sum_i a_i b_{i+d} c_{i+2d} whose slice spaces meet none of
// the complements of weak_candidate(m, r).
QTensor weak_witness_tensor(std::size_t m, std::size_t r);

struct EmptyCorBound {
  std::size_t m = 0;
  MinRankResult certificate;
  std::size_t bound = 0;
  std::string to_json() const;
};

// m + rho - 1 with rho the certified minimum rank on the slice space of `factor`.
EmptyCorBound emptycor_bound(const QTensor& t, Factor factor, std::uint64_t p, std::uint64_t budget);

}  // namespace borderlab
