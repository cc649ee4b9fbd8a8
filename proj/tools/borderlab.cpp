#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "borderlab/apolarity.hpp"
#include "borderlab/decomp.hpp"
#include "borderlab/koszul.hpp"
#include "borderlab/linalg.hpp"
#include "borderlab/reproduce.hpp"
#include "borderlab/solve.hpp"

using namespace borderlab;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kUsage = 2, kBudget = 3 };

struct Output {
  bool pretty = false;
  std::string path;
};

Output g_out;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text << '\n';
}

std::string scalar_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// Two-column table of the top-level fields; nested values are summarized.
std::string table(const json& j) {
  if (!j.is_object()) return j.dump(2);
  std::size_t width = 0;
  for (auto it = j.begin(); it != j.end(); ++it) width = std::max(width, it.key().size());
  std::ostringstream os;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string v;
    if (it.value().is_array() && it.value().size() > 8) v = "[" + std::to_string(it.value().size()) + " items]";
    else if (it.value().is_object() && it.value().size() > 8) v = "{" + std::to_string(it.value().size()) + " fields}";
    else v = scalar_text(it.value());
    os << it.key() << std::string(width - it.key().size() + 2, ' ') << v << '\n';
  }
  return os.str();
}

void emit(const json& j) {
  if (!g_out.path.empty()) write_file(g_out.path, j.dump());
  if (g_out.pretty) std::cout << table(j);
  else std::cout << j.dump() << '\n';
}

std::vector<std::uint64_t> seed_list(std::uint64_t first, int count) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < count; ++i) s.push_back(first + static_cast<std::uint64_t>(i));
  return s;
}

std::string with_power(const std::string& spec, int power) {
  return power > 1 ? spec + "^" + std::to_string(power) : spec;
}

TightWeights load_weights(const std::string& spec) {
  std::vector<int> w;
  if (spec == "det3") w = det3_weights();
  else if (spec == "skewcw4sq") w = skewcw4sq_weights();
  else return TightWeights::from_json(read_file(spec));
  return TightWeights::symmetric_from(std::vector<long>(w.begin(), w.end()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"borderlab: border rank certificates, verification and decomposition search"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (overrides BORDERLAB_THREADS)");
  app.add_flag("--pretty", g_out.pretty, "human-readable table instead of JSON");
  app.add_option("--out", g_out.path, "also write the JSON report to this file");

  // catalog
  auto* cat = app.add_subcommand("catalog", "list catalog tensors or show one");
  std::string cat_action, cat_spec;
  cat->add_option("action", cat_action, "list | show")->required()->check(CLI::IsMember({"list", "show"}));
  cat->add_option("spec", cat_spec, "catalog spec, e.g. cw:2 or skewcw:4^2");

  // kron
  auto* kron = app.add_subcommand("kron", "Kronecker product or power of catalog tensors");
  std::vector<std::string> kron_specs;
  int kron_power = 1;
  kron->add_option("tensors", kron_specs, "one or more tensors (catalog spec or JSON file)")->required();
  kron->add_option("--power", kron_power, "Kronecker power of the product")->check(CLI::PositiveNumber);

  // koszul-bound
  auto* kz = app.add_subcommand("koszul-bound", "Koszul flattening lower bound");
  std::string kz_tensor, kz_factor = "A", kz_prime = "auto";
  int kz_power = 1, kz_p = 1, kz_seeds = 1;
  std::uint64_t kz_seed = 0;
  bool kz_exact = false;
  kz->add_option("--tensor", kz_tensor)->required();
  kz->add_option("--power", kz_power)->check(CLI::PositiveNumber);
  kz->add_option("--factor", kz_factor)->check(CLI::IsMember({"A", "B", "C"}));
  kz->add_option("--p", kz_p)->required()->check(CLI::NonNegativeNumber);
  kz->add_option("--seeds", kz_seeds, "number of restriction seeds")->check(CLI::PositiveNumber);
  kz->add_option("--seed", kz_seed, "first seed");
  kz->add_option("--prime", kz_prime, "auto or a prime below 2^62");
  kz->add_flag("--exact", kz_exact, "exact rational rank at any size");

  // verify
  auto* ver = app.add_subcommand("verify", "verify a border decomposition");
  std::string ver_decomp, ver_target, ver_mode = "exact";
  int ver_digits = kDefaultDigits;
  double ver_tol = -1;
  ver->add_option("--decomp", ver_decomp, "builtin:NAME or a JSON file")->required();
  ver->add_option("--target", ver_target, "target tensor (default: the built-in's own)");
  ver->add_option("--mode", ver_mode)->check(CLI::IsMember({"exact", "numeric"}));
  ver->add_option("--digits", ver_digits)->check(CLI::PositiveNumber);
  ver->add_option("--tol", ver_tol, "numeric tolerance (default 10^-(digits-5))");

  // apolarity
  auto* apo = app.add_subcommand("apolarity", "border apolarity degree-three tests");
  apo->require_subcommand(1);
  auto* apo_enum = apo->add_subcommand("enumerate", "torus-fixed lower bound search");
  std::string en_tensor, en_report;
  std::size_t en_r = 0;
  std::uint64_t en_budget = 1000000;
  apo_enum->add_option("--tensor", en_tensor)->required();
  apo_enum->add_option("-r", en_r)->required();
  apo_enum->add_option("--budget", en_budget, "maximum candidates per grade");
  apo_enum->add_option("--report", en_report, "write the full report (all verdicts) here");
  auto* apo_test = apo->add_subcommand("test", "run tests on candidate files");
  std::vector<std::string> te_files;
  std::size_t te_r = 0;
  std::string te_tests = "210,120";
  apo_test->add_option("--candidate", te_files, "candidate JSON; give three (grades 110, 101, 011) for 111")
      ->required();
  apo_test->add_option("-r", te_r)->required();
  apo_test->add_option("--tests", te_tests, "comma list of 210, 120, 111");

  // minrank-cert
  auto* mr = app.add_subcommand("minrank-cert", "minimum-rank certificate and empty-core bound");
  std::string mr_tensor, mr_factor = "A";
  int mr_power = 1;
  std::uint64_t mr_prime = 5, mr_budget = 100000000;
  mr->add_option("--tensor", mr_tensor)->required();
  mr->add_option("--power", mr_power)->check(CLI::PositiveNumber);
  mr->add_option("--factor", mr_factor)->check(CLI::IsMember({"A", "B", "C"}));
  mr->add_option("--prime", mr_prime);
  mr->add_option("--budget", mr_budget, "maximum projective points");

  // tight-weights
  auto* tw = app.add_subcommand("tight-weights", "tight weights with few equations");
  std::string tw_tensor, tw_check, tw_incumbent;
  int tw_power = 1;
  bool tw_sym = false;
  double tw_budget = 1e6;
  std::size_t tw_emit_r = 0;
  std::string tw_emit_path;
  tw->add_option("--tensor", tw_tensor)->required();
  tw->add_option("--power", tw_power)->check(CLI::PositiveNumber);
  tw->add_flag("--symmetric", tw_sym);
  tw->add_option("--budget", tw_budget, "LP solves");
  tw->add_option("--check", tw_check, "only check these weights (det3, skewcw4sq or a JSON file)");
  tw->add_option("--incumbent", tw_incumbent, "starting weights for the search");
  tw->add_option("--emit-problem", tw_emit_path, "write the equation system to this file");
  tw->add_option("-r", tw_emit_r, "number of terms for --emit-problem");

  // solve
  auto* sv = app.add_subcommand("solve", "Levenberg-Marquardt multi-start solve");
  std::string sv_problem, sv_tensor, sv_weights, sv_result;
  std::size_t sv_r = 0, sv_starts = 16;
  std::uint64_t sv_seed = 0;
  bool sv_sym = false, sv_sparsify = false, sv_serial = false;
  LmConfig lm;
  sv->add_option("--problem", sv_problem, "problem JSON file");
  sv->add_option("--tensor", sv_tensor, "build the problem from a tensor instead");
  sv->add_option("-r", sv_r);
  sv->add_option("--weights", sv_weights, "tight weights (det3, skewcw4sq or a JSON file)");
  sv->add_flag("--symmetric", sv_sym);
  sv->add_option("--starts", sv_starts)->check(CLI::PositiveNumber);
  sv->add_option("--seed", sv_seed);
  sv->add_option("--tol", lm.tol);
  sv->add_option("--max-iter", lm.max_iter);
  sv->add_option("--symmetry-dim", lm.symmetry_dim, "added to the gauge dimension");
  sv->add_flag("--sparsify", sv_sparsify);
  sv->add_flag("--serial", sv_serial, "serial reference implementation");
  sv->add_option("--result", sv_result, "write the full result (parameters) here");

  // omega-bound
  auto* om = app.add_subcommand("omega-bound", "upper bound on omega from a border rank bound");
  int om_q = 0, om_k = 1;
  double om_r = 0;
  om->add_option("q", om_q)->required();
  om->add_option("k", om_k)->required();
  om->add_option("R", om_r)->required();

  // reproduce
  auto* rp = app.add_subcommand("reproduce", "run a claim from the shipped manifest");
  std::string rp_id;
  bool rp_list = false;
  rp->add_option("id", rp_id, "claim id, or 'all'");
  rp->add_flag("--list", rp_list, "list claim ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  if (threads > 0) set_thread_count(threads);

  try {
    if (cat->parsed()) {
      if (cat_action == "list") {
        emit(json{{"catalog", catalog_names()}});
        return kOk;
      }
      if (cat_spec.empty()) throw std::invalid_argument("catalog show needs a spec");
      QTensor t = catalog(cat_spec);
      json j = json::parse(tensor_to_json(t));
      j["name"] = cat_spec;
      j["nonzero"] = j["entries"].size();
      emit(j);
      return kOk;
    }
    if (kron->parsed()) {
      QTensor t = load_tensor(kron_specs[0]);
      for (std::size_t i = 1; i < kron_specs.size(); ++i) t = kronecker(t, load_tensor(kron_specs[i]));
      emit(json::parse(tensor_to_json(kronecker_power(t, kron_power))));
      return kOk;
    }
    if (kz->parsed()) {
      std::string name = with_power(kz_tensor, kz_power);
      KoszulOptions o;
      o.force_exact = kz_exact;
      if (kz_prime != "auto") o.prime = std::stoull(kz_prime);
      KoszulBound kb = lower_bound(load_tensor(name), parse_factor(kz_factor), kz_p, seed_list(kz_seed, kz_seeds), o,
                                   name);
      emit(json::parse(kb.to_json()));
      return kOk;
    }
    if (ver->parsed()) {
      AnyDecomposition d = load_decomposition(ver_decomp, ver_digits);
      std::string target = ver_target;
      if (target.empty()) {
        if (ver_decomp.rfind("builtin:", 0) != 0) throw std::invalid_argument("--target is required for files");
        target = builtin_target(ver_decomp.substr(8));
      }
      QTensor t = load_tensor(target);
      VerificationReport rep;
      if (ver_mode == "exact") {
        if (auto* q = std::get_if<QDecomposition>(&d)) rep = verify_exact(*q, t);
        else if (auto* c = std::get_if<CycDecomposition>(&d)) rep = verify_exact(*c, t);
        else throw std::invalid_argument("exact mode needs an exact decomposition; use --mode numeric");
      } else {
        NumericOptions o;
        o.digits = ver_digits;
        o.tolerance = ver_tol;
        rep = verify_numeric_any(d, t, o);
      }
      emit(json::parse(rep.to_json()));
      return rep.pass ? kOk : kNegative;
    }
    if (apo_enum->parsed()) {
      EnumerationOptions o;
      o.budget = en_budget;
      SearchReport rep = lower_bound_search(load_tensor(en_tensor), en_r, o, en_tensor);
      if (!en_report.empty()) write_file(en_report, rep.to_json(true));
      emit(json::parse(rep.to_json()));
      return rep.no_triple_passes() ? kOk : kNegative;
    }
    if (apo_test->parsed()) {
      std::vector<CandidateSpace> es;
      for (const auto& f : te_files) es.push_back(CandidateSpace::from_json(read_file(f)));
      json out{{"r", te_r}, {"results", json::array()}};
      bool all = true;
      std::stringstream list(te_tests);
      std::string name;
      while (std::getline(list, name, ',')) {
        if (name == "111") {
          if (es.size() != 3) throw std::invalid_argument("the 111 test needs three candidates");
          TestOutcome o = test_111(es[0], es[1], es[2], te_r);
          all = all && o.pass_some();
          out["results"].push_back({{"test", "111"}, {"outcome", json::parse(o.to_json())}});
          continue;
        }
        if (name != "210" && name != "120") throw std::invalid_argument("unknown test '" + name + "'");
        for (std::size_t i = 0; i < es.size(); ++i) {
          TestOutcome o = name == "210" ? test_210(es[i], te_r) : test_120(es[i], te_r);
          all = all && o.pass_some();
          out["results"].push_back({{"test", name}, {"candidate", te_files[i]}, {"outcome", json::parse(o.to_json())}});
        }
      }
      out["pass"] = all;
      emit(out);
      return all ? kOk : kNegative;
    }
    if (mr->parsed()) {
      std::string name = with_power(mr_tensor, mr_power);
      EmptyCorBound b = emptycor_bound(load_tensor(name), parse_factor(mr_factor), mr_prime, mr_budget);
      json j = json::parse(b.to_json());
      j["tensor"] = name;
      emit(j);
      return kOk;
    }
    if (tw->parsed()) {
      std::string name = with_power(tw_tensor, tw_power);
      QTensor t = load_tensor(name);
      std::optional<TightWeights> w;
      json j{{"tensor", name}};
      int code = kOk;
      if (!tw_check.empty()) {
        w = load_weights(tw_check);
        bool tight = is_standard_tight(t, *w);
        j["tight"] = tight;
        j["equations"] = equation_count(t.dims(), *w, w->symmetric);
        j["ordered_triples"] = equation_count(t.dims(), *w, false);
        j["all_triples"] = all_triples(t.dims(), w->symmetric).size();
        if (!tight) code = kNegative;
      } else {
        std::optional<TightWeights> inc;
        if (!tw_incumbent.empty()) inc = load_weights(tw_incumbent);
        SearchOutcome s = search_min_equations(t, tw_sym, static_cast<std::uint64_t>(tw_budget), inc);
        j["search"] = json::parse(s.to_json());
        if (s.feasible) w = s.weights;
        if (!s.feasible) code = s.complete ? kNegative : kBudget;
      }
      if (!tw_emit_path.empty()) {
        if (!w) throw std::invalid_argument("no tight weights to emit a problem from");
        if (tw_emit_r == 0) throw std::invalid_argument("--emit-problem needs -r");
        TightProblem p = equations(t, *w, tw_emit_r);
        write_file(tw_emit_path, p.to_json());
        j["problem"] = {{"path", tw_emit_path}, {"equations", p.eqs.size()}, {"unknowns", p.unknowns()}};
      }
      emit(j);
      return code;
    }
    if (sv->parsed()) {
      TightProblem p;
      if (!sv_problem.empty()) {
        p = TightProblem::from_json(read_file(sv_problem));
      } else {
        if (sv_tensor.empty() || sv_r == 0) throw std::invalid_argument("give --problem or --tensor with -r");
        QTensor t = load_tensor(sv_tensor);
        p = sv_weights.empty() ? full_problem(t, sv_r, sv_sym) : equations(t, load_weights(sv_weights), sv_r);
      }
      SolveResult r = sv_serial ? multi_start_serial(p, lm, sv_seed, sv_starts) : multi_start(p, lm, sv_seed, sv_starts);
      bool ok = r.residual <= lm.tol;
      if (sv_sparsify && ok) {
        SparsifyConfig sc;
        sc.lm = lm;
        r = sparsify(p, r, sc);
      }
      fill_isolation(p, lm, r);
      if (!sv_result.empty()) write_file(sv_result, r.to_json());
      json j = json::parse(r.to_json());
      j.erase("x");
      j.erase("state");
      j["unknowns"] = p.unknowns();
      j["equations"] = p.eqs.size();
      j["starts"] = sv_starts;
      emit(j);
      return ok ? kOk : kNegative;
    }
    if (om->parsed()) {
      emit(json{{"q", om_q}, {"k", om_k}, {"R", om_r}, {"omega", omega_bound(om_q, om_k, om_r)}});
      return kOk;
    }
    if (rp->parsed()) {
      if (rp_list) {
        json j = json::array();
        for (const auto& c : manifest()) j.push_back({{"id", c.id}, {"criterion", c.criterion}, {"kind", c.kind}});
        emit(json{{"claims", j}});
        return kOk;
      }
      if (rp_id.empty()) throw std::invalid_argument("reproduce needs a claim id, 'all' or --list");
      if (rp_id == "all") {
        json j = json::array();
        bool all = true;
        for (const auto& c : manifest()) {
          ClaimResult r = reproduce(c);
          all = all && r.pass;
          j.push_back(r.to_json());
        }
        emit(json{{"claims", j}, {"pass", all}});
        return all ? kOk : kNegative;
      }
      ClaimResult r = reproduce(rp_id);
      emit(r.to_json());
      if (!r.pass)
        for (const auto& d : r.diff) std::cerr << rp_id << ": " << d << '\n';
      return r.pass ? kOk : kNegative;
    }
  } catch (const BudgetExceeded& e) {
    std::cout << json{{"error", "budget"}, {"message", e.what()}}.dump() << '\n';
    return kBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
