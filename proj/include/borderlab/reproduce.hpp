#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "borderlab/decomp.hpp"
#include "borderlab/tensor.hpp"

namespace borderlab {

// Catalog spec, or a path to a tensor JSON file.
QTensor load_tensor(const std::string& spec);
// "builtin:NAME" or a path to a decomposition JSON file.
AnyDecomposition load_decomposition(const std::string& spec, int digits);

// One entry of the shipped reproduction manifest.
struct Claim {
  std::string id;
  int criterion = 0;
  std::string kind;
  nlohmann::json params;
  // Keys compare against the observed report: "x" equality, "x_le", "x_ge", "x_in" [lo, hi].
  nlohmann::json expect;
  std::string note;
  std::string deviation;  // nonempty when the expected value is known not to hold
  double time_limit_s = 60;
};

struct ClaimResult {
  std::string id;
  int criterion = 0;
  bool pass = false;
  bool known_deviation = false;
  nlohmann::json observed;
  nlohmann::json expect;
  std::vector<std::string> diff;  // one line per failed expectation
  std::string note;
  double seconds = 0;  // wall time, kept out of the JSON report
  nlohmann::json to_json() const;
};

const std::vector<Claim>& manifest();
const Claim& find_claim(const std::string& id);
ClaimResult reproduce(const Claim& claim);
ClaimResult reproduce(const std::string& id);

// Compares an observed report against an expectation object.
std::vector<std::string> compare_expectation(const nlohmann::json& observed, const nlohmann::json& expect);

}  // namespace borderlab
