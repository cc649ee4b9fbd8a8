#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "borderlab/reproduce.hpp"

using namespace borderlab;

// One line per acceptance criterion, built from the reproduction manifest.
// Exit status is nonzero only for failures that are not documented deviations.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));
  std::map<int, std::vector<const Claim*>> by_criterion;
  for (const auto& c : manifest()) by_criterion[c.criterion].push_back(&c);

  int unexpected = 0;
  for (const auto& [crit, claims] : by_criterion) {
    if (!only.empty() && std::find(only.begin(), only.end(), crit) == only.end()) continue;
    bool pass = true, known = true;
    double seconds = 0;
    std::vector<std::string> details;
    std::string summary;
    for (const Claim* c : claims) {
      ClaimResult r;
      try {
        r = reproduce(*c);
      } catch (const std::exception& e) {
        r.id = c->id;
        r.diff.push_back(std::string("error: ") + e.what());
      }
      seconds += r.seconds;
      if (!r.pass) {
        pass = false;
        known = known && r.known_deviation;
        for (const auto& d : r.diff) details.push_back(c->id + ": " + d);
        if (r.known_deviation) details.push_back(c->id + ": documented deviation: " + r.note);
      }
      summary += (summary.empty() ? "" : ", ") + c->id + (r.pass ? "" : " (fail)");
    }
    char head[64];
    std::snprintf(head, sizeof head, "AC%-2d %s", crit, pass ? "PASS" : (known ? "FAIL*" : "FAIL"));
    std::printf("%s  %.1fs  %s\n", head, seconds, summary.c_str());
    for (const auto& d : details) std::printf("        %s\n", d.c_str());
    std::fflush(stdout);
    if (!pass && !known) ++unexpected;
  }
  std::printf("FAIL* marks a failure recorded as a documented deviation.\n");
  return unexpected == 0 ? 0 : 1;
}
