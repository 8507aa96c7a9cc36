// Acceptance gate: one PASS/FAIL line per criterion.

#include "phimin/acceptance.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <set>

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-15"};
  std::vector<int> expected;
  std::string out;
  int jobs = 1;
  bool timing = false;
  app.add_option("--expected-failures", expected, "criteria known to be unattainable")->delimiter(',');
  app.add_option("--out", out, "artifact directory");
  app.add_option("--jobs", jobs);
  app.add_flag("--timing", timing);
  CLI11_PARSE(app, argc, argv);

  phimin::AcceptanceOptions o;
  o.out_dir = out;
  o.jobs = jobs;
  o.timing = timing;
  std::vector<int> ids;
  for (int k = 1; k <= phimin::kCriteria; ++k) ids.push_back(k);
  const auto res = phimin::run_suite(ids, o);

  std::set<int> failed;
  for (const auto& r : res) {
    std::cout << phimin::result_line(r);
    if (timing) std::cout << " (" << r.seconds << " s)";
    std::cout << '\n';
    if (!r.pass) failed.insert(r.id);
  }
  const std::set<int> want(expected.begin(), expected.end());
  std::cout << res.size() - failed.size() << "/" << res.size() << " criteria pass";
  if (!want.empty()) {
    std::cout << "; expected failures:";
    for (int k : want) std::cout << ' ' << k;
  }
  std::cout << '\n';
  return failed == want ? 0 : 1;
}
