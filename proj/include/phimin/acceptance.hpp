#pragma once

// The acceptance criteria as a library: each criterion solves its cases,
// compares against its oracle and optionally writes artifacts to out_dir.

#include "phimin/io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace phimin {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  std::filesystem::path out_dir;  // empty: no artifacts
  int jobs = 1;
  bool timing = false;            // include wall times in the summary
};

constexpr int kCriteria = 15;

/// "all", "reaper", "rotational", "asymptotics", "geometry", "determinism",
/// or a comma-separated list of criterion numbers.
std::vector<int> suite_ids(const std::string& suite);
std::string criterion_title(int id);

CriterionResult run_criterion(int id, const AcceptanceOptions& o);
std::vector<CriterionResult> run_suite(const std::vector<int>& ids, const AcceptanceOptions& o);

Json summary_json(const std::vector<CriterionResult>& results, bool timing);
std::string result_line(const CriterionResult& r);

/// Files under a and b (relative paths) with identical bytes; on mismatch the
/// first differing path is stored in why.
bool directories_identical(const std::filesystem::path& a, const std::filesystem::path& b, std::string* why = nullptr);

}  // namespace phimin
