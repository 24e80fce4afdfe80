#pragma once

#include <string>

#include <json.hpp>

#include "norden/classify.hpp"
#include "norden/families.hpp"
#include "norden/sampling.hpp"

namespace norden {

/// One batch run: base, family, sampling, tolerances, output.
struct RunConfig {
  int schema = 1;
  SpaceForm base{2, 1.0};
  FamilySpec family;
  SamplingConfig sampling;
  double tol_member = -1.0;  // < 0: pick by family kind (1e-6 analytic, 1e-4 table)
  double tol_reject = 1e-3;
  std::string output;  // empty = stdout
  int threads = 1;
};

RunConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Default parameters of the canonical family verified by each check id,
/// merged under any explicitly-set user fields.
FamilySpec verify_default_family(const std::string& id);

struct RunResult {
  nlohmann::json report;
  int exit_code = 0;  // 0 pass, 1 fail, 2 inconclusive
};

RunResult run_check(const RunConfig& cfg);
RunResult run_classify(const RunConfig& cfg);
RunResult run_verify(const std::string& id, const RunConfig& cfg,
                     const nlohmann::json& user_family);
RunResult run_dump(const RunConfig& cfg, const std::string& out_dir);

/// Deterministic serialization (reports are diffed byte-for-byte in tests,
/// timing removed).
std::string report_to_string(const nlohmann::json& report);

}  // namespace norden
