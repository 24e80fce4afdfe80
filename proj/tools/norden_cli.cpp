#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "norden/report.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 64;

json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw norden::ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw norden::ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return j;
}

void emit(const norden::RunResult& result, const std::string& output) {
  std::string text = norden::report_to_string(result.report);
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(output);
  if (!os) throw norden::Error("cannot write output file '" + output + "'");
  os << text;
}

int thread_count(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("NORDEN_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification engine for natural lifted (J, G) structure pairs "
               "on tangent bundles of constant-curvature bases"};
  app.require_subcommand(1);

  std::string config_path, output_path, verify_id;
  int points = -1;
  long long seed = -1;
  double tol = -1.0;
  int threads = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--output", output_path, "write the JSON report here (default stdout)");
    cmd->add_option("--points", points, "override sampling.num_points");
    cmd->add_option("--seed", seed, "override sampling.seed");
    cmd->add_option("--tol", tol, "override tolerances.member");
    cmd->add_option("--threads", threads, "point-level parallelism (or NORDEN_THREADS)");
  };

  CLI::App* cmd_check = app.add_subcommand("check", "coefficient constraints and frame identities");
  CLI::App* cmd_classify = app.add_subcommand("classify", "eight-class membership report");
  CLI::App* cmd_verify = app.add_subcommand("verify", "run one structure-theorem verification");
  cmd_verify->add_option("id", verify_id, "check id (2.2 2.3 2.4 3.1 3.2 4.1 5.1 6.1 7.1 8.1 9.1)")
      ->required();
  CLI::App* cmd_dump = app.add_subcommand("dump", "CSV dumps of coefficients and F components");
  for (CLI::App* c : {cmd_check, cmd_classify, cmd_verify, cmd_dump}) add_common(c);

  CLI11_PARSE(app, argc, argv);

  try {
    json config_json = json::object();
    if (!config_path.empty()) config_json = load_json(config_path);

    norden::RunConfig cfg = norden::parse_config(config_json);
    if (points > 0) cfg.sampling.num_points = points;
    if (seed >= 0) cfg.sampling.seed = static_cast<uint64_t>(seed);
    if (tol > 0.0) cfg.tol_member = tol;
    cfg.threads = thread_count(threads > 0 ? threads : cfg.threads);
    if (!output_path.empty()) cfg.output = output_path;

    norden::RunResult result;
    if (app.got_subcommand(cmd_check)) {
      result = norden::run_check(cfg);
    } else if (app.got_subcommand(cmd_classify)) {
      result = norden::run_classify(cfg);
    } else if (app.got_subcommand(cmd_verify)) {
      json user_family =
          config_json.contains("family") ? config_json.at("family") : json::object();
      result = norden::run_verify(verify_id, cfg, user_family);
    } else {
      std::string dir = !cfg.output.empty() ? cfg.output : std::string("dump-out");
      result = norden::run_dump(cfg, dir);
      emit(result, "");
      return result.exit_code;
    }
    emit(result, cfg.output);
    return result.exit_code;
  } catch (const norden::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const norden::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
