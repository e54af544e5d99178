// riemann: command-line front end for the ellipsoid bundle library.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "riemann/run.hpp"
#include "riemann/scenario.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("riemann");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("RIEMANN_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug")
    spdlog::set_level(spdlog::level::debug);
  else if (level == "info")
    spdlog::set_level(spdlog::level::info);
  else
    spdlog::set_level(spdlog::level::err);
}

// which config modes each subcommand accepts
bool accepts(const std::string& sub, const std::string& mode) {
  if (sub == "simulate") return mode == "rigid" || mode == "rotvib" || mode == "riemann";
  return sub == mode;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace riemann;
  setup_logging();

  CLI::App app{"Riemann ellipsoid dynamics, connections and curvature"};
  app.require_subcommand(1);
  std::string config_path, preset_name, out_dir = ".";
  std::optional<std::uint64_t> seed;

  for (const char* name : {"simulate", "lift", "curvature", "holonomy", "check"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario JSON file");
    sub->add_option("--preset", preset_name, "built-in scenario name");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed for randomized property cases");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::kUsage;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  auto fail = [](const std::string& type, const std::string& msg, int code, std::optional<std::string> path = {}) {
    std::cerr << error_json(type, msg, code, path) << "\n";
    return code;
  };

  if (!config_path.empty() && !preset_name.empty())
    return fail("UsageError", "--config and --preset are mutually exclusive", exit_code::kUsage);

  ScenarioConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path, std::ios::binary);
      if (!f) return fail("IoError", "cannot read config '" + config_path + "'", exit_code::kIo);
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = parse_config(ss.str());
    } else if (!preset_name.empty()) {
      try {
        cfg = preset(preset_name);
      } catch (const std::invalid_argument& e) {
        return fail("UsageError", e.what(), exit_code::kUsage);
      }
    } else if (sub == "check") {
      cfg = parse_config(R"({"mode": "check"})");
    } else {
      return fail("UsageError", "one of --config or --preset is required", exit_code::kUsage);
    }
  } catch (const SchemaError& e) {
    return fail("SchemaError", e.what(), exit_code::kSchema, e.path());
  } catch (const AxisDegenerate& e) {
    return fail("AxisDegenerate", e.what(), exit_code::kNumerical);
  } catch (const std::exception& e) {
    return fail("SchemaError", e.what(), exit_code::kSchema, std::string{});
  }

  if (!accepts(sub, cfg.mode))
    return fail("SchemaError", "subcommand '" + sub + "' cannot run mode '" + cfg.mode + "'", exit_code::kSchema,
                std::string("/mode"));

  spdlog::info("running {} (mode {}) into {}", sub, cfg.mode, out_dir);
  spdlog::debug("config:\n{}", serialize_config(cfg));
  RunOptions opts;
  opts.out_dir = out_dir;
  opts.seed = seed;
  const int rc = run(cfg, opts, std::cout, std::cerr);
  if (rc != 0) spdlog::info("finished with exit code {}", rc);
  return rc;
}
