#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

#include "mbhom/commands.hpp"
#include "mbhom/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

int run(const std::string& verb, const std::string& config_path, const std::string& out_path, int threads) {
  const mbh::RunConfig cfg = mbh::load_config(config_path);
  const std::string text = mbh::run_command(verb, cfg, threads);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw mbh::ConfigError(out_path + ": cannot open output file");
  out << text;
  if (!out) throw mbh::SolverError(out_path + ": write failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiband homogenization of periodic bilayer laminates"};
  app.require_subcommand(1);
  std::string config_path, out_path;
  int threads = 0;
  bool seedless = false;

  const std::vector<std::pair<std::string, std::string>> verbs = {
      {"dispersion", "exact and approximate band-1 dispersion table"},
      {"fit", "fit dispersion coefficients and write them as JSON"},
      {"scatter1d", "1-d transmission sweep, fine-scale vs homogenized"},
      {"scatter2d", "2-d reflection/transmission sweep"},
      {"field", "displacement field on a grid"},
      {"multiband", "1-d two-band transmission sweep"},
      {"nonlocal", "bands of the nonlocal-in-time model"},
  };
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--threads", threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--seedless", seedless, "assert that no random numbers are used (always true)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (threads == 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  // Every algorithm is deterministic, so --seedless holds unconditionally.
  (void)seedless;

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    return run(verb, config_path, out_path, threads);
  } catch (const mbh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mbh::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  }
}
