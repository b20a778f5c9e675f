#include "aerochunk/config.hpp"
#include "aerochunk/error.hpp"
#include "aerochunk/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using aerochunk::ExitCode;

int code(ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decompose a mesh into UAV-printable chunks, plan and simulate the print."};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::string feasibility;
  app.add_option("--config", config_path, "pipeline config file");
  app.add_option("--out", out_dir, "artifact directory (overrides [output] dir)");
  app.add_option("--mode", mode, "cut angle cap")->check(CLI::IsMember({"paper-max", "safe-min"}));
  app.add_option("--feasibility", feasibility, "fleet feasibility rule")->check(CLI::IsMember({"per-uav", "capacity-reuse"}));

  auto* decompose = app.add_subcommand("decompose", "search cuts, schedule chunks, write chunk STLs and JSON");
  auto* print = app.add_subcommand("print", "slice chunks, build trajectories and simulate the print");
  auto* verify = app.add_subcommand("verify", "re-check written decomposition artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::IoOrParse);
  }

  try {
    auto load = [&]() {
      if (config_path.empty()) throw aerochunk::ParseError("--config is required");
      aerochunk::PipelineConfig cfg = aerochunk::load_pipeline_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!mode.empty()) cfg.set_angle_mode(aerochunk::parse_angle_mode(mode));
      if (!feasibility.empty()) cfg.fleet.mode = aerochunk::parse_feasibility_mode(feasibility);
      return cfg;
    };

    if (decompose->parsed()) return code(aerochunk::cmd_decompose(load(), std::cout));
    if (print->parsed()) return code(aerochunk::cmd_print(load(), std::cout));
    if (verify->parsed()) {
      std::filesystem::path dir = out_dir;
      if (dir.empty()) dir = load().output_dir;
      return code(aerochunk::cmd_verify(dir, std::cout));
    }
  } catch (const aerochunk::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return code(ExitCode::Infeasible);
  } catch (const aerochunk::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return code(ExitCode::IoOrParse);
  } catch (const aerochunk::MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return code(ExitCode::IoOrParse);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return code(ExitCode::IoOrParse);
  } catch (const aerochunk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::InvariantViolation);
  }
  return code(ExitCode::Ok);
}
