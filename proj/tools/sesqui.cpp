#include "sesqui/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitMissingAnalysis = 4;

int run_command(const std::string& config_path, const std::string& out_override,
                std::optional<std::uint64_t> seed_override,
                std::optional<double> tol_override) {
  sesqui::pipeline::AnalysisConfig config = sesqui::pipeline::load_config(config_path);
  if (!out_override.empty()) config.output_dir = out_override;
  if (seed_override) config.seed = *seed_override;
  if (tol_override) config.check_tol = *tol_override;

  const sesqui::pipeline::RunResult result = sesqui::pipeline::run_analyses(config);
  sesqui::pipeline::write_report(result, config.output_dir);
  std::cout << result.summary;
  if (!result.all_checks_passed) {
    std::cerr << "invariant checks failed; see " << config.output_dir << "/report.json\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int emit_command(const std::string& report_path, const std::string& which,
                 const std::string& out_dir) {
  std::ifstream in(report_path);
  if (!in) {
    std::cerr << "cannot open report: " << report_path << "\n";
    return kExitSchema;
  }
  nlohmann::json report;
  try {
    in >> report;
  } catch (const nlohmann::json::parse_error& err) {
    std::cerr << "report parse error: " << err.what() << "\n";
    return kExitSchema;
  }
  const std::string path = sesqui::pipeline::emit_table(report, which, out_dir);
  std::cout << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sesquilinear form analysis on Galerkin spaces"};
  app.require_subcommand(1);

  std::string config_path, report_path, which = "range", out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;

  CLI::App* run = app.add_subcommand("run", "run the analyses requested by a config");
  run->add_option("config", config_path, "config file (JSON)")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "seed override for sampled checks");
  run->add_option("--tol", tol, "tolerance override for report-level checks");

  CLI::App* emit = app.add_subcommand("emit", "emit plot tables from a report");
  emit->add_option("report", report_path, "report.json produced by run")->required();
  emit->add_option("--which", which, "table: range, decay or defect")->required();
  emit->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, run->count("--out") ? out_dir : "", seed, tol);
    }
    return emit_command(report_path, which, out_dir);
  } catch (const sesqui::pipeline::SchemaError& err) {
    std::cerr << "schema error: " << err.what() << "\n";
    return kExitSchema;
  } catch (const sesqui::pipeline::MissingAnalysisError& err) {
    std::cerr << "emit error: " << err.what() << "\n";
    return kExitMissingAnalysis;
  } catch (const sesqui::Error& err) {
    std::cerr << "numerical error: " << err.what() << "\n";
    return kExitNumerical;
  }
}
