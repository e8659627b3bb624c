#pragma once

#include "sesqui/gallery.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sesqui {
namespace pipeline {

// Config or report document violates the schema; maps to exit code 2.
struct SchemaError : Error {
  using Error::Error;
};

// Emit request for an analysis the report does not contain; exit code 4.
struct MissingAnalysisError : Error {
  using Error::Error;
};

enum class Analysis {
  Classify,
  Coercivity,
  Family,
  Range,
  Spectrum,
  Semigroup,
  Sector,
  Renorm,
  PerturbationCheck,
};

struct GridOptions {
  int angles = 256;
  std::vector<double> t_grid;     // defaults to 16 points on [0.1, 10]
  std::vector<double> beta_grid;  // defaults derived from the sector fit
  double delta = 0.0;
  std::optional<double> alpha;
  double alpha_floor = 1e-6;
  std::optional<double> epsilon;
};

struct FamilyOptions {
  std::vector<int> ns;
  bool grow_length = false;
};

struct AnalysisConfig {
  std::optional<gallery::GalleryKind> kind;
  nlohmann::json problem_params;          // kind-specific section, echoed in reports
  std::optional<std::string> triple_file;
  std::optional<FamilyOptions> family;
  std::vector<Analysis> analyses;
  GridOptions grids;
  std::uint64_t seed = 0;
  double check_tol = 1e-9;
  std::string output_dir = ".";
};

AnalysisConfig parse_config(const nlohmann::json& doc);
AnalysisConfig load_config(const std::string& path);

// Builds the problem named by the config (gallery kind or triple file).
gallery::GalleryProblem build_problem(const AnalysisConfig& config);
std::vector<gallery::GalleryProblem> build_family(const AnalysisConfig& config);

struct RunResult {
  nlohmann::json report;
  std::string summary;
  bool all_checks_passed = true;
};

RunResult run_analyses(const AnalysisConfig& config);

// Writes report.json and summary.txt into output_dir (atomically).
void write_report(const RunResult& result, const std::string& output_dir);

// Extracts the named table ("range", "decay" or "defect") from a report
// document and writes <which>.csv into out_dir.
std::string emit_table(const nlohmann::json& report, const std::string& which,
                       const std::string& out_dir);

}  // namespace pipeline
}  // namespace sesqui
