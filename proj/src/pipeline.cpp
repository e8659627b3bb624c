#include "sesqui/pipeline.hpp"

#include "sesqui/association.hpp"
#include "sesqui/coercivity.hpp"
#include "sesqui/io.hpp"
#include "sesqui/numkernel.hpp"
#include "sesqui/numrange.hpp"
#include "sesqui/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace sesqui {
namespace pipeline {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& field, const std::string& message) {
  throw SchemaError("config field '" + field + "': " + message);
}

double require_number(const json& doc, const std::string& field, const std::string& path) {
  if (!doc.contains(field) || !doc[field].is_number()) {
    schema_fail(path + "." + field, "expected a number");
  }
  return doc[field].get<double>();
}

int require_int(const json& doc, const std::string& field, const std::string& path) {
  if (!doc.contains(field) || !doc[field].is_number_integer()) {
    schema_fail(path + "." + field, "expected an integer");
  }
  return doc[field].get<int>();
}

gallery::PotentialSpec parse_potential(const json& doc, const std::string& path) {
  gallery::PotentialSpec spec;
  if (doc.contains("baseline")) spec.baseline = require_number(doc, "baseline", path);
  if (doc.contains("well_depth")) {
    spec.well_depth = require_number(doc, "well_depth", path);
    spec.well_from = require_number(doc, "well_from", path);
    spec.well_to = require_number(doc, "well_to", path);
  }
  return spec;
}

Analysis parse_analysis_name(const std::string& name) {
  if (name == "classify") return Analysis::Classify;
  if (name == "coercivity") return Analysis::Coercivity;
  if (name == "family") return Analysis::Family;
  if (name == "range") return Analysis::Range;
  if (name == "spectrum") return Analysis::Spectrum;
  if (name == "semigroup") return Analysis::Semigroup;
  if (name == "sector") return Analysis::Sector;
  if (name == "renorm") return Analysis::Renorm;
  if (name == "perturbation-check") return Analysis::PerturbationCheck;
  schema_fail("analyses", "unknown analysis '" + name + "'");
}

std::vector<double> default_t_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) {
    grid.push_back(0.1 + (10.0 - 0.1) * static_cast<double>(i) / 15.0);
  }
  return grid;
}

std::vector<double> parse_grid_values(const json& doc, const std::string& path) {
  std::vector<double> grid;
  if (doc.is_array()) {
    for (const auto& v : doc) {
      if (!v.is_number()) schema_fail(path, "grid entries must be numbers");
      grid.push_back(v.get<double>());
    }
  } else if (doc.is_object()) {
    const double from = require_number(doc, "from", path);
    const double to = require_number(doc, "to", path);
    const int points = require_int(doc, "points", path);
    if (points < 2) schema_fail(path + ".points", "need at least 2 points");
    for (int i = 0; i < points; ++i) {
      grid.push_back(from + (to - from) * static_cast<double>(i) / (points - 1));
    }
  } else {
    schema_fail(path, "expected a list of values or {from, to, points}");
  }
  return grid;
}

json complex_to_json(Complex z) { return json{z.real(), z.imag()}; }

json eigenvalues_to_json(const Vector& values) {
  json out = json::array();
  for (Index i = 0; i < values.size(); ++i) out.push_back(complex_to_json(values[i]));
  return out;
}

json real_vector_to_json(const RealVector& values) {
  json out = json::array();
  for (Index i = 0; i < values.size(); ++i) out.push_back(values[i]);
  return out;
}

}  // namespace

AnalysisConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw SchemaError("config: top-level document must be an object");
  AnalysisConfig config;

  if (!doc.contains("problem") || !doc["problem"].is_object()) {
    schema_fail("problem", "missing problem section");
  }
  const json& problem = doc["problem"];
  if (problem.contains("triple_file")) {
    if (!problem["triple_file"].is_string()) schema_fail("problem.triple_file", "expected a path");
    config.triple_file = problem["triple_file"].get<std::string>();
  } else {
    if (!problem.contains("kind") || !problem["kind"].is_string()) {
      schema_fail("problem.kind", "expected one of schrodinger1d, dtn, drift, shiftform, diagonal");
    }
    const std::string kind = problem["kind"].get<std::string>();
    if (kind == "schrodinger1d") {
      config.kind = gallery::GalleryKind::Schrodinger1D;
    } else if (kind == "dtn") {
      config.kind = gallery::GalleryKind::Dtn;
    } else if (kind == "drift") {
      config.kind = gallery::GalleryKind::Drift;
    } else if (kind == "shiftform") {
      config.kind = gallery::GalleryKind::ShiftForm;
    } else if (kind == "diagonal") {
      config.kind = gallery::GalleryKind::Diagonal;
    } else {
      schema_fail("problem.kind", "unknown kind '" + kind + "'");
    }
    if (!problem.contains("params") || !problem["params"].is_object()) {
      schema_fail("problem.params", "missing params section");
    }
    config.problem_params = problem["params"];
  }

  if (doc.contains("family")) {
    const json& family = doc["family"];
    if (!family.is_object() || !family.contains("ns") || !family["ns"].is_array()) {
      schema_fail("family.ns", "expected a list of level dimensions");
    }
    FamilyOptions options;
    for (const auto& v : family["ns"]) {
      if (!v.is_number_integer()) schema_fail("family.ns", "levels must be integers");
      options.ns.push_back(v.get<int>());
    }
    options.grow_length = family.value("grow_length", false);
    config.family = options;
  }

  if (!doc.contains("analyses") || !doc["analyses"].is_array() || doc["analyses"].empty()) {
    schema_fail("analyses", "expected a nonempty list");
  }
  for (const auto& entry : doc["analyses"]) {
    if (!entry.is_string()) schema_fail("analyses", "entries must be strings");
    config.analyses.push_back(parse_analysis_name(entry.get<std::string>()));
  }

  // Dependency closure: a family analysis needs the refinement list.
  const bool wants_family =
      std::find(config.analyses.begin(), config.analyses.end(), Analysis::Family) !=
      config.analyses.end();
  if (wants_family && !config.family) {
    schema_fail("family", "family analysis requested but no refinement list given");
  }
  if (wants_family && config.triple_file) {
    schema_fail("family", "family analysis needs a gallery problem, not a triple file");
  }

  config.grids.t_grid = default_t_grid();
  if (doc.contains("grids")) {
    const json& grids = doc["grids"];
    if (!grids.is_object()) schema_fail("grids", "expected an object");
    if (grids.contains("angles")) {
      config.grids.angles = require_int(grids, "angles", "grids");
      if (config.grids.angles < 8) schema_fail("grids.angles", "need at least 8 angles");
    }
    if (grids.contains("t")) config.grids.t_grid = parse_grid_values(grids["t"], "grids.t");
    if (grids.contains("beta")) {
      config.grids.beta_grid = parse_grid_values(grids["beta"], "grids.beta");
    }
    if (grids.contains("delta")) config.grids.delta = require_number(grids, "delta", "grids");
    if (grids.contains("alpha")) config.grids.alpha = require_number(grids, "alpha", "grids");
    if (grids.contains("alpha_floor")) {
      config.grids.alpha_floor = require_number(grids, "alpha_floor", "grids");
    }
    if (grids.contains("epsilon")) config.grids.epsilon = require_number(grids, "epsilon", "grids");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) schema_fail("seed", "expected an integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tolerance")) config.check_tol = require_number(doc, "tolerance", "");
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) schema_fail("output_dir", "expected a path");
    config.output_dir = doc["output_dir"].get<std::string>();
  }
  return config;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& err) {
    throw SchemaError(std::string("config parse error: ") + err.what());
  }
  return parse_config(doc);
}

namespace {

gallery::GalleryProblem build_gallery_problem(gallery::GalleryKind kind, const json& params,
                                              std::optional<int> n_override,
                                              std::optional<double> length_override) {
  const std::string path = "problem.params";
  switch (kind) {
    case gallery::GalleryKind::Schrodinger1D: {
      const int n = n_override.value_or(require_int(params, "n", path));
      const double length = length_override.value_or(
          params.contains("length") ? require_number(params, "length", path) : 1.0);
      gallery::BoundaryKind bc = gallery::BoundaryKind::Neumann;
      if (params.contains("bc")) {
        const std::string name = params["bc"].get<std::string>();
        if (name == "dirichlet") {
          bc = gallery::BoundaryKind::Dirichlet;
        } else if (name != "neumann") {
          schema_fail(path + ".bc", "expected neumann or dirichlet");
        }
      }
      const double shift = params.contains("mass_shift")
                               ? require_number(params, "mass_shift", path)
                               : 0.0;
      const gallery::PotentialSpec spec =
          params.contains("m") ? parse_potential(params["m"], path + ".m")
                               : gallery::PotentialSpec{};
      return gallery::schrodinger1d(length, n, bc, spec, shift);
    }
    case gallery::GalleryKind::Dtn: {
      const int n = n_override.value_or(require_int(params, "n", path));
      const double length = length_override.value_or(
          params.contains("length") ? require_number(params, "length", path) : 1.0);
      gallery::DtnDomain domain = gallery::DtnDomain::Interval;
      if (params.contains("domain")) {
        const std::string name = params["domain"].get<std::string>();
        if (name == "square") {
          domain = gallery::DtnDomain::Square;
        } else if (name != "interval") {
          schema_fail(path + ".domain", "expected interval or square");
        }
      }
      const gallery::PotentialSpec spec =
          params.contains("m") ? parse_potential(params["m"], path + ".m")
                               : gallery::PotentialSpec{};
      return gallery::dtn(length, n, domain, spec);
    }
    case gallery::GalleryKind::Drift: {
      const int n = n_override.value_or(require_int(params, "n", path));
      const double length = length_override.value_or(
          params.contains("length") ? require_number(params, "length", path) : 1.0);
      const double shift = require_number(params, "mass_shift", path);
      const gallery::PotentialSpec b_re =
          params.contains("b_re") ? parse_potential(params["b_re"], path + ".b_re")
                                  : gallery::PotentialSpec{};
      const gallery::PotentialSpec b_im =
          params.contains("b_im") ? parse_potential(params["b_im"], path + ".b_im")
                                  : gallery::PotentialSpec{};
      const bool conj = params.value("c_conjugate", true);
      return gallery::drift(length, n, b_re, b_im, conj, shift);
    }
    case gallery::GalleryKind::ShiftForm: {
      const int n = n_override.value_or(require_int(params, "n", path));
      const double length = length_override.value_or(
          params.contains("length") ? require_number(params, "length", path) : 1.0);
      return gallery::shiftform(length, n);
    }
    case gallery::GalleryKind::Diagonal: {
      if (!params.contains("lambdas") || !params["lambdas"].is_array()) {
        schema_fail(path + ".lambdas", "expected a list of positive values");
      }
      std::vector<double> lambdas;
      for (const auto& v : params["lambdas"]) lambdas.push_back(v.get<double>());
      return gallery::diagonal(lambdas);
    }
  }
  throw SchemaError("unreachable gallery kind");
}

}  // namespace

gallery::GalleryProblem build_problem(const AnalysisConfig& config) {
  if (config.triple_file) {
    gallery::GalleryProblem problem;
    problem.kind = gallery::GalleryKind::Schrodinger1D;  // placeholder tag for external triples
    problem.triple = io::load_triple(*config.triple_file);
    return problem;
  }
  return build_gallery_problem(*config.kind, config.problem_params, std::nullopt, std::nullopt);
}

std::vector<gallery::GalleryProblem> build_family(const AnalysisConfig& config) {
  if (!config.family) throw SchemaError("family section missing");
  if (!config.kind) throw SchemaError("family needs a gallery problem");
  std::vector<gallery::GalleryProblem> family;
  double length = config.problem_params.contains("length")
                      ? config.problem_params["length"].get<double>()
                      : 1.0;
  for (int n : config.family->ns) {
    family.push_back(build_gallery_problem(*config.kind, config.problem_params, n, length));
    if (config.family->grow_length) length *= 2.0;
  }
  return family;
}

namespace {

const char* verdict_name(FamilyVerdictKind verdict) {
  switch (verdict) {
    case FamilyVerdictKind::EssentiallyPositiveCoercive:
      return "essentially-positive-coercive";
    case FamilyVerdictKind::Not:
      return "not";
    case FamilyVerdictKind::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct PipelineState {
  gallery::GalleryProblem problem;
  std::optional<AssociatedOperator> op;
  std::optional<FormClassification> classification;

  const AssociatedOperator& ensure_op() {
    if (!op) op = associate(problem.triple);
    return *op;
  }
  const FormClassification& ensure_classification() {
    if (!classification) classification = classify(problem.triple);
    return *classification;
  }
};

json run_classify(PipelineState& state) {
  const FormClassification& cls = state.ensure_classification();
  json out;
  out["symmetric"] = cls.symmetric;
  out["accretive"] = cls.accretive;
  out["kernel_condition"] = cls.kernel_condition;
  if (cls.sector) {
    out["sector"] = {{"w", cls.sector->shift_w}, {"theta", cls.sector->half_angle}};
  } else {
    out["sector"] = nullptr;
  }
  out["symmetry_deviation"] =
      (state.problem.triple.form - state.problem.triple.form.adjoint()).norm();
  return out;
}

json run_coercivity(PipelineState& state, const AnalysisConfig& config) {
  const FormTriple& triple = state.problem.triple;
  CoercivityReport constants = coercivity_constants(triple);
  double alpha;
  if (config.grids.alpha) {
    alpha = *config.grids.alpha;
  } else if (constants.alpha_positive > 0) {
    alpha = constants.alpha_positive;
  } else {
    alpha = 0.1 * std::max(1e-12, constants.pencil_eigenvalues[constants.pencil_eigenvalues.size() - 1]);
  }

  json out;
  out["alpha_positive"] = constants.alpha_positive;
  out["alpha_real"] = constants.alpha_real;
  out["alpha_abs"] = constants.alpha_abs;
  if (alpha > 0) {
    const CoercivityReport defect = essential_defect(triple, alpha, config.seed);
    out["threshold"] = alpha;
    out["defect_dim"] = defect.defect_dim;
    out["tie_warning"] = defect.tie_warning;
    out["guarantee_residual"] = defect.guarantee_residual;
    out["pencil_eigenvalues"] = real_vector_to_json(defect.pencil_eigenvalues);
  }
  if (const auto scan = rotation_scan(triple)) {
    json rot;
    rot["theta_star"] = scan->theta_star;
    rot["alpha"] = scan->alpha;
    rot["defect_dim"] = scan->defect_dim;
    if (scan->dichotomy) {
      rot["dichotomy"] = {{"defect_plus", scan->dichotomy->defect_plus},
                          {"defect_minus", scan->dichotomy->defect_minus},
                          {"selected_sign", scan->dichotomy->selected_sign},
                          {"alpha", scan->dichotomy->alpha}};
    }
    out["rotation"] = rot;
  } else {
    out["rotation"] = nullptr;
  }
  return out;
}

json run_family(const AnalysisConfig& config) {
  const std::vector<gallery::GalleryProblem> family = build_family(config);
  const FamilyVerdict verdict =
      family_verdict(gallery::triples_of(family), config.grids.alpha_floor);

  json out;
  out["verdict"] = verdict_name(verdict.verdict);
  out["alpha_star"] = verdict.alpha_star;
  out["stable_defect"] = verdict.stable_defect;
  out["alpha_floor"] = config.grids.alpha_floor;
  out["alpha_grid"] = real_vector_to_json(verdict.alpha_grid);
  json levels = json::array();
  json table = json::array();
  for (size_t l = 0; l < verdict.dims.size(); ++l) {
    json level;
    level["n"] = verdict.dims[l];
    level["defect_dim"] = verdict.defect_dims[l];
    level["alpha"] = verdict.alphas[l];
    if (l < verdict.h_ellipticity.size()) {
      const auto& ell = verdict.h_ellipticity[l];
      level["h_elliptic_w"] = ell.shift_w ? json(*ell.shift_w) : json(nullptr);
      level["h_elliptic_alpha"] = ell.alpha;
    }
    level["pencil_eigenvalues"] = real_vector_to_json(verdict.pencil_eigenvalues[l]);
    levels.push_back(level);
    table.push_back({static_cast<double>(verdict.dims[l]),
                     static_cast<double>(verdict.defect_dims[l]), verdict.alphas[l]});
  }
  out["levels"] = levels;
  out["table"] = table;
  return out;
}

json run_range(PipelineState& state, const AnalysisConfig& config) {
  const NumericalRangeBoundary boundary = range_boundary(
      state.problem.triple, config.grids.angles, RangeNormalization::JSphere);
  json out;
  out["normalization"] = "j-sphere";
  out["angles"] = config.grids.angles;
  out["consistency_residual"] = support_consistency_residual(boundary);
  json table = json::array();
  for (Index k = 0; k < boundary.angles.size(); ++k) {
    table.push_back({boundary.angles[k], boundary.support_values[k],
                     boundary.support_points[k].real(), boundary.support_points[k].imag()});
  }
  out["table"] = table;
  return out;
}

json run_spectrum(PipelineState& state, const AnalysisConfig& config) {
  const AssociatedOperator& op = state.ensure_op();
  const EigenDecomposition spectrum = general_eigs(op.matrix);
  json out;
  out["eigenvalues"] = eigenvalues_to_json(spectrum.eigenvalues);
  out["residual"] = spectrum.residual;
  const SpectralSplit split = spectral_split(op, config.grids.delta);
  out["split"] = {{"delta", split.delta},
                  {"dim_x1", split.dim_x1},
                  {"complement_growth", split.complement_growth},
                  {"idempotency_residual", split.idempotency_residual},
                  {"commutation_residual", split.commutation_residual}};
  return out;
}

json decay_table_json(const std::vector<double>& t_grid, double beta,
                      const std::vector<double>& norms,
                      const std::vector<double>& complement_norms) {
  json table = json::array();
  for (size_t i = 0; i < t_grid.size(); ++i) {
    table.push_back({t_grid[i], beta, norms[i], complement_norms[i]});
  }
  return table;
}

json run_semigroup(PipelineState& state, const AnalysisConfig& config) {
  const AssociatedOperator& op = state.ensure_op();
  const SpectralSplit split = spectral_split(op, config.grids.delta);
  const SemigroupAnalysis analysis = essential_growth(op, split, config.grids.t_grid);

  json out;
  out["omega"] = analysis.omega;
  out["quasi_contraction_w"] = analysis.quasi_contraction_w;
  out["omega_ess"] = analysis.omega_ess;
  out["omega_ess_fit"] = analysis.omega_ess_fit;
  out["complement_radius_s1"] = analysis.complement_radius_s1;
  out["asymptotically_compact"] = analysis.asymptotically_compact;
  out["split_delta"] = analysis.split_delta;
  out["dim_x1"] = split.dim_x1;
  if (analysis.certificate) {
    out["decay_certificate"] = {{"epsilon", analysis.certificate->epsilon},
                                {"holds", analysis.certificate->holds},
                                {"worst_margin", analysis.certificate->worst_margin}};
  }

  const Matrix& gram = op.triple.space_h.gram;
  std::vector<double> norms, complement_norms;
  for (double t : config.grids.t_grid) {
    norms.push_back(weighted_operator_norm(semigroup_sample(op, t), gram));
    complement_norms.push_back(weighted_operator_norm(complement_sample(op, split, t), gram));
  }
  out["table"] = decay_table_json(config.grids.t_grid, 0.0, norms, complement_norms);
  return out;
}

json run_sector(PipelineState& state, const AnalysisConfig& config) {
  const FormClassification& cls = state.ensure_classification();
  if (!cls.sector) {
    throw InputError("sector analysis: the form admits no sector fit");
  }

  // Work on the operator of the w-shifted (accretive sectorial) form;
  // if the fitted form angle leaves no interior (theta_form = pi/2),
  // rotate first using the rotation scan.
  FormTriple triple = state.problem.triple;
  double theta_form = cls.sector->half_angle;
  double shift_w = cls.sector->shift_w;
  std::optional<double> rotated_by;
  if (0.5 * std::numbers::pi - theta_form < 1e-9) {
    const auto scan = rotation_scan(triple);
    if (scan) {
      rotated_by = scan->theta_star;
      triple.form = (std::polar(1.0, scan->theta_star) * triple.form).eval();
      triple.continuity = state.problem.triple.continuity;
      const FormClassification rotated_cls = classify(triple);
      if (rotated_cls.sector) {
        theta_form = rotated_cls.sector->half_angle;
        shift_w = rotated_cls.sector->shift_w;
      }
    }
  }
  const double theta_semigroup = 0.5 * std::numbers::pi - theta_form;
  if (theta_semigroup <= 0) {
    throw InputError("sector analysis: no interior sector for the semigroup");
  }

  AssociatedOperator op = associate(triple);
  op.matrix += shift_w * Matrix::Identity(op.matrix.rows(), op.matrix.cols());

  std::vector<double> beta_grid = config.grids.beta_grid;
  if (beta_grid.empty()) {
    beta_grid = {-theta_semigroup, -0.5 * theta_semigroup, 0.0, 0.5 * theta_semigroup,
                 theta_semigroup};
  }
  const SpectralSplit split = spectral_split(op, config.grids.delta);
  const SectorScanTable table =
      sector_scan(op, split, theta_semigroup, config.grids.t_grid, beta_grid);

  json out;
  out["theta_form"] = theta_form;
  out["shift_w"] = shift_w;
  out["theta_semigroup"] = theta_semigroup;
  out["rotated_by"] = rotated_by ? json(*rotated_by) : json(nullptr);
  out["split_delta"] = table.split_delta;
  json rays = json::array();
  json decay = json::array();
  for (size_t bi = 0; bi < beta_grid.size(); ++bi) {
    const SectorRay& ray = table.rays[bi];
    rays.push_back({{"beta", ray.beta},
                    {"boundary", ray.boundary},
                    {"bounded", ray.bounded},
                    {"complement_decaying", ray.complement_decaying}});
    for (size_t ti = 0; ti < table.t_grid.size(); ++ti) {
      decay.push_back({table.t_grid[ti], ray.beta, table.norms(bi, ti),
                       table.complement_norms(bi, ti)});
    }
  }
  out["rays"] = rays;
  out["table"] = decay;
  return out;
}

json run_renorm(PipelineState& state, const AnalysisConfig& config) {
  const AssociatedOperator& op = state.ensure_op();
  double epsilon;
  if (config.grids.epsilon) {
    epsilon = *config.grids.epsilon;
  } else {
    const EigenDecomposition spectrum = general_eigs(op.matrix);
    double min_re = spectrum.eigenvalues[0].real();
    for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
      min_re = std::min(min_re, spectrum.eigenvalues[i].real());
    }
    epsilon = 0.99 * min_re;
    if (!(epsilon > 0)) {
      throw SpectralMarginError("renorm analysis: spectrum is not in the open right half-plane");
    }
  }
  const RenormingCertificate cert =
      contractive_renorming(op, epsilon, config.grids.t_grid, config.seed);
  json out;
  out["epsilon"] = epsilon;
  out["lyapunov_residual"] = cert.lyapunov_residual;
  out["herm_identity_residual"] = cert.herm_identity_residual;
  out["min_sample_re"] = cert.min_sample_re;
  out["max_weighted_norm"] = cert.max_weighted_norm;
  out["contractive"] = cert.contractive;
  return out;
}

json run_perturbation_check(PipelineState& state, const AnalysisConfig& config) {
  const FormTriple& triple = state.problem.triple;
  const Index m = triple.space_h.dim;

  // Deterministic Hermitian rank-1 perturbation, bounded in the H metric
  // and sized by the spectral window of the split. A Hermitian kernel
  // keeps selfadjoint problems selfadjoint, where the slope/spectral
  // consistency gate of the growth surrogate is exact.
  std::mt19937_64 rng(config.seed + 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(m);
  for (Index i = 0; i < m; ++i) z[i] = Complex(gauss(rng), gauss(rng));
  const Vector lifted = triple.j.matrix.adjoint() * (triple.space_h.gram * z);
  const double z_h = (z.adjoint() * triple.space_h.gram * z)(0, 0).real();
  const double epsilon = 0.05 * std::max(1.0, std::abs(config.grids.delta));
  const Matrix k_form = epsilon * (lifted * lifted.adjoint()) / z_h;

  const PerturbationInvarianceReport report =
      perturbation_invariance_check(triple, k_form, config.grids.delta, config.grids.t_grid);
  json out;
  out["epsilon"] = epsilon;
  out["omega_ess_base"] = report.omega_ess_base;
  out["omega_ess_perturbed"] = report.omega_ess_perturbed;
  out["difference"] = report.omega_ess_perturbed - report.omega_ess_base;
  out["dim_x1_base"] = report.dim_x1_base;
  out["dim_x1_perturbed"] = report.dim_x1_perturbed;
  json unmatched_base = json::array();
  for (Complex z : report.unmatched_base) unmatched_base.push_back(complex_to_json(z));
  json unmatched_perturbed = json::array();
  for (Complex z : report.unmatched_perturbed) unmatched_perturbed.push_back(complex_to_json(z));
  out["unmatched_base"] = unmatched_base;
  out["unmatched_perturbed"] = unmatched_perturbed;
  return out;
}

const char* analysis_name(Analysis analysis) {
  switch (analysis) {
    case Analysis::Classify: return "classify";
    case Analysis::Coercivity: return "coercivity";
    case Analysis::Family: return "family";
    case Analysis::Range: return "range";
    case Analysis::Spectrum: return "spectrum";
    case Analysis::Semigroup: return "semigroup";
    case Analysis::Sector: return "sector";
    case Analysis::Renorm: return "renorm";
    case Analysis::PerturbationCheck: return "perturbation-check";
  }
  return "?";
}

}  // namespace

RunResult run_analyses(const AnalysisConfig& config) {
  PipelineState state{build_problem(config), std::nullopt, std::nullopt};

  RunResult result;
  result.report["config_echo"] = {{"seed", config.seed},
                                  {"tolerance", config.check_tol},
                                  {"angles", config.grids.angles},
                                  {"delta", config.grids.delta}};
  result.report["problem"] = {{"dim_v", state.problem.triple.space_v.dim},
                              {"dim_h", state.problem.triple.space_h.dim},
                              {"label", state.problem.triple.space_v.label},
                              {"continuity", state.problem.triple.continuity}};
  if (config.kind) result.report["problem"]["params"] = config.problem_params;

  json analyses;
  std::ostringstream summary;
  summary << "problem " << state.problem.triple.space_v.label << " (dim V = "
          << state.problem.triple.space_v.dim << ", dim H = "
          << state.problem.triple.space_h.dim << ")\n";

  for (Analysis analysis : config.analyses) {
    json section;
    switch (analysis) {
      case Analysis::Classify: section = run_classify(state); break;
      case Analysis::Coercivity: section = run_coercivity(state, config); break;
      case Analysis::Family: section = run_family(config); break;
      case Analysis::Range: section = run_range(state, config); break;
      case Analysis::Spectrum: section = run_spectrum(state, config); break;
      case Analysis::Semigroup: section = run_semigroup(state, config); break;
      case Analysis::Sector: section = run_sector(state, config); break;
      case Analysis::Renorm: section = run_renorm(state, config); break;
      case Analysis::PerturbationCheck: section = run_perturbation_check(state, config); break;
    }
    analyses[analysis_name(analysis)] = section;
    summary << analysis_name(analysis) << ": done\n";
  }
  result.report["analyses"] = analyses;

  // Post-run invariant checks feeding the exit status.
  bool ok = true;
  if (analyses.contains("range") &&
      analyses["range"]["consistency_residual"].get<double>() > config.check_tol) {
    ok = false;
    summary << "FAILED: range support consistency\n";
  }
  if (analyses.contains("renorm") && !analyses["renorm"]["contractive"].get<bool>()) {
    ok = false;
    summary << "FAILED: renorming is not contractive on the grid\n";
  }
  if (analyses.contains("semigroup") && analyses["semigroup"].contains("decay_certificate") &&
      !analyses["semigroup"]["decay_certificate"]["holds"].get<bool>()) {
    ok = false;
    summary << "FAILED: decay certificate violated\n";
  }
  result.all_checks_passed = ok;
  result.report["all_checks_passed"] = ok;
  result.summary = summary.str();
  return result;
}

void write_report(const RunResult& result, const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);
  io::write_file_atomic(output_dir + "/report.json", result.report.dump(2) + "\n");
  io::write_file_atomic(output_dir + "/summary.txt", result.summary);
}

std::string emit_table(const nlohmann::json& report, const std::string& which,
                       const std::string& out_dir) {
  if (!report.contains("analyses")) {
    throw MissingAnalysisError("report carries no analyses section");
  }
  const json& analyses = report["analyses"];

  std::vector<std::string> header;
  const json* table = nullptr;
  if (which == "range") {
    if (!analyses.contains("range")) throw MissingAnalysisError("report has no range analysis");
    header = {"theta", "support_value", "re", "im"};
    table = &analyses["range"]["table"];
  } else if (which == "decay") {
    if (analyses.contains("sector")) {
      table = &analyses["sector"]["table"];
    } else if (analyses.contains("semigroup")) {
      table = &analyses["semigroup"]["table"];
    } else {
      throw MissingAnalysisError("report has neither sector nor semigroup analysis");
    }
    header = {"t", "beta", "norm", "complement_norm"};
  } else if (which == "defect") {
    if (!analyses.contains("family")) throw MissingAnalysisError("report has no family analysis");
    header = {"n", "k", "alpha"};
    table = &analyses["family"]["table"];
  } else {
    throw MissingAnalysisError("unknown table '" + which + "'");
  }

  std::vector<std::vector<double>> rows;
  for (const auto& row : *table) {
    std::vector<double> values;
    for (const auto& v : row) values.push_back(v.get<double>());
    rows.push_back(values);
  }

  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + which + ".csv";
  io::write_file_atomic(path, io::csv_table(header, rows));
  return path;
}

}  // namespace pipeline
}  // namespace sesqui
