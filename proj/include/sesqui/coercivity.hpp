#pragma once

#include "sesqui/formmodel.hpp"

#include <optional>
#include <vector>

namespace sesqui {

// Coercivity constants of a form on the V sphere together with the
// essential-defect data at a threshold alpha: defect_dim counts pencil
// eigenvalues of (Herm(F), G_V) below alpha, defect_basis spans the
// corresponding G_V-orthonormal eigenvectors.
struct CoercivityReport {
  double alpha_positive = 0.0;  // min eigenvalue of (Herm(F), G_V)
  double alpha_real = 0.0;      // distance of 0 to the real projection of W(a,V)
  double alpha_abs = 0.0;       // distance of 0 to W(a,V)
  Index defect_dim = 0;
  Matrix defect_basis;
  double threshold = 0.0;
  std::optional<double> rotation;
  RealVector pencil_eigenvalues;
  bool tie_warning = false;
  double guarantee_residual = 0.0;  // worst sampled violation of Re a >= alpha on the complement
};

enum class PerturbationVariant { Functional, SquaredNorm };

// Finite-rank form perturbation restoring positive coercivity at level
// alpha. k_matrix is the perturbation kernel: perturbed form = F + k_matrix.
// The squared-norm variant additionally carries y_factor with
// ||K u||_Y^2 = ||y_factor^* u||^2.
struct CompactPerturbation {
  Matrix k_matrix;
  Index rank = 0;
  double alpha = 0.0;
  PerturbationVariant variant = PerturbationVariant::Functional;
  std::optional<Matrix> y_factor;
  double achieved_pencil_min = 0.0;
};

struct RotationDichotomy {
  Index defect_plus = 0;
  Index defect_minus = 0;
  int selected_sign = +1;
  double alpha = 0.0;
};

struct RotationScan {
  double theta_star = 0.0;
  double alpha = 0.0;
  Index defect_dim = 0;
  std::optional<RotationDichotomy> dichotomy;  // Hermitian forms only
};

enum class FamilyVerdictKind { EssentiallyPositiveCoercive, Not, Inconclusive };

struct HEllipticity {
  std::optional<double> shift_w;
  double alpha = 0.0;
};

// Refinement-family surrogate of essential positive coercivity: the
// defect dimension must be constant over the last three levels at a
// uniform alpha above the declared floor.
struct FamilyVerdict {
  std::vector<Index> dims;
  std::vector<Index> defect_dims;
  std::vector<double> alphas;
  FamilyVerdictKind verdict = FamilyVerdictKind::Inconclusive;
  double alpha_star = 0.0;
  Index stable_defect = 0;
  RealVector alpha_grid;
  std::vector<RealVector> pencil_eigenvalues;
  std::vector<HEllipticity> h_ellipticity;
};

struct DegeneracyWitness {
  Vector u;
  double herm_residual = 0.0;
  double full_residual = 0.0;
  std::optional<double> sector_half_angle;
  bool zero_eigenvector_certified = false;
  bool discrepancy = false;
};

CoercivityReport coercivity_constants(const FormTriple& triple);

// Defect data at threshold alpha > 0. Eigenvalues within kTieTol of
// alpha are counted below (conservative) and flagged.
CoercivityReport essential_defect(const FormTriple& triple, double alpha,
                                  std::uint64_t seed = 0);

CompactPerturbation compact_perturbation(const FormTriple& triple, double alpha,
                                         PerturbationVariant variant);

// Scans rotations e^{i theta} a over kRotationGrid angles and returns the
// angle maximizing the pencil floor after removing at most max_defect
// eigenvalues (default: n/4, at least 1). Returns nullopt when no angle
// achieves a positive floor. For Hermitian forms the result carries the
// +a / -a dichotomy.
std::optional<RotationScan> rotation_scan(const FormTriple& triple, Index max_defect = -1);

FamilyVerdict family_verdict(const std::vector<FormTriple>& family, double alpha_floor);

// For an accretive triple with singular real part, returns the
// degenerate direction u with residuals ||Herm(F) u|| and ||F u||.
// Under a strict sector fit (theta < pi/2) the full residual must
// vanish; a violation is reported as a discrepancy, not an error.
std::optional<DegeneracyWitness> accretive_degeneracy_witness(const FormTriple& triple);

inline constexpr int kRotationGrid = 512;
inline constexpr int kAlphaGridPoints = 64;

}  // namespace sesqui
