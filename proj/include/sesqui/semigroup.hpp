#pragma once

#include "sesqui/association.hpp"

#include <optional>
#include <vector>

namespace sesqui {

// Spectral decomposition of H at the cut Re(lambda) = delta: projector P
// spans the eigenvalues with real part <= delta, the complement carries
// the rest. complement_growth is max(-Re lambda) over the complement,
// i.e. the exact growth rate of e^{-tA} restricted to range(I - P).
struct SpectralSplit {
  double delta = 0.0;
  Matrix projector;
  Index dim_x1 = 0;
  double complement_growth = 0.0;
  double x1_growth = 0.0;
  double idempotency_residual = 0.0;
  double commutation_residual = 0.0;
};

struct DecayCertificate {
  double epsilon = 0.0;  // alpha / c_H^2
  bool holds = false;
  double worst_margin = 0.0;  // min over the grid of e^{-eps t} - ||S(t)||
};

struct SemigroupAnalysis {
  double omega = 0.0;                 // max(-Re lambda) over the full spectrum
  double quasi_contraction_w = 0.0;   // max over grid of log ||S(t)|| / t
  double omega_ess = 0.0;             // spectral surrogate: complement growth
  double omega_ess_fit = 0.0;         // least-squares slope of log ||S(t)(I-P)||
  double complement_radius_s1 = 0.0;  // spectral radius of S(1)(I-P)
  bool asymptotically_compact = false;
  std::optional<DecayCertificate> certificate;
  double split_delta = 0.0;
};

struct PerturbationInvarianceReport {
  double omega_ess_base = 0.0;
  double omega_ess_perturbed = 0.0;
  Index dim_x1_base = 0;
  Index dim_x1_perturbed = 0;
  std::vector<Complex> unmatched_base;
  std::vector<Complex> unmatched_perturbed;
};

struct SectorRay {
  double beta = 0.0;
  bool boundary = false;
  bool bounded = false;
  bool complement_decaying = false;
};

struct SectorScanTable {
  std::vector<double> t_grid;
  std::vector<double> beta_grid;
  RealMatrix norms;             // beta index x t index
  RealMatrix complement_norms;  // same layout
  std::vector<SectorRay> rays;
  double split_delta = 0.0;
};

struct RenormingCertificate {
  Matrix p;
  double lyapunov_residual = 0.0;
  double herm_identity_residual = 0.0;  // ||Herm(P A) - I/2||
  double min_sample_re = 0.0;
  double max_weighted_norm = 0.0;
  bool contractive = false;
};

// S(z) = exp(-z A).
Matrix semigroup_sample(const AssociatedOperator& op, Complex z);

// S(z)(I - P) evaluated through the restriction of A to the invariant
// subspace range(I - P). Forming exp(-zA) first and projecting after
// loses everything to cancellation once X1 carries growing modes.
Matrix complement_sample(const AssociatedOperator& op, const SpectralSplit& split, Complex z);

// Growth bound, quasi-contractivity constant in the M_H norm and, when
// the source triple is positive-coercive, the alpha/c_H^2 decay
// certificate evaluated on the grid.
SemigroupAnalysis growth_report(const AssociatedOperator& op, const std::vector<double>& t_grid);

// Throws TieError when an eigenvalue lies within 1e-10 of the cut.
SpectralSplit spectral_split(const AssociatedOperator& op, double delta);

// Essential growth surrogate: slope fit of log ||S(t)(I-P)||_{M_H}
// cross-checked against the exact complement growth (disagreement beyond
// 1e-4 raises ConsistencyError), plus the spectral radius identity for
// S(1)(I-P).
SemigroupAnalysis essential_growth(const AssociatedOperator& op, const SpectralSplit& split,
                                   const std::vector<double>& t_grid);

// Compares the essential growth surrogate of the triple against the
// form perturbed by k_form (rank at most dim/4) with independent splits,
// and lists the complement eigenvalues that fail to pair up.
PerturbationInvarianceReport perturbation_invariance_check(const FormTriple& triple,
                                                           const Matrix& k_form, double delta,
                                                           const std::vector<double>& t_grid);

// Lyapunov renorming P with A* P + P A = I; certifies Re(u* P A u) >= 0
// on samples and P-norm contractivity of e^{-tA} on the grid. Requires
// min Re lambda(A) >= epsilon > 0.
RenormingCertificate contractive_renorming(const AssociatedOperator& op, double epsilon,
                                           const std::vector<double>& t_grid,
                                           std::uint64_t seed = 0);

// Norm tables of S(t e^{i beta}) and its split complement over the grid.
// Interior rays (|beta| < theta) are checked for complement decay;
// boundary rays (|beta| = theta) only for boundedness.
SectorScanTable sector_scan(const AssociatedOperator& op, const SpectralSplit& split,
                            double theta, const std::vector<double>& t_grid,
                            const std::vector<double>& beta_grid);

}  // namespace sesqui
