#pragma once

#include "sesqui/formmodel.hpp"

#include <variant>
#include <vector>

namespace sesqui {
namespace gallery {

enum class GalleryKind { Schrodinger1D, Dtn, Drift, ShiftForm, Diagonal };
enum class BoundaryKind { Neumann, Dirichlet };
enum class DtnDomain { Interval, Square };

// Piecewise-constant coefficient: baseline everywhere plus a well/bump of
// the given depth on [from, to].
struct PotentialSpec {
  double baseline = 0.0;
  double well_depth = 0.0;
  double well_from = 0.0;
  double well_to = 0.0;
};

double eval_potential(const PotentialSpec& spec, double x);

struct Schrodinger1DParams {
  double length = 1.0;
  int n = 0;  // dim V = number of retained nodes
  BoundaryKind bc = BoundaryKind::Neumann;
  std::vector<double> potential;  // nodal values, size n
  double mass_shift = 0.0;        // delta, added to the potential nodally
};

struct DtnParams {
  double length = 1.0;
  int n = 0;  // nodes per direction
  DtnDomain domain = DtnDomain::Interval;
  std::vector<double> potential;  // nodal values, size dim V
};

struct DriftParams {
  double length = 1.0;
  int n = 0;
  std::vector<Complex> b;  // nodal first-order coefficients, size n
  std::vector<Complex> c;
  double mass_shift = 0.0;  // delta > 0
};

struct ShiftFormParams {
  double length = 1.0;
  int n = 0;  // interior nodes
};

struct DiagonalParams {
  std::vector<double> lambdas;  // positive, nondecreasing
};

using GalleryParams = std::variant<Schrodinger1DParams, DtnParams, DriftParams,
                                   ShiftFormParams, DiagonalParams>;

struct GalleryProblem {
  GalleryKind kind = GalleryKind::Schrodinger1D;
  GalleryParams params;
  FormTriple triple;
};

// a(u,v) = int u'v' + int (m + delta) u v with nodal quadrature for the
// zero-order terms; j identity into the L^2 pivot space.
GalleryProblem schrodinger1d(const Schrodinger1DParams& params);
GalleryProblem schrodinger1d(double length, int n, BoundaryKind bc, const PotentialSpec& m_spec,
                             double mass_shift = 0.0);

// Same form on the full space, with j the boundary trace; association
// goes through the Schur path and realizes the Dirichlet-to-Neumann map.
GalleryProblem dtn(const DtnParams& params);
GalleryProblem dtn(double length, int n, DtnDomain domain, const PotentialSpec& m_spec);

// a(u,v) = int u'v' + delta int u v + int (b u v' + c v u') with nodal
// coefficient sampling.
GalleryProblem drift(const DriftParams& params);
GalleryProblem drift(double length, int n, const PotentialSpec& b_re, const PotentialSpec& b_im,
                     bool c_conjugate, double mass_shift);

// a(u,v) = int u' v on the Dirichlet space: an exactly skew-Hermitian
// form whose numerical range lies on the imaginary axis.
GalleryProblem shiftform(const ShiftFormParams& params);
GalleryProblem shiftform(double length, int n);

// Truncation of the unitary-group example: V-Gram diag(lambda),
// H-Gram I, form i diag(lambda).
GalleryProblem diagonal(const DiagonalParams& params);
GalleryProblem diagonal(const std::vector<double>& lambdas);

// Refinement families (triples share the functional problem description).
std::vector<GalleryProblem> schrodinger_family(double length, const std::vector<int>& ns,
                                               BoundaryKind bc, const PotentialSpec& m_spec,
                                               double mass_shift);
std::vector<GalleryProblem> drift_family(double base_length, const std::vector<int>& ns,
                                         const PotentialSpec& b_re, const PotentialSpec& b_im,
                                         bool c_conjugate, double mass_shift,
                                         bool grow_length = false);
// Doubling-interval family at fixed mesh width.
std::vector<GalleryProblem> shiftform_family(double base_length, int base_n, int levels);

std::vector<FormTriple> triples_of(const std::vector<GalleryProblem>& family);

}  // namespace gallery
}  // namespace sesqui
