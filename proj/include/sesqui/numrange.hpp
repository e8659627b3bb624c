#pragma once

#include "sesqui/association.hpp"
#include "sesqui/formmodel.hpp"

#include <vector>

namespace sesqui {

enum class RangeNormalization { JSphere, VSphere };

// Support-function description of the numerical range over a rotation
// grid: h(theta) = sup Re(e^{-i theta} a(u,u)) over the unit sphere of
// the chosen normalization. Directions in which the range is unbounded
// carry support_value = +infinity and a NaN support point.
struct NumericalRangeBoundary {
  RealVector angles;
  RealVector support_values;
  Vector support_points;
  RangeNormalization normalization = RangeNormalization::JSphere;
};

// Computes the boundary on n_angles uniform rotation angles. JSphere
// normalizes by ||j(u)||_H = 1 (maximization over all of V, with the
// ker(J) block eliminated when the supremum is finite); VSphere
// normalizes by ||u||_V = 1.
NumericalRangeBoundary range_boundary(const FormTriple& triple, int n_angles,
                                      RangeNormalization normalization);

// Support-function distance from mu to the grid-polytope outer
// approximation of the range hull; 0 iff mu lies inside it.
double dist_to_range(const NumericalRangeBoundary& boundary, Complex mu);

// Worst violation of Re(e^{-i theta} z(theta')) <= h(theta) over all
// grid angle pairs; a consistency diagnostic for the computed supports.
double support_consistency_residual(const NumericalRangeBoundary& boundary);

struct ResolventCheck {
  Complex mu;
  bool in_range = false;
  double dist = 0.0;
  double resolvent_norm = 0.0;
  bool eigenvalues_inside = false;
  bool bound_satisfied = false;
};

// For each mu outside the hull, checks that the spectrum of A stays
// inside the (tolerance-dilated) hull and that the weighted resolvent
// norm obeys ||R(mu, A)|| <= 1 / dist(mu, W).
std::vector<ResolventCheck> resolvent_certificate(const AssociatedOperator& op,
                                                  const NumericalRangeBoundary& boundary,
                                                  const std::vector<Complex>& mu_samples);

inline constexpr int kDefaultRangeAngles = 256;
inline constexpr int kMinDistanceAngles = 64;

}  // namespace sesqui
