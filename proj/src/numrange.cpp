#include "sesqui/numrange.hpp"

#include "sesqui/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <numbers>

namespace sesqui {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SupportResult {
  double value = 0.0;
  Complex point{std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
};

// sup of u* h u subject to u* b u = 1 where b is HPD.
SupportResult support_definite(const Matrix& h, const Matrix& b, const FormTriple& triple) {
  const PencilEigs eigs = hermitian_pencil_eigs({h, b});
  const Index last = eigs.eigenvalues.size() - 1;
  SupportResult out;
  out.value = eigs.eigenvalues[last];
  const Vector u = eigs.eigenvectors.col(last);
  out.point = form_value(triple, u, u);
  return out;
}

}  // namespace

NumericalRangeBoundary range_boundary(const FormTriple& triple, int n_angles,
                                      RangeNormalization normalization) {
  if (n_angles < 8) throw InputError("range_boundary: need at least 8 angles");

  NumericalRangeBoundary out;
  out.normalization = normalization;
  out.angles.resize(n_angles);
  out.support_values.resize(n_angles);
  out.support_points.resize(n_angles);

  const Matrix& f = triple.form;
  const bool v_sphere = normalization == RangeNormalization::VSphere;

  EmbeddingSplit split;
  Matrix b;        // normalization Gram on all of V (may be singular)
  Matrix b1;       // restriction to the complement of ker(J)
  bool restricted = false;
  if (v_sphere) {
    b = triple.space_v.gram;
  } else {
    split = split_embedding(triple.j.matrix);
    if (split.rank == 0) {
      throw InputError("range_boundary: degenerate normalization, all of V lies in ker(j)");
    }
    b = triple.j.matrix.adjoint() * triple.space_h.gram * triple.j.matrix;
    b = hermitian_part(b);
    restricted = split.rank < triple.space_v.dim;
    if (restricted) {
      const Matrix jw1 = triple.j.matrix * split.w1;
      b1 = hermitian_part(jw1.adjoint() * triple.space_h.gram * jw1);
    }
  }

  for (int k = 0; k < n_angles; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / n_angles;
    out.angles[k] = theta;
    const Complex rot = std::polar(1.0, -theta);
    const Matrix h = hermitian_part(rot * f);

    if (v_sphere || !restricted) {
      const SupportResult s = support_definite(h, b, triple);
      out.support_values[k] = s.value;
      out.support_points[k] = s.point;
      continue;
    }

    // Maximizing over all u with ||j(u)|| = 1 is unbounded unless the
    // ker(J) block of h is negative definite; in that case the kernel
    // component is eliminated by the Schur complement.
    const Matrix h12 = split.w1.adjoint() * h * split.w2;
    const Matrix h22 = split.w2.adjoint() * h * split.w2;
    Eigen::SelfAdjointEigenSolver<Matrix> kernel_eigs(h22, Eigen::EigenvaluesOnly);
    const double kernel_top = kernel_eigs.eigenvalues().maxCoeff();
    if (kernel_top >= -kAbsTol * std::max(1.0, h.norm())) {
      out.support_values[k] = kInf;
      out.support_points[k] = Complex(std::numeric_limits<double>::quiet_NaN(),
                                      std::numeric_limits<double>::quiet_NaN());
      continue;
    }

    const Matrix h11 = split.w1.adjoint() * h * split.w1;
    Eigen::PartialPivLU<Matrix> lu(h22);
    const Matrix schur = h11 - h12 * lu.solve(Matrix(h12.adjoint()));

    const PencilEigs eigs = hermitian_pencil_eigs({hermitian_part(schur), b1});
    const Index last = eigs.eigenvalues.size() - 1;
    out.support_values[k] = eigs.eigenvalues[last];
    const Vector y = eigs.eigenvectors.col(last);
    const Vector u = split.w1 * y - split.w2 * lu.solve(Matrix(h12.adjoint()) * y);
    const double ju2 = (u.adjoint() * b * u)(0, 0).real();
    out.support_points[k] = form_value(triple, u, u) / ju2;
  }
  return out;
}

double dist_to_range(const NumericalRangeBoundary& boundary, Complex mu) {
  if (boundary.angles.size() < kMinDistanceAngles) {
    throw InputError("dist_to_range: boundary must carry at least 64 angles");
  }
  double dist = 0.0;
  for (Index k = 0; k < boundary.angles.size(); ++k) {
    const double h = boundary.support_values[k];
    if (!std::isfinite(h)) continue;
    const double along = (std::polar(1.0, -boundary.angles[k]) * mu).real();
    dist = std::max(dist, along - h);
  }
  return dist;
}

double support_consistency_residual(const NumericalRangeBoundary& boundary) {
  double worst = 0.0;
  for (Index k = 0; k < boundary.angles.size(); ++k) {
    const double h = boundary.support_values[k];
    if (!std::isfinite(h)) continue;
    const Complex rot = std::polar(1.0, -boundary.angles[k]);
    for (Index l = 0; l < boundary.angles.size(); ++l) {
      const Complex z = boundary.support_points[l];
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
      worst = std::max(worst, (rot * z).real() - h);
    }
  }
  return worst;
}

std::vector<ResolventCheck> resolvent_certificate(const AssociatedOperator& op,
                                                  const NumericalRangeBoundary& boundary,
                                                  const std::vector<Complex>& mu_samples) {
  const Matrix& a = op.matrix;
  const Index m = a.rows();
  const EigenDecomposition spectrum = general_eigs(a);

  bool spectrum_inside = true;
  for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
    if (dist_to_range(boundary, spectrum.eigenvalues[i]) > 1e-7) spectrum_inside = false;
  }

  std::vector<ResolventCheck> checks;
  checks.reserve(mu_samples.size());
  for (Complex mu : mu_samples) {
    ResolventCheck check;
    check.mu = mu;
    check.dist = dist_to_range(boundary, mu);
    check.in_range = check.dist <= 0.0;
    check.eigenvalues_inside = spectrum_inside;
    if (check.in_range) {
      // Inside the hull no bound is asserted.
      check.resolvent_norm = 0.0;
      check.bound_satisfied = true;
    } else {
      const Matrix shifted = mu * Matrix::Identity(m, m) - a;
      const Matrix resolvent = Eigen::PartialPivLU<Matrix>(shifted).solve(Matrix::Identity(m, m));
      check.resolvent_norm = weighted_operator_norm(resolvent, op.triple.space_h.gram);
      check.bound_satisfied = check.resolvent_norm <= 1.0 / check.dist + 1e-6;
    }
    checks.push_back(check);
  }
  return checks;
}

}  // namespace sesqui
