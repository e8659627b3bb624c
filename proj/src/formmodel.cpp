#include "sesqui/formmodel.hpp"

#include "sesqui/numkernel.hpp"
#include "sesqui/numrange.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

namespace sesqui {

namespace {

double operator_2norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eigs(hermitian_part(m.adjoint() * m),
                                             Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eigs.eigenvalues().maxCoeff()));
}

// Continuity constant: sigma_max of L^{-1} F L^{-*} with G_V = L L*.
double continuity_constant(const Matrix& form, const Matrix& gram_v) {
  Eigen::LLT<Matrix> llt(hermitian_part(gram_v));
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError("continuity constant: V Gram is not positive definite");
  }
  const Matrix x = llt.matrixL().solve(form);
  const Matrix scaled = llt.matrixL().solve(x.adjoint()).adjoint();
  return operator_2norm(scaled);
}

// Angle wrapped to (-pi, pi].
double wrap_angle(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi + std::numbers::pi, two_pi);
  if (w <= 0) w += two_pi;
  return w - std::numbers::pi;
}

std::optional<SectorFit> fit_sector(const FormTriple& triple) {
  const NumericalRangeBoundary boundary =
      range_boundary(triple, kSectorAngleGrid, RangeNormalization::JSphere);

  // Shift-grid scale: the extent of the (finite part of the) range, an
  // intrinsic quantity invariant under Gram-preserving changes of basis.
  double extent = 0.0;
  for (Index i = 0; i < boundary.support_values.size(); ++i) {
    const double h = boundary.support_values[i];
    if (std::isfinite(h)) extent = std::max(extent, std::abs(h));
  }
  if (extent == 0.0) extent = std::max(1e-300, triple.continuity);

  std::vector<double> shifts;
  shifts.push_back(0.0);
  for (int p = kSectorShiftGrid - 2; p >= 0; --p) {
    shifts.push_back(std::ldexp(extent, -p));
  }

  // Unbounded ranges: directions of recession are those with
  // Re(e^{-i phi} d) <= 0 for every angle of finite support. They must
  // lie inside the closed sector as well.
  std::vector<double> finite_angles;
  bool has_infinite = false;
  for (Index i = 0; i < boundary.angles.size(); ++i) {
    if (std::isfinite(boundary.support_values[i])) {
      finite_angles.push_back(boundary.angles[i]);
    } else {
      has_infinite = true;
    }
  }
  std::vector<double> recession_angles;
  if (has_infinite) {
    for (Index i = 0; i < boundary.angles.size(); ++i) {
      const double psi = boundary.angles[i];
      bool recession = true;
      for (double phi : finite_angles) {
        if (std::cos(psi - phi) > 1e-9) {
          recession = false;
          break;
        }
      }
      if (recession) recession_angles.push_back(std::abs(wrap_angle(psi)));
    }
  }

  // Smallest feasible shift first, then the smallest angle it admits.
  // Support points are attained form values, so their containment in the
  // (convex) sector decides containment of their hull.
  const int n_theta = kSectorAngleGrid;
  const double angle_pad = 2.0 * std::numbers::pi / boundary.angles.size();
  for (double w : shifts) {
    for (int it = 0; it < n_theta; ++it) {
      const double theta = 0.5 * std::numbers::pi * static_cast<double>(it) / (n_theta - 1);
      const double tol = 1e-9 * std::max(1.0, extent + w);
      bool feasible = true;
      for (Index i = 0; i < boundary.angles.size() && feasible; ++i) {
        if (!std::isfinite(boundary.support_values[i])) continue;
        const Complex y = boundary.support_points[i] + w;
        if (y.real() < -tol) {
          feasible = false;
        } else if (theta < 0.5 * std::numbers::pi - 1e-12 &&
                   std::abs(y.imag()) > std::tan(theta) * std::max(0.0, y.real()) + tol) {
          feasible = false;
        }
      }
      for (double psi : recession_angles) {
        if (psi > theta + angle_pad) feasible = false;
      }
      if (feasible) return SectorFit{w, theta};
    }
  }
  return std::nullopt;
}

}  // namespace

EmbeddingSplit split_embedding(const Matrix& j_matrix) {
  Eigen::BDCSVD<Matrix> svd(j_matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double cutoff = kRankTol * (sv.size() > 0 ? sv[0] : 0.0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }

  EmbeddingSplit split;
  split.rank = rank;
  split.u = svd.matrixU().leftCols(rank);
  split.sigma = sv.head(rank);
  split.w1 = svd.matrixV().leftCols(rank);
  split.w2 = svd.matrixV().rightCols(j_matrix.cols() - rank);
  return split;
}

FormTriple build_triple(const Matrix& gram_v, const Matrix& gram_h,
                        const Matrix& j_matrix, const Matrix& form_matrix,
                        std::string label) {
  const Index n = gram_v.rows();
  const Index m = gram_h.rows();
  if (form_matrix.rows() != n || form_matrix.cols() != n) {
    throw InputError("build_triple: form matrix does not match dim V");
  }
  if (j_matrix.rows() != m || j_matrix.cols() != n) {
    throw InputError("build_triple: embedding must map V coordinates to H coordinates");
  }
  require_hpd(gram_v, "build_triple(gram_v)");
  require_hpd(gram_h, "build_triple(gram_h)");
  if (!form_matrix.allFinite() || !j_matrix.allFinite()) {
    throw InputError("build_triple: non-finite entries");
  }

  const EmbeddingSplit split = split_embedding(j_matrix);
  if (split.rank != m) {
    std::ostringstream os;
    os << "build_triple: embedding has rank " << split.rank << " < dim H = " << m
       << "; the range of j is not dense";
    throw DenseRangeError(os.str());
  }

  FormTriple triple;
  triple.space_v = GalerkinSpace{n, hermitian_part(gram_v), std::move(label)};
  triple.space_h = PivotSpace{m, hermitian_part(gram_h)};
  triple.j = EmbeddingMap{j_matrix, split.rank == n};
  triple.form = form_matrix;
  triple.continuity = continuity_constant(form_matrix, triple.space_v.gram);
  return triple;
}

ShiftedForm shift_form(const FormTriple& triple, Complex lambda) {
  ShiftedForm shifted;
  shifted.base = triple;
  shifted.lambda = lambda;
  shifted.form = triple.form -
                 lambda * (triple.j.matrix.adjoint() * triple.space_h.gram * triple.j.matrix);
  return shifted;
}

ShiftedForm shift_form(const ShiftedForm& shifted, Complex lambda) {
  // Shifts compose on the base form, so inverse shifts cancel exactly.
  return shift_form(shifted.base, shifted.lambda + lambda);
}

FormTriple shifted_triple(const ShiftedForm& shifted) {
  FormTriple triple = shifted.base;
  triple.form = shifted.form;
  triple.continuity = continuity_constant(shifted.form, triple.space_v.gram);
  return triple;
}

bool kernel_condition_holds(const FormTriple& triple) {
  const EmbeddingSplit split = split_embedding(triple.j.matrix);
  if (split.w2.cols() == 0) return true;
  const Matrix block = split.w2.adjoint() * triple.form * split.w2;
  Eigen::BDCSVD<Matrix> svd(block);
  const RealVector& sv = svd.singularValues();
  const double smallest = sv[sv.size() - 1];
  return smallest > kRankTol * std::max(1.0, sv[0]);
}

FormClassification classify(const FormTriple& triple) {
  FormClassification out;
  out.symmetric = is_hermitian(triple.form);
  const PencilEigs herm =
      hermitian_pencil_eigs({hermitian_part(triple.form), triple.space_v.gram});
  const double scale = std::max(1.0, hermitian_part(triple.form).norm());
  out.accretive = herm.eigenvalues[0] >= -kAbsTol * scale;
  out.kernel_condition = kernel_condition_holds(triple);
  out.sector = fit_sector(triple);
  return out;
}

Complex form_value(const FormTriple& triple, const Vector& u, const Vector& v) {
  return (v.adjoint() * triple.form * u)(0, 0);
}

double v_norm(const FormTriple& triple, const Vector& u) {
  return std::sqrt(std::max(0.0, (u.adjoint() * triple.space_v.gram * u)(0, 0).real()));
}

double embedded_h_norm(const FormTriple& triple, const Vector& u) {
  const Vector ju = triple.j.matrix * u;
  return std::sqrt(std::max(0.0, (ju.adjoint() * triple.space_h.gram * ju)(0, 0).real()));
}

double embedding_norm(const FormTriple& triple) {
  const Matrix embedded =
      hermitian_part(triple.j.matrix.adjoint() * triple.space_h.gram * triple.j.matrix);
  const PencilEigs eigs = hermitian_pencil_eigs({embedded, triple.space_v.gram});
  return std::sqrt(std::max(0.0, eigs.eigenvalues[eigs.eigenvalues.size() - 1]));
}

}  // namespace sesqui
