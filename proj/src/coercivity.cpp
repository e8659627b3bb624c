#include "sesqui/coercivity.hpp"

#include "sesqui/numkernel.hpp"
#include "sesqui/numrange.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sesqui {

namespace {

double operator_2norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eigs(hermitian_part(m.adjoint() * m),
                                             Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eigs.eigenvalues().maxCoeff()));
}

Index rank_of(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const RealVector& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankTol * std::max(1.0, sv[0])) ++rank;
  }
  return rank;
}

Index count_below(const RealVector& eigenvalues, double alpha, bool* tie = nullptr) {
  Index count = 0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] < alpha) {
      ++count;
    } else if (eigenvalues[i] - alpha <= kTieTol) {
      // Ties are counted as defect so the complement guarantee stays strict.
      ++count;
      if (tie) *tie = true;
    }
  }
  return count;
}

Vector random_v_unit(const FormTriple& triple, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector u(triple.space_v.dim);
  for (Index i = 0; i < u.size(); ++i) u[i] = Complex(gauss(rng), gauss(rng));
  const double norm = v_norm(triple, u);
  return u / norm;
}

}  // namespace

CoercivityReport coercivity_constants(const FormTriple& triple) {
  CoercivityReport report;
  const PencilEigs herm =
      hermitian_pencil_eigs({hermitian_part(triple.form), triple.space_v.gram});
  report.pencil_eigenvalues = herm.eigenvalues;
  report.alpha_positive = herm.eigenvalues[0];

  const NumericalRangeBoundary hull =
      range_boundary(triple, kDefaultRangeAngles, RangeNormalization::VSphere);
  report.alpha_abs = dist_to_range(hull, Complex(0.0, 0.0));

  // Projection of the hull onto the real axis is [-h(pi), h(0)].
  Index idx_zero = 0, idx_pi = hull.angles.size() / 2;
  const double max_re = hull.support_values[idx_zero];
  const double min_re = -hull.support_values[idx_pi];
  if (min_re <= 0.0 && 0.0 <= max_re) {
    report.alpha_real = 0.0;
  } else {
    report.alpha_real = std::min(std::abs(min_re), std::abs(max_re));
  }
  return report;
}

CoercivityReport essential_defect(const FormTriple& triple, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw InputError("essential_defect: alpha must be positive");

  CoercivityReport report = coercivity_constants(triple);
  report.threshold = alpha;

  const PencilEigs herm =
      hermitian_pencil_eigs({hermitian_part(triple.form), triple.space_v.gram});
  report.defect_dim = count_below(herm.eigenvalues, alpha, &report.tie_warning);
  report.defect_basis = herm.eigenvectors.leftCols(report.defect_dim);

  // Sampled check of Re a(u,u) >= alpha ||u||_V^2 on the G_V-orthogonal
  // complement of the defect basis.
  std::mt19937_64 rng(seed);
  const Matrix gram_basis = triple.space_v.gram * report.defect_basis;
  double worst = 0.0;
  for (int s = 0; s < 256; ++s) {
    Vector u = random_v_unit(triple, rng);
    if (report.defect_dim > 0) {
      u -= report.defect_basis * (gram_basis.adjoint() * u);
      const double norm = v_norm(triple, u);
      if (norm < 1e-12) continue;
      u /= norm;
    }
    const double re = form_value(triple, u, u).real();
    worst = std::max(worst, alpha - re);
  }
  report.guarantee_residual = worst;
  return report;
}

CompactPerturbation compact_perturbation(const FormTriple& triple, double alpha,
                                         PerturbationVariant variant) {
  const CoercivityReport defect = essential_defect(triple, alpha);
  const Index n = triple.space_v.dim;
  const Matrix& gram = triple.space_v.gram;

  CompactPerturbation out;
  out.alpha = alpha;
  out.variant = variant;

  // G_V-orthogonal projector onto the defect span.
  const Matrix projector = defect.defect_dim > 0
                               ? Matrix(defect.defect_basis * defect.defect_basis.adjoint() * gram)
                               : Matrix(Matrix::Zero(n, n));
  const Matrix complement = Matrix::Identity(n, n) - projector;

  // b(u,v) = a(Qu,Pv) + a(Pu,Qv) + a(Pu,Pv); the perturbation removes b
  // and adds alpha <Pu, v>_V, leaving a(Qu,Qv) + alpha <Pu,v>_V.
  const Matrix cross = projector.adjoint() * triple.form * complement +
                       complement.adjoint() * triple.form * projector +
                       projector.adjoint() * triple.form * projector;
  out.k_matrix = -cross + alpha * gram * projector;
  out.rank = rank_of(out.k_matrix);

  const Matrix perturbed = triple.form + out.k_matrix;
  const PencilEigs check = hermitian_pencil_eigs({hermitian_part(perturbed), gram});
  out.achieved_pencil_min = check.eigenvalues[0];

  if (variant == PerturbationVariant::SquaredNorm) {
    // Riesz lift of the functional perturbation, symmetrized in the V
    // inner product: eigenpairs of the pencil (Herm(K_form), G_V).
    const PencilEigs sym = hermitian_pencil_eigs({hermitian_part(out.k_matrix), gram});
    const double lambda_max = sym.eigenvalues[sym.eigenvalues.size() - 1];
    if (lambda_max <= 0.0) {
      out.y_factor = Matrix::Zero(n, 0);
      return out;
    }
    std::vector<Index> support;
    for (Index i = 0; i < sym.eigenvalues.size(); ++i) {
      if (std::abs(sym.eigenvalues[i]) > kRankTol * std::max(1.0, lambda_max)) {
        support.push_back(i);
      }
    }
    Matrix basis(n, static_cast<Index>(support.size()));
    for (size_t k = 0; k < support.size(); ++k) basis.col(static_cast<Index>(k)) = sym.eigenvectors.col(support[k]);
    // ||K2 u||^2 = lambda_max ||P_span u||_V^2 = ||y_factor^* u||^2.
    out.y_factor = std::sqrt(lambda_max) * (gram * basis);
  }
  return out;
}

std::optional<RotationScan> rotation_scan(const FormTriple& triple, Index max_defect) {
  const Index n = triple.space_v.dim;
  if (max_defect < 0) max_defect = std::max<Index>(1, n / 4);
  max_defect = std::min(max_defect, n - 1);

  double best_floor = -std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  RealVector best_eigs;
  for (int k = 0; k < kRotationGrid; ++k) {
    const double theta =
        -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k + 1) / kRotationGrid;
    const Matrix h = hermitian_part(std::polar(1.0, theta) * triple.form);
    const PencilEigs eigs = hermitian_pencil_eigs({h, triple.space_v.gram});
    const double floor = eigs.eigenvalues[max_defect];
    if (floor > best_floor) {
      best_floor = floor;
      best_theta = theta;
      best_eigs = eigs.eigenvalues;
    }
  }

  const double scale = std::max(1.0, operator_2norm(triple.form));
  if (!(best_floor > kAbsTol * scale)) return std::nullopt;

  RotationScan out;
  out.theta_star = best_theta;
  out.alpha = best_floor;
  out.defect_dim = 0;
  for (Index i = 0; i < max_defect; ++i) {
    if (best_eigs[i] < best_floor - kTieTol) ++out.defect_dim;
  }

  if (is_hermitian(triple.form)) {
    const PencilEigs eigs =
        hermitian_pencil_eigs({hermitian_part(triple.form), triple.space_v.gram});
    // Exact strict eigenvalue counting; the floor itself is not defect.
    RotationDichotomy dich;
    dich.alpha = out.alpha;
    dich.defect_plus = 0;
    dich.defect_minus = 0;
    for (Index i = 0; i < eigs.eigenvalues.size(); ++i) {
      if (eigs.eigenvalues[i] < dich.alpha) ++dich.defect_plus;
      if (-eigs.eigenvalues[i] < dich.alpha) ++dich.defect_minus;
    }
    dich.selected_sign = dich.defect_plus <= dich.defect_minus ? +1 : -1;
    if (dich.alpha > 0 && 2 * dich.defect_plus < n && 2 * dich.defect_minus < n) {
      throw ConsistencyError(
          "rotation_scan: +a and -a both report small defect, which is impossible");
    }
    out.dichotomy = dich;
  }
  return out;
}

FamilyVerdict family_verdict(const std::vector<FormTriple>& family, double alpha_floor) {
  if (family.size() < 3) throw InputError("family_verdict: need at least 3 levels");
  for (size_t l = 1; l < family.size(); ++l) {
    if (family[l].space_v.dim <= family[l - 1].space_v.dim) {
      throw InputError("family_verdict: levels must have strictly increasing dimension");
    }
  }

  FamilyVerdict out;
  for (const FormTriple& triple : family) {
    out.dims.push_back(triple.space_v.dim);
    const PencilEigs eigs =
        hermitian_pencil_eigs({hermitian_part(triple.form), triple.space_v.gram});
    out.pencil_eigenvalues.push_back(eigs.eigenvalues);
  }

  const RealVector& finest = out.pencil_eigenvalues.back();
  const double top = finest[finest.size() - 1];
  if (!(top > 0.0)) {
    // No direction with positive real part at all; every mode is defect.
    out.verdict = FamilyVerdictKind::Not;
    for (size_t l = 0; l < family.size(); ++l) {
      out.defect_dims.push_back(count_below(out.pencil_eigenvalues[l],
                                            std::max(alpha_floor, kTieTol)));
      out.alphas.push_back(0.0);
    }
    return out;
  }

  out.alpha_grid.resize(kAlphaGridPoints);
  for (int i = 0; i < kAlphaGridPoints; ++i) {
    const double frac = static_cast<double>(i) / (kAlphaGridPoints - 1);
    out.alpha_grid[i] = top * std::pow(1e-6, 1.0 - frac);
  }

  // Largest grid alpha keeping the defect constant across the last 3 levels.
  const size_t levels = family.size();
  std::optional<double> alpha_star;
  Index stable = 0;
  for (int i = kAlphaGridPoints - 1; i >= 0; --i) {
    const double alpha = out.alpha_grid[i];
    const Index k0 = count_below(out.pencil_eigenvalues[levels - 3], alpha);
    const Index k1 = count_below(out.pencil_eigenvalues[levels - 2], alpha);
    const Index k2 = count_below(out.pencil_eigenvalues[levels - 1], alpha);
    if (k0 == k1 && k1 == k2) {
      alpha_star = alpha;
      stable = k2;
      break;
    }
  }

  if (!alpha_star) {
    out.verdict = FamilyVerdictKind::Not;
    for (size_t l = 0; l < levels; ++l) {
      out.defect_dims.push_back(count_below(out.pencil_eigenvalues[l], out.alpha_grid[0]));
      out.alphas.push_back(0.0);
    }
    return out;
  }

  out.alpha_star = *alpha_star;
  out.stable_defect = stable;
  for (size_t l = 0; l < levels; ++l) {
    const Index k_l = count_below(out.pencil_eigenvalues[l], out.alpha_star);
    out.defect_dims.push_back(k_l);
    double level_alpha = 0.0;
    for (Index i = out.alpha_grid.size() - 1; i >= 0; --i) {
      if (count_below(out.pencil_eigenvalues[l], out.alpha_grid[i]) == k_l) {
        level_alpha = out.alpha_grid[i];
        break;
      }
    }
    out.alphas.push_back(level_alpha);
  }

  double min_alpha = out.alphas[levels - 3];
  for (size_t l = levels - 2; l < levels; ++l) min_alpha = std::min(min_alpha, out.alphas[l]);
  out.verdict = (out.alpha_star >= alpha_floor && min_alpha >= alpha_floor)
                    ? FamilyVerdictKind::EssentiallyPositiveCoercive
                    : FamilyVerdictKind::Inconclusive;

  // H-ellipticity constants per level: smallest grid w with
  // min eig (Herm(F) + w J* M_H J, G_V) >= alpha_star.
  for (const FormTriple& triple : family) {
    const Matrix embedded =
        hermitian_part(triple.j.matrix.adjoint() * triple.space_h.gram * triple.j.matrix);
    const Matrix herm = hermitian_part(triple.form);
    HEllipticity ell;
    ell.alpha = out.alpha_star;

    auto floor_at = [&](double w) {
      const PencilEigs eigs = hermitian_pencil_eigs(
          {Matrix(herm + w * embedded), triple.space_v.gram});
      return eigs.eigenvalues[0];
    };

    if (floor_at(0.0) >= out.alpha_star) {
      ell.shift_w = 0.0;
    } else {
      double w_scale = std::max(1.0, operator_2norm(triple.form));
      std::optional<double> found;
      for (int doubling = 0; doubling < 8 && !found; ++doubling) {
        for (int p = 10; p >= 0; --p) {
          const double w = std::ldexp(w_scale, -p);
          if (floor_at(w) >= out.alpha_star) {
            found = w;
            break;
          }
        }
        w_scale *= 1024.0;
      }
      ell.shift_w = found;
    }
    out.h_ellipticity.push_back(ell);
  }
  return out;
}

std::optional<DegeneracyWitness> accretive_degeneracy_witness(const FormTriple& triple) {
  const FormClassification cls = classify(triple);
  if (!cls.accretive) {
    throw InputError("accretive_degeneracy_witness: the form is not accretive");
  }

  const PencilEigs herm =
      hermitian_pencil_eigs({hermitian_part(triple.form), triple.space_v.gram});
  const double scale = std::max(1.0, hermitian_part(triple.form).norm());
  if (herm.eigenvalues[0] > 1e-10 * scale) return std::nullopt;

  // Within the kernel of the Hermitian part, the witness is the direction
  // with the smallest full-form residual, the candidate for A u = 0.
  Index kernel_dim = 0;
  while (kernel_dim < herm.eigenvalues.size() &&
         herm.eigenvalues[kernel_dim] <= 1e-10 * scale) {
    ++kernel_dim;
  }
  const Matrix kernel_basis = herm.eigenvectors.leftCols(kernel_dim);
  Eigen::JacobiSVD<Matrix> svd(Matrix(triple.form * kernel_basis), Eigen::ComputeFullV);
  Vector u = kernel_basis * svd.matrixV().col(kernel_dim - 1);
  u /= std::sqrt((u.adjoint() * triple.space_v.gram * u)(0, 0).real());

  DegeneracyWitness witness;
  witness.u = u;
  witness.herm_residual = (hermitian_part(triple.form) * witness.u).norm();
  witness.full_residual = (triple.form * witness.u).norm();
  if (cls.sector) {
    witness.sector_half_angle = cls.sector->half_angle;
    const double theta = cls.sector->half_angle;
    if (theta < 0.5 * std::numbers::pi - 1e-9) {
      witness.zero_eigenvector_certified = true;
      const double tolerance =
          (1.0 + std::tan(theta)) * 1e-7 * std::max(1.0, operator_2norm(triple.form));
      witness.discrepancy = witness.full_residual > tolerance;
    }
  }
  return witness;
}

}  // namespace sesqui
