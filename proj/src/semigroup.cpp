#include "sesqui/semigroup.hpp"

#include "sesqui/numkernel.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace sesqui {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_t_grid(const std::vector<double>& t_grid, size_t min_points, const char* what) {
  if (t_grid.size() < min_points) {
    std::ostringstream os;
    os << what << ": grid needs at least " << min_points << " points";
    throw FitError(os.str());
  }
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && t_grid[i] <= t_grid[i - 1])) {
      throw InputError(std::string(what) + ": grid must be positive and increasing");
    }
  }
}

double weighted_norm(const Matrix& m, const Matrix& gram) {
  return weighted_operator_norm(m, gram);
}

}  // namespace

Matrix semigroup_sample(const AssociatedOperator& op, Complex z) {
  return matrix_exponential(-z * op.matrix);
}

namespace {

// One-time restriction of A to the invariant subspace range(I - P).
struct ComplementRestriction {
  Index rank = 0;
  bool full = false;  // P = 0, no restriction needed
  Matrix q2;          // m x rank orthonormal basis
  Matrix restricted;  // rank x rank matrix of A on the subspace
  Matrix rhs;         // q2^* (I - P)
};

ComplementRestriction restrict_complement(const AssociatedOperator& op,
                                          const SpectralSplit& split) {
  ComplementRestriction out;
  const Index m = op.matrix.rows();
  out.rank = m - split.dim_x1;
  out.full = split.dim_x1 == 0;
  if (out.rank == 0 || out.full) return out;

  const Matrix complement = Matrix::Identity(m, m) - split.projector;
  Eigen::ColPivHouseholderQR<Matrix> qr(complement);
  out.q2 = Matrix(qr.householderQ()).leftCols(out.rank);
  out.restricted = out.q2.adjoint() * op.matrix * out.q2;
  out.rhs = out.q2.adjoint() * complement;
  return out;
}

Matrix restricted_sample(const AssociatedOperator& op, const ComplementRestriction& restriction,
                         Complex z) {
  if (restriction.rank == 0) {
    return Matrix::Zero(op.matrix.rows(), op.matrix.rows());
  }
  if (restriction.full) return matrix_exponential(-z * op.matrix);
  return restriction.q2 * matrix_exponential(-z * restriction.restricted) * restriction.rhs;
}

}  // namespace

Matrix complement_sample(const AssociatedOperator& op, const SpectralSplit& split, Complex z) {
  return restricted_sample(op, restrict_complement(op, split), z);
}

namespace {

SemigroupAnalysis growth_analysis(const AssociatedOperator& op,
                                  const std::vector<double>& t_grid) {
  SemigroupAnalysis out;
  const EigenDecomposition spectrum = general_eigs(op.matrix);
  out.omega = kNegInf;
  for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
    out.omega = std::max(out.omega, -spectrum.eigenvalues[i].real());
  }

  const Matrix& gram = op.triple.space_h.gram;
  out.quasi_contraction_w = kNegInf;
  std::vector<double> norms;
  norms.reserve(t_grid.size());
  for (double t : t_grid) {
    const double norm = weighted_norm(semigroup_sample(op, t), gram);
    norms.push_back(norm);
    out.quasi_contraction_w = std::max(out.quasi_contraction_w, std::log(norm) / t);
  }

  // Positive-coercivity constant: the pencil floor of the real part.
  const PencilEigs herm = hermitian_pencil_eigs(
      {hermitian_part(op.triple.form), op.triple.space_v.gram});
  const double alpha_positive = herm.eigenvalues[0];
  if (alpha_positive > 0.0) {
    const double c_h = embedding_norm(op.triple);
    DecayCertificate cert;
    cert.epsilon = alpha_positive / (c_h * c_h);
    cert.worst_margin = std::numeric_limits<double>::infinity();
    cert.holds = true;
    for (size_t i = 0; i < t_grid.size(); ++i) {
      const double bound = std::exp(-cert.epsilon * t_grid[i]);
      cert.worst_margin = std::min(cert.worst_margin, bound - norms[i]);
      if (norms[i] > bound * (1.0 + 1e-9)) cert.holds = false;
    }
    out.certificate = cert;
  }
  return out;
}

}  // namespace

SemigroupAnalysis growth_report(const AssociatedOperator& op, const std::vector<double>& t_grid) {
  require_t_grid(t_grid, 8, "growth_report");
  return growth_analysis(op, t_grid);
}

SpectralSplit spectral_split(const AssociatedOperator& op, double delta) {
  const EigenDecomposition spectrum = general_eigs(op.matrix);
  for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
    if (std::abs(spectrum.eigenvalues[i].real() - delta) < 1e-10) {
      std::ostringstream os;
      os << "spectral_split: eigenvalue with Re = " << spectrum.eigenvalues[i].real()
         << " lies on the cut delta = " << delta << "; choose a different delta";
      throw TieError(os.str());
    }
  }

  const Index m = op.matrix.rows();
  Eigen::FullPivLU<Matrix> lu(spectrum.eigenvectors);
  if (!lu.isInvertible()) {
    throw ConvergenceError("spectral_split: eigenvector matrix is numerically singular");
  }

  SpectralSplit split;
  split.delta = delta;
  split.x1_growth = kNegInf;
  split.complement_growth = kNegInf;
  Matrix indicator = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    const double re = spectrum.eigenvalues[i].real();
    if (re <= delta) {
      indicator(i, i) = 1.0;
      ++split.dim_x1;
      split.x1_growth = std::max(split.x1_growth, -re);
    } else {
      split.complement_growth = std::max(split.complement_growth, -re);
    }
  }
  split.projector = spectrum.eigenvectors * indicator * lu.inverse();

  const double scale = std::max(1.0, op.matrix.norm());
  split.idempotency_residual = (split.projector * split.projector - split.projector).norm();
  split.commutation_residual =
      (split.projector * op.matrix - op.matrix * split.projector).norm() / scale;
  return split;
}

SemigroupAnalysis essential_growth(const AssociatedOperator& op, const SpectralSplit& split,
                                   const std::vector<double>& t_grid) {
  require_t_grid(t_grid, 4, "essential_growth");
  const Matrix& gram = op.triple.space_h.gram;
  const Index m = op.matrix.rows();

  SemigroupAnalysis out = growth_analysis(op, t_grid);
  out.split_delta = split.delta;

  if (split.dim_x1 == m) {
    out.omega_ess = kNegInf;
    out.omega_ess_fit = kNegInf;
    out.complement_radius_s1 = 0.0;
    out.asymptotically_compact = true;
    return out;
  }

  // Least-squares slope of log ||S(t)(I - P)|| over the grid. Norms that
  // reach the rounding floor of the exponential are excluded; they carry
  // no slope information.
  const ComplementRestriction restriction = restrict_complement(op, split);
  std::vector<std::pair<double, double>> points;
  double floor_scale = 1.0;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    const double norm = weighted_norm(restricted_sample(op, restriction, t_grid[i]), gram);
    if (i == 0) floor_scale = std::max(1.0, norm);
    if (norm >= 1e-13 * floor_scale) points.emplace_back(t_grid[i], std::log(norm));
  }
  if (points.size() < 3) {
    throw FitError(
        "essential_growth: the complement norm reaches the rounding floor on this grid; "
        "use smaller times");
  }
  double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  for (const auto& [t, y] : points) {
    sum_t += t;
    sum_y += y;
    sum_tt += t * t;
    sum_ty += t * y;
  }
  const double n_pts = static_cast<double>(points.size());
  const double denom = n_pts * sum_tt - sum_t * sum_t;
  if (std::abs(denom) < 1e-300) throw FitError("essential_growth: degenerate time grid");
  out.omega_ess_fit = (n_pts * sum_ty - sum_t * sum_y) / denom;
  out.omega_ess = split.complement_growth;

  if (std::abs(out.omega_ess_fit - out.omega_ess) > 1e-4 * std::max(1.0, std::abs(out.omega_ess))) {
    std::ostringstream os;
    os << "essential_growth: slope fit " << out.omega_ess_fit
       << " disagrees with the spectral value " << out.omega_ess;
    throw ConsistencyError(os.str());
  }

  const EigenDecomposition s1 = general_eigs(restricted_sample(op, restriction, 1.0));
  double radius = 0.0;
  for (Index i = 0; i < s1.eigenvalues.size(); ++i) {
    radius = std::max(radius, std::abs(s1.eigenvalues[i]));
  }
  out.complement_radius_s1 = radius;
  const double expected = std::exp(out.omega_ess);
  if (std::abs(radius - expected) > 1e-6 * std::max(1.0, expected)) {
    std::ostringstream os;
    os << "essential_growth: spectral radius of S(1)(I-P) is " << radius
       << " but e^{omega_ess} = " << expected;
    throw ConsistencyError(os.str());
  }

  out.asymptotically_compact = out.omega_ess < -1e-12;
  return out;
}

PerturbationInvarianceReport perturbation_invariance_check(const FormTriple& triple,
                                                           const Matrix& k_form, double delta,
                                                           const std::vector<double>& t_grid) {
  const Index n = triple.space_v.dim;
  Eigen::BDCSVD<Matrix> svd(k_form);
  const RealVector& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > kRankTol * std::max(1.0, sv[0])) ++rank;
  }
  if (4 * rank > n) {
    throw InputError("perturbation_invariance_check: perturbation rank exceeds dim/4");
  }

  const FormTriple perturbed = build_triple(triple.space_v.gram, triple.space_h.gram,
                                            triple.j.matrix, triple.form + k_form,
                                            triple.space_v.label);

  const AssociatedOperator base_op = associate(triple);
  const AssociatedOperator pert_op = associate(perturbed);
  const SpectralSplit base_split = spectral_split(base_op, delta);
  const SpectralSplit pert_split = spectral_split(pert_op, delta);

  PerturbationInvarianceReport report;
  report.dim_x1_base = base_split.dim_x1;
  report.dim_x1_perturbed = pert_split.dim_x1;
  report.omega_ess_base = essential_growth(base_op, base_split, t_grid).omega_ess;
  report.omega_ess_perturbed = essential_growth(pert_op, pert_split, t_grid).omega_ess;

  // Complement eigenvalue multisets; entries that fail to pair within a
  // relative tolerance are listed on both sides.
  auto complement_eigs = [delta](const AssociatedOperator& op) {
    std::vector<Complex> eigs;
    const EigenDecomposition spectrum = general_eigs(op.matrix);
    for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
      if (spectrum.eigenvalues[i].real() > delta) eigs.push_back(spectrum.eigenvalues[i]);
    }
    return eigs;
  };
  std::vector<Complex> base_eigs = complement_eigs(base_op);
  std::vector<Complex> pert_eigs = complement_eigs(pert_op);
  const double match_tol = 1e-6 * std::max(1.0, base_op.matrix.norm());
  std::vector<bool> used(pert_eigs.size(), false);
  for (const Complex& lambda : base_eigs) {
    double best = std::numeric_limits<double>::infinity();
    size_t best_idx = pert_eigs.size();
    for (size_t j = 0; j < pert_eigs.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(pert_eigs[j] - lambda);
      if (d < best) {
        best = d;
        best_idx = j;
      }
    }
    if (best_idx < pert_eigs.size() && best <= match_tol) {
      used[best_idx] = true;
    } else {
      report.unmatched_base.push_back(lambda);
    }
  }
  for (size_t j = 0; j < pert_eigs.size(); ++j) {
    if (!used[j]) report.unmatched_perturbed.push_back(pert_eigs[j]);
  }
  return report;
}

RenormingCertificate contractive_renorming(const AssociatedOperator& op, double epsilon,
                                           const std::vector<double>& t_grid,
                                           std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw InputError("contractive_renorming: epsilon must be positive");
  require_t_grid(t_grid, 2, "contractive_renorming");

  const EigenDecomposition spectrum = general_eigs(op.matrix);
  double min_re = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
    min_re = std::min(min_re, spectrum.eigenvalues[i].real());
  }
  if (min_re < epsilon) {
    std::ostringstream os;
    os << "contractive_renorming: spectral abscissa " << min_re << " is below epsilon "
       << epsilon;
    throw SpectralMarginError(os.str());
  }

  const Index m = op.matrix.rows();
  const LyapunovSolution lyap = lyapunov_solve(op.matrix, Matrix::Identity(m, m));

  RenormingCertificate cert;
  cert.p = lyap.p;
  cert.lyapunov_residual = lyap.residual;
  cert.herm_identity_residual =
      (hermitian_part(cert.p * op.matrix) - 0.5 * Matrix::Identity(m, m)).norm();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  cert.min_sample_re = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 10000; ++s) {
    Vector u(m);
    for (Index i = 0; i < m; ++i) u[i] = Complex(gauss(rng), gauss(rng));
    u.normalize();
    const double re = (u.adjoint() * cert.p * op.matrix * u)(0, 0).real();
    cert.min_sample_re = std::min(cert.min_sample_re, re);
  }

  cert.max_weighted_norm = 0.0;
  for (double t : t_grid) {
    cert.max_weighted_norm =
        std::max(cert.max_weighted_norm, weighted_norm(semigroup_sample(op, t), cert.p));
  }
  cert.contractive = cert.max_weighted_norm <= 1.0 + 1e-9;
  return cert;
}

SectorScanTable sector_scan(const AssociatedOperator& op, const SpectralSplit& split,
                            double theta, const std::vector<double>& t_grid,
                            const std::vector<double>& beta_grid) {
  require_t_grid(t_grid, 2, "sector_scan");
  for (double beta : beta_grid) {
    if (std::abs(beta) > theta + 1e-12) {
      throw InputError("sector_scan: ray angle outside the sector");
    }
  }

  const Matrix& gram = op.triple.space_h.gram;

  SectorScanTable table;
  table.t_grid = t_grid;
  table.beta_grid = beta_grid;
  table.split_delta = split.delta;
  table.norms.resize(static_cast<Index>(beta_grid.size()), static_cast<Index>(t_grid.size()));
  table.complement_norms.resize(table.norms.rows(), table.norms.cols());

  const ComplementRestriction restriction = restrict_complement(op, split);
  for (size_t bi = 0; bi < beta_grid.size(); ++bi) {
    const Complex direction = std::polar(1.0, beta_grid[bi]);
    for (size_t ti = 0; ti < t_grid.size(); ++ti) {
      const Complex z = t_grid[ti] * direction;
      table.norms(bi, ti) = weighted_norm(semigroup_sample(op, z), gram);
      table.complement_norms(bi, ti) = weighted_norm(restricted_sample(op, restriction, z), gram);
    }

    SectorRay ray;
    ray.beta = beta_grid[bi];
    ray.boundary = std::abs(std::abs(ray.beta) - theta) <= 1e-12;
    const double first = table.norms(bi, 0);
    double max_norm = 0.0;
    for (size_t ti = 0; ti < t_grid.size(); ++ti) {
      max_norm = std::max(max_norm, table.norms(bi, ti));
    }
    ray.bounded = max_norm <= std::max(1.0, first) * (1.0 + 1e-9);
    if (!ray.boundary) {
      ray.complement_decaying = true;
      for (size_t ti = 1; ti < t_grid.size(); ++ti) {
        if (table.complement_norms(bi, ti) >= table.complement_norms(bi, ti - 1)) {
          ray.complement_decaying = false;
        }
      }
    }
    table.rays.push_back(ray);
  }
  return table;
}

}  // namespace sesqui
