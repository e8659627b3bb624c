#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sesqui/association.hpp"
#include "sesqui/coercivity.hpp"
#include "sesqui/gallery.hpp"
#include "sesqui/numkernel.hpp"
#include "sesqui/semigroup.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sesqui;

namespace {

AssociatedOperator operator_from_matrix(const Matrix& a) {
  const Index n = a.rows();
  const FormTriple triple = build_triple(Matrix::Identity(n, n), Matrix::Identity(n, n),
                                         Matrix::Identity(n, n), a);
  return associate(triple);
}

std::vector<double> uniform_grid(double from, double to, int points) {
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    grid.push_back(from + (to - from) * static_cast<double>(i) / (points - 1));
  }
  return grid;
}

}  // namespace

TEST_CASE("semigroup sample: closed forms") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  const AssociatedOperator op = operator_from_matrix(a);
  CHECK((semigroup_sample(op, Complex(0, 0)) - Matrix::Identity(2, 2)).norm() <= 1e-15);
  const Matrix s1 = semigroup_sample(op, 1.0);
  CHECK(std::abs(s1(0, 0) - std::exp(-1.0)) <= 1e-14);
  CHECK(std::abs(s1(1, 1) - std::exp(-2.0)) <= 1e-14);
}

TEST_CASE("semigroup sample: unitary group of the diagonal gallery problem") {
  const auto problem = gallery::diagonal({1.0, 2.0, 3.0, 5.5});
  const AssociatedOperator op = associate(problem.triple);
  for (double t : {0.3, 1.0, 4.0, 9.0}) {
    const double norm = weighted_operator_norm(semigroup_sample(op, t),
                                               problem.triple.space_h.gram);
    CHECK(std::abs(norm - 1.0) <= 1e-10);
  }
}

TEST_CASE("semigroup law on complex arguments") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    Matrix a = oracles::random_complex_matrix(4, 4, rng);
    a *= 3.0 / a.norm();
    const AssociatedOperator op = operator_from_matrix(a);
    const Complex z1 = std::polar(1.3, 0.4), z2 = std::polar(0.7, -0.9);
    const Matrix lhs = semigroup_sample(op, z1) * semigroup_sample(op, z2);
    const Matrix rhs = semigroup_sample(op, z1 + z2);
    CHECK((lhs - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("growth report: scalar decay and quasi-contraction constants") {
  const AssociatedOperator op = operator_from_matrix(Matrix::Identity(3, 3));
  const SemigroupAnalysis analysis = growth_report(op, uniform_grid(0.1, 10.0, 16));
  CHECK(analysis.omega == doctest::Approx(-1.0));
  CHECK(analysis.quasi_contraction_w == doctest::Approx(-1.0).epsilon(1e-9));
  REQUIRE(analysis.certificate.has_value());
  CHECK(analysis.certificate->holds);
}

TEST_CASE("growth report: coercive FEM triple satisfies the alpha over c_H^2 certificate") {
  const auto problem = gallery::schrodinger1d(1.0, 60, gallery::BoundaryKind::Neumann,
                                              gallery::PotentialSpec{1.0, 0.0, 0.0, 0.0});
  const AssociatedOperator op = associate(problem.triple);
  const SemigroupAnalysis analysis = growth_report(op, uniform_grid(0.1, 10.0, 16));
  REQUIRE(analysis.certificate.has_value());
  CHECK(analysis.certificate->epsilon > 0.0);
  CHECK(analysis.certificate->holds);
  CHECK(analysis.certificate->worst_margin >= -1e-9);
}

TEST_CASE("growth report: unitary diagonal problem has zero growth") {
  const auto problem = gallery::diagonal({1.0, 2.0, 4.0});
  const AssociatedOperator op = associate(problem.triple);
  const SemigroupAnalysis analysis = growth_report(op, uniform_grid(0.1, 10.0, 16));
  CHECK(std::abs(analysis.omega) <= 1e-12);
  CHECK(std::abs(analysis.quasi_contraction_w) <= 1e-10);
}

TEST_CASE("spectral split: diagonal cases") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << -1.0, 2.0, 3.0;
  const AssociatedOperator op = operator_from_matrix(a);
  const SpectralSplit split = spectral_split(op, 0.0);
  CHECK(split.dim_x1 == 1);
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = 1.0;
  CHECK((split.projector - expected).norm() <= 1e-12);
  CHECK(split.complement_growth == doctest::Approx(-2.0));

  const SpectralSplit empty = spectral_split(op, -5.0);
  CHECK(empty.dim_x1 == 0);
  CHECK(empty.projector.norm() <= 1e-14);
}

TEST_CASE("spectral split: synthetic spectrum with known projector rank") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = 6;
    Matrix v = oracles::random_complex_matrix(n, n, rng) + 3.0 * Matrix::Identity(n, n);
    Matrix d = Matrix::Zero(n, n);
    d.diagonal() << Complex(-2.0, 0.3), Complex(-0.5, -1.0), Complex(0.7, 0.2),
        Complex(1.5, 0.0), Complex(2.5, -0.7), Complex(4.0, 1.0);
    const Matrix a = v * d * Eigen::PartialPivLU<Matrix>(v).inverse();
    const AssociatedOperator op = operator_from_matrix(a);
    const SpectralSplit split = spectral_split(op, 0.1);
    CHECK(split.dim_x1 == 2);
    CHECK(split.idempotency_residual <= 1e-9);
    CHECK(split.commutation_residual <= 1e-9);
    CHECK(split.complement_growth == doctest::Approx(-0.7).epsilon(1e-9));
  }
}

TEST_CASE("spectral split: tie error on the cut") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  CHECK_THROWS_AS(spectral_split(operator_from_matrix(a), 1.0), TieError);
}

TEST_CASE("essential growth: diagonal example") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << -1.0, 2.0, 3.0;
  const AssociatedOperator op = operator_from_matrix(a);
  const SpectralSplit split = spectral_split(op, 0.0);
  const SemigroupAnalysis analysis = essential_growth(op, split, uniform_grid(0.1, 10.0, 16));
  CHECK(analysis.omega_ess == doctest::Approx(-2.0));
  CHECK(std::abs(analysis.omega_ess_fit - analysis.omega_ess) <= 1e-4);
  CHECK(analysis.asymptotically_compact);
  CHECK(analysis.complement_radius_s1 == doctest::Approx(std::exp(-2.0)));
  CHECK(analysis.omega == doctest::Approx(1.0));  // the -1 mode grows
  CHECK(analysis.omega == doctest::Approx(std::max(split.x1_growth, analysis.omega_ess)));
}

TEST_CASE("essential growth: bounded group is never asymptotically compact") {
  const auto problem = gallery::diagonal({1.0, 2.0, 3.0});
  const AssociatedOperator op = associate(problem.triple);
  const SpectralSplit split = spectral_split(op, -1.0);
  CHECK(split.dim_x1 == 0);
  const SemigroupAnalysis analysis = essential_growth(op, split, uniform_grid(0.1, 10.0, 16));
  CHECK(std::abs(analysis.omega_ess) <= 1e-12);
  CHECK_FALSE(analysis.asymptotically_compact);
  CHECK(analysis.complement_radius_s1 == doctest::Approx(1.0));
}

TEST_CASE("essential growth: full split leaves nothing") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  const AssociatedOperator op = operator_from_matrix(a);
  const SpectralSplit split = spectral_split(op, 3.0);
  CHECK(split.dim_x1 == 2);
  const SemigroupAnalysis analysis = essential_growth(op, split, uniform_grid(0.1, 10.0, 8));
  CHECK(analysis.asymptotically_compact);
  CHECK(analysis.complement_radius_s1 == 0.0);
}

TEST_CASE("perturbation invariance: zero perturbation gives identical reports") {
  const auto problem = gallery::schrodinger1d(1.0, 40, gallery::BoundaryKind::Dirichlet,
                                              gallery::PotentialSpec{});
  const Matrix zero = Matrix::Zero(40, 40);
  // The complement decays at rate ~40; keep times small enough that the
  // norms stay above the fit's rounding floor.
  const PerturbationInvarianceReport report =
      perturbation_invariance_check(problem.triple, zero, 20.0, uniform_grid(0.01, 0.25, 16));
  CHECK(report.omega_ess_base == doctest::Approx(report.omega_ess_perturbed));
  CHECK(report.dim_x1_base == report.dim_x1_perturbed);
  CHECK(report.unmatched_base.empty());
  CHECK(report.unmatched_perturbed.empty());
}

TEST_CASE("perturbation invariance: synthetic crossing changes only the split dimension") {
  // Diagonal triple with an eigenvalue just left of the cut; the rank-1
  // perturbation pushes it across.
  const Index n = 8;
  Matrix f = Matrix::Zero(n, n);
  f.diagonal() << -0.2, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0;
  const FormTriple triple = build_triple(Matrix::Identity(n, n), Matrix::Identity(n, n),
                                         Matrix::Identity(n, n), f);
  Matrix k = Matrix::Zero(n, n);
  k(0, 0) = 0.5;  // rank 1, pushes -0.2 to +0.3
  const PerturbationInvarianceReport report =
      perturbation_invariance_check(triple, k, 0.0, uniform_grid(0.1, 10.0, 16));
  CHECK(report.dim_x1_base == 1);
  CHECK(report.dim_x1_perturbed == 0);
  CHECK(std::abs(report.omega_ess_base - (-1.0)) <= 1e-9);
  CHECK(std::abs(report.omega_ess_perturbed - (-0.3)) <= 1e-9);
  // The crossed eigenvalue is the only unmatched complement point.
  CHECK(report.unmatched_base.empty());
  REQUIRE(report.unmatched_perturbed.size() == 1);
  CHECK(std::abs(report.unmatched_perturbed[0] - Complex(0.3, 0.0)) <= 1e-9);
}

TEST_CASE("perturbation invariance: rank restriction") {
  const Index n = 8;
  const FormTriple triple = build_triple(Matrix::Identity(n, n), Matrix::Identity(n, n),
                                         Matrix::Identity(n, n), Matrix::Identity(n, n));
  CHECK_THROWS_AS(perturbation_invariance_check(triple, Matrix::Identity(n, n), 0.5,
                                                uniform_grid(0.1, 10.0, 16)),
                  InputError);
}

TEST_CASE("contractive renorming: identity and the classic non-normal block") {
  const AssociatedOperator id_op = operator_from_matrix(Matrix::Identity(2, 2));
  const RenormingCertificate id_cert =
      contractive_renorming(id_op, 0.5, uniform_grid(0.1, 10.0, 16));
  CHECK((id_cert.p - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK(id_cert.contractive);

  Matrix jordan(2, 2);
  jordan << 1.0, 10.0, 0.0, 1.0;
  const AssociatedOperator op = operator_from_matrix(jordan);
  // Euclidean contractivity fails immediately.
  const double euclidean = weighted_operator_norm(semigroup_sample(op, 0.1),
                                                  Matrix::Identity(2, 2));
  CHECK(euclidean > 1.0);
  const RenormingCertificate cert =
      contractive_renorming(op, 0.9, uniform_grid(0.1, 10.0, 16));
  CHECK(cert.contractive);
  CHECK(cert.herm_identity_residual <= 1e-10);
  CHECK(cert.min_sample_re >= 0.0);
}

TEST_CASE("contractive renorming: random stable matrices with margin") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = oracles::random_complex_matrix(5, 5, rng);
    const EigenDecomposition eigs = general_eigs(a);
    double min_re = eigs.eigenvalues[0].real();
    for (Index i = 0; i < 5; ++i) min_re = std::min(min_re, eigs.eigenvalues[i].real());
    a += (0.3 - min_re) * Matrix::Identity(5, 5);
    const AssociatedOperator op = operator_from_matrix(a);
    const RenormingCertificate cert =
        contractive_renorming(op, 0.29, uniform_grid(0.1, 10.0, 16), trial);
    CHECK(cert.contractive);
    CHECK(cert.lyapunov_residual <= 1e-10);
    CHECK(cert.min_sample_re >= 0.0);
  }
}

TEST_CASE("contractive renorming: refuses spectra near the axis") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 0.05, 1.0;
  CHECK_THROWS_AS(contractive_renorming(operator_from_matrix(a), 0.5,
                                        uniform_grid(0.1, 10.0, 16)),
                  SpectralMarginError);
}

TEST_CASE("renorming reconstructs the operator on the renormed pivot space") {
  std::mt19937_64 rng(13);
  Matrix a = oracles::random_complex_matrix(4, 4, rng);
  const EigenDecomposition eigs = general_eigs(a);
  double min_re = eigs.eigenvalues[0].real();
  for (Index i = 0; i < 4; ++i) min_re = std::min(min_re, eigs.eigenvalues[i].real());
  a += (0.5 - min_re) * Matrix::Identity(4, 4);

  const AssociatedOperator op = operator_from_matrix(a);
  const RenormingCertificate cert =
      contractive_renorming(op, 0.45, uniform_grid(0.5, 5.0, 8));

  // Rebuild the form u, v -> v* P A u over the pivot space (H, P).
  const Matrix p = cert.p;
  const FormTriple renormed = build_triple(p, p, Matrix::Identity(4, 4), Matrix(p * a));
  const AssociatedOperator rebuilt = associate(renormed);
  CHECK((rebuilt.matrix - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
}

TEST_CASE("sector scan: scalar ray decay in closed form") {
  const AssociatedOperator op = operator_from_matrix(Matrix::Identity(1, 1));
  const SpectralSplit split = spectral_split(op, 0.5);
  const std::vector<double> t_grid = uniform_grid(0.2, 4.0, 8);
  const double beta = std::numbers::pi / 4.0;
  const SectorScanTable table =
      sector_scan(op, split, std::numbers::pi / 3.0, t_grid, {0.0, beta});
  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    CHECK(std::abs(table.norms(1, ti) - std::exp(-t_grid[ti] * std::cos(beta))) <= 1e-12);
  }
  CHECK(table.rays[0].complement_decaying);
  CHECK(table.rays[1].complement_decaying);
}

TEST_CASE("sector scan: rotated unitary problem is bounded on boundary rays") {
  // Rotating the diagonal form by -pi/2 gives the positive diagonal
  // generator whose semigroup is bounded on the closed right half-plane.
  const auto problem = gallery::diagonal({1.0, 2.0, 3.0, 4.0});
  Matrix rotated_form = std::polar(1.0, -0.5 * std::numbers::pi) * problem.triple.form;
  const FormTriple triple = build_triple(problem.triple.space_v.gram,
                                         problem.triple.space_h.gram,
                                         problem.triple.j.matrix, rotated_form);
  const AssociatedOperator op = associate(triple);
  const SpectralSplit split = spectral_split(op, 1.5);
  const double theta = 0.5 * std::numbers::pi;
  const std::vector<double> t_grid = uniform_grid(0.3, 6.0, 8);
  const SectorScanTable table =
      sector_scan(op, split, theta, t_grid, {-theta, 0.0, std::numbers::pi / 4.0, theta});

  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    CHECK(std::abs(table.norms(0, ti) - 1.0) <= 1e-10);  // boundary ray -pi/2
    CHECK(std::abs(table.norms(3, ti) - 1.0) <= 1e-10);  // boundary ray +pi/2
  }
  CHECK(table.rays[0].boundary);
  CHECK(table.rays[0].bounded);
  CHECK(table.rays[3].boundary);
  CHECK(table.rays[3].bounded);
  CHECK(table.rays[1].complement_decaying);
  CHECK(table.rays[2].complement_decaying);
}

TEST_CASE("sector scan: sectorial triple is contractive on both boundary rays") {
  std::mt19937_64 rng(17);
  const Index n = 5;
  // Strictly sectorial accretive form: Herm part HPD, skew part dominated.
  const Matrix root = oracles::random_complex_matrix(n, n, rng);
  const Matrix h = hermitian_part(root * root.adjoint()) + 0.2 * Matrix::Identity(n, n);
  Matrix s = oracles::random_hermitian(n, rng);
  Eigen::JacobiSVD<Matrix> svd(s);
  s *= 0.5 / svd.singularValues()[0];
  Eigen::SelfAdjointEigenSolver<Matrix> hsolve(h);
  const Matrix h_half = hsolve.operatorSqrt();
  const Matrix f = h + Complex(0, 1) * (h_half * s * h_half);

  const FormTriple triple = build_triple(Matrix::Identity(n, n), Matrix::Identity(n, n),
                                         Matrix::Identity(n, n), f);
  const FormClassification cls = classify(triple);
  REQUIRE(cls.sector.has_value());
  CHECK(cls.sector->shift_w == 0.0);
  const double theta_semigroup = 0.5 * std::numbers::pi - cls.sector->half_angle;
  REQUIRE(theta_semigroup > 0.0);

  const AssociatedOperator op = associate(triple);
  const SpectralSplit split = spectral_split(op, 0.05);
  const SectorScanTable table = sector_scan(op, split, theta_semigroup,
                                            uniform_grid(0.2, 5.0, 8),
                                            {-theta_semigroup, theta_semigroup});
  for (Index bi = 0; bi < 2; ++bi) {
    for (Index ti = 0; ti < 8; ++ti) {
      CHECK(table.norms(bi, ti) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("sector scan: rays outside the sector are rejected") {
  const AssociatedOperator op = operator_from_matrix(Matrix::Identity(2, 2));
  const SpectralSplit split = spectral_split(op, 0.5);
  CHECK_THROWS_AS(sector_scan(op, split, 0.5, uniform_grid(0.1, 1.0, 4), {0.0, 0.7}),
                  InputError);
}

TEST_CASE("coercive families are asymptotically compact with isolated left spectrum") {
  using namespace gallery;
  const double delta_shift = 1.0;
  std::vector<std::vector<GalleryProblem>> families;
  families.push_back(schrodinger_family(1.0, {40, 80, 160}, BoundaryKind::Neumann,
                                        PotentialSpec{1.0, 0.0, 0.0, 0.0}, 0.0));
  families.push_back(schrodinger_family(1.0, {40, 80, 160}, BoundaryKind::Neumann,
                                        PotentialSpec{0.0, -50.0, 1.0 / 3, 2.0 / 3},
                                        delta_shift));
  families.push_back(drift_family(8.0, {40, 80, 160}, PotentialSpec{0.0, 0.1, 1.0, 2.0},
                                  PotentialSpec{}, true, delta_shift, false));

  for (const auto& family : families) {
    const FamilyVerdict verdict = family_verdict(triples_of(family), 1e-4);
    REQUIRE(verdict.verdict == FamilyVerdictKind::EssentiallyPositiveCoercive);
    const Index k = verdict.stable_defect;

    for (const GalleryProblem& problem : family) {
      const AssociatedOperator op = associate(problem.triple);
      const SpectralSplit split = spectral_split(op, 0.0);
      CHECK(split.dim_x1 <= k + 2);

      const SemigroupAnalysis analysis =
          essential_growth(op, split, {0.1, 0.5, 1.0, 1.5, 2.0});
      CHECK(analysis.omega_ess < -1e-3);
      CHECK(analysis.asymptotically_compact);

      // Eigenvalues left of the floor stay isolated from the complement.
      if (split.dim_x1 > 0) {
        CHECK(-split.x1_growth <= 0.0);
        CHECK(-split.complement_growth - (-split.x1_growth) >= 0.5);
      }
    }
  }
}
