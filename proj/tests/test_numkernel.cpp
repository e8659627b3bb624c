#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sesqui/numkernel.hpp"

#include <cmath>
#include <random>

using namespace sesqui;

TEST_CASE("pencil eigensolve: identity pair") {
  const PencilEigs eigs =
      hermitian_pencil_eigs({Matrix::Identity(3, 3), Matrix::Identity(3, 3)});
  for (int i = 0; i < 3; ++i) CHECK(eigs.eigenvalues[i] == doctest::Approx(1.0));
  CHECK(eigs.residual <= 1e-12);
}

TEST_CASE("pencil eigensolve: diagonal quotient") {
  Matrix lhs = Matrix::Zero(2, 2), rhs = Matrix::Zero(2, 2);
  lhs.diagonal() << 1.0, 2.0;
  rhs.diagonal() << 2.0, 1.0;
  const PencilEigs eigs = hermitian_pencil_eigs({lhs, rhs});
  CHECK(eigs.eigenvalues[0] == doctest::Approx(0.5));
  CHECK(eigs.eigenvalues[1] == doctest::Approx(2.0));
}

TEST_CASE("pencil eigensolve: random pair matches sampled Rayleigh extremes") {
  std::mt19937_64 rng(42);
  const Matrix lhs = oracles::random_hermitian(5, rng);
  const Matrix rhs = oracles::random_hpd(5, rng);
  const PencilEigs eigs = hermitian_pencil_eigs({lhs, rhs});
  CHECK(eigs.residual <= 1e-10);
  CHECK(eigs.orthonormality_residual <= 1e-10);

  const double sampled_max = oracles::sampled_rayleigh_max(lhs, rhs, 100000, 400, rng);
  const double sampled_min = oracles::sampled_rayleigh_min(lhs, rhs, 100000, 400, rng);
  CHECK(std::abs(eigs.eigenvalues[4] - sampled_max) <= 1e-3);
  CHECK(std::abs(eigs.eigenvalues[0] - sampled_min) <= 1e-3);
  // The computed extremes must bracket every sampled quotient.
  CHECK(sampled_max <= eigs.eigenvalues[4] + 1e-10);
  CHECK(sampled_min >= eigs.eigenvalues[0] - 1e-10);
}

TEST_CASE("pencil eigensolve: error paths") {
  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(hermitian_pencil_eigs({Matrix::Identity(2, 2), indefinite}),
                  DefinitenessError);

  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  skew(1, 0) = -1.0;
  CHECK_THROWS_AS(hermitian_pencil_eigs({skew, Matrix::Identity(2, 2)}), SymmetryError);
}

TEST_CASE("pencil eigensolve: spectrum invariant under congruence") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(trial % 5);
    const Matrix lhs = oracles::random_hermitian(n, rng);
    const Matrix rhs = oracles::random_hpd(n, rng);
    Matrix c = oracles::random_complex_matrix(n, n, rng);
    c += 3.0 * Matrix::Identity(n, n);  // keep it invertible

    const PencilEigs base = hermitian_pencil_eigs({lhs, rhs});
    const PencilEigs congruent = hermitian_pencil_eigs(
        {hermitian_part(c.adjoint() * lhs * c), hermitian_part(c.adjoint() * rhs * c)});
    for (Index i = 0; i < n; ++i) {
      CHECK(std::abs(base.eigenvalues[i] - congruent.eigenvalues[i]) <=
            1e-8 * std::max(1.0, std::abs(base.eigenvalues[i])));
    }
  }
}

TEST_CASE("general eigensolve: diagonal and rotation generator") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = Complex(2.0, 1.0);
  const EigenDecomposition diag_eigs = general_eigs(d);
  CHECK(std::abs(diag_eigs.eigenvalues[0] - Complex(1.0, 0.0)) <= 1e-12);
  CHECK(std::abs(diag_eigs.eigenvalues[1] - Complex(2.0, 1.0)) <= 1e-12);

  Matrix rot = Matrix::Zero(2, 2);
  rot(0, 1) = 1.0;
  rot(1, 0) = -1.0;
  const EigenDecomposition rot_eigs = general_eigs(rot);
  CHECK(std::abs(rot_eigs.eigenvalues[0] - Complex(0.0, -1.0)) <= 1e-12);
  CHECK(std::abs(rot_eigs.eigenvalues[1] - Complex(0.0, 1.0)) <= 1e-12);
}

TEST_CASE("general eigensolve: matches characteristic polynomial roots") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = oracles::random_complex_matrix(6, 6, rng);
    const EigenDecomposition eigs = general_eigs(a);
    CHECK(eigs.residual <= 1e-9);

    const std::vector<Complex> roots = oracles::poly_roots(oracles::char_poly(a));
    std::vector<Complex> computed;
    for (Index i = 0; i < 6; ++i) computed.push_back(eigs.eigenvalues[i]);
    CHECK(oracles::multiset_match_distance(computed, roots) <= 1e-6);
  }
}

TEST_CASE("matrix exponential: closed forms") {
  CHECK((matrix_exponential(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)).norm() <= 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << -1.0, -2.0;
  const Matrix ed = matrix_exponential(d);
  CHECK(std::abs(ed(0, 0) - std::exp(-1.0)) <= 1e-14);
  CHECK(std::abs(ed(1, 1) - std::exp(-2.0)) <= 1e-14);
  CHECK(std::abs(ed(0, 1)) <= 1e-16);

  Matrix nilpotent = Matrix::Zero(2, 2);
  nilpotent(0, 1) = 1.0;
  const Matrix en = matrix_exponential(nilpotent);
  CHECK(std::abs(en(0, 0) - 1.0) <= 1e-15);
  CHECK(std::abs(en(0, 1) - 1.0) <= 1e-15);
  CHECK(std::abs(en(1, 0)) <= 1e-15);
  CHECK(std::abs(en(1, 1) - 1.0) <= 1e-15);
}

TEST_CASE("matrix exponential: eigendecomposition oracle on diagonalizable input") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    const Matrix a = oracles::random_complex_matrix(5, 5, rng);
    const EigenDecomposition eigs = general_eigs(a);
    Matrix exp_d = Matrix::Zero(5, 5);
    for (Index i = 0; i < 5; ++i) exp_d(i, i) = std::exp(eigs.eigenvalues[i]);
    const Matrix oracle =
        eigs.eigenvectors * exp_d * eigs.eigenvectors.inverse();
    const Matrix computed = matrix_exponential(a);
    CHECK((computed - oracle).norm() <= 1e-9 * std::max(1.0, oracle.norm()));
  }
}

TEST_CASE("matrix exponential: semigroup law") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    Matrix m = oracles::random_complex_matrix(4, 4, rng);
    m *= 5.0 / m.norm();
    std::uniform_real_distribution<double> unif(0.1, 1.9);
    const double s = unif(rng), t = unif(rng);
    const Matrix lhs = matrix_exponential(s * m) * matrix_exponential(t * m);
    const Matrix rhs = matrix_exponential((s + t) * m);
    CHECK((lhs - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("matrix exponential: scale error on extreme norms") {
  CHECK_THROWS_AS(matrix_exponential(Matrix(1e9 * Matrix::Identity(2, 2))), ScaleError);
}

TEST_CASE("weighted operator norm: identity and diagonal") {
  std::mt19937_64 rng(19);
  const Matrix gram = oracles::random_hpd(4, rng);
  CHECK(weighted_operator_norm(Matrix::Identity(4, 4), gram) == doctest::Approx(1.0));

  Matrix t = Matrix::Zero(2, 2);
  t.diagonal() << 2.0, 3.0;
  CHECK(weighted_operator_norm(t, Matrix::Identity(2, 2)) == doctest::Approx(3.0));
}

TEST_CASE("weighted operator norm: sampling supremum oracle") {
  std::mt19937_64 rng(23);
  const Matrix t = oracles::random_complex_matrix(3, 3, rng);
  const Matrix gram = oracles::random_hpd(3, rng);
  const double norm = weighted_operator_norm(t, gram);

  auto negative_gain = [&](const Vector& u) {
    const Vector tu = t * u;
    const double num = (tu.adjoint() * gram * tu)(0, 0).real();
    const double den = (u.adjoint() * gram * u)(0, 0).real();
    return -std::sqrt(num / den);
  };
  const double sup = -oracles::sphere_minimize(negative_gain, gram, 3, 10000, 600, rng);
  CHECK(norm >= sup - 1e-10);
  CHECK(std::abs(norm - sup) <= 1e-6);
}

TEST_CASE("weighted operator norm: euclidean gram reduces to the largest singular value") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix t = oracles::random_complex_matrix(5, 5, rng);
    Eigen::JacobiSVD<Matrix> svd(t);
    CHECK(std::abs(weighted_operator_norm(t, Matrix::Identity(5, 5)) -
                   svd.singularValues()[0]) <= 1e-10 * svd.singularValues()[0]);
  }
}

TEST_CASE("lyapunov solve: closed forms") {
  const LyapunovSolution identity = lyapunov_solve(Matrix::Identity(3, 3), Matrix::Identity(3, 3));
  CHECK((identity.p - 0.5 * Matrix::Identity(3, 3)).norm() <= 1e-12);

  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  const LyapunovSolution diag = lyapunov_solve(a, Matrix::Identity(2, 2));
  CHECK(std::abs(diag.p(0, 0) - 0.5) <= 1e-12);
  CHECK(std::abs(diag.p(1, 1) - 0.25) <= 1e-12);
}

TEST_CASE("lyapunov solve: random stable input") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = oracles::random_complex_matrix(4, 4, rng);
    const EigenDecomposition eigs = general_eigs(a);
    double min_re = eigs.eigenvalues[0].real();
    for (Index i = 0; i < 4; ++i) min_re = std::min(min_re, eigs.eigenvalues[i].real());
    a += (0.5 - std::min(0.0, min_re)) * Matrix::Identity(4, 4);

    const Matrix q = oracles::random_hpd(4, rng);
    const LyapunovSolution sol = lyapunov_solve(a, q);
    CHECK(sol.residual <= 1e-10);
    Eigen::LLT<Matrix> llt(sol.p);
    CHECK(llt.info() == Eigen::Success);

    // Re(u* P a u) = u* q u / 2 for every u.
    for (int k = 0; k < 50; ++k) {
      const Vector u = oracles::random_complex_vector(4, rng);
      const double got = (u.adjoint() * sol.p * a * u)(0, 0).real();
      const double want = 0.5 * (u.adjoint() * q * u)(0, 0).real();
      CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("lyapunov solve: spectral margin error on the imaginary axis") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;  // spectrum {i, -i}
  CHECK_THROWS_AS(lyapunov_solve(a, Matrix::Identity(2, 2)), SpectralMarginError);
}

TEST_CASE("matrix exponential: full accuracy up to norm 50 on normal input") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 5;
    Eigen::HouseholderQR<Matrix> qr(oracles::random_complex_matrix(n, n, rng));
    const Matrix q = qr.householderQ();
    Vector d(n);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (Index i = 0; i < n; ++i) d[i] = Complex(20.0 * unif(rng), 20.0 * unif(rng));
    const Matrix a = q * d.asDiagonal() * q.adjoint();  // normal, norm <= ~40

    Matrix exact_diag = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) exact_diag(i, i) = std::exp(d[i]);
    const Matrix exact = q * exact_diag * q.adjoint();
    const Matrix computed = matrix_exponential(a);
    CHECK((computed - exact).norm() <= 1e-12 * exact.norm());
  }
}
