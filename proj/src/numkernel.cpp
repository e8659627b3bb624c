#include "sesqui/numkernel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace sesqui {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw InputError(os.str());
  }
  if (!m.allFinite()) {
    throw InputError(std::string(what) + ": non-finite entries");
  }
}

void require_hermitian(const Matrix& m, const char* what) {
  if (!is_hermitian(m)) {
    std::ostringstream os;
    os << what << ": deviation from Hermitian symmetry "
       << (m - m.adjoint()).norm() << " exceeds tolerance";
    throw SymmetryError(os.str());
  }
}

}  // namespace

void require_hpd(const Matrix& m, const char* what) {
  require_square(m, what);
  require_hermitian(m, what);
  Eigen::LLT<Matrix> llt(hermitian_part(m));
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError(std::string(what) + ": matrix is not positive definite");
  }
}

PencilEigs hermitian_pencil_eigs(const HermitianPencil& pencil) {
  require_square(pencil.lhs, "hermitian_pencil_eigs(lhs)");
  require_hermitian(pencil.lhs, "hermitian_pencil_eigs(lhs)");
  require_hpd(pencil.rhs, "hermitian_pencil_eigs(rhs)");
  if (pencil.lhs.rows() != pencil.rhs.rows()) {
    throw InputError("hermitian_pencil_eigs: dimension mismatch between lhs and rhs");
  }

  const Matrix lhs = hermitian_part(pencil.lhs);
  const Matrix rhs = hermitian_part(pencil.rhs);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(lhs, rhs, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("hermitian_pencil_eigs: generalized eigensolver failed");
  }

  PencilEigs out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();

  const double lhs_norm = lhs.norm();
  const double rhs_norm = rhs.norm();
  double worst = 0.0;
  for (Index i = 0; i < out.eigenvalues.size(); ++i) {
    const Vector v = out.eigenvectors.col(i);
    const double r = (lhs * v - out.eigenvalues[i] * (rhs * v)).norm();
    const double scale = lhs_norm + std::abs(out.eigenvalues[i]) * rhs_norm;
    worst = std::max(worst, r / std::max(1.0, scale));
  }
  out.residual = worst;
  out.orthonormality_residual =
      (out.eigenvectors.adjoint() * rhs * out.eigenvectors - Matrix::Identity(lhs.rows(), lhs.cols())).norm();
  return out;
}

EigenDecomposition general_eigs(const Matrix& m) {
  require_square(m, "general_eigs");
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("general_eigs: QR iteration did not converge");
  }

  const Index n = m.rows();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector raw = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (raw[a].real() != raw[b].real()) return raw[a].real() < raw[b].real();
    return raw[a].imag() < raw[b].imag();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = raw[order[static_cast<size_t>(i)]];
    out.eigenvectors.col(i) = solver.eigenvectors().col(order[static_cast<size_t>(i)]).normalized();
  }

  const double m_norm = std::max(1e-300, m.norm());
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Vector v = out.eigenvectors.col(i);
    worst = std::max(worst, (m * v - out.eigenvalues[i] * v).norm());
  }
  out.residual = worst / m_norm;
  return out;
}

ExpInfo matrix_exponential_info(const Matrix& m) {
  require_square(m, "matrix_exponential");
  const Index n = m.rows();
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 > kExpNormLimit) {
    std::ostringstream os;
    os << "matrix_exponential: 1-norm " << norm1 << " exceeds limit " << kExpNormLimit;
    throw ScaleError(os.str());
  }

  ExpInfo info;
  info.squarings = 0;
  if (norm1 > kExpPadeTheta) {
    info.squarings = static_cast<int>(std::ceil(std::log2(norm1 / kExpPadeTheta)));
  }
  const Matrix a = m / std::pow(2.0, info.squarings);
  info.scaled_norm = norm1 / std::pow(2.0, info.squarings);

  // Order-13 diagonal Pade coefficients.
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};

  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix ident = Matrix::Identity(n, n);

  const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                        b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                   b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  Eigen::PartialPivLU<Matrix> lu(v - u);
  Matrix r = lu.solve(v + u);
  for (int s = 0; s < info.squarings; ++s) r = r * r;
  info.value = std::move(r);
  return info;
}

Matrix matrix_exponential(const Matrix& m) { return matrix_exponential_info(m).value; }

double weighted_operator_norm(const Matrix& op, const Matrix& gram) {
  require_square(op, "weighted_operator_norm(op)");
  require_hpd(gram, "weighted_operator_norm(gram)");
  if (op.rows() != gram.rows()) {
    throw InputError("weighted_operator_norm: dimension mismatch");
  }
  // With G = L L*, the norm is sigma_max(L* op L^{-*}), computed as the
  // root of the largest eigenvalue of M* M.
  Eigen::LLT<Matrix> llt(hermitian_part(gram));
  const Matrix x = llt.matrixL().adjoint() * op;
  const Matrix m = llt.matrixL().solve(x.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> eigs(hermitian_part(m.adjoint() * m),
                                             Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eigs.eigenvalues().maxCoeff()));
}

LyapunovSolution lyapunov_solve(const Matrix& a, const Matrix& q) {
  require_square(a, "lyapunov_solve(a)");
  require_hpd(q, "lyapunov_solve(q)");
  if (a.rows() != q.rows()) {
    throw InputError("lyapunov_solve: dimension mismatch");
  }

  const EigenDecomposition spec = general_eigs(a);
  double min_re = spec.eigenvalues[0].real();
  for (Index i = 0; i < spec.eigenvalues.size(); ++i) {
    min_re = std::min(min_re, spec.eigenvalues[i].real());
  }
  if (min_re <= kAbsTol * std::max(1.0, a.norm())) {
    std::ostringstream os;
    os << "lyapunov_solve: spectral abscissa margin " << min_re
       << " touches the imaginary axis";
    throw SpectralMarginError(os.str());
  }

  // Bartels-Stewart on the complex Schur form: a = U T U*, T upper
  // triangular. With Pt = U* P U, Qt = U* q U the equation becomes
  // T* Pt + Pt T = Qt, solved column by column by forward substitution.
  Eigen::ComplexSchur<Matrix> schur(a);
  if (schur.info() != Eigen::Success) {
    throw ConvergenceError("lyapunov_solve: Schur decomposition failed");
  }
  const Matrix& t = schur.matrixT();
  const Matrix& u = schur.matrixU();
  const Index n = a.rows();
  const Matrix qt = u.adjoint() * q * u;

  Matrix pt = Matrix::Zero(n, n);
  const Matrix t_adj = t.adjoint();
  for (Index j = 0; j < n; ++j) {
    Vector rhs = qt.col(j);
    for (Index k = 0; k < j; ++k) rhs -= pt.col(k) * t(k, j);
    // (T* + t_jj I) is lower triangular with diagonal conj(t_ii) + t_jj.
    Vector col(n);
    for (Index i = 0; i < n; ++i) {
      Complex acc = rhs[i];
      for (Index k = 0; k < i; ++k) acc -= t_adj(i, k) * col[k];
      col[i] = acc / (t_adj(i, i) + t(j, j));
    }
    pt.col(j) = col;
  }

  LyapunovSolution out;
  out.p = hermitian_part(u * pt * u.adjoint());
  out.residual = (a.adjoint() * out.p + out.p * a - q).norm() / std::max(1e-300, q.norm());
  return out;
}

}  // namespace sesqui
