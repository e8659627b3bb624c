#pragma once

#include "sesqui/types.hpp"

namespace sesqui {

// Hermitian/HPD matrix pair (L, B) defining the generalized eigenproblem
// L v = mu B v. B is a Gram matrix and must be positive definite.
struct HermitianPencil {
  Matrix lhs;
  Matrix rhs;
};

// Result of hermitian_pencil_eigs: ascending real eigenvalues and a
// rhs-orthonormal eigenvector matrix (V* B V = I), with the achieved
// residual max_i ||L v_i - mu_i B v_i|| / (||L|| + |mu_i| ||B||).
struct PencilEigs {
  RealVector eigenvalues;
  Matrix eigenvectors;
  double residual = 0.0;
  double orthonormality_residual = 0.0;
};

// General (non-Hermitian) eigendecomposition. Eigenvalues are sorted by
// real part ascending, ties by imaginary part ascending; eigenvector
// columns are unit vectors matching that order. residual bounds
// ||M v_i - lambda_i v_i|| <= residual * ||M|| for every pair.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
  double residual = 0.0;
};

struct LyapunovSolution {
  Matrix p;
  double residual = 0.0;
};

struct ExpInfo {
  Matrix value;
  int squarings = 0;
  double scaled_norm = 0.0;
};

void require_hpd(const Matrix& m, const char* what);

// Solves lhs v = mu rhs v for the pencil; throws SymmetryError if lhs is
// not Hermitian to tolerance, DefinitenessError if rhs is not HPD.
PencilEigs hermitian_pencil_eigs(const HermitianPencil& pencil);

EigenDecomposition general_eigs(const Matrix& m);

// exp(m) by scaling-and-squaring with the order-13 diagonal Pade
// approximant. Squaring threshold kExpPadeTheta; inputs with 1-norm
// above kExpNormLimit are rejected with ScaleError.
inline constexpr double kExpPadeTheta = 5.371920351148152;
inline constexpr double kExpNormLimit = 1e8;
Matrix matrix_exponential(const Matrix& m);
ExpInfo matrix_exponential_info(const Matrix& m);

// sup_{u != 0} ||op u||_gram / ||u||_gram, i.e. the operator norm in the
// inner product induced by the HPD matrix gram.
double weighted_operator_norm(const Matrix& op, const Matrix& gram);

// Solves a* P + P a = q for Hermitian positive definite P, assuming all
// eigenvalues of a have strictly positive real part (checked; violations
// raise SpectralMarginError). q must be HPD.
LyapunovSolution lyapunov_solve(const Matrix& a, const Matrix& q);

}  // namespace sesqui
