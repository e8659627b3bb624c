#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace sesqui {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Module-level tolerance constants. Operations report achieved residuals;
// these are the defaults used for input validation and internal checks.
inline constexpr double kAbsTol = 1e-10;
inline constexpr double kRelTol = 1e-8;
// Relative SVD cutoff for rank decisions (kernels, dense-range checks).
inline constexpr double kRankTol = 1e-12;
// Eigenvalues closer to a split/defect threshold than this trigger
// tie handling.
inline constexpr double kTieTol = 1e-12;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A matrix required to be Hermitian positive definite is not.
struct DefinitenessError : Error {
  using Error::Error;
};

// A matrix required to be Hermitian deviates beyond tolerance.
struct SymmetryError : Error {
  using Error::Error;
};

// An iterative kernel failed to converge.
struct ConvergenceError : Error {
  using Error::Error;
};

// Input magnitude outside the supported range (e.g. exp overflow).
struct ScaleError : Error {
  using Error::Error;
};

// Spectrum touches a line it must stay clear of (Lyapunov, renorming).
struct SpectralMarginError : Error {
  using Error::Error;
};

// Embedding matrix is not of full row rank (no dense range).
struct DenseRangeError : Error {
  using Error::Error;
};

// The kernel-restriction condition fails; the associated operator
// is not well defined and no convention is substituted.
struct IllPosedAssociationError : Error {
  using Error::Error;
};

// An eigenvalue sits on a requested spectral cut.
struct TieError : Error {
  using Error::Error;
};

// Not enough data for a requested fit.
struct FitError : Error {
  using Error::Error;
};

// Precondition violation on user-supplied data.
struct InputError : Error {
  using Error::Error;
};

// Two redundant computations of the same quantity disagree.
struct ConsistencyError : Error {
  using Error::Error;
};

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline Matrix skew_part(const Matrix& m) { return 0.5 * (m - m.adjoint()); }

inline bool is_hermitian(const Matrix& m, double rel_tol = kRelTol) {
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= rel_tol * scale;
}

}  // namespace sesqui
