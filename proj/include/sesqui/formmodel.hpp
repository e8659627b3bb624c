#pragma once

#include "sesqui/types.hpp"

#include <optional>
#include <string>

namespace sesqui {

// Galerkin trial space: dimension and the Gram matrix of its basis in the
// V inner product.
struct GalerkinSpace {
  Index dim = 0;
  Matrix gram;
  std::string label;
};

// Pivot space H with its Gram matrix.
struct PivotSpace {
  Index dim = 0;
  Matrix gram;
};

// Coordinates of the embedding j : V -> H. Full row rank is required
// (finite-dimensional surrogate of dense range); injective means full
// column rank as well, i.e. a square invertible matrix.
struct EmbeddingMap {
  Matrix matrix;
  bool injective = false;
};

// The central object: a sesquilinear form on V together with the pivot
// space and embedding. Convention: form(k, l) = a(phi_l, phi_k), so that
// a(u, v) = v* F u on coordinate vectors. continuity is the smallest M
// with |a(u,v)| <= M ||u||_V ||v||_V.
struct FormTriple {
  GalerkinSpace space_v;
  PivotSpace space_h;
  EmbeddingMap j;
  Matrix form;
  double continuity = 0.0;
};

struct ShiftedForm {
  FormTriple base;
  Complex lambda;
  Matrix form;  // base.form - lambda * J^* M_H J, exactly
};

struct SectorFit {
  double shift_w = 0.0;
  double half_angle = 0.0;  // theta in [0, pi/2]
};

struct FormClassification {
  bool symmetric = false;
  bool accretive = false;
  std::optional<SectorFit> sector;
  bool kernel_condition = false;
};

// Orthonormal splitting of coordinate space from the SVD of J: w1 spans
// the complement of ker(J) (dimension = rank), w2 spans ker(J).
struct EmbeddingSplit {
  Matrix u;          // m x r left singular vectors
  RealVector sigma;  // r positive singular values
  Matrix w1;         // n x r
  Matrix w2;         // n x (n - r)
  Index rank = 0;
};

EmbeddingSplit split_embedding(const Matrix& j_matrix);

FormTriple build_triple(const Matrix& gram_v, const Matrix& gram_h,
                        const Matrix& j_matrix, const Matrix& form_matrix,
                        std::string label = {});

ShiftedForm shift_form(const FormTriple& triple, Complex lambda);
ShiftedForm shift_form(const ShiftedForm& shifted, Complex lambda);

// The shifted form packaged as a full triple (continuity recomputed).
FormTriple shifted_triple(const ShiftedForm& shifted);

// Restriction of the form to ker(J) is nonsingular; hypothesis for the
// associated operator to be well defined. Vacuously true if J injective.
bool kernel_condition_holds(const FormTriple& triple);

FormClassification classify(const FormTriple& triple);

Complex form_value(const FormTriple& triple, const Vector& u, const Vector& v);
double v_norm(const FormTriple& triple, const Vector& u);
double embedded_h_norm(const FormTriple& triple, const Vector& u);

// c_H = sup ||j(u)||_H / ||u||_V, the embedding constant.
double embedding_norm(const FormTriple& triple);

// Grid resolution of the sector fit in classify().
inline constexpr int kSectorAngleGrid = 256;
inline constexpr int kSectorShiftGrid = 11;  // {0} plus 2^{-10}..2^0 times ||F||

}  // namespace sesqui
