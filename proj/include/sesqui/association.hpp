#pragma once

#include "sesqui/formmodel.hpp"

#include <cstdint>
#include <vector>

namespace sesqui {

enum class AssociationPath { IdentityEmbedding, Schur, DirectSolve };

// Matrix of the operator A associated with (a, j) in H coordinates,
// together with the triple it came from and the construction path.
struct AssociatedOperator {
  Matrix matrix;
  FormTriple triple;
  AssociationPath path = AssociationPath::IdentityEmbedding;
};

// Builds A from the triple. Square invertible J uses
// A = M_H^{-1} J^{-*} F J^{-1}; otherwise the ker(J) block of F is
// eliminated by a Schur complement in the SVD coordinates of J.
// Throws IllPosedAssociationError when the kernel restriction of the
// form is singular and DenseRangeError when J is rank deficient.
AssociatedOperator associate(const FormTriple& triple);

// Same operator via an explicit complement index set: the listed V basis
// indices span a complement of ker(J) (the natural choice for trace maps,
// where they are the boundary nodes).
AssociatedOperator associate_with_split(const FormTriple& triple,
                                        const std::vector<Index>& complement_indices);

// Independent construction solving the defining graph system
// [F, -J* M_H; J, 0] [u; f] = [0; e_k] per H basis vector e_k.
AssociatedOperator associate_direct(const FormTriple& triple);

// Solves j(u) = x with a(u, v) = 0 for all v in ker(j).
Vector lift(const FormTriple& triple, const Vector& x);

// Checks a(u, v) = <A j(u), j(v)>_H against all basis test vectors on
// sampled x in H; returns the worst relative residual.
double verify_graph(const AssociatedOperator& op, int samples, std::uint64_t seed = 0);

// Triple whose associated operator is the diagonal multiplication
// operator diag(m_values) on the weighted sequence space with weights mu.
FormTriple from_multiplication(const std::vector<double>& m_values,
                               const std::vector<double>& weights);

}  // namespace sesqui
