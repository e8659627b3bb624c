#include "sesqui/association.hpp"

#include "sesqui/numkernel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <random>
#include <sstream>

namespace sesqui {

namespace {

// Shared Schur-elimination core: w1 spans a complement of ker(J), w2
// spans ker(J). With T = J w1, u = w1 y + w2 z and the constraint
// a(u, v) = 0 for v in ker(j), the operator is
// A = M_H^{-1} T^{-*} S T^{-1} with S the Schur complement of the
// w2 block of the form.
Matrix associate_on_split(const FormTriple& triple, const Matrix& w1, const Matrix& w2) {
  const Matrix& f = triple.form;
  const Matrix f11 = w1.adjoint() * f * w1;

  Matrix schur = f11;
  if (w2.cols() > 0) {
    const Matrix f22 = w2.adjoint() * f * w2;
    Eigen::BDCSVD<Matrix> svd(f22);
    const RealVector& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= kRankTol * std::max(1.0, sv[0])) {
      throw IllPosedAssociationError(
          "associate: the form restricted to ker(j) is singular; "
          "the kernel condition fails and no operator is defined");
    }
    const Matrix f12 = w1.adjoint() * f * w2;
    const Matrix f21 = w2.adjoint() * f * w1;
    schur -= f12 * Eigen::PartialPivLU<Matrix>(f22).solve(f21);
  }

  const Matrix t = triple.j.matrix * w1;
  Eigen::PartialPivLU<Matrix> lu_t(t);
  Eigen::PartialPivLU<Matrix> lu_t_adj(Matrix(t.adjoint()));
  const Matrix core = lu_t_adj.solve(schur) * lu_t.inverse();
  Eigen::LLT<Matrix> llt_h(triple.space_h.gram);
  return llt_h.solve(core);
}

void require_dense_range(const FormTriple& triple, const EmbeddingSplit& split) {
  if (split.rank != triple.space_h.dim) {
    throw DenseRangeError("associate: embedding is not of full row rank");
  }
}

}  // namespace

AssociatedOperator associate(const FormTriple& triple) {
  const EmbeddingSplit split = split_embedding(triple.j.matrix);
  require_dense_range(triple, split);

  AssociatedOperator op;
  op.triple = triple;
  const Index n = triple.space_v.dim;
  const Index m = triple.space_h.dim;

  if (split.rank == n && m == n) {
    op.path = AssociationPath::IdentityEmbedding;
    const Matrix& j = triple.j.matrix;
    Eigen::LLT<Matrix> llt_h(triple.space_h.gram);
    if (j.isIdentity(0.0)) {
      op.matrix = llt_h.solve(triple.form);
    } else {
      Eigen::PartialPivLU<Matrix> lu_j(j);
      Eigen::PartialPivLU<Matrix> lu_j_adj(Matrix(j.adjoint()));
      op.matrix = llt_h.solve(lu_j_adj.solve(triple.form) * lu_j.inverse());
    }
    return op;
  }

  op.path = AssociationPath::Schur;
  op.matrix = associate_on_split(triple, split.w1, split.w2);
  return op;
}

AssociatedOperator associate_with_split(const FormTriple& triple,
                                        const std::vector<Index>& complement_indices) {
  const Index n = triple.space_v.dim;
  const Index m = triple.space_h.dim;
  if (static_cast<Index>(complement_indices.size()) != m) {
    throw InputError("associate_with_split: complement must have dim H indices");
  }
  std::vector<bool> in_complement(static_cast<size_t>(n), false);
  for (Index idx : complement_indices) {
    if (idx < 0 || idx >= n) throw InputError("associate_with_split: index out of range");
    in_complement[static_cast<size_t>(idx)] = true;
  }

  Matrix w1 = Matrix::Zero(n, m);
  Matrix w2 = Matrix::Zero(n, n - m);
  Index c1 = 0, c2 = 0;
  for (Index i = 0; i < n; ++i) {
    if (in_complement[static_cast<size_t>(i)]) {
      w1(i, c1++) = 1.0;
    } else {
      w2(i, c2++) = 1.0;
    }
  }
  if ((triple.j.matrix * w2).norm() > kAbsTol * std::max(1.0, triple.j.matrix.norm())) {
    throw InputError(
        "associate_with_split: the non-listed indices do not span ker(j)");
  }

  AssociatedOperator op;
  op.triple = triple;
  op.path = AssociationPath::Schur;
  op.matrix = associate_on_split(triple, w1, w2);
  return op;
}

namespace {

// Graph system [F, -J* M_H; J, 0] [u; f] = [0; x].
Eigen::FullPivLU<Matrix> graph_system_lu(const FormTriple& triple) {
  const Index n = triple.space_v.dim;
  const Index m = triple.space_h.dim;
  Matrix system = Matrix::Zero(n + m, n + m);
  system.topLeftCorner(n, n) = triple.form;
  system.topRightCorner(n, m) = -(triple.j.matrix.adjoint() * triple.space_h.gram);
  system.bottomLeftCorner(m, n) = triple.j.matrix;
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw IllPosedAssociationError(
        "graph system is singular: dense range or the kernel condition fails");
  }
  return lu;
}

}  // namespace

AssociatedOperator associate_direct(const FormTriple& triple) {
  const Index n = triple.space_v.dim;
  const Index m = triple.space_h.dim;
  const auto lu = graph_system_lu(triple);

  AssociatedOperator op;
  op.triple = triple;
  op.path = AssociationPath::DirectSolve;
  op.matrix.resize(m, m);
  Vector rhs = Vector::Zero(n + m);
  for (Index k = 0; k < m; ++k) {
    rhs.setZero();
    rhs[n + k] = 1.0;
    const Vector sol = lu.solve(rhs);
    op.matrix.col(k) = sol.tail(m);
  }
  return op;
}

Vector lift(const FormTriple& triple, const Vector& x) {
  const Index n = triple.space_v.dim;
  const Index m = triple.space_h.dim;
  if (x.size() != m) throw InputError("lift: vector does not live in H");
  const auto lu = graph_system_lu(triple);
  Vector rhs = Vector::Zero(n + m);
  rhs.tail(m) = x;
  return lu.solve(rhs).head(n);
}

double verify_graph(const AssociatedOperator& op, int samples, std::uint64_t seed) {
  if (samples <= 0) throw InputError("verify_graph: need a positive sample count");
  const FormTriple& triple = op.triple;
  const Index m = triple.space_h.dim;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double form_scale = std::max(1.0, triple.form.norm());

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector x(m);
    for (Index i = 0; i < m; ++i) x[i] = Complex(gauss(rng), gauss(rng));
    const double xn = std::sqrt((x.adjoint() * triple.space_h.gram * x)(0, 0).real());
    if (xn < 1e-14) continue;
    x /= xn;

    const Vector u = lift(triple, x);
    // a(u, v) = <A x, j(v)>_H for every basis test vector v.
    const Vector lhs = triple.form * u;
    const Vector rhs = triple.j.matrix.adjoint() * (triple.space_h.gram * (op.matrix * x));
    const double denom = std::max(1.0, form_scale * u.norm());
    worst = std::max(worst, (lhs - rhs).norm() / denom);
  }
  return worst;
}

FormTriple from_multiplication(const std::vector<double>& m_values,
                               const std::vector<double>& weights) {
  if (m_values.size() != weights.size() || m_values.empty()) {
    throw InputError("from_multiplication: value and weight lists must match and be nonempty");
  }
  const Index n = static_cast<Index>(m_values.size());
  for (double w : weights) {
    if (!(w > 0.0)) {
      throw DefinitenessError("from_multiplication: weights must be positive");
    }
  }

  Matrix gram_h = Matrix::Zero(n, n);
  Matrix gram_v = Matrix::Zero(n, n);
  Matrix form = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double mu = weights[static_cast<size_t>(i)];
    const double mv = m_values[static_cast<size_t>(i)];
    gram_h(i, i) = mu;
    gram_v(i, i) = (1.0 + std::abs(mv)) * mu;
    form(i, i) = mv * mu;
  }
  return build_triple(gram_v, gram_h, Matrix::Identity(n, n), form, "multiplication");
}

}  // namespace sesqui
