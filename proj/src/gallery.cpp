#include "sesqui/gallery.hpp"

#include <cmath>
#include <sstream>

namespace sesqui {
namespace gallery {

namespace {

struct Assembly1D {
  Matrix stiffness;
  Matrix mass;
  RealVector node_weights;  // trapezoid quadrature weights
  RealVector nodes;
};

// P1 elements on [0, length] with node_count nodes.
Assembly1D assemble_1d(int node_count, double length) {
  if (node_count < 2) throw InputError("assemble_1d: need at least two nodes");
  const Index n = node_count;
  const double h = length / static_cast<double>(node_count - 1);

  Assembly1D a;
  a.stiffness = Matrix::Zero(n, n);
  a.mass = Matrix::Zero(n, n);
  a.node_weights = RealVector::Zero(n);
  a.nodes = RealVector::Zero(n);
  for (Index i = 0; i < n; ++i) a.nodes[i] = h * static_cast<double>(i);
  for (Index e = 0; e + 1 < n; ++e) {
    a.stiffness(e, e) += 1.0 / h;
    a.stiffness(e + 1, e + 1) += 1.0 / h;
    a.stiffness(e, e + 1) -= 1.0 / h;
    a.stiffness(e + 1, e) -= 1.0 / h;
    a.mass(e, e) += h / 3.0;
    a.mass(e + 1, e + 1) += h / 3.0;
    a.mass(e, e + 1) += h / 6.0;
    a.mass(e + 1, e) += h / 6.0;
    a.node_weights[e] += h / 2.0;
    a.node_weights[e + 1] += h / 2.0;
  }
  return a;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void require_length(size_t got, Index want, const char* what) {
  if (static_cast<Index>(got) != want) {
    std::ostringstream os;
    os << what << ": coefficient array has length " << got << ", expected " << want;
    throw InputError(os.str());
  }
}

}  // namespace

double eval_potential(const PotentialSpec& spec, double x) {
  double value = spec.baseline;
  if (x >= spec.well_from && x <= spec.well_to) value += spec.well_depth;
  return value;
}

GalleryProblem schrodinger1d(const Schrodinger1DParams& params) {
  if (params.n < 4) throw InputError("schrodinger1d: need n >= 4");
  const Index n = params.n;
  require_length(params.potential.size(), n, "schrodinger1d");

  Assembly1D a;
  if (params.bc == BoundaryKind::Neumann) {
    a = assemble_1d(params.n, params.length);
  } else {
    // Interior nodes of a grid with n + 2 nodes.
    Assembly1D full = assemble_1d(params.n + 2, params.length);
    a.stiffness = full.stiffness.block(1, 1, n, n);
    a.mass = full.mass.block(1, 1, n, n);
    a.node_weights = full.node_weights.segment(1, n);
    a.nodes = full.nodes.segment(1, n);
  }

  Matrix form = a.stiffness;
  for (Index i = 0; i < n; ++i) {
    form(i, i) += a.node_weights[i] *
                  (params.potential[static_cast<size_t>(i)] + params.mass_shift);
  }

  GalleryProblem problem;
  problem.kind = GalleryKind::Schrodinger1D;
  problem.params = params;
  problem.triple = build_triple(a.stiffness + a.mass, a.mass, Matrix::Identity(n, n), form,
                                "schrodinger1d");
  return problem;
}

GalleryProblem schrodinger1d(double length, int n, BoundaryKind bc, const PotentialSpec& m_spec,
                             double mass_shift) {
  Schrodinger1DParams params;
  params.length = length;
  params.n = n;
  params.bc = bc;
  params.mass_shift = mass_shift;
  const double h = bc == BoundaryKind::Neumann ? length / (n - 1) : length / (n + 1);
  const double x0 = bc == BoundaryKind::Neumann ? 0.0 : h;
  params.potential.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    params.potential[static_cast<size_t>(i)] = eval_potential(m_spec, x0 + h * i);
  }
  return schrodinger1d(params);
}

GalleryProblem dtn(const DtnParams& params) {
  if (params.n < 4) throw InputError("dtn: need n >= 4");
  const Index n1 = params.n;

  GalleryProblem problem;
  problem.kind = GalleryKind::Dtn;
  problem.params = params;

  if (params.domain == DtnDomain::Interval) {
    require_length(params.potential.size(), n1, "dtn");
    Assembly1D a = assemble_1d(params.n, params.length);
    Matrix form = a.stiffness;
    for (Index i = 0; i < n1; ++i) {
      form(i, i) += a.node_weights[i] * params.potential[static_cast<size_t>(i)];
    }
    Matrix trace = Matrix::Zero(2, n1);
    trace(0, 0) = 1.0;
    trace(1, n1 - 1) = 1.0;
    problem.triple = build_triple(a.stiffness + a.mass, Matrix::Identity(2, 2), trace, form,
                                  "dtn-interval");
    return problem;
  }

  // Tensor square: Q1 elements on [0,L]^2, lexicographic node (i, j) ->
  // i * n + j with x index i.
  const Index n = n1 * n1;
  require_length(params.potential.size(), n, "dtn");
  Assembly1D a = assemble_1d(params.n, params.length);
  const Matrix stiffness = kron(a.stiffness, a.mass) + kron(a.mass, a.stiffness);
  const Matrix mass = kron(a.mass, a.mass);

  Matrix form = stiffness;
  for (Index i = 0; i < n1; ++i) {
    for (Index j = 0; j < n1; ++j) {
      const Index node = i * n1 + j;
      form(node, node) += a.node_weights[i] * a.node_weights[j] *
                          params.potential[static_cast<size_t>(node)];
    }
  }

  // Boundary nodes ordered along the closed curve.
  std::vector<Index> cycle;
  for (Index i = 0; i < n1; ++i) cycle.push_back(i * n1 + 0);
  for (Index j = 1; j < n1; ++j) cycle.push_back((n1 - 1) * n1 + j);
  for (Index i = n1 - 2; i >= 0; --i) cycle.push_back(i * n1 + (n1 - 1));
  for (Index j = n1 - 2; j >= 1; --j) cycle.push_back(0 * n1 + j);

  const Index nb = static_cast<Index>(cycle.size());
  Matrix trace = Matrix::Zero(nb, n);
  for (Index k = 0; k < nb; ++k) trace(k, cycle[static_cast<size_t>(k)]) = 1.0;

  // P1 mass along the boundary cycle (uniform segment length h).
  const double h = params.length / static_cast<double>(params.n - 1);
  Matrix boundary_mass = Matrix::Zero(nb, nb);
  for (Index k = 0; k < nb; ++k) {
    const Index next = (k + 1) % nb;
    boundary_mass(k, k) += h / 3.0;
    boundary_mass(next, next) += h / 3.0;
    boundary_mass(k, next) += h / 6.0;
    boundary_mass(next, k) += h / 6.0;
  }

  problem.triple = build_triple(stiffness + mass, boundary_mass, trace, form, "dtn-square");
  return problem;
}

GalleryProblem dtn(double length, int n, DtnDomain domain, const PotentialSpec& m_spec) {
  DtnParams params;
  params.length = length;
  params.n = n;
  params.domain = domain;
  const double h = length / (n - 1);
  if (domain == DtnDomain::Interval) {
    params.potential.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) params.potential[static_cast<size_t>(i)] = eval_potential(m_spec, h * i);
  } else {
    params.potential.resize(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        params.potential[static_cast<size_t>(i * n + j)] = eval_potential(m_spec, h * i);
      }
    }
  }
  return dtn(params);
}

GalleryProblem drift(const DriftParams& params) {
  if (params.n < 4) throw InputError("drift: need n >= 4");
  if (!(params.mass_shift > 0.0)) throw InputError("drift: delta must be positive");
  const Index n = params.n;
  require_length(params.b.size(), n, "drift(b)");
  require_length(params.c.size(), n, "drift(c)");

  Assembly1D a = assemble_1d(params.n, params.length);
  Matrix form = a.stiffness;
  for (Index i = 0; i < n; ++i) form(i, i) += a.node_weights[i] * params.mass_shift;

  // First-order terms with nodal coefficient sampling: on each element,
  // int b u v' ~ (b_i u_i + b_{i+1} u_{i+1})(v_{i+1} - v_i)/2 and
  // int c v u' ~ (c_i v_i + c_{i+1} v_{i+1})(u_{i+1} - u_i)/2.
  for (Index e = 0; e + 1 < n; ++e) {
    const Complex b0 = params.b[static_cast<size_t>(e)];
    const Complex b1 = params.b[static_cast<size_t>(e + 1)];
    const Complex c0 = params.c[static_cast<size_t>(e)];
    const Complex c1 = params.c[static_cast<size_t>(e + 1)];
    form(e + 1, e) += 0.5 * b0;
    form(e + 1, e + 1) += 0.5 * b1;
    form(e, e) -= 0.5 * b0;
    form(e, e + 1) -= 0.5 * b1;
    form(e, e + 1) += 0.5 * c0;
    form(e, e) -= 0.5 * c0;
    form(e + 1, e + 1) += 0.5 * c1;
    form(e + 1, e) -= 0.5 * c1;
  }

  GalleryProblem problem;
  problem.kind = GalleryKind::Drift;
  problem.params = params;
  problem.triple = build_triple(a.stiffness + a.mass, a.mass, Matrix::Identity(n, n), form,
                                "drift");
  return problem;
}

GalleryProblem drift(double length, int n, const PotentialSpec& b_re, const PotentialSpec& b_im,
                     bool c_conjugate, double mass_shift) {
  DriftParams params;
  params.length = length;
  params.n = n;
  params.mass_shift = mass_shift;
  params.b.resize(static_cast<size_t>(n));
  params.c.resize(static_cast<size_t>(n));
  const double h = length / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = h * i;
    const Complex b(eval_potential(b_re, x), eval_potential(b_im, x));
    params.b[static_cast<size_t>(i)] = b;
    params.c[static_cast<size_t>(i)] = c_conjugate ? std::conj(b) : Complex(0.0, 0.0);
  }
  return drift(params);
}

GalleryProblem shiftform(const ShiftFormParams& params) {
  if (params.n < 4) throw InputError("shiftform: need n >= 4");
  const Index n = params.n;

  Assembly1D full = assemble_1d(params.n + 2, params.length);
  const Matrix stiffness = full.stiffness.block(1, 1, n, n);
  const Matrix mass = full.mass.block(1, 1, n, n);

  // int phi_l' phi_k over interior hats: exactly skew, +-1/2 off the diagonal.
  Matrix form = Matrix::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) {
    form(k, k + 1) = 0.5;
    form(k + 1, k) = -0.5;
  }

  GalleryProblem problem;
  problem.kind = GalleryKind::ShiftForm;
  problem.params = params;
  problem.triple =
      build_triple(stiffness + mass, mass, Matrix::Identity(n, n), form, "shiftform");
  return problem;
}

GalleryProblem shiftform(double length, int n) { return shiftform(ShiftFormParams{length, n}); }

GalleryProblem diagonal(const DiagonalParams& params) {
  const Index n = static_cast<Index>(params.lambdas.size());
  if (n < 1) throw InputError("diagonal: need at least one entry");
  if (!(params.lambdas[0] > 0.0)) throw InputError("diagonal: lambda_1 must be positive");
  for (size_t i = 1; i < params.lambdas.size(); ++i) {
    if (params.lambdas[i] < params.lambdas[i - 1]) {
      throw InputError("diagonal: lambdas must be nondecreasing");
    }
  }

  Matrix gram_v = Matrix::Zero(n, n);
  Matrix form = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    gram_v(i, i) = params.lambdas[static_cast<size_t>(i)];
    form(i, i) = Complex(0.0, params.lambdas[static_cast<size_t>(i)]);
  }

  GalleryProblem problem;
  problem.kind = GalleryKind::Diagonal;
  problem.params = params;
  problem.triple =
      build_triple(gram_v, Matrix::Identity(n, n), Matrix::Identity(n, n), form, "diagonal");
  return problem;
}

GalleryProblem diagonal(const std::vector<double>& lambdas) {
  return diagonal(DiagonalParams{lambdas});
}

std::vector<GalleryProblem> schrodinger_family(double length, const std::vector<int>& ns,
                                               BoundaryKind bc, const PotentialSpec& m_spec,
                                               double mass_shift) {
  std::vector<GalleryProblem> family;
  family.reserve(ns.size());
  for (int n : ns) family.push_back(schrodinger1d(length, n, bc, m_spec, mass_shift));
  return family;
}

std::vector<GalleryProblem> drift_family(double base_length, const std::vector<int>& ns,
                                         const PotentialSpec& b_re, const PotentialSpec& b_im,
                                         bool c_conjugate, double mass_shift, bool grow_length) {
  std::vector<GalleryProblem> family;
  family.reserve(ns.size());
  double length = base_length;
  for (size_t l = 0; l < ns.size(); ++l) {
    family.push_back(drift(length, ns[l], b_re, b_im, c_conjugate, mass_shift));
    if (grow_length) length *= 2.0;
  }
  return family;
}

std::vector<GalleryProblem> shiftform_family(double base_length, int base_n, int levels) {
  std::vector<GalleryProblem> family;
  family.reserve(static_cast<size_t>(levels));
  double length = base_length;
  int n = base_n;
  for (int l = 0; l < levels; ++l) {
    family.push_back(shiftform(length, n));
    length *= 2.0;
    n = 2 * n + 1;  // doubling the interval at fixed mesh width
  }
  return family;
}

std::vector<FormTriple> triples_of(const std::vector<GalleryProblem>& family) {
  std::vector<FormTriple> triples;
  triples.reserve(family.size());
  for (const GalleryProblem& p : family) triples.push_back(p.triple);
  return triples;
}

}  // namespace gallery
}  // namespace sesqui
