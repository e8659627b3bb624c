#pragma once

// Test-only oracles, independent of the library implementation paths they
// cross-check: sampled Rayleigh extremes with random-plane refinement,
// characteristic-polynomial root finding, and generic sphere minimization.

#include "sesqui/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

using sesqui::Complex;
using sesqui::Index;
using sesqui::Matrix;
using sesqui::RealVector;
using sesqui::Vector;

inline Vector random_complex_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return v;
}

inline Matrix random_complex_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  }
  return m;
}

inline Matrix random_hermitian(Index n, std::mt19937_64& rng) {
  const Matrix m = random_complex_matrix(n, n, rng);
  return 0.5 * (m + m.adjoint());
}

inline Matrix random_hpd(Index n, std::mt19937_64& rng, double ridge = 0.5) {
  const Matrix m = random_complex_matrix(n, n, rng);
  return m * m.adjoint() + ridge * static_cast<double>(n) * Matrix::Identity(n, n);
}

// Largest root of det(H - lambda B) for 2x2 Hermitian H, HPD B, by the
// quadratic formula. Returns the eigenvalue and its eigenvector.
inline std::pair<double, Eigen::Vector2cd> top_pencil_2x2(const Eigen::Matrix2cd& h,
                                                          const Eigen::Matrix2cd& b) {
  const double a2 = (b(0, 0).real() * b(1, 1).real()) - std::norm(b(0, 1));
  const double a1 = -(h(0, 0).real() * b(1, 1).real() + h(1, 1).real() * b(0, 0).real() -
                      2.0 * (h(0, 1) * std::conj(b(0, 1))).real());
  const double a0 = (h(0, 0).real() * h(1, 1).real()) - std::norm(h(0, 1));
  const double disc = std::max(0.0, a1 * a1 - 4.0 * a2 * a0);
  const double lambda = (-a1 + std::sqrt(disc)) / (2.0 * a2);

  // Eigenvector from the first row of (H - lambda B), or the second when
  // the first vanishes.
  Eigen::Matrix2cd shifted = h - lambda * b;
  Eigen::Vector2cd v;
  if (std::abs(shifted(0, 0)) + std::abs(shifted(0, 1)) >
      std::abs(shifted(1, 0)) + std::abs(shifted(1, 1))) {
    v << -shifted(0, 1), shifted(0, 0);
  } else {
    v << -shifted(1, 1), shifted(1, 0);
  }
  if (v.norm() < 1e-14) v << 1.0, 0.0;
  return {lambda, v};
}

// max of u* H u / u* B u by best-of-N sampling followed by random-plane
// ascent, each plane solved in closed form. Independent of any library
// eigensolver.
inline double sampled_rayleigh_max(const Matrix& h, const Matrix& b, int samples,
                                   int refinements, std::mt19937_64& rng) {
  const Index n = h.rows();
  auto quotient = [&](const Vector& u) {
    const double den = (u.adjoint() * b * u)(0, 0).real();
    return (u.adjoint() * h * u)(0, 0).real() / den;
  };

  auto b_normalize = [&](Vector u) {
    return Vector(u / std::sqrt((u.adjoint() * b * u)(0, 0).real()));
  };

  Vector best = b_normalize(random_complex_vector(n, rng));
  double best_value = quotient(best);
  for (int s = 1; s < samples; ++s) {
    const Vector u = random_complex_vector(n, rng);
    const double value = quotient(u);
    if (value > best_value) {
      best_value = value;
      best = b_normalize(u);
    }
  }

  for (int r = 0; r < refinements; ++r) {
    // B-orthonormalize the random direction against the current point so
    // the restricted pencil stays well conditioned.
    Vector q = random_complex_vector(n, rng);
    q -= best * (best.adjoint() * b * q)(0, 0);
    const double qn = std::sqrt((q.adjoint() * b * q)(0, 0).real());
    if (qn < 1e-14) continue;
    q /= qn;

    Eigen::Matrix2cd hr, br;
    const Vector hu = h * best, hq = h * q;
    hr << (best.adjoint() * hu)(0, 0), (best.adjoint() * hq)(0, 0),
        (q.adjoint() * hu)(0, 0), (q.adjoint() * hq)(0, 0);
    br.setIdentity();
    auto [lambda, c] = top_pencil_2x2(hr, br);
    Vector candidate = c[0] * best + c[1] * q;
    const double value = quotient(candidate);
    if (value > best_value) {
      best_value = value;
      best = b_normalize(candidate);
    }
  }
  return best_value;
}

inline double sampled_rayleigh_min(const Matrix& h, const Matrix& b, int samples,
                                   int refinements, std::mt19937_64& rng) {
  return -sampled_rayleigh_max(-h, b, samples, refinements, rng);
}

// Generic minimization of a real objective over the B-unit sphere:
// best-of-N sampling plus geodesic line searches in random directions.
inline double sphere_minimize(const std::function<double(const Vector&)>& objective,
                              const Matrix& b, Index n, int samples, int refinements,
                              std::mt19937_64& rng) {
  auto normalize = [&](Vector u) {
    const double norm = std::sqrt((u.adjoint() * b * u)(0, 0).real());
    return Vector(u / norm);
  };

  Vector best = normalize(random_complex_vector(n, rng));
  double best_value = objective(best);
  for (int s = 1; s < samples; ++s) {
    const Vector u = normalize(random_complex_vector(n, rng));
    const double value = objective(u);
    if (value < best_value) {
      best_value = value;
      best = u;
    }
  }

  for (int r = 0; r < refinements; ++r) {
    Vector q = random_complex_vector(n, rng);
    // B-orthogonalize against the current point to get a geodesic direction.
    q -= best * (best.adjoint() * b * q)(0, 0);
    const double qn = std::sqrt((q.adjoint() * b * q)(0, 0).real());
    if (qn < 1e-14) continue;
    q /= qn;

    // Coarse scan along the geodesic, then shrink around the best angle.
    double center = 0.0, range = 1.5;
    for (int pass = 0; pass < 4; ++pass) {
      double local_best_t = center;
      for (int k = 0; k < 33; ++k) {
        const double t = center - range + 2.0 * range * static_cast<double>(k) / 32.0;
        const Vector candidate = normalize(std::cos(t) * best + std::sin(t) * q);
        const double value = objective(candidate);
        if (value < best_value) {
          best_value = value;
          local_best_t = t;
        }
      }
      center = local_best_t;
      range *= 0.08;
    }
    if (center != 0.0) best = normalize(std::cos(center) * best + std::sin(center) * q);
  }
  return best_value;
}

// Characteristic polynomial coefficients by the Faddeev-LeVerrier
// recurrence: p(z) = z^n + c[n-1] z^{n-1} + ... + c[0].
inline std::vector<Complex> char_poly(const Matrix& a) {
  const Index n = a.rows();
  std::vector<Complex> coeff(static_cast<size_t>(n), Complex(0.0, 0.0));
  Matrix m = Matrix::Zero(n, n);
  Complex c = 1.0;
  for (Index k = 1; k <= n; ++k) {
    m = a * (m + c * Matrix::Identity(n, n));
    c = -m.trace() / static_cast<double>(k);
    coeff[static_cast<size_t>(n - k)] = c;
  }
  return coeff;
}

// Durand-Kerner iteration on monic polynomial coefficients.
inline std::vector<Complex> poly_roots(const std::vector<Complex>& coeff) {
  const size_t n = coeff.size();
  auto eval = [&](Complex z) {
    Complex p(1.0, 0.0);
    for (size_t k = 0; k < n; ++k) p = p * z + coeff[n - 1 - k];
    return p;
  };

  double radius = 1.0;
  for (const Complex& c : coeff) radius = std::max(radius, std::abs(c));
  radius = 1.0 + radius;

  std::vector<Complex> roots(n);
  const Complex seed(0.4, 0.9);
  Complex power = seed;
  for (size_t j = 0; j < n; ++j) {
    roots[j] = radius * power / std::abs(power);
    power *= seed;
  }

  for (int iter = 0; iter < 500; ++iter) {
    double worst = 0.0;
    for (size_t j = 0; j < n; ++j) {
      Complex denom(1.0, 0.0);
      for (size_t k = 0; k < n; ++k) {
        if (k != j) denom *= roots[j] - roots[k];
      }
      const Complex update = eval(roots[j]) / denom;
      roots[j] -= update;
      worst = std::max(worst, std::abs(update));
    }
    if (worst < 1e-13 * radius) break;
  }
  return roots;
}

// Greedy multiset distance: max over one side of the distance to its
// nearest unmatched partner.
inline double multiset_match_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const Complex& x : a) {
    double best = std::numeric_limits<double>::infinity();
    size_t best_idx = b.size();
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(b[j] - x);
      if (d < best) {
        best = d;
        best_idx = j;
      }
    }
    if (best_idx < b.size()) used[best_idx] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace oracles
