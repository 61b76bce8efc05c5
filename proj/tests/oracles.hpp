#pragma once

// Independent reference computations for the tests. Everything here goes
// through Eigen or closed forms, never through the library's own kernels.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "mrms/linalg.hpp"
#include "mrms/problems.hpp"

namespace oracle {

using mrms::linalg::DenseThinMatrix;
using mrms::linalg::SparseMatrixCSC;
using mrms::linalg::Vector;

inline Eigen::VectorXd to_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vector from_eigen(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

inline Eigen::MatrixXd to_eigen(const DenseThinMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = m(i, j);
  }
  return out;
}

inline DenseThinMatrix from_eigen(const Eigen::MatrixXd& m) {
  DenseThinMatrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = m(i, j);
  }
  return out;
}

// Walks the raw CSC arrays rather than calling at().
inline Eigen::MatrixXd to_dense(const SparseMatrixCSC& a) {
  const auto n = static_cast<Eigen::Index>(a.dim());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < a.dim(); ++j) {
    for (std::size_t p = a.col_ptr()[j]; p < a.col_ptr()[j + 1]; ++p) d(a.row_idx()[p], j) += a.values()[p];
  }
  return d;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const Vector& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

/// Minimal-norm least squares via Eigen's complete orthogonal decomposition.
inline Eigen::VectorXd min_norm_ls(const Eigen::MatrixXd& w, const Eigen::VectorXd& g) {
  return w.completeOrthogonalDecomposition().solve(g);
}

/// Derivative weights at node p of the nodes 0..p: sum_j w_j j^q = q p^(q-1).
inline std::vector<double> bdf_weights(int p) {
  const int m = p + 1;
  Eigen::MatrixXd v(m, m);
  Eigen::VectorXd rhs(m);
  for (int q = 0; q < m; ++q) {
    for (int j = 0; j < m; ++j) v(q, j) = std::pow(static_cast<double>(j), q);
    rhs(q) = q == 0 ? 0.0 : q * std::pow(static_cast<double>(p), q - 1);
  }
  const Eigen::VectorXd w = v.fullPivLu().solve(rhs);
  return std::vector<double>(w.data(), w.data() + m);
}

/// Five-point Laplacian on the N x N interior grid, assembled densely
/// from the stencil with (i, j) -> j * N + i (0-based).
inline Eigen::MatrixXd heat2d_dense(std::size_t grid) {
  const auto n = static_cast<Eigen::Index>(grid * grid);
  const double h = 1.0 / static_cast<double>(grid + 1);
  const double s = 1.0 / (h * h);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const auto id = [grid](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>(j * grid + i); };
  for (std::size_t j = 0; j < grid; ++j) {
    for (std::size_t i = 0; i < grid; ++i) {
      a(id(i, j), id(i, j)) = -4.0 * s;
      if (i > 0) a(id(i, j), id(i - 1, j)) = s;
      if (i + 1 < grid) a(id(i, j), id(i + 1, j)) = s;
      if (j > 0) a(id(i, j), id(i, j - 1)) = s;
      if (j + 1 < grid) a(id(i, j), id(i, j + 1)) = s;
    }
  }
  return a;
}

/// q_ij = exp(x_i + y_j) sin(2 pi x_i) sin(3 pi y_j) on the interior grid.
inline Eigen::VectorXd heat2d_q(std::size_t grid) {
  const double h = 1.0 / static_cast<double>(grid + 1);
  const double pi = std::numbers::pi;
  Eigen::VectorXd q(grid * grid);
  for (std::size_t j = 0; j < grid; ++j) {
    for (std::size_t i = 0; i < grid; ++i) {
      const double x = static_cast<double>(i + 1) * h;
      const double y = static_cast<double>(j + 1) * h;
      q(static_cast<Eigen::Index>(j * grid + i)) = std::exp(x + y) * std::sin(2 * pi * x) * std::sin(3 * pi * y);
    }
  }
  return q;
}

/// Dense fixed-step BDF(p) from exact starting values at t0, t0 + tau, ...
/// A is taken at t0 (constant-matrix problems only).
inline Eigen::VectorXd dense_bdf(const mrms::LinearProblem& problem, int p, double t0, double tau,
                                 std::size_t steps) {
  const Eigen::MatrixXd a = to_dense(*problem.matrix_at(t0));
  const auto c = bdf_weights(p);
  const auto n = a.rows();
  std::vector<Eigen::VectorXd> ys;
  for (int j = 0; j < p; ++j) ys.push_back(to_eigen(*problem.exact_at(t0 + j * tau)));
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(tau * a - c[p] * Eigen::MatrixXd::Identity(n, n));
  for (std::size_t m = static_cast<std::size_t>(p); m < steps + 1; ++m) {
    const double t = t0 + static_cast<double>(m) * tau;
    Eigen::VectorXd rhs = -tau * to_eigen(problem.forcing_at(t));
    for (int j = 1; j <= p; ++j) rhs += c[p - j] * ys[ys.size() - j];
    ys.push_back(lu.solve(rhs));
  }
  return ys.back();
}

/// Classical RK4 on y' = A(t) y + b(t) with dense matrices.
inline Eigen::VectorXd rk4(const mrms::LinearProblem& problem, Eigen::VectorXd y, double t0, double t1,
                           std::size_t steps) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  const auto f = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return to_dense(*problem.matrix_at(t)) * x + to_eigen(problem.forcing_at(t));
  };
  double t = t0;
  for (std::size_t s = 0; s < steps; ++s) {
    const Eigen::VectorXd k1 = f(t, y);
    const Eigen::VectorXd k2 = f(t + h / 2, y + h / 2 * k1);
    const Eigen::VectorXd k3 = f(t + h / 2, y + h / 2 * k2);
    const Eigen::VectorXd k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t = t0 + static_cast<double>(s + 1) * h;
  }
  return y;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// ||exact'(t) - A exact(t) - b(t)||_inf with a centered difference for exact'.
inline double manufactured_residual(const mrms::LinearProblem& prob, double t) {
  const double h = 1e-5;
  const Vector up = *prob.exact_at(t + h);
  const Vector dn = *prob.exact_at(t - h);
  const Vector y = *prob.exact_at(t);
  const Vector f = prob.rhs(t, y);
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::abs((up[i] - dn[i]) / (2 * h) - f[i]));
  return r;
}

// Determinants of the 2x2 minimal residual Euler normal equations.
struct Cramer {
  double d, d1, d2;
};

// Cramer's rule on the normal equations assembled directly from W and g.
inline Cramer normal_equation_cramer(const std::vector<double>& z, const std::vector<double>& eta) {
  double m11 = 0, m12 = 0, m22 = 0, r1 = 0, r2 = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double w1 = eta[i] * (z[i] - 1.0);
    const double w2 = eta[i] * z[i] * (z[i] - 1.0);
    const double g = -eta[i];
    m11 += w1 * w1; m12 += w1 * w2; m22 += w2 * w2;
    r1 += w1 * g; r2 += w2 * g;
  }
  return {m11 * m22 - m12 * m12, r1 * m22 - m12 * r2, m11 * r2 - m12 * r1};
}

// Symmetrized double sums: Delta = 1/2 sum_ij a_i a_j (z_i - z_j)^2 etc.
inline Cramer symmetric_sums(const std::vector<double>& z, const std::vector<double>& eta) {
  Cramer c{0, 0, 0};
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double si = 1 - z[i], sj = 1 - z[j];
      const double ai = eta[i] * eta[i] * si * si, aj = eta[j] * eta[j] * sj * sj;
      const double bj = eta[j] * eta[j] * sj;
      const double dz = z[i] - z[j];
      c.d += 0.5 * ai * aj * dz * dz;
      c.d1 += ai * bj * z[i] * dz;
      c.d2 += ai * bj * (z[j] - z[i]);
    }
  }
  return c;
}

}  // namespace oracle
