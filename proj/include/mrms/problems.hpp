#pragma once

// Linear test problems y' = A(t) y + b(t).

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>

#include "mrms/linalg.hpp"

namespace mrms {

using linalg::SparseMatrixCSC;
using linalg::Vector;

class LinearProblem {
 public:
  using MatrixFn = std::function<std::shared_ptr<const SparseMatrixCSC>(double)>;
  using VectorFn = std::function<Vector(double)>;

  /// Constant matrix A. `exact` may be empty.
  LinearProblem(std::shared_ptr<const SparseMatrixCSC> a, VectorFn forcing, VectorFn exact = {});
  /// Time-dependent matrix A(t); the sparsity pattern must not change with t.
  LinearProblem(std::size_t n, MatrixFn a, VectorFn forcing, VectorFn exact = {});

  std::size_t dim() const { return n_; }
  bool is_autonomous_matrix() const { return static_cast<bool>(constant_); }

  std::shared_ptr<const SparseMatrixCSC> matrix_at(double t) const;
  Vector forcing_at(double t) const;

  bool has_exact() const { return static_cast<bool>(exact_); }
  std::optional<Vector> exact_at(double t) const;

  /// f(t, y) = A(t) y + b(t).
  Vector rhs(double t, std::span<const double> y) const;
  /// Same as rhs() with a matrix the caller already holds for time t.
  Vector rhs(const SparseMatrixCSC& a_t, double t, std::span<const double> y) const;

 private:
  std::size_t n_;
  std::shared_ptr<const SparseMatrixCSC> constant_;
  MatrixFn matrix_;
  VectorFn forcing_;
  VectorFn exact_;
};

struct EigenvalueSpec {
  enum class Kind { uniform, log_spaced };

  Kind kind = Kind::uniform;
  std::size_t n = 100;
  /// Uniform: eigenvalues on [-lambda_max, 0].
  double lambda_max = 100.0;
  /// Log-spaced: lambda_i = -10^{m_i}, m_i equispaced on [m_lo, m_hi].
  double m_lo = -7.0;
  double m_hi = 7.0;

  /// Endpoints included in both layouts; the uniform list starts at 0.
  std::vector<double> eigenvalues() const;
};

/// y_i' = lambda_i y_i + 1, y_i(0) = 1.
LinearProblem diagonal_test_problem(const EigenvalueSpec& spec);
LinearProblem diagonal_test_problem(std::span<const double> lambdas);

/// Exact solution component of the diagonal problem.
double diagonal_exact(double lambda, double t);

/// Five-point Laplacian on the N x N interior grid of the unit square with
/// homogeneous Dirichlet data, manufactured solution (1 + cos t) q_ij with
/// q_ij = exp(x_i + y_j) sin(2 pi x_i) sin(3 pi y_j). Unknown (i, j),
/// 1-based, maps to index (j - 1) N + (i - 1).
LinearProblem heat2d_problem(std::size_t grid);
SparseMatrixCSC heat2d_matrix(std::size_t grid);

}  // namespace mrms
