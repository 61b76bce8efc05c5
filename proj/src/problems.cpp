#include "mrms/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mrms {

LinearProblem::LinearProblem(std::shared_ptr<const SparseMatrixCSC> a, VectorFn forcing,
                             VectorFn exact)
    : n_(a ? a->dim() : 0),
      constant_(std::move(a)),
      forcing_(std::move(forcing)),
      exact_(std::move(exact)) {
  if (!constant_) throw std::invalid_argument("LinearProblem: null matrix");
  if (!forcing_) throw std::invalid_argument("LinearProblem: missing forcing");
}

LinearProblem::LinearProblem(std::size_t n, MatrixFn a, VectorFn forcing, VectorFn exact)
    : n_(n), matrix_(std::move(a)), forcing_(std::move(forcing)), exact_(std::move(exact)) {
  if (!matrix_) throw std::invalid_argument("LinearProblem: missing matrix function");
  if (!forcing_) throw std::invalid_argument("LinearProblem: missing forcing");
}

std::shared_ptr<const SparseMatrixCSC> LinearProblem::matrix_at(double t) const {
  if (constant_) return constant_;
  auto a = matrix_(t);
  if (!a || a->dim() != n_) throw std::runtime_error("LinearProblem: matrix has wrong dimension");
  return a;
}

Vector LinearProblem::forcing_at(double t) const {
  Vector b = forcing_(t);
  if (b.size() != n_) throw std::runtime_error("LinearProblem: forcing has wrong dimension");
  return b;
}

std::optional<Vector> LinearProblem::exact_at(double t) const {
  if (!exact_) return std::nullopt;
  return exact_(t);
}

Vector LinearProblem::rhs(double t, std::span<const double> y) const {
  return rhs(*matrix_at(t), t, y);
}

Vector LinearProblem::rhs(const SparseMatrixCSC& a_t, double t, std::span<const double> y) const {
  Vector f = linalg::csc_matvec(a_t, y);
  const Vector b = forcing_at(t);
  for (std::size_t i = 0; i < n_; ++i) f[i] += b[i];
  return f;
}

// ---------------------------------------------------------------------------

std::vector<double> EigenvalueSpec::eigenvalues() const {
  if (n == 0) throw std::invalid_argument("EigenvalueSpec: n must be positive");
  std::vector<double> lambdas(n);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  if (kind == Kind::uniform) {
    if (!(lambda_max > 0.0)) throw std::invalid_argument("EigenvalueSpec: lambda_max must be > 0");
    for (std::size_t i = 0; i < n; ++i) lambdas[i] = -lambda_max * static_cast<double>(i) / denom;
  } else {
    if (!(m_lo <= m_hi)) throw std::invalid_argument("EigenvalueSpec: empty exponent range");
    for (std::size_t i = 0; i < n; ++i) {
      const double m = m_lo + (m_hi - m_lo) * static_cast<double>(i) / denom;
      lambdas[i] = -std::pow(10.0, m);
    }
  }
  return lambdas;
}

double diagonal_exact(double lambda, double t) {
  if (lambda == 0.0) return 1.0 + t;
  // (1 + 1/l) e^{lt} - 1/l, rearranged to avoid cancellation for tiny |l|.
  return std::exp(lambda * t) + std::expm1(lambda * t) / lambda;
}

LinearProblem diagonal_test_problem(std::span<const double> lambdas) {
  auto a = std::make_shared<const SparseMatrixCSC>(SparseMatrixCSC::diagonal(lambdas));
  const std::size_t n = lambdas.size();
  std::vector<double> lam(lambdas.begin(), lambdas.end());
  auto forcing = [n](double) { return Vector(n, 1.0); };
  auto exact = [lam](double t) {
    Vector y(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) y[i] = diagonal_exact(lam[i], t);
    return y;
  };
  return LinearProblem(std::move(a), forcing, exact);
}

LinearProblem diagonal_test_problem(const EigenvalueSpec& spec) {
  const auto lambdas = spec.eigenvalues();
  return diagonal_test_problem(lambdas);
}

// ---------------------------------------------------------------------------

namespace {

void require_grid(std::size_t grid) {
  if (grid < 2) throw std::invalid_argument("heat2d: grid size must be >= 2, got " + std::to_string(grid));
}

}  // namespace

SparseMatrixCSC heat2d_matrix(std::size_t grid) {
  require_grid(grid);
  const std::size_t n = grid * grid;
  const double h = 1.0 / static_cast<double>(grid + 1);
  const double inv_h2 = 1.0 / (h * h);
  std::vector<SparseMatrixCSC::Triplet> t;
  t.reserve(5 * n);
  // 0-based (i, j) -> j * grid + i, i along x.
  for (std::size_t j = 0; j < grid; ++j) {
    for (std::size_t i = 0; i < grid; ++i) {
      const std::size_t row = j * grid + i;
      t.push_back({row, row, -4.0 * inv_h2});
      if (i > 0) t.push_back({row, row - 1, inv_h2});
      if (i + 1 < grid) t.push_back({row, row + 1, inv_h2});
      if (j > 0) t.push_back({row, row - grid, inv_h2});
      if (j + 1 < grid) t.push_back({row, row + grid, inv_h2});
    }
  }
  return SparseMatrixCSC::from_triplets(n, std::move(t));
}

LinearProblem heat2d_problem(std::size_t grid) {
  require_grid(grid);
  const std::size_t n = grid * grid;
  const double h = 1.0 / static_cast<double>(grid + 1);
  const double inv_h2 = 1.0 / (h * h);

  // q on the padded (grid+2)^2 mesh; boundary rows/columns stay zero.
  const std::size_t padded = grid + 2;
  std::vector<double> q(padded * padded, 0.0);
  auto qat = [&q, padded](std::size_t i, std::size_t j) -> double& { return q[j * padded + i]; };
  for (std::size_t j = 1; j <= grid; ++j) {
    for (std::size_t i = 1; i <= grid; ++i) {
      const double x = static_cast<double>(i) * h;
      const double y = static_cast<double>(j) * h;
      qat(i, j) = std::exp(x + y) * std::sin(2.0 * std::numbers::pi * x) *
                  std::sin(3.0 * std::numbers::pi * y);
    }
  }
  Vector q_int(n);
  Vector lap_q(n);
  for (std::size_t j = 1; j <= grid; ++j) {
    for (std::size_t i = 1; i <= grid; ++i) {
      const std::size_t idx = (j - 1) * grid + (i - 1);
      q_int[idx] = qat(i, j);
      lap_q[idx] = qat(i, j + 1) + qat(i, j - 1) + qat(i + 1, j) + qat(i - 1, j) - 4.0 * qat(i, j);
    }
  }

  auto forcing = [q_int, lap_q, inv_h2](double t) {
    const double p = 1.0 + std::cos(t);
    const double dp = -std::sin(t);
    Vector b(q_int.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = dp * q_int[i] - p * inv_h2 * lap_q[i];
    return b;
  };
  auto exact = [q_int](double t) {
    const double p = 1.0 + std::cos(t);
    Vector w(q_int.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = p * q_int[i];
    return w;
  };
  return LinearProblem(std::make_shared<const SparseMatrixCSC>(heat2d_matrix(grid)), forcing, exact);
}

}  // namespace mrms
