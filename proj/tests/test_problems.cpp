#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "mrms/problems.hpp"
#include "oracles.hpp"

using namespace mrms;

TEST_CASE("eigenvalue layouts") {
  EigenvalueSpec uni;
  const auto lam = uni.eigenvalues();
  REQUIRE(lam.size() == 100);
  CHECK(lam.front() == 0.0);
  CHECK(lam[1] == doctest::Approx(-100.0 / 99.0).epsilon(1e-14));
  CHECK(lam.back() == doctest::Approx(-100.0).epsilon(1e-14));

  EigenvalueSpec log;
  log.kind = EigenvalueSpec::Kind::log_spaced;
  const auto ll = log.eigenvalues();
  REQUIRE(ll.size() == 100);
  CHECK(ll.front() == doctest::Approx(-1e-7).epsilon(1e-12));
  CHECK(ll.back() == doctest::Approx(-1e7).epsilon(1e-12));
  for (double x : ll) CHECK(x < 0.0);

  EigenvalueSpec one;
  one.n = 1;
  CHECK(one.eigenvalues() == std::vector<double>{0.0});

  EigenvalueSpec bad;
  bad.lambda_max = -1.0;
  CHECK_THROWS_AS(bad.eigenvalues(), std::invalid_argument);
}

TEST_CASE("diagonal problem exact solution") {
  CHECK(diagonal_exact(0.0, 0.7) == doctest::Approx(1.7));
  CHECK(diagonal_exact(-1.0, 0.0) == 1.0);
  // (1 + 1/lambda) e^{lambda t} - 1/lambda
  CHECK(diagonal_exact(-3.0, 0.4) == doctest::Approx((1.0 - 1.0 / 3.0) * std::exp(-1.2) + 1.0 / 3.0).epsilon(1e-14));

  EigenvalueSpec spec;
  const auto prob = diagonal_test_problem(spec);
  CHECK(prob.dim() == 100);
  CHECK(prob.is_autonomous_matrix());
  CHECK(prob.forcing_at(0.3) == Vector(100, 1.0));
  CHECK(*prob.exact_at(0.0) == Vector(100, 1.0));
  CHECK(oracle::manufactured_residual(prob, 0.5) <= 1e-8);
}

TEST_CASE("diagonal problem against an RK4 reference") {
  EigenvalueSpec spec;
  const auto prob = diagonal_test_problem(spec);
  const Eigen::VectorXd y = oracle::rk4(prob, Eigen::VectorXd::Ones(100), 0.0, 0.1, 1000);
  CHECK(oracle::max_abs_diff(oracle::from_eigen(y), *prob.exact_at(0.1)) <= 1e-8);
}

TEST_CASE("heat2d matrix agrees with a dense five-point assembly") {
  for (std::size_t n : {2u, 3u, 7u}) {
    const auto a = heat2d_matrix(n);
    const Eigen::MatrixXd ref = oracle::heat2d_dense(n);
    CHECK(oracle::to_dense(a) == ref);
    CHECK(a.lower_bandwidth() == n);
    CHECK(a.upper_bandwidth() == n);
  }
  const auto a2 = heat2d_matrix(2);
  CHECK(a2.at(0, 0) == doctest::Approx(-36.0));  // -4 / h^2 with h = 1/3
  CHECK(a2.at(0, 1) == doctest::Approx(9.0));
  CHECK(a2.at(0, 3) == 0.0);
  CHECK_THROWS_AS(heat2d_matrix(1), std::invalid_argument);
  CHECK_THROWS_AS(heat2d_problem(0), std::invalid_argument);
}

TEST_CASE("heat2d matrix structure") {
  const std::size_t grid = 10;
  const auto a = heat2d_matrix(grid);
  const Eigen::MatrixXd d = oracle::to_dense(a);
  CHECK(d == d.transpose());
  for (std::size_t j = 0; j < grid; ++j) {
    for (std::size_t i = 0; i < grid; ++i) {
      const auto r = static_cast<Eigen::Index>(j * grid + i);
      const double sum = d.row(r).sum();
      const double off = d.row(r).cwiseAbs().sum() - std::abs(d(r, r));
      CHECK(std::abs(d(r, r)) >= off);
      CHECK(sum <= 0.0);
      const bool interior = i > 0 && j > 0 && i + 1 < grid && j + 1 < grid;
      if (interior) CHECK(sum == 0.0);
    }
  }
}

TEST_CASE("heat2d spectrum lies in the Gershgorin interval") {
  const std::size_t grid = 10;
  const double h = 1.0 / (grid + 1);
  const auto a = heat2d_matrix(grid);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    Vector x = oracle::random_vector(rng, grid * grid);
    double rayleigh = 0.0;
    for (int it = 0; it < 500; ++it) {
      Vector y = linalg::csc_matvec(a, x);
      rayleigh = linalg::dot(x, y) / linalg::dot(x, x);
      const double nrm = linalg::norm2(y);
      for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / nrm;
    }
    CHECK(rayleigh < 0.0);
    CHECK(rayleigh >= -8.0 / (h * h));
  }
  // The symmetric eigensolver gives the whole spectrum.
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(oracle::to_dense(a)).eigenvalues();
  CHECK(ev.maxCoeff() < 0.0);
  CHECK(ev.minCoeff() >= -8.0 / (h * h));
}

TEST_CASE("heat2d manufactured solution") {
  const auto prob = heat2d_problem(5);
  const Eigen::VectorXd q = oracle::heat2d_q(5);
  const Vector y0 = *prob.exact_at(0.0);
  for (Eigen::Index i = 0; i < q.size(); ++i) CHECK(y0[i] == doctest::Approx(2.0 * q(i)).epsilon(1e-14));

  for (std::size_t n : {2u, 4u, 10u, 20u}) {
    const auto p = heat2d_problem(n);
    CHECK(p.dim() == n * n);
    for (double t : {0.0, 1.0, 5.0}) {
      CAPTURE(n);
      CAPTURE(t);
      CHECK(oracle::manufactured_residual(p, t) <= 1e-8 * oracle::max_abs(*p.exact_at(t)));
    }
  }
}

TEST_CASE("linear problem validation") {
  CHECK_THROWS_AS(LinearProblem(nullptr, [](double) { return Vector{}; }), std::invalid_argument);
  const auto id = std::make_shared<const SparseMatrixCSC>(SparseMatrixCSC::identity(2));
  CHECK_THROWS_AS(LinearProblem(id, {}), std::invalid_argument);

  const LinearProblem wrong(id, [](double) { return Vector{1.0}; });
  CHECK_THROWS_AS(wrong.forcing_at(0.0), std::runtime_error);
  CHECK_FALSE(wrong.has_exact());
  CHECK_FALSE(wrong.exact_at(0.0).has_value());

  const LinearProblem varying(2, [&](double) { return id; }, [](double t) { return Vector{t, -t}; });
  CHECK_FALSE(varying.is_autonomous_matrix());
  CHECK(varying.rhs(2.0, Vector{1.0, 1.0}) == Vector{3.0, -1.0});
}
