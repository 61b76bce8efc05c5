#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "mrms/bdf.hpp"
#include "mrms/harness.hpp"
#include "mrms/history.hpp"
#include "mrms/problems.hpp"
#include "oracles.hpp"

using namespace mrms;

namespace {

LinearProblem scalar_problem(double lambda) {
  const std::vector<double> d{lambda};
  return LinearProblem(std::make_shared<const SparseMatrixCSC>(SparseMatrixCSC::diagonal(d)),
                       [](double) { return Vector{0.0}; });
}

}  // namespace

TEST_CASE("bdf coefficients") {
  CHECK(bdf_coefficients(1).coeffs == std::vector<double>{-1.0, 1.0});

  const auto p2 = bdf_coefficients(2).coeffs;
  REQUIRE(p2.size() == 3);
  CHECK(p2[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p2[1] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(p2[2] == doctest::Approx(1.5).epsilon(1e-15));

  CHECK(bdf_coefficients(6).leading() == doctest::Approx(49.0 / 20.0).epsilon(1e-15));

  CHECK_THROWS_AS(bdf_coefficients(0), std::invalid_argument);
  CHECK_THROWS_AS(bdf_coefficients(7), std::invalid_argument);
}

TEST_CASE("bdf coefficients match the Vandermonde derivative weights") {
  for (int p = 1; p <= kMaxBdfOrder; ++p) {
    const auto s = bdf_coefficients(p);
    const auto ref = oracle::bdf_weights(p);
    REQUIRE(s.coeffs.size() == ref.size());
    for (std::size_t j = 0; j < ref.size(); ++j) CHECK(s.coeffs[j] == doctest::Approx(ref[j]).epsilon(1e-12));
    CHECK(s.order == p);
    CHECK(s.back(0) == s.leading());
    CHECK(s.back(p) == s.coeffs.front());
  }
}

TEST_CASE("bdf formula is exact on polynomials up to its order") {
  const double tau = 0.37;
  for (int p = 1; p <= kMaxBdfOrder; ++p) {
    const auto c = bdf_coefficients(p).coeffs;
    double sum = 0.0;
    for (double x : c) sum += x;
    CHECK(std::abs(sum) < 1e-13);
    for (int q = 1; q <= p; ++q) {
      double lhs = 0.0, scale = 0.0;
      for (int j = 0; j <= p; ++j) {
        lhs += c[j] * std::pow(j * tau, q);
        scale += std::abs(c[j] * std::pow(j * tau, q));
      }
      const double rhs = tau * q * std::pow(p * tau, q - 1);
      CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("bdf integrate trivial cases") {
  SUBCASE("zero right-hand side keeps the state") {
    const LinearProblem zero(std::make_shared<const SparseMatrixCSC>(2, std::vector<std::size_t>{0, 0, 0},
                                                                     std::vector<std::size_t>{},
                                                                     std::vector<double>{}),
                             [](double) { return Vector{0.0, 0.0}; });
    const auto h = HistoryWindow::from_states(zero, 0.0, 0.1, {Vector{1.5, -2.0}});
    const auto traj = bdf_integrate(zero, h, 0.1, 10, 1);
    for (const auto& y : traj.states) CHECK(y == Vector{1.5, -2.0});
    CHECK(traj.steps == 10);
    CHECK(traj.final_time == doctest::Approx(1.0));
  }
  SUBCASE("scalar implicit Euler step") {
    const double lambda = -7.0, tau = 0.3;
    const auto prob = scalar_problem(lambda);
    const auto h = HistoryWindow::from_states(prob, 0.0, tau, {Vector{2.0}});
    const auto traj = bdf_integrate(prob, h, tau, 1, 1);
    CHECK(traj.final_state[0] == doctest::Approx(2.0 / (1.0 - tau * lambda)).epsilon(1e-15));
  }
  SUBCASE("zero steps") {
    const auto prob = scalar_problem(-1.0);
    const auto h = HistoryWindow::from_states(prob, 0.0, 0.5, {Vector{1.0}, Vector{0.6}});
    const auto traj = bdf_integrate(prob, h, 0.5, 0, 2);
    CHECK(traj.steps == 0);
    CHECK(traj.final_state == Vector{0.6});
    CHECK(traj.final_time == doctest::Approx(0.5));
  }
}

TEST_CASE("bdf integrate preconditions") {
  const auto prob = scalar_problem(-1.0);
  const auto h = HistoryWindow::from_states(prob, 0.0, 0.5, {Vector{1.0}});
  CHECK_THROWS_AS(bdf_integrate(prob, h, 0.5, 3, 2), std::invalid_argument);  // too few starting values
  CHECK_THROWS_AS(bdf_integrate(prob, h, 0.25, 3, 1), std::invalid_argument);  // spacing mismatch
  CHECK_THROWS_AS(bdf_integrate(prob, h, 0.5, 3, 7), std::invalid_argument);

  // tau * lambda = c_k makes the shifted matrix singular.
  const auto singular = scalar_problem(2.0);
  const auto hs = HistoryWindow::from_states(singular, 0.0, 0.5, {Vector{1.0}});
  try {
    bdf_integrate(singular, hs, 0.5, 3, 1);
    FAIL("expected an IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.step() == 1);
  }
}

TEST_CASE("bdf2 on the heat equation matches a dense reference") {
  const auto prob = heat2d_problem(20);
  const double tau = 10.0 / 200.0;
  const auto h = HistoryWindow::from_exact(prob, 0.0, tau, 2);
  const auto traj = bdf_integrate(prob, h, tau, 199, 2, {.store_states = false});
  CHECK(traj.final_time == doctest::Approx(10.0));
  CHECK(traj.factorizations == 1);
  CHECK(traj.factor_seconds >= 0.0);
  CHECK(traj.total_seconds >= traj.factor_seconds);

  const Eigen::VectorXd ref = oracle::dense_bdf(prob, 2, 0.0, tau, 200);
  const Vector exact = *prob.exact_at(10.0);
  const double err = oracle::max_abs_diff(traj.final_state, exact);
  const double err_ref = oracle::max_abs_diff(oracle::from_eigen(ref), exact);
  CHECK(std::abs(err - err_ref) <= 1e-10 * err_ref);
}

TEST_CASE("time-dependent matrices refactor every step") {
  // y' = a(t) y with a(t) = -(1 + t); A changes each step.
  const LinearProblem prob(
      1,
      [](double t) {
        const std::vector<double> d{-(1.0 + t)};
        return std::make_shared<const SparseMatrixCSC>(SparseMatrixCSC::diagonal(d));
      },
      [](double) { return Vector{0.0}; });
  const double tau = 0.1;
  const auto h = HistoryWindow::from_states(prob, 0.0, tau, {Vector{1.0}});
  const auto traj = bdf_integrate(prob, h, tau, 5, 1);
  CHECK(traj.factorizations == 5);
  double y = 1.0;
  for (int s = 1; s <= 5; ++s) y /= 1.0 + tau * (1.0 + s * tau);
  CHECK(traj.final_state[0] == doctest::Approx(y).epsilon(1e-14));
}

TEST_CASE("observed bdf order on the diagonal problem") {
  EigenvalueSpec spec;
  const auto prob = diagonal_test_problem(spec);
  for (int p = 1; p <= 5; ++p) {
    std::vector<harness::ExperimentRecord> series;
    for (std::size_t steps = 16; steps <= 8192; steps *= 2) {
      series.push_back(harness::run_single(prob, harness::MethodSpec::bdf(p), steps, 0.0, 1.0));
    }
    const auto fit = harness::asymptotic_slope(series, 1e-13);
    REQUIRE(fit.has_value());
    CAPTURE(p);
    CHECK(std::abs(fit->slope - p) <= 0.4);
  }
}
