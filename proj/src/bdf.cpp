#include "mrms/bdf.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace mrms {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

BdfScheme bdf_coefficients(int p) {
  if (p < 1 || p > kMaxBdfOrder) {
    throw std::invalid_argument("bdf_coefficients: order must be in [1, 6], got " + std::to_string(p));
  }
  // tau y'(t_k) ~ sum_{j=1}^p (1/j) nabla^j y_k, nabla^j y_k = sum_i (-1)^i C(j,i) y_{k-i}.
  BdfScheme s;
  s.order = p;
  s.coeffs.assign(static_cast<std::size_t>(p + 1), 0.0);
  for (int i = 0; i <= p; ++i) {
    double c = 0.0;
    for (int j = std::max(i, 1); j <= p; ++j) c += binomial(j, i) / j;
    s.coeffs[static_cast<std::size_t>(p - i)] = (i % 2 == 0 ? c : -c);
  }
  return s;
}

Trajectory bdf_integrate(const LinearProblem& problem, const HistoryWindow& history, double tau,
                         std::size_t steps, int p, const BdfOptions& options) {
  const BdfScheme scheme = bdf_coefficients(p);
  const auto order = static_cast<std::size_t>(p);
  if (history.size() < order) {
    throw std::invalid_argument("bdf_integrate: history holds " + std::to_string(history.size()) +
                                " values, BDF(" + std::to_string(p) + ") needs " + std::to_string(p));
  }
  if (std::abs(history.tau() - tau) > 1e-12 * tau) {
    throw std::invalid_argument("bdf_integrate: step size differs from history spacing");
  }
  const std::size_t n = problem.dim();

  Trajectory traj;
  const auto start = Clock::now();

  // Last p states, oldest first.
  std::deque<Vector> window;
  for (std::size_t j = history.size() - order; j < history.size(); ++j) window.push_back(history[j].y);
  if (options.store_states) {
    for (std::size_t j = 0; j < history.size(); ++j) {
      traj.times.push_back(history[j].t);
      traj.states.push_back(history[j].y);
    }
  }

  std::optional<linalg::BandedLu> lu;
  const double ck = scheme.leading();
  auto factor = [&](double t, std::size_t step) {
    const auto f0 = Clock::now();
    const auto a = problem.matrix_at(t);
    try {
      lu.emplace(linalg::BandedMatrix::from_csc(*a, tau, -ck));
    } catch (const std::runtime_error& e) {
      throw IntegrationError(step, std::string("shifted matrix tau*A - c_k*I: ") + e.what());
    }
    ++traj.factorizations;
    traj.factor_seconds += seconds_since(f0);
  };

  Vector rhs(n);
  double t_k = history.newest().t;
  for (std::size_t s = 1; s <= steps; ++s) {
    t_k = history.time_at(history.newest_index() + s);
    if (!lu || !problem.is_autonomous_matrix()) factor(t_k, s);

    const auto a0 = Clock::now();
    const Vector b = problem.forcing_at(t_k);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -tau * b[i];
    for (int j = 1; j <= p; ++j) {
      const double c = scheme.back(j);
      const Vector& y = window[order - static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < n; ++i) rhs[i] += c * y[i];
    }
    traj.assembly_seconds += seconds_since(a0);

    const auto s0 = Clock::now();
    Vector y = rhs;
    lu->solve_in_place(y);
    traj.solve_seconds += seconds_since(s0);
    for (double v : y) {
      if (!std::isfinite(v)) throw IntegrationError(s, "non-finite BDF solution");
    }

    if (options.store_states) {
      traj.times.push_back(t_k);
      traj.states.push_back(y);
    }
    window.pop_front();
    window.push_back(std::move(y));
    ++traj.steps;
  }

  traj.final_time = t_k;
  traj.final_state = window.back();
  traj.total_seconds = seconds_since(start);
  return traj;
}

}  // namespace mrms
