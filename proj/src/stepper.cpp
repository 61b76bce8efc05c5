#include "mrms/stepper.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mrms {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct PhaseTimes {
  double assembly = 0.0;
  double solve = 0.0;
};

LeastSquaresSystem assemble_with_matrix(const SparseMatrixCSC& a, const LinearProblem& problem,
                                        double t_k, double tau, const DenseThinMatrix& v,
                                        HistoryWindow& history, const BdfScheme& scheme,
                                        bool use_cache) {
  const std::size_t n = problem.dim();
  const std::size_t k = history.size();
  if (v.rows() != n || v.cols() != 2 * k) throw std::invalid_argument("assemble_W_g: V has wrong shape");
  if (static_cast<std::size_t>(scheme.order) > k) {
    throw std::invalid_argument("assemble_W_g: BDF order exceeds history length");
  }
  const bool cache = use_cache && problem.is_autonomous_matrix() && tau == history.tau();
  const double ck = scheme.leading();

  LeastSquaresSystem sys{DenseThinMatrix(n, 2 * k), Vector(n, 0.0), 0};
  Vector scratch(n);

  auto fill_column = [&](std::size_t col, Vector& cached) {
    const auto vc = v.col(col);
    const Vector* av = &cached;
    if (!cache || cached.empty()) {
      linalg::csc_matvec(a, vc, scratch);
      ++sys.fresh_matvecs;
      if (cache) {
        cached = scratch;
      } else {
        av = &scratch;
      }
    }
    auto wc = sys.w.col(col);
    for (std::size_t i = 0; i < n; ++i) wc[i] = tau * (*av)[i] - ck * vc[i];
  };

  for (std::size_t j = 0; j < k; ++j) {
    auto& entry = history[j];
    if (!cache) {
      entry.a_neg_y.clear();
      entry.a_tau_f.clear();
    }
    fill_column(j, entry.a_neg_y);
    fill_column(k + j, entry.a_tau_f);
  }

  const Vector b = problem.forcing_at(t_k);
  for (std::size_t i = 0; i < n; ++i) sys.g[i] = -tau * b[i];
  for (int j = 1; j <= scheme.order; ++j) {
    const double c = scheme.back(j);
    const Vector& y = history[k - static_cast<std::size_t>(j)].y;
    for (std::size_t i = 0; i < n; ++i) sys.g[i] += c * y[i];
  }
  return sys;
}

StepResult step_impl(const LinearProblem& problem, HistoryWindow& history, const MrmsConfig& config,
                     const BdfScheme& scheme, PhaseTimes* times) {
  config.validate();
  if (history.size() != static_cast<std::size_t>(config.k)) {
    throw std::invalid_argument("mrms_step: history holds " + std::to_string(history.size()) +
                                " entries, expected k = " + std::to_string(config.k));
  }
  if (scheme.order != config.p) throw std::invalid_argument("mrms_step: scheme order differs from p");

  const auto a0 = Clock::now();
  const double tau = history.tau();
  const double t_k = history.next_time();
  const auto a = problem.matrix_at(t_k);
  const DenseThinMatrix v = assemble_V(history);
  LeastSquaresSystem sys =
      assemble_with_matrix(*a, problem, t_k, tau, v, history, scheme, config.cache_av);
  if (times) times->assembly += seconds_since(a0);

  const auto s0 = Clock::now();
  const linalg::LeastSquaresResult ls =
      config.rank_tol < 0.0 ? linalg::least_squares_min_norm(sys.w, sys.g)
                            : linalg::least_squares_min_norm(sys.w, sys.g, config.rank_tol);
  if (times) times->solve += seconds_since(s0);

  const auto f0 = Clock::now();
  StepResult out;
  out.y = v.apply(ls.gamma);
  for (double x : out.y) {
    if (!std::isfinite(x)) throw std::runtime_error("non-finite MRMS solution");
  }
  out.f = problem.rhs(*a, t_k, out.y);
  out.diagnostics.residual_norm = ls.residual_norm;
  out.diagnostics.ls_rank = ls.rank;
  out.diagnostics.gamma = ls.gamma;
  out.diagnostics.assembly_matvecs = sys.fresh_matvecs;
  history.advance(out.y, out.f);
  if (times) times->assembly += seconds_since(f0);
  return out;
}

}  // namespace

void MrmsConfig::validate() const {
  if (k < 1) throw std::invalid_argument("MrmsConfig: k must be >= 1");
  if (p < 1 || p > kMaxBdfOrder) throw std::invalid_argument("MrmsConfig: p must be in [1, 6]");
  if (p > k) throw std::invalid_argument("MrmsConfig: p must not exceed k");
}

DenseThinMatrix assemble_V(const HistoryWindow& history) {
  const std::size_t n = history.dim();
  const std::size_t k = history.size();
  const double tau = history.tau();
  DenseThinMatrix v(n, 2 * k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& e = history[j];
    auto neg_y = v.col(j);
    auto tau_f = v.col(k + j);
    for (std::size_t i = 0; i < n; ++i) {
      neg_y[i] = -e.y[i];
      tau_f[i] = tau * e.f[i];
    }
  }
  return v;
}

LeastSquaresSystem assemble_W_g(const LinearProblem& problem, double t_k, double tau,
                                const DenseThinMatrix& v, HistoryWindow& history,
                                const BdfScheme& scheme, bool use_cache) {
  const auto a = problem.matrix_at(t_k);
  return assemble_with_matrix(*a, problem, t_k, tau, v, history, scheme, use_cache);
}

Vector bdf_residual(const LinearProblem& problem, const HistoryWindow& history, const BdfScheme& scheme,
                    double t_k, std::span<const double> x) {
  const double tau = history.tau();
  const std::size_t k = history.size();
  Vector r = linalg::csc_matvec(*problem.matrix_at(t_k), x);
  const Vector b = problem.forcing_at(t_k);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = tau * r[i] - scheme.leading() * x[i] + tau * b[i];
  for (int j = 1; j <= scheme.order; ++j) {
    const Vector& y = history[k - static_cast<std::size_t>(j)].y;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= scheme.back(j) * y[i];
  }
  return r;
}

StepResult mrms_step(const LinearProblem& problem, HistoryWindow& history, const MrmsConfig& config,
                     const BdfScheme& scheme) {
  return step_impl(problem, history, config, scheme, nullptr);
}

StepResult mrms_step(const LinearProblem& problem, HistoryWindow& history, const MrmsConfig& config) {
  config.validate();
  return step_impl(problem, history, config, bdf_coefficients(config.p), nullptr);
}

MrmsRun mrms_integrate(const LinearProblem& problem, HistoryWindow history, const MrmsConfig& config,
                       std::size_t steps, const MrmsOptions& options) {
  config.validate();
  const BdfScheme scheme = bdf_coefficients(config.p);
  if (history.size() != static_cast<std::size_t>(config.k)) {
    throw std::invalid_argument("mrms_integrate: history holds " + std::to_string(history.size()) +
                                " entries, expected k = " + std::to_string(config.k));
  }
  MrmsRun run{Trajectory{}, std::move(history)};
  Trajectory& traj = run.trajectory;
  HistoryWindow& h = run.history;

  if (options.store_states) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      traj.times.push_back(h[j].t);
      traj.states.push_back(h[j].y);
    }
  }

  PhaseTimes phases;
  const auto start = Clock::now();
  for (std::size_t s = 1; s <= steps; ++s) {
    StepResult r;
    try {
      r = step_impl(problem, h, config, scheme, &phases);
    } catch (const std::exception& e) {
      throw IntegrationError(s, e.what());
    }
    // One product per fresh V column plus one for f_k.
    traj.matvecs += r.diagnostics.assembly_matvecs + 1;
    if (options.store_states) {
      traj.times.push_back(h.newest().t);
      traj.states.push_back(std::move(r.y));
    }
    if (options.store_diagnostics) traj.diagnostics.push_back(std::move(r.diagnostics));
    ++traj.steps;
  }
  traj.total_seconds = seconds_since(start);
  traj.assembly_seconds = phases.assembly;
  traj.solve_seconds = phases.solve;
  traj.final_time = h.newest().t;
  traj.final_state = h.newest().y;
  return run;
}

}  // namespace mrms
