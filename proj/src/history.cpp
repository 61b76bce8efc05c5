#include "mrms/history.hpp"

#include <algorithm>
#include <cmath>

namespace mrms {

HistoryWindow HistoryWindow::from_states(const LinearProblem& problem, double t0, double tau,
                                         const std::vector<Vector>& states) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("HistoryWindow: tau must be > 0");
  if (states.empty()) throw std::invalid_argument("HistoryWindow: need at least one state");
  HistoryWindow h(t0, tau);
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (states[j].size() != problem.dim()) {
      throw std::invalid_argument("HistoryWindow: state dimension does not match problem");
    }
    for (double v : states[j]) {
      if (!std::isfinite(v)) throw std::invalid_argument("HistoryWindow: non-finite starting value");
    }
    HistoryEntry e;
    e.t = h.time_at(j);
    e.y = states[j];
    e.f = problem.rhs(e.t, e.y);
    h.entries_.push_back(std::move(e));
  }
  h.newest_index_ = states.size() - 1;
  return h;
}

HistoryWindow HistoryWindow::from_exact(const LinearProblem& problem, double t0, double tau,
                                        std::size_t k) {
  if (!problem.has_exact()) throw std::invalid_argument("HistoryWindow: problem has no exact solution");
  if (!(tau > 0.0)) throw std::invalid_argument("HistoryWindow: tau must be > 0");
  std::vector<Vector> states;
  states.reserve(k);
  for (std::size_t j = 0; j < k; ++j) states.push_back(*problem.exact_at(t0 + static_cast<double>(j) * tau));
  return from_states(problem, t0, tau, states);
}

void HistoryWindow::advance(Vector y, Vector f) {
  if (y.size() != dim() || f.size() != dim()) {
    throw std::invalid_argument("HistoryWindow::advance: dimension mismatch");
  }
  HistoryEntry e;
  e.t = next_time();
  e.y = std::move(y);
  e.f = std::move(f);
  entries_.pop_front();
  entries_.push_back(std::move(e));
  ++newest_index_;
}

double HistoryWindow::consistency_error(const LinearProblem& problem) const {
  double worst = 0.0;
  for (const auto& e : entries_) {
    const Vector f = problem.rhs(e.t, e.y);
    double diff = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) diff = std::max(diff, std::abs(f[i] - e.f[i]));
    worst = std::max(worst, diff / std::max(1.0, linalg::norm_inf(e.f)));
  }
  return worst;
}

}  // namespace mrms
