#pragma once

// Sliding window of past steps and the trajectory record shared by the
// BDF and MRMS integrators.

#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrms/linalg.hpp"
#include "mrms/problems.hpp"

namespace mrms {

struct HistoryEntry {
  double t = 0.0;
  Vector y;
  Vector f;
  // A * (-y) and A * (tau f), the products of A with this entry's two
  // columns of V. Empty until computed with a constant matrix.
  Vector a_neg_y;
  Vector a_tau_f;

  bool has_cached_products() const { return !a_neg_y.empty() && !a_tau_f.empty(); }
};

/// The k most recent (t_j, y_j, f_j) triples at uniform spacing tau.
/// Times are t_origin + index * tau, so long runs do not accumulate drift.
class HistoryWindow {
 public:
  /// Computes f_j = A(t_j) y_j + b(t_j) for each state.
  static HistoryWindow from_states(const LinearProblem& problem, double t0, double tau,
                                   const std::vector<Vector>& states);
  /// k starting values from the problem's exact solution.
  static HistoryWindow from_exact(const LinearProblem& problem, double t0, double tau, std::size_t k);

  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const { return entries_.empty() ? 0 : entries_.front().y.size(); }
  double tau() const { return tau_; }

  const HistoryEntry& operator[](std::size_t j) const { return entries_.at(j); }
  HistoryEntry& operator[](std::size_t j) { return entries_.at(j); }
  const HistoryEntry& newest() const { return entries_.back(); }

  /// Index of the newest entry on the uniform grid t_origin + j tau.
  std::size_t newest_index() const { return newest_index_; }
  double time_at(std::size_t grid_index) const {
    return origin_ + static_cast<double>(grid_index) * tau_;
  }
  double next_time() const { return time_at(newest_index_ + 1); }

  /// Drops the oldest entry and appends (next_time(), y, f).
  void advance(Vector y, Vector f);

  /// Max over entries of ||f_j - A(t_j) y_j - b(t_j)||_inf / max(1, ||f_j||_inf).
  double consistency_error(const LinearProblem& problem) const;

 private:
  HistoryWindow(double origin, double tau) : origin_(origin), tau_(tau) {}

  double origin_;
  double tau_;
  std::size_t newest_index_ = 0;
  std::deque<HistoryEntry> entries_;
};

struct StepDiagnostics {
  double residual_norm = 0.0;
  std::size_t ls_rank = 0;
  /// alpha_0..alpha_{k-1} then beta_0..beta_{k-1}.
  Vector gamma;
  /// Matrix-vector products spent forming A V for this step.
  std::size_t assembly_matvecs = 0;
};

struct Trajectory {
  std::vector<double> times;
  /// Starting values followed by computed states; empty when not stored.
  std::vector<Vector> states;
  std::vector<StepDiagnostics> diagnostics;
  double final_time = 0.0;
  Vector final_state;

  std::size_t steps = 0;
  std::size_t factorizations = 0;
  std::size_t matvecs = 0;

  double total_seconds = 0.0;
  double factor_seconds = 0.0;
  /// MRMS: V, W, g and f evaluation. BDF: right-hand side formation.
  double assembly_seconds = 0.0;
  /// MRMS: least squares. BDF: back substitution.
  double solve_seconds = 0.0;
};

/// Failure during integration; carries the 1-based step index.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(std::size_t step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace mrms
