#pragma once

// Minimal residual multistep MRMS(k, p) for y' = A(t) y + b(t).
//
// Each step looks for y_k in the span of V = [-y_0 | ... | -y_{k-1} |
// tau f_0 | ... | tau f_{k-1}] that minimizes the 2-norm of the BDF(p)
// residual r(x) = (tau A(t_k) - c_k I) x + tau b(t_k) - sum_j c_{k-j} y_{k-j}.
// With W = (tau A(t_k) - c_k I) V and g = sum_j c_{k-j} y_{k-j} - tau b(t_k),
// gamma = argmin ||W gamma - g|| and y_k = V gamma.

#include <cstddef>
#include <utility>

#include "mrms/bdf.hpp"
#include "mrms/history.hpp"
#include "mrms/linalg.hpp"
#include "mrms/problems.hpp"

namespace mrms {

using linalg::DenseThinMatrix;

struct MrmsConfig {
  int k = 1;
  int p = 1;
  /// Reuse A * (columns of V) across steps when A and tau are constant.
  bool cache_av = true;
  /// Negative selects linalg::default_rank_tolerance.
  double rank_tol = -1.0;

  /// Throws std::invalid_argument unless 1 <= p <= min(k, 6).
  void validate() const;
};

/// n x 2k matrix [-y_0 | ... | -y_{k-1} | tau f_0 | ... | tau f_{k-1}].
DenseThinMatrix assemble_V(const HistoryWindow& history);

struct LeastSquaresSystem {
  DenseThinMatrix w;
  Vector g;
  std::size_t fresh_matvecs = 0;
};

/// W = tau A(t_k) V - c_k V column by column, g = sum_{j=1}^p c_{k-j} y_{k-j} - tau b(t_k).
/// With `use_cache`, a constant A and tau equal to the window spacing, the
/// products A * (column) are stored in the history entries and only the
/// columns of the newest entry are multiplied afresh. Both paths evaluate
/// each column with the same operations, so W is bitwise identical.
LeastSquaresSystem assemble_W_g(const LinearProblem& problem, double t_k, double tau,
                                const DenseThinMatrix& v, HistoryWindow& history,
                                const BdfScheme& scheme, bool use_cache);

struct StepResult {
  Vector y;
  Vector f;
  StepDiagnostics diagnostics;
};

/// One MRMS step from a window of exactly config.k entries. The window is
/// advanced (oldest dropped, (t_k, y_k, f_k) appended).
StepResult mrms_step(const LinearProblem& problem, HistoryWindow& history, const MrmsConfig& config,
                     const BdfScheme& scheme);
StepResult mrms_step(const LinearProblem& problem, HistoryWindow& history, const MrmsConfig& config);

/// Residual r(x) of the BDF(p) formula at t_k, evaluated directly.
Vector bdf_residual(const LinearProblem& problem, const HistoryWindow& history, const BdfScheme& scheme,
                    double t_k, std::span<const double> x);

struct MrmsOptions {
  bool store_states = true;
  bool store_diagnostics = true;
};

struct MrmsRun {
  Trajectory trajectory;
  HistoryWindow history;
};

/// `steps` consecutive MRMS steps starting from `history`.
MrmsRun mrms_integrate(const LinearProblem& problem, HistoryWindow history, const MrmsConfig& config,
                       std::size_t steps, const MrmsOptions& options = {});

}  // namespace mrms
