#pragma once

#include <cstddef>
#include <vector>

#include "mrms/history.hpp"
#include "mrms/problems.hpp"

namespace mrms {

/// p-step BDF formula c_k y_k + c_{k-1} y_{k-1} + ... + c_{k-p} y_{k-p} = tau f_k.
struct BdfScheme {
  int order = 0;
  /// c_{k-p}, ..., c_k (oldest to newest).
  std::vector<double> coeffs;

  double leading() const { return coeffs.back(); }
  /// c_{k-j} for j = 0..order.
  double back(int j) const { return coeffs[static_cast<std::size_t>(order - j)]; }
};

inline constexpr int kMaxBdfOrder = 6;

/// Derivative weights at the rightmost of p + 1 unit-spaced nodes.
/// Throws std::invalid_argument for p outside [1, 6].
BdfScheme bdf_coefficients(int p);

struct BdfOptions {
  bool store_states = true;
};

/// Fixed-step BDF(p) from the last p entries of `history` (spacing must be
/// tau). Solves (tau A(t_k) - c_k I) y_k = sum_{j=1}^p c_{k-j} y_{k-j} - tau b(t_k)
/// with a banded LU that is computed once when A is constant and once per
/// step otherwise.
Trajectory bdf_integrate(const LinearProblem& problem, const HistoryWindow& history, double tau,
                         std::size_t steps, int p, const BdfOptions& options = {});

}  // namespace mrms
