#pragma once

// Linear stability tools for the minimal residual Euler method MRMS(1,1)
// applied to y' = diag(lambda) y, y(0) = eta, with z_i = tau lambda_i.
// One step gives y_1 = R(tau Lambda) eta with R(z) = alpha + beta z, and
// the implicit Euler residual is P(tau Lambda) eta with P(z) = 1 + (z - 1) R(z).

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace mrms::mre {

struct MreInstance {
  std::vector<double> z;
  std::vector<double> eta;

  /// Throws std::invalid_argument unless sizes match and n >= 2.
  void validate() const;
};

struct MreCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
};

struct MreFit {
  MreCoefficients coeffs;
  /// || W (alpha, beta)^T + eta ||_2
  double residual_norm = 0.0;
  std::size_t rank = 0;
};

/// Least-squares fit with W rows (eta_i (z_i - 1), eta_i z_i (z_i - 1)) and
/// right-hand side -eta, through the pivoted-QR kernel. Minimal-norm
/// coefficients when the problem is not well-posed. Throws when all eta_i = 0.
MreFit mre_fit(const MreInstance& inst);
MreCoefficients mre_solve(const MreInstance& inst);

double mre_R(const MreCoefficients& c, double z);
double mre_P(const MreCoefficients& c, double z);

/// y_1 = R(z_i) eta_i.
std::vector<double> mre_step(const MreInstance& inst);
/// y_1 = eta_i / (1 - z_i).
std::vector<double> implicit_euler_step(const MreInstance& inst);

/// True iff some pair i != j has z_i != z_j, z_i != 1, z_j != 1 and
/// eta_i eta_j != 0, i.e. the two columns of W are independent.
bool well_posed(const MreInstance& inst);

/// Cramer determinants of the 2 x 2 normal equations, in the collected
/// double-sum form with s_i = 1 - z_i. alpha = delta1 / delta and
/// beta = delta2 / delta when delta != 0.
struct KramerDeterminants {
  double delta = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
};
KramerDeterminants kramer_determinants(const MreInstance& inst);

/// Increments picked up when the last component is appended to the first
/// n - 1: kramer_determinants(all) = kramer_determinants(first n-1) + increments.
KramerDeterminants kramer_increments(const MreInstance& inst);

/// Degree-2 minimax polynomial on [z_n, 0] normalized by P(1) = 1,
/// P(z) = (8 z^2 - 8 z_n z + z_n^2) / (z_n^2 - 8 z_n + 8), and its maximum
/// deviation eps = z_n^2 / (z_n^2 - 8 z_n + 8).
struct MinimaxPolynomial {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double eps = 0.0;

  double operator()(double z) const { return (c2 * z + c1) * z + c0; }
};
/// Throws std::invalid_argument unless z_n < 0.
MinimaxPolynomial minimax_polynomial(double z_n);

/// B_n(z) = (2 - z)(z^2 - 8 z + 8) - sqrt(n) z^2.
double bn_evaluate(std::size_t n, double z);
/// The two negative roots a_n < b_n bounding the region where B_n < 0,
/// or nullopt when B_n > 0 on z <= 0. Bisection to 1e-12.
std::optional<std::pair<double, double>> bn_roots(std::size_t n);

/// Closed-form R(z3) and R(0) for the three-mode instance z = (0, -1, z3),
/// eta = (1, 1, eta). At eta = 0 the fit ignores the stiff mode and
/// R(z3) = 1 + z3 / 2.
struct ThreeModeResponse {
  double r_at_z3 = 0.0;
  double r_at_0 = 0.0;
};
ThreeModeResponse three_mode_response(double z3, double eta);
MreInstance three_mode_instance(double z3, double eta);

}  // namespace mrms::mre
