#include "mrms/mre.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mrms/linalg.hpp"

namespace mrms::mre {

void MreInstance::validate() const {
  if (z.size() != eta.size()) throw std::invalid_argument("MreInstance: z and eta differ in length");
  if (z.size() < 2) throw std::invalid_argument("MreInstance: need n >= 2");
}

MreFit mre_fit(const MreInstance& inst) {
  inst.validate();
  const std::size_t n = inst.z.size();
  bool any = false;
  for (double e : inst.eta) any = any || e != 0.0;
  if (!any) throw std::invalid_argument("mre_fit: all components of y_0 vanish");

  linalg::DenseThinMatrix w(n, 2);
  linalg::Vector g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = inst.z[i];
    w(i, 0) = inst.eta[i] * (zi - 1.0);
    w(i, 1) = inst.eta[i] * zi * (zi - 1.0);
    g[i] = -inst.eta[i];
  }
  const auto ls = linalg::least_squares_min_norm(w, g);
  return MreFit{{ls.gamma[0], ls.gamma[1]}, ls.residual_norm, ls.rank};
}

MreCoefficients mre_solve(const MreInstance& inst) { return mre_fit(inst).coeffs; }

double mre_R(const MreCoefficients& c, double z) { return c.alpha + c.beta * z; }

double mre_P(const MreCoefficients& c, double z) { return 1.0 + (z - 1.0) * mre_R(c, z); }

std::vector<double> mre_step(const MreInstance& inst) {
  const auto c = mre_solve(inst);
  std::vector<double> y(inst.z.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = mre_R(c, inst.z[i]) * inst.eta[i];
  return y;
}

std::vector<double> implicit_euler_step(const MreInstance& inst) {
  inst.validate();
  std::vector<double> y(inst.z.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (inst.z[i] == 1.0) throw std::invalid_argument("implicit_euler_step: z_i = 1 is singular");
    y[i] = inst.eta[i] / (1.0 - inst.z[i]);
  }
  return y;
}

bool well_posed(const MreInstance& inst) {
  inst.validate();
  const std::size_t n = inst.z.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (inst.eta[i] == 0.0 || inst.z[i] == 1.0) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (inst.eta[j] != 0.0 && inst.z[j] != 1.0 && inst.z[i] != inst.z[j]) return true;
    }
  }
  return false;
}

KramerDeterminants kramer_determinants(const MreInstance& inst) {
  if (inst.z.size() != inst.eta.size() || inst.z.empty()) {
    throw std::invalid_argument("kramer_determinants: bad instance");
  }
  const std::size_t n = inst.z.size();
  KramerDeterminants d;
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = inst.z[i];
    const double si = 1.0 - zi;
    const double ai = inst.eta[i] * inst.eta[i] * si * si;
    double inner_a = 0.0;  // sum_j eta_j^2 s_j^2 (z_i - z_j)
    double inner_b = 0.0;  // sum_j eta_j^2 s_j (z_i - z_j)
    for (std::size_t j = 0; j < n; ++j) {
      const double sj = 1.0 - inst.z[j];
      const double e2 = inst.eta[j] * inst.eta[j];
      inner_a += e2 * sj * sj * (zi - inst.z[j]);
      inner_b += e2 * sj * (zi - inst.z[j]);
    }
    d.delta += ai * zi * inner_a;
    d.delta1 += ai * zi * inner_b;
    d.delta2 -= ai * inner_b;
  }
  return d;
}

KramerDeterminants kramer_increments(const MreInstance& inst) {
  if (inst.z.size() != inst.eta.size() || inst.z.size() < 2) {
    throw std::invalid_argument("kramer_increments: need n >= 2");
  }
  const std::size_t last = inst.z.size() - 1;
  const double zn = inst.z[last];
  const double sn = 1.0 - zn;
  const double en2 = inst.eta[last] * inst.eta[last];
  KramerDeterminants d;
  for (std::size_t i = 0; i < last; ++i) {
    const double zi = inst.z[i];
    const double si = 1.0 - zi;
    const double ei2 = inst.eta[i] * inst.eta[i];
    const double dz2 = (zi - zn) * (zi - zn);
    d.delta += ei2 * si * si * dz2;
    d.delta1 += ei2 * si * dz2 * (1.0 - zi - zn);
    d.delta2 += ei2 * si * dz2;
  }
  d.delta *= en2 * sn * sn;
  d.delta1 *= en2 * sn;
  d.delta2 *= en2 * sn;
  return d;
}

MinimaxPolynomial minimax_polynomial(double z_n) {
  if (!(z_n < 0.0)) throw std::invalid_argument("minimax_polynomial: z_n must be negative");
  const double denom = z_n * z_n - 8.0 * z_n + 8.0;
  MinimaxPolynomial p;
  p.c2 = 8.0 / denom;
  p.c1 = -8.0 * z_n / denom;
  p.c0 = z_n * z_n / denom;
  p.eps = z_n * z_n / denom;
  return p;
}

double bn_evaluate(std::size_t n, double z) {
  return (2.0 - z) * (z * z - 8.0 * z + 8.0) - std::sqrt(static_cast<double>(n)) * z * z;
}

namespace {

double bisect(std::size_t n, double lo, double hi) {
  // Assumes bn_evaluate changes sign on [lo, hi].
  const bool lo_positive = bn_evaluate(n, lo) > 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((bn_evaluate(n, mid) > 0.0) == lo_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::optional<std::pair<double, double>> bn_roots(std::size_t n) {
  if (n < 2) throw std::invalid_argument("bn_roots: n must be >= 2");
  // B_n(z) = -z^3 + (10 - sqrt n) z^2 - 24 z + 16; the local minimum on z < 0
  // is the smaller critical point of 3 z^2 - 2 (10 - sqrt n) z + 24.
  const double c = 10.0 - std::sqrt(static_cast<double>(n));
  const double disc = c * c - 72.0;
  if (disc < 0.0) return std::nullopt;
  const double z_min = (c - std::sqrt(disc)) / 3.0;
  const double z_max = (c + std::sqrt(disc)) / 3.0;
  if (!(z_max < 0.0) || bn_evaluate(n, z_min) >= 0.0) return std::nullopt;

  // B_n(10 - sqrt n) = 24 (sqrt n - 10) + 16 > 0, which brackets a_n from the left.
  double left = std::min(c, z_min - 1.0);
  while (bn_evaluate(n, left) <= 0.0) left = 2.0 * left - 1.0;
  const double a = bisect(n, left, z_min);
  const double b = bisect(n, z_min, z_max);
  return std::make_pair(a, b);
}

ThreeModeResponse three_mode_response(double z3, double eta) {
  const double e2 = eta * eta;
  const double q = 5.0 * z3 * z3 + 8.0 * z3 + 4.0;
  const double denom = e2 * (z3 - 1.0) * (z3 - 1.0) * q + 4.0;
  ThreeModeResponse r;
  r.r_at_z3 = (2.0 * (z3 + 2.0) - e2 * (z3 - 1.0) * q) / denom;
  r.r_at_0 = (e2 * ((z3 - 2.0) * z3 * (z3 + 1.0) * (3.0 * z3 - 1.0) + 4.0) + 4.0) / denom;
  return r;
}

MreInstance three_mode_instance(double z3, double eta) { return MreInstance{{0.0, -1.0, z3}, {1.0, 1.0, eta}}; }

}  // namespace mrms::mre
