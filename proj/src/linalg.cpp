#include "mrms/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mrms::linalg {

double norm2(std::span<const double> x) {
  // Scaled accumulation so that huge entries (stiff columns) do not overflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// ---------------------------------------------------------------------------
// DenseThinMatrix

DenseThinMatrix::DenseThinMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Vector DenseThinMatrix::apply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::invalid_argument("DenseThinMatrix::apply: length mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const auto c = col(j);
    for (std::size_t i = 0; i < rows_; ++i) y[i] += c[i] * xj;
  }
  return y;
}

Vector DenseThinMatrix::apply_transpose(std::span<const double> x) const {
  if (x.size() != rows_) {
    throw std::invalid_argument("DenseThinMatrix::apply_transpose: length mismatch");
  }
  Vector y(cols_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) y[j] = dot(col(j), x);
  return y;
}

double DenseThinMatrix::max_col_norm() const {
  double m = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) m = std::max(m, norm2(col(j)));
  return m;
}

double DenseThinMatrix::frobenius_norm() const { return norm2(data_); }

// ---------------------------------------------------------------------------
// SparseMatrixCSC

SparseMatrixCSC::SparseMatrixCSC(std::size_t n, std::vector<std::size_t> col_ptr,
                                 std::vector<std::size_t> row_idx, std::vector<double> values)
    : n_(n), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)), values_(std::move(values)) {
  if (col_ptr_.size() != n_ + 1 || col_ptr_.front() != 0) {
    throw std::invalid_argument("SparseMatrixCSC: column pointer array must have n+1 entries from 0");
  }
  if (row_idx_.size() != values_.size() || col_ptr_.back() != values_.size()) {
    throw std::invalid_argument("SparseMatrixCSC: inconsistent nonzero counts");
  }
  for (std::size_t j = 0; j < n_; ++j) {
    if (col_ptr_[j] > col_ptr_[j + 1]) {
      throw std::invalid_argument("SparseMatrixCSC: column pointers must be nondecreasing");
    }
    for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] >= n_) throw std::invalid_argument("SparseMatrixCSC: row index out of range");
      if (p > col_ptr_[j] && row_idx_[p] <= row_idx_[p - 1]) {
        throw std::invalid_argument("SparseMatrixCSC: row indices must increase within a column");
      }
    }
  }
}

SparseMatrixCSC SparseMatrixCSC::from_triplets(std::size_t n, std::vector<Triplet> entries) {
  for (const auto& e : entries) {
    if (e.row >= n || e.col >= n) throw std::invalid_argument("from_triplets: index out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  std::vector<std::size_t> col_ptr(n + 1, 0);
  std::vector<std::size_t> rows;
  std::vector<double> vals;
  rows.reserve(entries.size());
  vals.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& t = entries[e];
    if (e > 0 && entries[e - 1].col == t.col && entries[e - 1].row == t.row) {
      vals.back() += t.value;
      continue;
    }
    rows.push_back(t.row);
    vals.push_back(t.value);
    ++col_ptr[t.col + 1];
  }
  std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
  return SparseMatrixCSC(n, std::move(col_ptr), std::move(rows), std::move(vals));
}

SparseMatrixCSC SparseMatrixCSC::identity(std::size_t n) {
  Vector ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrixCSC SparseMatrixCSC::diagonal(std::span<const double> d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> col_ptr(n + 1);
  std::vector<std::size_t> rows(n);
  std::iota(col_ptr.begin(), col_ptr.end(), std::size_t{0});
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return SparseMatrixCSC(n, std::move(col_ptr), std::move(rows), Vector(d.begin(), d.end()));
}

double SparseMatrixCSC::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("SparseMatrixCSC::at");
  const auto first = row_idx_.begin() + static_cast<std::ptrdiff_t>(col_ptr_[j]);
  const auto last = row_idx_.begin() + static_cast<std::ptrdiff_t>(col_ptr_[j + 1]);
  const auto it = std::lower_bound(first, last, i);
  if (it == last || *it != i) return 0.0;
  return values_[static_cast<std::size_t>(it - row_idx_.begin())];
}

std::size_t SparseMatrixCSC::lower_bandwidth() const {
  std::size_t b = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] > j) b = std::max(b, row_idx_[p] - j);
    }
  }
  return b;
}

std::size_t SparseMatrixCSC::upper_bandwidth() const {
  std::size_t b = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      if (row_idx_[p] < j) b = std::max(b, j - row_idx_[p]);
    }
  }
  return b;
}

void csc_matvec(const SparseMatrixCSC& a, std::span<const double> x, std::span<double> out) {
  if (x.size() != a.dim() || out.size() != a.dim()) {
    throw std::invalid_argument("csc_matvec: dimension mismatch (matrix " + std::to_string(a.dim()) +
                                ", vector " + std::to_string(x.size()) + ")");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const auto& cp = a.col_ptr();
  const auto& ri = a.row_idx();
  const auto& v = a.values();
  for (std::size_t j = 0; j < a.dim(); ++j) {
    const double xj = x[j];
    for (std::size_t p = cp[j]; p < cp[j + 1]; ++p) out[ri[p]] += v[p] * xj;
  }
}

Vector csc_matvec(const SparseMatrixCSC& a, std::span<const double> x) {
  Vector y(a.dim());
  csc_matvec(a, x, y);
  return y;
}

// ---------------------------------------------------------------------------
// Banded storage and LU

BandedMatrix::BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), lower_(lower), upper_(upper), band_((lower + upper + 1) * n, 0.0) {}

BandedMatrix BandedMatrix::from_csc(const SparseMatrixCSC& a, double scale, double shift) {
  BandedMatrix b(a.dim(), a.lower_bandwidth(), a.upper_bandwidth());
  const auto& cp = a.col_ptr();
  for (std::size_t j = 0; j < a.dim(); ++j) {
    for (std::size_t p = cp[j]; p < cp[j + 1]; ++p) {
      b.set(a.row_idx()[p], j, scale * a.values()[p]);
    }
  }
  if (shift != 0.0) {
    for (std::size_t i = 0; i < a.dim(); ++i) b.set(i, i, b.get(i, i) + shift);
  }
  return b;
}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("BandedMatrix::get");
  if (!in_band(i, j)) return 0.0;
  return band_[(upper_ + i - j) + j * (lower_ + upper_ + 1)];
}

void BandedMatrix::set(std::size_t i, std::size_t j, double v) {
  if (i >= n_ || j >= n_) throw std::out_of_range("BandedMatrix::set");
  if (!in_band(i, j)) throw std::invalid_argument("BandedMatrix::set: entry outside band");
  band_[(upper_ + i - j) + j * (lower_ + upper_ + 1)] = v;
}

Vector BandedMatrix::apply(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("BandedMatrix::apply: length mismatch");
  Vector y(n_, 0.0);
  const std::size_t ld = lower_ + upper_ + 1;
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j > upper_ ? j - upper_ : 0;
    const std::size_t i1 = std::min(n_ - 1, j + lower_);
    for (std::size_t i = i0; i <= i1; ++i) y[i] += band_[(upper_ + i - j) + j * ld] * x[j];
  }
  return y;
}

BandedLu::BandedLu(const BandedMatrix& a)
    : n_(a.n_),
      lower_(a.lower_),
      upper_(a.upper_),
      ld_(2 * a.lower_ + a.upper_ + 1),
      lu_(ld_ * a.n_, 0.0),
      pivots_(a.n_) {
  const std::size_t kv = lower_ + upper_;
  // Element (i, j) lives at lu_[kv + i - j + j * ld_]; the top `lower_` rows
  // hold fill produced by row interchanges.
  auto at = [&](std::size_t i, std::size_t j) -> double& { return lu_[kv + i - j + j * ld_]; };

  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j > upper_ ? j - upper_ : 0;
    const std::size_t i1 = std::min(n_ - 1, j + lower_);
    for (std::size_t i = i0; i <= i1; ++i) at(i, j) = a.get(i, j);
  }

  std::size_t ju = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t km = std::min(lower_, n_ - 1 - j);
    std::size_t jp = 0;
    double best = std::abs(at(j, j));
    for (std::size_t r = 1; r <= km; ++r) {
      const double v = std::abs(at(j + r, j));
      if (v > best) {
        best = v;
        jp = r;
      }
    }
    pivots_[j] = j + jp;
    if (best == 0.0 || !std::isfinite(best)) {
      throw std::runtime_error("BandedLu: matrix is singular (zero pivot in column " +
                               std::to_string(j) + ")");
    }
    ju = std::max(ju, std::min(j + upper_ + jp, n_ - 1));
    if (jp != 0) {
      for (std::size_t c = j; c <= ju; ++c) std::swap(at(j, c), at(j + jp, c));
    }
    if (km > 0) {
      const double inv = 1.0 / at(j, j);
      for (std::size_t r = 1; r <= km; ++r) at(j + r, j) *= inv;
      for (std::size_t c = j + 1; c <= ju; ++c) {
        const double ujc = at(j, c);
        if (ujc == 0.0) continue;
        for (std::size_t r = 1; r <= km; ++r) at(j + r, c) -= at(j + r, j) * ujc;
      }
    }
  }
}

void BandedLu::solve_in_place(std::span<double> b) const {
  if (b.size() != n_) throw std::invalid_argument("BandedLu::solve: dimension mismatch");
  const std::size_t kv = lower_ + upper_;
  auto at = [&](std::size_t i, std::size_t j) { return lu_[kv + i - j + j * ld_]; };

  for (std::size_t j = 0; j + 1 < n_; ++j) {
    const std::size_t km = std::min(lower_, n_ - 1 - j);
    const std::size_t l = pivots_[j];
    if (l != j) std::swap(b[l], b[j]);
    const double bj = b[j];
    if (bj == 0.0) continue;
    for (std::size_t r = 1; r <= km; ++r) b[j + r] -= at(j + r, j) * bj;
  }
  for (std::size_t j = n_; j-- > 0;) {
    b[j] /= at(j, j);
    const double bj = b[j];
    if (bj == 0.0) continue;
    const std::size_t i0 = j > kv ? j - kv : 0;
    for (std::size_t i = i0; i < j; ++i) b[i] -= at(i, j) * bj;
  }
}

Vector BandedLu::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

// ---------------------------------------------------------------------------
// Least squares

namespace {

struct Householder {
  double tau = 0.0;
  double beta = 0.0;
};

// Turns x into the reflector vector v (v[0] = 1 implied, stored in x[1:])
// so that (I - tau v v^T) x_original = beta e_1.
Householder make_reflector(std::span<double> x) {
  Householder h;
  const double alpha = x[0];
  const double xnorm = norm2(x.subspan(1));
  if (xnorm == 0.0) {
    h.tau = 0.0;
    h.beta = alpha;
    return h;
  }
  h.beta = -std::copysign(std::hypot(alpha, xnorm), alpha);
  h.tau = (h.beta - alpha) / h.beta;
  const double scale = 1.0 / (alpha - h.beta);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] *= scale;
  x[0] = h.beta;
  return h;
}

// y <- (I - tau v v^T) y with v = [1, v_tail].
void apply_reflector(double tau, std::span<const double> v_tail, std::span<double> y) {
  if (tau == 0.0) return;
  double s = y[0];
  for (std::size_t i = 0; i < v_tail.size(); ++i) s += v_tail[i] * y[i + 1];
  s *= tau;
  y[0] -= s;
  for (std::size_t i = 0; i < v_tail.size(); ++i) y[i + 1] -= s * v_tail[i];
}

void require_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string("least_squares_min_norm: non-finite entry in ") + what);
    }
  }
}

}  // namespace

double default_rank_tolerance(const DenseThinMatrix& w) {
  return std::numeric_limits<double>::epsilon() *
         static_cast<double>(std::max(w.rows(), w.cols())) * w.max_col_norm();
}

LeastSquaresResult least_squares_min_norm(const DenseThinMatrix& w, std::span<const double> g) {
  return least_squares_min_norm(w, g, default_rank_tolerance(w));
}

LeastSquaresResult least_squares_min_norm(const DenseThinMatrix& w, std::span<const double> g,
                                          double rank_tol) {
  const std::size_t n = w.rows();
  const std::size_t m = w.cols();
  if (g.size() != n) throw std::invalid_argument("least_squares_min_norm: rows(W) != len(g)");
  if (!(rank_tol >= 0.0)) throw std::invalid_argument("least_squares_min_norm: rank_tol < 0");
  require_finite(w.data(), "W");
  require_finite(g, "g");

  DenseThinMatrix a = w;
  Vector b(g.begin(), g.end());
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  // Pivoted Householder QR: Q^T W P = [R11 R12; 0 R22], stopped once the
  // largest remaining column norm drops to rank_tol.
  const std::size_t kmax = std::min(n, m);
  std::size_t rank = 0;
  for (std::size_t j = 0; j < kmax; ++j) {
    std::size_t best = j;
    double best_norm = -1.0;
    for (std::size_t c = j; c < m; ++c) {
      const double nrm = norm2(a.col(c).subspan(j));
      if (nrm > best_norm) {
        best_norm = nrm;
        best = c;
      }
    }
    if (best_norm <= rank_tol || best_norm == 0.0) break;
    if (best != j) {
      std::swap_ranges(a.col(j).begin(), a.col(j).end(), a.col(best).begin());
      std::swap(perm[j], perm[best]);
    }
    auto pivot_col = a.col(j).subspan(j);
    const Householder h = make_reflector(pivot_col);
    const auto v_tail = pivot_col.subspan(1);
    for (std::size_t c = j + 1; c < m; ++c) apply_reflector(h.tau, v_tail, a.col(c).subspan(j));
    apply_reflector(h.tau, v_tail, std::span<double>(b).subspan(j));
    rank = j + 1;
  }

  Vector x(m, 0.0);
  if (rank == m) {
    for (std::size_t i = m; i-- > 0;) {
      double s = b[i];
      for (std::size_t c = i + 1; c < m; ++c) s -= a(i, c) * x[c];
      x[i] = s / a(i, i);
    }
  } else if (rank > 0) {
    // Minimal-norm completion: T = [R11 R12] (rank x m). Factor T^T = Q2 [S; 0]
    // so T = S^T Q2^T, then x = Q2 [S^{-T} c; 0].
    DenseThinMatrix tt(m, rank);
    for (std::size_t i = 0; i < rank; ++i) {
      for (std::size_t c = i; c < m; ++c) tt(c, i) = a(i, c);
    }
    std::vector<double> taus(rank);
    for (std::size_t j = 0; j < rank; ++j) {
      auto col = tt.col(j).subspan(j);
      taus[j] = make_reflector(col).tau;
      const auto v_tail = col.subspan(1);
      for (std::size_t c = j + 1; c < rank; ++c) apply_reflector(taus[j], v_tail, tt.col(c).subspan(j));
    }
    // S^T u = c, S upper triangular stored in tt(0:rank, 0:rank).
    for (std::size_t i = 0; i < rank; ++i) {
      double s = b[i];
      for (std::size_t c = 0; c < i; ++c) s -= tt(c, i) * x[c];
      x[i] = s / tt(i, i);
    }
    for (std::size_t j = rank; j-- > 0;) {
      apply_reflector(taus[j], tt.col(j).subspan(j + 1), std::span<double>(x).subspan(j));
    }
  }

  LeastSquaresResult result;
  result.gamma.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) result.gamma[perm[i]] = x[i];
  result.rank = rank;
  Vector r = w.apply(result.gamma);
  for (std::size_t i = 0; i < n; ++i) r[i] -= g[i];
  result.residual_norm = norm2(r);
  return result;
}

}  // namespace mrms::linalg
