#pragma once

// Dense and sparse kernels used by the steppers: thin least squares,
// CSC matrix-vector products and banded LU.

#include <cstddef>
#include <span>
#include <vector>

namespace mrms::linalg {

using Vector = std::vector<double>;

double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// Column-major n x m matrix, intended for m << n.
class DenseThinMatrix {
 public:
  DenseThinMatrix() = default;
  DenseThinMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<const double> data() const { return data_; }

  /// y = M x
  Vector apply(std::span<const double> x) const;
  /// y = M^T x
  Vector apply_transpose(std::span<const double> x) const;

  double max_col_norm() const;
  double frobenius_norm() const;

  friend bool operator==(const DenseThinMatrix&, const DenseThinMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square sparse matrix in compressed sparse column layout.
class SparseMatrixCSC {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrixCSC() = default;
  /// Validates the layout: nondecreasing column pointers, row indices in
  /// range and strictly increasing inside each column.
  SparseMatrixCSC(std::size_t n, std::vector<std::size_t> col_ptr,
                  std::vector<std::size_t> row_idx, std::vector<double> values);

  /// Duplicates are summed.
  static SparseMatrixCSC from_triplets(std::size_t n, std::vector<Triplet> entries);
  static SparseMatrixCSC identity(std::size_t n);
  static SparseMatrixCSC diagonal(std::span<const double> d);

  std::size_t dim() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<std::size_t>& col_ptr() const { return col_ptr_; }
  const std::vector<std::size_t>& row_idx() const { return row_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// Entry lookup, zero when not stored.
  double at(std::size_t i, std::size_t j) const;

  std::size_t lower_bandwidth() const;
  std::size_t upper_bandwidth() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::size_t> row_idx_;
  std::vector<double> values_;
};

/// Returns A x. Entries are accumulated column by column in storage order.
Vector csc_matvec(const SparseMatrixCSC& a, std::span<const double> x);
/// out = A x, without allocating.
void csc_matvec(const SparseMatrixCSC& a, std::span<const double> x, std::span<double> out);

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper);

  /// scale * A + shift * I in band storage.
  static BandedMatrix from_csc(const SparseMatrixCSC& a, double scale = 1.0, double shift = 0.0);

  std::size_t dim() const { return n_; }
  std::size_t lower() const { return lower_; }
  std::size_t upper() const { return upper_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return i <= j + lower_ && j <= i + upper_;
  }
  double get(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double v);

  Vector apply(std::span<const double> x) const;

 private:
  friend class BandedLu;
  std::size_t n_;
  std::size_t lower_;
  std::size_t upper_;
  // (upper + i - j, j) packed column-major, leading dimension lower + upper + 1.
  std::vector<double> band_;
};

/// LU with partial pivoting restricted to the band. The U factor gets
/// `lower` extra super-diagonals of fill.
class BandedLu {
 public:
  /// Throws std::runtime_error if a zero pivot is met.
  explicit BandedLu(const BandedMatrix& a);

  std::size_t dim() const { return n_; }
  Vector solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> b) const;

 private:
  std::size_t n_;
  std::size_t lower_;
  std::size_t upper_;
  std::size_t ld_;
  std::vector<double> lu_;
  std::vector<std::size_t> pivots_;
};

struct LeastSquaresResult {
  Vector gamma;
  double residual_norm = 0.0;
  std::size_t rank = 0;
};

/// Default rank tolerance: eps * max(n, m) * (largest column norm of W).
double default_rank_tolerance(const DenseThinMatrix& w);

/// Minimal-norm solution of min ||W gamma - g||_2 via Householder QR with
/// column pivoting. Rank-deficient problems are completed with a second QR
/// of the leading rank rows of R. Throws std::invalid_argument on
/// dimension mismatch, negative tolerance or non-finite input.
LeastSquaresResult least_squares_min_norm(const DenseThinMatrix& w, std::span<const double> g,
                                          double rank_tol);
LeastSquaresResult least_squares_min_norm(const DenseThinMatrix& w, std::span<const double> g);

}  // namespace mrms::linalg
