#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace normgrowth {

using cplx = std::complex<double>;
using Index = std::ptrdiff_t;

/// Square complex matrix with entries confined to |row - col| <= bandwidth.
///
/// Diagonal d (d = col - row, -bw <= d <= bw) is stored contiguously, indexed
/// by row. Products of band matrices widen the band additively, capped at n-1,
/// which is what the commutator calculus relies on.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(Index n, Index bandwidth);

  static BandMatrix identity(Index n);
  static BandMatrix diagonal(std::span<const double> values);
  static BandMatrix from_dense(const Eigen::MatrixXcd& dense, double drop_tol = 0.0);

  Index size() const { return n_; }
  Index bandwidth() const { return bw_; }

  bool in_band(Index row, Index col) const;
  /// Zero outside the band or the matrix.
  cplx operator()(Index row, Index col) const;
  /// Requires (row, col) inside the band.
  cplx& ref(Index row, Index col);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd to_dense() const;

  BandMatrix adjoint() const;
  /// Narrow the stored band to the outermost diagonal holding a nonzero.
  BandMatrix trimmed() const;

  BandMatrix& operator+=(const BandMatrix& other);
  BandMatrix& operator-=(const BandMatrix& other);
  BandMatrix& operator*=(cplx scale);

  friend BandMatrix operator+(BandMatrix a, const BandMatrix& b) { return a += b; }
  friend BandMatrix operator-(BandMatrix a, const BandMatrix& b) { return a -= b; }
  friend BandMatrix operator*(BandMatrix a, cplx s) { return a *= s; }
  friend BandMatrix operator*(cplx s, BandMatrix a) { return a *= s; }
  friend BandMatrix operator*(const BandMatrix& a, const BandMatrix& b);

  double max_abs() const;
  /// max |entry| over rows in [row_lo, row_hi]; 0 when the range is empty.
  double max_abs_in_rows(Index row_lo, Index row_hi) const;

 private:
  cplx* diag_ptr(Index d) { return data_.data() + (d + bw_) * n_; }
  const cplx* diag_ptr(Index d) const { return data_.data() + (d + bw_) * n_; }
  BandMatrix widened(Index bandwidth) const;

  Index n_ = 0;
  Index bw_ = 0;
  std::vector<cplx> data_;
};

/// [a, b] = ab - ba.
BandMatrix commutator(const BandMatrix& a, const BandMatrix& b);

}  // namespace normgrowth
