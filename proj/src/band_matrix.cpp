#include "normgrowth/band_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "normgrowth/errors.hpp"

namespace normgrowth {

BandMatrix::BandMatrix(Index n, Index bandwidth) : n_(n), bw_(bandwidth) {
  if (n < 1 || bandwidth < 0) {
    throw Error(ErrorCode::invalid_parameter, "band matrix needs n >= 1 and bandwidth >= 0");
  }
  bw_ = std::min(bandwidth, n - 1);
  data_.assign(static_cast<std::size_t>((2 * bw_ + 1) * n_), cplx{0.0, 0.0});
}

BandMatrix BandMatrix::identity(Index n) {
  BandMatrix m(n, 0);
  std::fill(m.data_.begin(), m.data_.end(), cplx{1.0, 0.0});
  return m;
}

BandMatrix BandMatrix::diagonal(std::span<const double> values) {
  BandMatrix m(static_cast<Index>(values.size()), 0);
  for (Index i = 0; i < m.n_; ++i) m.data_[i] = values[i];
  return m;
}

BandMatrix BandMatrix::from_dense(const Eigen::MatrixXcd& dense, double drop_tol) {
  if (dense.rows() != dense.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "band matrix must be square");
  }
  const Index n = dense.rows();
  Index bw = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (std::abs(dense(i, j)) > drop_tol) bw = std::max(bw, std::abs(i - j));
  BandMatrix m(n, bw);
  for (Index i = 0; i < n; ++i)
    for (Index j = std::max<Index>(0, i - m.bw_); j <= std::min(n - 1, i + m.bw_); ++j)
      if (std::abs(dense(i, j)) > drop_tol) m.ref(i, j) = dense(i, j);
  return m;
}

bool BandMatrix::in_band(Index row, Index col) const {
  return row >= 0 && col >= 0 && row < n_ && col < n_ && std::abs(col - row) <= bw_;
}

cplx BandMatrix::operator()(Index row, Index col) const {
  if (!in_band(row, col)) return {0.0, 0.0};
  return diag_ptr(col - row)[row];
}

cplx& BandMatrix::ref(Index row, Index col) {
  if (!in_band(row, col)) {
    throw Error(ErrorCode::invalid_parameter, "entry outside stored band");
  }
  return diag_ptr(col - row)[row];
}

Eigen::VectorXcd BandMatrix::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != n_) {
    throw Error(ErrorCode::dimension_mismatch, "vector length does not match band matrix");
  }
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n_);
  for (Index d = -bw_; d <= bw_; ++d) {
    const cplx* diag = diag_ptr(d);
    const Index lo = std::max<Index>(0, -d);
    const Index hi = std::min(n_, n_ - d);
    for (Index i = lo; i < hi; ++i) y[i] += diag[i] * x[i + d];
  }
  return y;
}

Eigen::MatrixXcd BandMatrix::to_dense() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_, n_);
  for (Index d = -bw_; d <= bw_; ++d) {
    const cplx* diag = diag_ptr(d);
    for (Index i = std::max<Index>(0, -d); i < std::min(n_, n_ - d); ++i) out(i, i + d) = diag[i];
  }
  return out;
}

BandMatrix BandMatrix::adjoint() const {
  BandMatrix out(n_, bw_);
  for (Index d = -bw_; d <= bw_; ++d) {
    const cplx* diag = diag_ptr(d);
    for (Index i = std::max<Index>(0, -d); i < std::min(n_, n_ - d); ++i)
      out.ref(i + d, i) = std::conj(diag[i]);
  }
  return out;
}

BandMatrix BandMatrix::trimmed() const {
  Index keep = 0;
  for (Index d = -bw_; d <= bw_; ++d) {
    const cplx* diag = diag_ptr(d);
    for (Index i = std::max<Index>(0, -d); i < std::min(n_, n_ - d); ++i) {
      if (diag[i] != cplx{0.0, 0.0}) {
        keep = std::max(keep, std::abs(d));
        break;
      }
    }
  }
  if (keep == bw_) return *this;
  BandMatrix out(n_, keep);
  for (Index d = -keep; d <= keep; ++d)
    std::copy_n(diag_ptr(d), n_, out.diag_ptr(d));
  return out;
}

BandMatrix BandMatrix::widened(Index bandwidth) const {
  if (bandwidth <= bw_) return *this;
  BandMatrix out(n_, bandwidth);
  for (Index d = -bw_; d <= bw_; ++d) std::copy_n(diag_ptr(d), n_, out.diag_ptr(d));
  return out;
}

BandMatrix& BandMatrix::operator+=(const BandMatrix& other) {
  if (other.n_ != n_) throw Error(ErrorCode::dimension_mismatch, "band matrix sizes differ");
  if (other.bw_ > bw_) *this = widened(other.bw_);
  for (Index d = -other.bw_; d <= other.bw_; ++d) {
    cplx* dst = diag_ptr(d);
    const cplx* src = other.diag_ptr(d);
    for (Index i = 0; i < n_; ++i) dst[i] += src[i];
  }
  return *this;
}

BandMatrix& BandMatrix::operator-=(const BandMatrix& other) {
  if (other.n_ != n_) throw Error(ErrorCode::dimension_mismatch, "band matrix sizes differ");
  if (other.bw_ > bw_) *this = widened(other.bw_);
  for (Index d = -other.bw_; d <= other.bw_; ++d) {
    cplx* dst = diag_ptr(d);
    const cplx* src = other.diag_ptr(d);
    for (Index i = 0; i < n_; ++i) dst[i] -= src[i];
  }
  return *this;
}

BandMatrix& BandMatrix::operator*=(cplx scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

BandMatrix operator*(const BandMatrix& a, const BandMatrix& b) {
  if (a.n_ != b.n_) throw Error(ErrorCode::dimension_mismatch, "band matrix sizes differ");
  const Index n = a.n_;
  BandMatrix c(n, a.bw_ + b.bw_);
  for (Index i = 0; i < n; ++i) {
    for (Index da = -a.bw_; da <= a.bw_; ++da) {
      const Index j = i + da;
      if (j < 0 || j >= n) continue;
      const cplx aij = a.diag_ptr(da)[i];
      if (aij == cplx{0.0, 0.0}) continue;
      for (Index db = -b.bw_; db <= b.bw_; ++db) {
        const Index k = j + db;
        if (k < 0 || k >= n) continue;
        c.diag_ptr(k - i)[i] += aij * b.diag_ptr(db)[j];
      }
    }
  }
  return c;
}

double BandMatrix::max_abs() const { return max_abs_in_rows(0, n_ - 1); }

double BandMatrix::max_abs_in_rows(Index row_lo, Index row_hi) const {
  row_lo = std::max<Index>(row_lo, 0);
  row_hi = std::min(row_hi, n_ - 1);
  double best = 0.0;
  for (Index d = -bw_; d <= bw_; ++d) {
    const cplx* diag = diag_ptr(d);
    const Index lo = std::max({row_lo, Index{0}, -d});
    const Index hi = std::min(row_hi, n_ - 1 - d);
    for (Index i = lo; i <= hi; ++i) best = std::max(best, std::abs(diag[i]));
  }
  return best;
}

BandMatrix commutator(const BandMatrix& a, const BandMatrix& b) { return a * b - b * a; }

}  // namespace normgrowth
