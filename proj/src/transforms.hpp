#pragma once

#include <memory>

#include <Eigen/Dense>

#include "normgrowth/band_matrix.hpp"

namespace normgrowth::detail {

/// Orthonormal type-I discrete sine transform on complex vectors,
/// S_{kj} = sqrt(2/(n+1)) sin(pi (j+1)(k+1) / (n+1)). S is an involution.
class SineTransform {
 public:
  explicit SineTransform(Index n);
  ~SineTransform();
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  Index size() const { return n_; }
  void apply(Eigen::VectorXcd& v) const;

 private:
  Index n_;
  void* plan_;
};

/// Unnormalized complex DFT pair of length n:
/// to_grid:   u_k = sum_j c_j e^{+2 pi i jk/n}
/// from_grid: c_j = (1/n) sum_k u_k e^{-2 pi i jk/n}
class GridTransform {
 public:
  explicit GridTransform(Index n);
  ~GridTransform();
  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;

  Index size() const { return n_; }
  void to_grid(Eigen::VectorXcd& v) const;
  void from_grid(Eigen::VectorXcd& v) const;

 private:
  Index n_;
  void* backward_;
  void* forward_;
};

}  // namespace normgrowth::detail
