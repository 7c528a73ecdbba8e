#pragma once

#include <cstddef>

#include "rollinf/datamodel.hpp"

namespace rollinf {

// Orthonormal reduced basis V (N x n) with the full singular spectrum of the
// snapshot matrix it was computed from.
class ReducedBasis {
 public:
  ReducedBasis(Matrix V, Vector singular_values);

  static ReducedBasis identity(std::size_t dim);

  const Matrix& V() const { return V_; }
  const Vector& singular_values() const { return singular_values_; }
  std::size_t full_dim() const { return static_cast<std::size_t>(V_.rows()); }
  std::size_t reduced_dim() const { return static_cast<std::size_t>(V_.cols()); }

  Vector project(const Vector& q) const { return V_.transpose() * q; }
  Vector lift(const Vector& qhat) const { return V_ * qhat; }

 private:
  Matrix V_;
  Vector singular_values_;
};

// Dominant n left singular vectors of the snapshots, sign-fixed so the
// largest-magnitude entry of each column is positive.
ReducedBasis pod_basis(const Matrix& snapshots, std::size_t n);

// Concatenates the states of every entry column-wise.
Matrix snapshot_matrix(const TrajectoryDataset& data);

Trajectory project(const ReducedBasis& basis, const Trajectory& traj);
Trajectory lift(const ReducedBasis& basis, const Trajectory& reduced);
TrajectoryDataset project(const ReducedBasis& basis, const TrajectoryDataset& data);

}  // namespace rollinf
