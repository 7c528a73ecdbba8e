#include "rollinf/basis.hpp"

#include <cmath>
#include <string>

#include "rollinf/errors.hpp"

namespace rollinf {

namespace {

constexpr double kRankTolerance = 1e-12;

void fix_signs(Matrix& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (V(best, j) < 0.0) V.col(j) = -V.col(j);
  }
}

}  // namespace

ReducedBasis::ReducedBasis(Matrix V, Vector singular_values)
    : V_(std::move(V)), singular_values_(std::move(singular_values)) {
  if (V_.cols() < 1 || V_.rows() < V_.cols()) {
    throw_argument("reduced basis must be N x n with 1 <= n <= N");
  }
  const Matrix gram = V_.transpose() * V_;
  const double defect = (gram - Matrix::Identity(V_.cols(), V_.cols())).norm();
  if (defect > 1e-10) {
    throw_argument("basis columns are not orthonormal (||V^T V - I||_F = " +
                   std::to_string(defect) + ")");
  }
}

ReducedBasis ReducedBasis::identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return ReducedBasis(Matrix::Identity(d, d), Vector::Ones(d));
}

ReducedBasis pod_basis(const Matrix& snapshots, std::size_t n) {
  const auto N = static_cast<std::size_t>(snapshots.rows());
  const auto S = static_cast<std::size_t>(snapshots.cols());
  if (n < 1 || n > std::min(N, S)) {
    throw_argument("reduced dimension must satisfy 1 <= n <= min(N, S) = " +
                   std::to_string(std::min(N, S)));
  }
  if (!snapshots.allFinite()) throw Error(ErrorKind::Data, "snapshot matrix is not finite");

  Eigen::BDCSVD<Matrix> svd(snapshots, Eigen::ComputeThinU);
  const Vector sigma = svd.singularValues();
  const double cutoff = kRankTolerance * sigma(0);
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(sigma.size()) &&
         sigma(static_cast<Eigen::Index>(rank)) > cutoff && sigma(0) > 0.0) {
    ++rank;
  }
  if (n > rank) {
    throw RankDeficiencyError("requested " + std::to_string(n) +
                                  " basis vectors but the snapshots are rank deficient",
                              rank);
  }
  Matrix V = svd.matrixU().leftCols(static_cast<Eigen::Index>(n));
  fix_signs(V);
  return ReducedBasis(std::move(V), sigma);
}

Matrix snapshot_matrix(const TrajectoryDataset& data) {
  Eigen::Index total = 0;
  for (const auto& e : data.entries()) total += e.trajectory.states().cols();
  Matrix out(static_cast<Eigen::Index>(data.state_dim()), total);
  Eigen::Index offset = 0;
  for (const auto& e : data.entries()) {
    const auto& s = e.trajectory.states();
    out.middleCols(offset, s.cols()) = s;
    offset += s.cols();
  }
  return out;
}

Trajectory project(const ReducedBasis& basis, const Trajectory& traj) {
  if (traj.state_dim() != basis.full_dim()) {
    throw_argument("trajectory state dimension " + std::to_string(traj.state_dim()) +
                   " does not match basis full dimension " + std::to_string(basis.full_dim()));
  }
  return traj.with_states(basis.V().transpose() * traj.states());
}

Trajectory lift(const ReducedBasis& basis, const Trajectory& reduced) {
  if (reduced.state_dim() != basis.reduced_dim()) {
    throw_argument("trajectory state dimension " + std::to_string(reduced.state_dim()) +
                   " does not match basis reduced dimension " +
                   std::to_string(basis.reduced_dim()));
  }
  return reduced.with_states(basis.V() * reduced.states());
}

TrajectoryDataset project(const ReducedBasis& basis, const TrajectoryDataset& data) {
  std::vector<DatasetEntry> out;
  out.reserve(data.size());
  for (const auto& e : data.entries()) out.push_back({e.param, project(basis, e.trajectory)});
  return TrajectoryDataset(std::move(out));
}

}  // namespace rollinf
