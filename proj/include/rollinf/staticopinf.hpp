#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rollinf/datamodel.hpp"
#include "rollinf/polymodel.hpp"

namespace rollinf {

// Least-squares system D O = Rtarget with D rows [phi_1(q) | ... | phi_L(q) | u].
struct RegressionSystem {
  Matrix data;    // rows x nbar
  Matrix target;  // rows x n
  std::size_t state_dim = 0;
  std::size_t degree = 0;
  std::size_t control_dim = 0;

  std::size_t nbar() const { return static_cast<std::size_t>(data.cols()); }
  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
};

// Forward differences (q_next - q_cur) / (gap * dt) at every retained index
// that has a successor; one column per such index.
Matrix approx_derivatives(const Trajectory& traj, const std::optional<SparseMask>& mask = {});

// Feature row [phi_1(q) | ... | phi_L(q) | u] for one state.
Vector regression_row(const Vector& q, const Vector& u, std::size_t degree);

// One row per (entry, retained index with successor), ordered by entry then time.
RegressionSystem assemble_system(const TrajectoryDataset& data, std::size_t degree,
                                 std::optional<std::size_t> sparse_period = {});

// Builds a system from states with externally supplied derivatives (column k of
// derivatives[i] belongs to column k of the states of entry i).
RegressionSystem assemble_system_with_derivatives(const TrajectoryDataset& data,
                                                  const std::vector<Matrix>& derivatives,
                                                  std::size_t degree);

struct StaticSolution {
  OperatorSet operators;
  std::size_t rank = 0;
  bool rank_zero = false;
};

// Minimum-Frobenius-norm minimizer O = D^+ Rtarget with singular values below
// 1e-12 sigma_max discarded, unpacked into A_1..A_L, B.
StaticSolution solve_min_norm(const RegressionSystem& system);

// Unnormalized static objective ||D O - Rtarget||_F^2 for the given operators.
double static_objective(const RegressionSystem& system, const OperatorSet& ops);

// Convenience: assemble + solve + wrap in a model with the given scheme.
PolyModel fit_static(const TrajectoryDataset& data, std::size_t degree, Scheme scheme,
                     std::size_t sparse_period = 1);

}  // namespace rollinf
