#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace rollinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Equidistant grid t_k = t0 + k * dt, k = 0..num_steps.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t num_steps = 1;

  TimeGrid() = default;
  TimeGrid(double t0, double dt, std::size_t num_steps);

  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double final_time() const { return time(num_steps); }
};

// States are stored column-wise: column k is the state at t_k, k = 0..K.
// Column k of the controls drives the step from t_k to t_{k+1}; a trajectory
// without controls has a 0 x K control matrix.
class Trajectory {
 public:
  Trajectory(Matrix states, Matrix controls, TimeGrid grid);
  Trajectory(Matrix states, TimeGrid grid);

  const Matrix& states() const { return states_; }
  const Matrix& controls() const { return controls_; }
  const TimeGrid& grid() const { return grid_; }

  std::size_t state_dim() const { return static_cast<std::size_t>(states_.rows()); }
  std::size_t control_dim() const { return static_cast<std::size_t>(controls_.rows()); }
  std::size_t num_steps() const { return grid_.num_steps; }
  bool has_controls() const { return controls_.rows() > 0; }

  Trajectory with_states(Matrix states) const;

 private:
  Matrix states_;
  Matrix controls_;
  TimeGrid grid_;
};

struct DatasetEntry {
  Vector param;
  Trajectory trajectory;
};

class TrajectoryDataset {
 public:
  explicit TrajectoryDataset(std::vector<DatasetEntry> entries);

  const std::vector<DatasetEntry>& entries() const { return entries_; }
  const DatasetEntry& entry(std::size_t i) const { return entries_.at(i); }
  std::size_t size() const { return entries_.size(); }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t control_dim() const { return control_dim_; }
  std::size_t param_dim() const { return param_dim_; }
  double dt() const { return entries_.front().trajectory.grid().dt; }

  TrajectoryDataset subset(const std::vector<std::size_t>& indices) const;
  std::vector<Vector> params() const;

 private:
  std::vector<DatasetEntry> entries_;
  std::size_t state_dim_ = 0;
  std::size_t control_dim_ = 0;
  std::size_t param_dim_ = 0;
};

// Indices {0, period, 2 period, ...} that do not exceed num_steps.
struct SparseMask {
  std::size_t period = 1;
  std::vector<std::size_t> retained_indices;

  static SparseMask make(std::size_t num_steps, std::size_t period);
};

// Relative multiplicative noise q + rho * eps (.) |q| on columns k = 1..K-1.
// Draws are consumed entry by entry, k ascending, component ascending.
TrajectoryDataset add_noise(const TrajectoryDataset& data, double rho,
                            std::uint64_t seed);

struct SparseTrajectory {
  Trajectory trajectory;
  SparseMask mask;
};

SparseTrajectory sparsify(const Trajectory& traj, std::size_t period);

bool all_finite(const Matrix& m);

}  // namespace rollinf
