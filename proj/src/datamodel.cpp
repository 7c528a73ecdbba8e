#include "rollinf/datamodel.hpp"

#include <random>
#include <string>

#include "rollinf/errors.hpp"

namespace rollinf {

TimeGrid::TimeGrid(double t0_, double dt_, std::size_t num_steps_)
    : t0(t0_), dt(dt_), num_steps(num_steps_) {
  if (!(dt > 0.0)) throw_argument("time step must be positive");
  if (num_steps < 1) throw_argument("time grid needs at least one step");
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Trajectory::Trajectory(Matrix states, Matrix controls, TimeGrid grid)
    : states_(std::move(states)), controls_(std::move(controls)), grid_(grid) {
  const auto cols = static_cast<std::size_t>(states_.cols());
  if (cols != grid_.num_steps + 1) {
    throw_argument("trajectory has " + std::to_string(cols) +
                   " state columns, expected K+1 = " +
                   std::to_string(grid_.num_steps + 1));
  }
  if (controls_.rows() == 0) {
    controls_.resize(0, static_cast<Eigen::Index>(grid_.num_steps));
  } else if (static_cast<std::size_t>(controls_.cols()) != grid_.num_steps) {
    throw_argument("control matrix must have exactly K columns");
  }
  if (!states_.allFinite() || !controls_.allFinite()) {
    throw Error(ErrorKind::Data, "trajectory contains non-finite entries");
  }
}

Trajectory::Trajectory(Matrix states, TimeGrid grid)
    : Trajectory(std::move(states), Matrix(0, 0), grid) {}

Trajectory Trajectory::with_states(Matrix states) const {
  return Trajectory(std::move(states), controls_, grid_);
}

TrajectoryDataset::TrajectoryDataset(std::vector<DatasetEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw_argument("dataset must contain at least one entry");
  const auto& first = entries_.front();
  state_dim_ = first.trajectory.state_dim();
  control_dim_ = first.trajectory.control_dim();
  param_dim_ = static_cast<std::size_t>(first.param.size());
  const double dt = first.trajectory.grid().dt;
  for (const auto& e : entries_) {
    if (e.trajectory.state_dim() != state_dim_ ||
        e.trajectory.control_dim() != control_dim_) {
      throw_argument("dataset entries disagree on state or control dimension");
    }
    if (e.trajectory.grid().dt != dt) {
      throw_argument("dataset entries disagree on the time step");
    }
    if (static_cast<std::size_t>(e.param.size()) != param_dim_) {
      throw_argument("dataset parameter vectors have unequal length");
    }
  }
}

TrajectoryDataset TrajectoryDataset::subset(
    const std::vector<std::size_t>& indices) const {
  std::vector<DatasetEntry> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(entries_.at(i));
  return TrajectoryDataset(std::move(out));
}

std::vector<Vector> TrajectoryDataset::params() const {
  std::vector<Vector> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.param);
  return out;
}

SparseMask SparseMask::make(std::size_t num_steps, std::size_t period) {
  if (period < 1) throw_argument("sampling period must be at least 1");
  SparseMask mask;
  mask.period = period;
  for (std::size_t k = 0; k <= num_steps; k += period) {
    mask.retained_indices.push_back(k);
  }
  return mask;
}

TrajectoryDataset add_noise(const TrajectoryDataset& data, double rho,
                            std::uint64_t seed) {
  if (rho < 0.0) throw_argument("noise level rho must be nonnegative");
  if (rho == 0.0) return data;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<DatasetEntry> out;
  out.reserve(data.size());
  for (const auto& e : data.entries()) {
    Matrix states = e.trajectory.states();
    const auto K = static_cast<Eigen::Index>(e.trajectory.num_steps());
    for (Eigen::Index k = 1; k < K; ++k) {
      for (Eigen::Index i = 0; i < states.rows(); ++i) {
        const double eps = normal(rng);
        states(i, k) += rho * eps * std::abs(states(i, k));
      }
    }
    out.push_back({e.param, e.trajectory.with_states(std::move(states))});
  }
  return TrajectoryDataset(std::move(out));
}

SparseTrajectory sparsify(const Trajectory& traj, std::size_t period) {
  SparseMask mask = SparseMask::make(traj.num_steps(), period);
  if (period == 1) return {traj, mask};
  if (mask.retained_indices.size() < 2) {
    throw Error(ErrorKind::DegenerateData,
                "sampling period " + std::to_string(period) +
                    " leaves fewer than two states out of K = " +
                    std::to_string(traj.num_steps()));
  }
  const auto kept = static_cast<Eigen::Index>(mask.retained_indices.size());
  Matrix states(traj.states().rows(), kept);
  Matrix controls(traj.controls().rows(), kept - 1);
  for (Eigen::Index j = 0; j < kept; ++j) {
    const auto k = static_cast<Eigen::Index>(mask.retained_indices[j]);
    states.col(j) = traj.states().col(k);
    if (j + 1 < kept && controls.rows() > 0) controls.col(j) = traj.controls().col(k);
  }
  const TimeGrid grid(traj.grid().t0, traj.grid().dt * static_cast<double>(period),
                      static_cast<std::size_t>(kept - 1));
  return {Trajectory(std::move(states), std::move(controls), grid), std::move(mask)};
}

}  // namespace rollinf
