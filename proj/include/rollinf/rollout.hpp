#pragma once

#include <cstddef>
#include <vector>

#include "rollinf/datamodel.hpp"
#include "rollinf/polymodel.hpp"

namespace rollinf {

// Roll-out length R counts base time steps. With a sampling period xi > 1 the
// data are only read at multiples of xi: windows start at k * xi for
// k = 0..floor((K - R) / xi) and the misfit is taken after r * xi model steps,
// r = 1..floor(R / xi). Misfit increments are expressed in observation units
// (base steps when xi = 1); an empty list means every increment.
struct RollConfig {
  std::size_t roll_length = 1;
  std::vector<std::size_t> misfit_increments;
  std::size_t sparse_period = 1;

  void validate() const;
  std::size_t observed_roll_length() const { return roll_length / sparse_period; }
  // Sorted, deduplicated increments in observation units.
  std::vector<std::size_t> resolved_increments() const;
};

struct RolloutGradient {
  double objective = 0.0;
  OperatorSet gradient;
};

// Sum over dataset entries of the roll-out misfit. Returns +infinity when any
// window diverges or the implicit system becomes singular.
double rollout_objective(const PolyModel& model, const TrajectoryDataset& data,
                         const RollConfig& cfg);

// Objective and its exact gradient with respect to [A_1..A_L, B] through the
// discrete adjoint of the unrolled flow map. Throws ErrorKind::GradientUnavailable
// if any window diverges.
RolloutGradient rollout_gradient(const PolyModel& model, const TrajectoryDataset& data,
                                 const RollConfig& cfg);

// round(exp(linspace(0, ln R, count))), deduplicated, always containing 1 and R.
std::vector<std::size_t> log_spaced_increments(std::size_t roll_length, std::size_t count);

}  // namespace rollinf
