#pragma once

#include <cstddef>
#include <vector>

#include "rollinf/basis.hpp"
#include "rollinf/datamodel.hpp"
#include "rollinf/polymodel.hpp"

namespace rollinf {

struct ErrorReport {
  std::vector<double> per_entry;
  std::vector<bool> diverged;
  double mean = 0.0;

  std::size_t diverged_count() const;
};

// Relative error sum_k ||q_k - pred_k|| / sum_k ||q_k|| of one trajectory.
double trajectory_relative_error(const Matrix& truth, const Matrix& prediction);

// Simulates every truth entry from V^T q_0 (with the entry's controls), lifts
// and averages the per-entry relative errors. `models` holds one model per
// entry or a single shared model. A diverging simulation is replaced by the
// constant full-space initial condition.
ErrorReport time_averaged_relative_error(const TrajectoryDataset& truth,
                                         const std::vector<PolyModel>& models,
                                         const ReducedBasis& basis);

// Same quotient with prediction V V^T q_k: the best any model in span(V) can do.
ErrorReport projection_error(const TrajectoryDataset& truth, const ReducedBasis& basis);

// Entry-wise linear interpolation of operators. For scalar inputs any set of
// distinct parameters works (piecewise linear); for d >= 2 the parameters must be
// exactly the vertices of an axis-aligned tensor grid (multilinear).
PolyModel interpolate_operators(const std::vector<Vector>& params,
                                const std::vector<PolyModel>& models, const Vector& query);

// Models at the query parameters: the single model when only one is given,
// interpolated otherwise.
std::vector<PolyModel> models_at(const std::vector<Vector>& params,
                                 const std::vector<PolyModel>& models,
                                 const std::vector<Vector>& queries);

}  // namespace rollinf
