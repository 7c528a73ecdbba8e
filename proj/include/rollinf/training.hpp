#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rollinf/basis.hpp"
#include "rollinf/datamodel.hpp"
#include "rollinf/polymodel.hpp"
#include "rollinf/rollout.hpp"

namespace rollinf {

// Adam (Kingma & Ba) with bias-corrected moment estimates on a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t size, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(Vector& params, const Vector& grad, double learning_rate);
  std::size_t iterations() const { return t_; }

 private:
  double beta1_;
  double beta2_;
  double eps_;
  std::size_t t_ = 0;
  Vector m_;
  Vector v_;
};

enum class InitKind { Zeros, StaticOpInf };

const char* to_string(InitKind init);
InitKind init_from_string(const std::string& name);

// Five values log-spaced between 1e-5 and 1e-1.
std::vector<double> default_learning_rates();

struct TrainConfig {
  std::vector<double> learning_rates = default_learning_rates();
  std::size_t max_iters = 2000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  InitKind init = InitKind::Zeros;
  std::optional<double> grad_clip;
  // Return the iterate with the lowest training objective instead of the last one.
  bool keep_best_iterate = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CandidateResult {
  double learning_rate = 0.0;
  // Sum over training entries of the objective before each Adam update plus the
  // final value (max_iters + 1 values unless divergence stopped the run).
  std::vector<double> loss_history;
  bool diverged = false;
  std::size_t divergence_iteration = 0;
  double validation_error = 0.0;
  std::vector<OperatorSet> operators;  // one per training entry
};

struct TrainReport {
  std::vector<CandidateResult> candidates;
  std::size_t selected = 0;
  double selected_learning_rate = 0.0;
  double validation_error = 0.0;
  std::vector<Vector> params;
  std::vector<PolyModel> models;  // final operators, one per training entry
  std::size_t init_fallbacks = 0;  // static inits replaced by zeros
  double wall_seconds = 0.0;

  const CandidateResult& selected_candidate() const { return candidates.at(selected); }
};

// Per-entry Adam training of the roll-out objective for every learning rate,
// selected by the time-averaged relative error on the (full-state) validation
// set. Entries are trained independently; validation models are interpolated at
// the validation parameters when more than one entry is trained.
TrainReport train(const TrajectoryDataset& train_data, const TrajectoryDataset& valid_data,
                  const ReducedBasis& basis, const RollConfig& roll, const TrainConfig& cfg,
                  Scheme scheme, std::size_t degree);

// Same, starting each entry from the given model (one per training entry);
// scheme, degree and dt are taken from the models.
TrainReport train(const TrajectoryDataset& train_data, const TrajectoryDataset& valid_data,
                  const ReducedBasis& basis, const RollConfig& roll, const TrainConfig& cfg,
                  const std::vector<PolyModel>& initial);

}  // namespace rollinf
