#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rollinf/basis.hpp"
#include "rollinf/benchgen.hpp"
#include "rollinf/metrics.hpp"
#include "rollinf/rollout.hpp"
#include "rollinf/training.hpp"

namespace rollinf {

// Scaled-down shallow-water study: a POD basis from a fixed 3 x 4 grid of
// inputs, then per seed a random axis-aligned training grid plus validation and
// test inputs drawn inside it, optional noise on the reduced training states and
// optional time sparsification. Roll-out and static models are compared on the
// test inputs against the projection floor.
// 100 Adam iterations from the static fit over the default learning-rate grid.
TrainConfig benchmark_train_config();

struct SweBenchmarkConfig {
  std::size_t grid_points_per_dim = 24;
  double dt = 5e-3;  // T = 1
  std::size_t num_steps = 200;
  std::size_t reduced_dim = 10;
  std::size_t degree = 2;
  Scheme scheme = Scheme::ImexLinearImplicit;
  std::size_t train_points_per_dim = 2;  // 2 -> 4 training trajectories
  std::size_t num_valid = 2;
  std::size_t num_test = 2;
  double noise = 0.0;
  RollConfig roll{50, {}, 1};
  TrainConfig train = benchmark_train_config();
  std::size_t stability_realizations = 0;  // 0 skips the stability analysis
};

struct SweBasisData {
  ReducedBasis basis;
  std::vector<Vector> basis_params;
};

// POD basis of trajectories at mu1 in {0.2, 0.35, 0.5}, mu2 in {1.1, 1.3, 1.5, 1.7}.
SweBasisData build_swe_basis(const SweBenchmarkConfig& cfg);

struct SweSplit {
  std::vector<Vector> train;
  std::vector<Vector> valid;
  std::vector<Vector> test;
};

SweSplit sample_swe_inputs(const SweBenchmarkConfig& cfg, std::uint64_t seed);

struct BenchmarkResult {
  ErrorReport rollout_test;
  ErrorReport static_test;
  ErrorReport projection_test;
  double selected_learning_rate = 0.0;
  double rollout_validation = 0.0;
  std::optional<double> rollout_gamma;  // mean over test models; empty when skipped
  std::optional<double> static_gamma;
  double wall_seconds = 0.0;
};

BenchmarkResult run_swe_benchmark(const SweBenchmarkConfig& cfg, const ReducedBasis& basis,
                                  std::uint64_t seed);

// Mean averaged stability bound over models; a model without a certificate
// contributes 0.
double mean_stability_bound(const std::vector<PolyModel>& models, std::size_t realizations,
                            std::uint64_t seed);

}  // namespace rollinf
