#include "rollinf/experiment.hpp"

#include <chrono>
#include <random>

#include "rollinf/errors.hpp"
#include "rollinf/stability.hpp"
#include "rollinf/staticopinf.hpp"

namespace rollinf {

namespace {

SweConfig swe_config(const SweBenchmarkConfig& cfg, const Vector& mu) {
  SweConfig c;
  c.grid_points_per_dim = cfg.grid_points_per_dim;
  c.dt = cfg.dt;
  c.T = cfg.dt * static_cast<double>(cfg.num_steps);
  c.mu1 = mu(0);
  c.mu2 = mu(1);
  return c;
}

TrajectoryDataset generate(const SweBenchmarkConfig& cfg, const std::vector<Vector>& params) {
  std::vector<SweConfig> configs;
  for (const auto& mu : params) configs.push_back(swe_config(cfg, mu));
  return generate_swe_dataset(configs);
}

Vector mu(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

std::vector<PolyModel> fit_static_per_entry(const TrajectoryDataset& data,
                                            const SweBenchmarkConfig& cfg) {
  std::vector<PolyModel> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.push_back(fit_static(data.subset({i}), cfg.degree, cfg.scheme, cfg.roll.sparse_period));
  }
  return out;
}

}  // namespace

TrainConfig benchmark_train_config() {
  TrainConfig tc;
  tc.max_iters = 100;
  tc.init = InitKind::StaticOpInf;
  return tc;
}

SweBasisData build_swe_basis(const SweBenchmarkConfig& cfg) {
  std::vector<Vector> params;
  for (double m1 : {0.2, 0.35, 0.5}) {
    for (double m2 : {1.1, 1.3, 1.5, 1.7}) params.push_back(mu(m1, m2));
  }
  const TrajectoryDataset data = generate(cfg, params);
  return {pod_basis(snapshot_matrix(data), cfg.reduced_dim), params};
}

SweSplit sample_swe_inputs(const SweBenchmarkConfig& cfg, std::uint64_t seed) {
  if (cfg.train_points_per_dim < 2) throw_argument("training grid needs at least 2 points per dimension");
  std::mt19937_64 rng(derive_seed(seed, 0x5EED));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Grid corners near the edges of D = [0.2, 0.5] x [1.1, 1.7].
  const double m1_lo = 0.2 + 0.05 * u01(rng);
  const double m1_hi = 0.5 - 0.05 * u01(rng);
  const double m2_lo = 1.1 + 0.1 * u01(rng);
  const double m2_hi = 1.7 - 0.1 * u01(rng);
  SweSplit split;
  const std::size_t m = cfg.train_points_per_dim;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = m1_lo + (m1_hi - m1_lo) * static_cast<double>(i) / static_cast<double>(m - 1);
    for (std::size_t j = 0; j < m; ++j) {
      const double b = m2_lo + (m2_hi - m2_lo) * static_cast<double>(j) / static_cast<double>(m - 1);
      split.train.push_back(mu(a, b));
    }
  }
  auto interior = [&]() {
    const double a = m1_lo + (m1_hi - m1_lo) * (0.1 + 0.8 * u01(rng));
    const double b = m2_lo + (m2_hi - m2_lo) * (0.1 + 0.8 * u01(rng));
    return mu(a, b);
  };
  for (std::size_t i = 0; i < cfg.num_valid; ++i) split.valid.push_back(interior());
  for (std::size_t i = 0; i < cfg.num_test; ++i) split.test.push_back(interior());
  return split;
}

double mean_stability_bound(const std::vector<PolyModel>& models, std::size_t realizations,
                            std::uint64_t seed) {
  double sum = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    try {
      const StabilityReport r = averaged_bound(models[i], realizations, derive_seed(seed, i));
      sum += r.mean_gamma;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCertificate) throw;
    }
  }
  return sum / static_cast<double>(models.size());
}

BenchmarkResult run_swe_benchmark(const SweBenchmarkConfig& cfg, const ReducedBasis& basis,
                                  std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const SweSplit split = sample_swe_inputs(cfg, seed);
  const TrajectoryDataset train_full = generate(cfg, split.train);
  const TrajectoryDataset valid = generate(cfg, split.valid);
  const TrajectoryDataset test = generate(cfg, split.test);

  const TrajectoryDataset train_reduced =
      add_noise(project(basis, train_full), cfg.noise, derive_seed(seed, 0x401));

  TrainConfig tc = cfg.train;
  tc.seed = seed;
  const TrainReport report = train(train_reduced, valid, basis, cfg.roll, tc, cfg.scheme, cfg.degree);
  const std::vector<PolyModel> static_models = fit_static_per_entry(train_reduced, cfg);

  BenchmarkResult result;
  const auto rollout_test_models = models_at(split.train, report.models, split.test);
  const auto static_test_models = models_at(split.train, static_models, split.test);
  result.rollout_test = time_averaged_relative_error(test, rollout_test_models, basis);
  result.static_test = time_averaged_relative_error(test, static_test_models, basis);
  result.projection_test = projection_error(test, basis);
  result.selected_learning_rate = report.selected_learning_rate;
  result.rollout_validation = report.validation_error;
  if (cfg.stability_realizations > 0 && cfg.degree >= 2) {
    const std::uint64_t s = derive_seed(seed, 0x57AB);
    result.rollout_gamma = mean_stability_bound(rollout_test_models, cfg.stability_realizations, s);
    result.static_gamma = mean_stability_bound(static_test_models, cfg.stability_realizations, s);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rollinf
