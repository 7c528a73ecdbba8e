#include "rollinf/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "rollinf/errors.hpp"
#include "rollinf/metrics.hpp"
#include "rollinf/staticopinf.hpp"

namespace rollinf {

Adam::Adam(std::size_t size, double beta1, double beta2, double eps)
    : beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Vector::Zero(static_cast<Eigen::Index>(size))),
      v_(Vector::Zero(static_cast<Eigen::Index>(size))) {}

void Adam::step(Vector& params, const Vector& grad, double learning_rate) {
  if (grad.size() != m_.size() || params.size() != m_.size()) {
    throw_argument("Adam: parameter and gradient sizes do not match");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

const char* to_string(InitKind init) {
  return init == InitKind::Zeros ? "zeros" : "static";
}

InitKind init_from_string(const std::string& name) {
  if (name == "zeros" || name == "zero") return InitKind::Zeros;
  if (name == "static" || name == "static-opinf") return InitKind::StaticOpInf;
  throw_argument("unknown initialization '" + name + "' (expected zeros or static)");
}

std::vector<double> default_learning_rates() { return {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}; }

void TrainConfig::validate() const {
  if (learning_rates.empty()) throw_argument("at least one learning rate is required");
  for (std::size_t i = 0; i < learning_rates.size(); ++i) {
    if (!(learning_rates[i] > 0.0)) throw_argument("learning rates must be positive");
    if (i > 0 && learning_rates[i] < learning_rates[i - 1]) {
      throw_argument("learning rates must be sorted ascending");
    }
  }
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw_argument("Adam betas must lie in (0, 1)");
  }
  if (!(adam_eps > 0.0)) throw_argument("Adam epsilon must be positive");
  if (grad_clip && !(*grad_clip > 0.0)) throw_argument("gradient clip must be positive");
}

namespace {

struct EntryRun {
  OperatorSet ops;
  std::vector<double> history;
  bool diverged = false;
  std::size_t divergence_iteration = 0;
};

EntryRun run_adam(const PolyModel& init, const TrajectoryDataset& data, const RollConfig& roll,
                  const TrainConfig& cfg, double lr) {
  EntryRun run;
  run.ops = init.operators();
  Vector theta = run.ops.flatten();
  Adam adam(static_cast<std::size_t>(theta.size()), cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  PolyModel model = init;
  OperatorSet best_ops = run.ops;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    RolloutGradient rg;
    try {
      rg = rollout_gradient(model, data, roll);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::GradientUnavailable) throw;
      run.history.push_back(std::numeric_limits<double>::infinity());
      run.diverged = true;
      run.divergence_iteration = it;
      return run;
    }
    run.history.push_back(rg.objective);
    if (rg.objective < best) {
      best = rg.objective;
      best_ops = run.ops;
    }
    Vector grad = rg.gradient.flatten();
    if (cfg.grad_clip) {
      const double norm = grad.norm();
      if (norm > *cfg.grad_clip) grad *= *cfg.grad_clip / norm;
    }
    adam.step(theta, grad, lr);
    if (!theta.allFinite()) {
      run.diverged = true;
      run.divergence_iteration = it + 1;
      return run;
    }
    OperatorSet next = run.ops;
    next.assign(theta);
    model = init.with_operators(next);
    run.ops = std::move(next);
  }
  const double final_objective = rollout_objective(model, data, roll);
  run.history.push_back(final_objective);
  if (!std::isfinite(final_objective)) {
    run.diverged = true;
    run.divergence_iteration = cfg.max_iters;
  } else if (cfg.keep_best_iterate && best < final_objective) {
    run.ops = std::move(best_ops);
  }
  return run;
}

void check_inputs(const TrajectoryDataset& train_data, const TrajectoryDataset& valid_data,
                  const ReducedBasis& basis, const RollConfig& roll, const TrainConfig& cfg) {
  cfg.validate();
  roll.validate();
  if (train_data.state_dim() != basis.reduced_dim()) {
    throw_argument("training data must be reduced to the basis dimension");
  }
  if (valid_data.state_dim() != basis.full_dim()) {
    throw_argument("validation data must carry full states");
  }
}

TrainReport run_candidates(const TrajectoryDataset& train_data, const TrajectoryDataset& valid_data,
                           const ReducedBasis& basis, const RollConfig& roll, const TrainConfig& cfg,
                           const std::vector<PolyModel>& inits) {
  TrainReport report;
  const double dt = train_data.dt();
  const Scheme scheme = inits.front().scheme();
  report.params = train_data.params();
  const auto valid_params = valid_data.params();
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (double lr : cfg.learning_rates) {
    CandidateResult cand;
    cand.learning_rate = lr;
    for (std::size_t i = 0; i < train_data.size(); ++i) {
      EntryRun run = run_adam(inits[i], train_data.subset({i}), roll, cfg, lr);
      if (cand.loss_history.size() < run.history.size()) {
        cand.loss_history.resize(run.history.size(), 0.0);
      }
      for (std::size_t k = 0; k < run.history.size(); ++k) cand.loss_history[k] += run.history[k];
      if (run.diverged && !cand.diverged) {
        cand.diverged = true;
        cand.divergence_iteration = run.divergence_iteration;
      }
      cand.operators.push_back(std::move(run.ops));
    }
    if (cand.diverged) {
      cand.validation_error = std::numeric_limits<double>::infinity();
    } else {
      std::vector<PolyModel> trained;
      for (const auto& ops : cand.operators) trained.emplace_back(ops, dt, scheme);
      const auto valid_models = models_at(report.params, trained, valid_params);
      cand.validation_error = time_averaged_relative_error(valid_data, valid_models, basis).mean;
      if (cand.validation_error < best) {
        best = cand.validation_error;
        report.selected = report.candidates.size();
        found = true;
      }
    }
    report.candidates.push_back(std::move(cand));
  }
  if (!found) {
    std::string detail;
    for (const auto& c : report.candidates) {
      detail += " lr=" + std::to_string(c.learning_rate) + " diverged at iteration " +
                std::to_string(c.divergence_iteration) + ";";
    }
    throw Error(ErrorKind::TrainingFailed, "every learning rate diverged:" + detail);
  }
  const auto& sel = report.candidates[report.selected];
  report.selected_learning_rate = sel.learning_rate;
  report.validation_error = sel.validation_error;
  for (const auto& ops : sel.operators) report.models.emplace_back(ops, dt, scheme);
  return report;
}

}  // namespace

TrainReport train(const TrajectoryDataset& train_data, const TrajectoryDataset& valid_data,
                  const ReducedBasis& basis, const RollConfig& roll, const TrainConfig& cfg,
                  Scheme scheme, std::size_t degree) {
  const auto start = std::chrono::steady_clock::now();
  check_inputs(train_data, valid_data, basis, roll, cfg);
  const std::size_t n = train_data.state_dim();
  const std::size_t p = train_data.control_dim();
  const double dt = train_data.dt();

  std::vector<PolyModel> inits;
  std::size_t init_fallbacks = 0;
  for (std::size_t i = 0; i < train_data.size(); ++i) {
    if (cfg.init == InitKind::Zeros) {
      inits.push_back(PolyModel::zeros(n, degree, p, dt, scheme));
    } else {
      // An unstable static fit has no roll-out gradient; such entries start from zero.
      const TrajectoryDataset entry = train_data.subset({i});
      PolyModel m = fit_static(entry, degree, scheme, roll.sparse_period);
      if (std::isfinite(rollout_objective(m, entry, roll))) {
        inits.push_back(std::move(m));
      } else {
        inits.push_back(PolyModel::zeros(n, degree, p, dt, scheme));
        ++init_fallbacks;
      }
    }
  }

  TrainReport report = run_candidates(train_data, valid_data, basis, roll, cfg, inits);
  report.init_fallbacks = init_fallbacks;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

TrainReport train(const TrajectoryDataset& train_data, const TrajectoryDataset& valid_data,
                  const ReducedBasis& basis, const RollConfig& roll, const TrainConfig& cfg,
                  const std::vector<PolyModel>& initial) {
  const auto start = std::chrono::steady_clock::now();
  check_inputs(train_data, valid_data, basis, roll, cfg);
  if (initial.size() != train_data.size()) throw_argument("need one initial model per training entry");
  for (const auto& m : initial) {
    if (m.state_dim() != train_data.state_dim() || m.control_dim() != train_data.control_dim() ||
        m.dt() != train_data.dt() || m.scheme() != initial.front().scheme() ||
        m.degree() != initial.front().degree()) {
      throw_argument("initial models must match the training data and each other");
    }
  }
  TrainReport report = run_candidates(train_data, valid_data, basis, roll, cfg, initial);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace rollinf
