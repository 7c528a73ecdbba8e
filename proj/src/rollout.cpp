#include "rollinf/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rollinf/errors.hpp"

namespace rollinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All windows of one trajectory advance together as the columns of an n x W
// matrix; states[j] holds the batch after j model steps.
struct WindowPlan {
  std::vector<Eigen::Index> starts;
  std::size_t steps = 0;
  std::vector<bool> is_target;  // indexed by step, size steps + 1
};

WindowPlan plan_windows(const Trajectory& traj, const RollConfig& cfg) {
  const std::size_t K = traj.num_steps();
  const std::size_t xi = cfg.sparse_period;
  if (cfg.roll_length > K) {
    throw_argument("roll-out length " + std::to_string(cfg.roll_length) +
                   " exceeds the number of time steps K = " + std::to_string(K));
  }
  WindowPlan plan;
  const std::size_t windows = (K - cfg.roll_length) / xi + 1;
  for (std::size_t w = 0; w < windows; ++w) plan.starts.push_back(static_cast<Eigen::Index>(w * xi));
  plan.steps = cfg.observed_roll_length() * xi;
  plan.is_target.assign(plan.steps + 1, false);
  for (std::size_t r : cfg.resolved_increments()) plan.is_target[r * xi] = true;
  return plan;
}

Matrix gather(const Matrix& m, const std::vector<Eigen::Index>& cols, Eigen::Index shift) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = m.col(cols[c] + shift);
  }
  return out;
}

bool batch_diverged(const Matrix& z, const Vector& reference) {
  if (!z.allFinite()) return true;
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    if (z.col(c).lpNorm<Eigen::Infinity>() > 1e6 * (1.0 + reference(c))) return true;
  }
  return false;
}

struct ForwardPass {
  std::vector<Matrix> states;
  std::vector<Matrix> controls;  // controls[j] drives step j -> j + 1
  std::vector<Matrix> residuals;  // data - prediction at target steps, else empty
  double objective = 0.0;
  bool diverged = false;
};

ForwardPass forward(const PolyModel& model, const Trajectory& traj, const WindowPlan& plan,
                    bool keep_states) {
  ForwardPass pass;
  const bool use_controls = model.control_dim() > 0;
  Matrix z = gather(traj.states(), plan.starts, 0);
  Vector reference(z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) reference(c) = z.col(c).lpNorm<Eigen::Infinity>();
  if (keep_states) {
    pass.states.reserve(plan.steps + 1);
    pass.states.push_back(z);
    pass.residuals.resize(plan.steps + 1);
  }
  const Matrix no_control(0, z.cols());
  for (std::size_t j = 1; j <= plan.steps; ++j) {
    Matrix u = use_controls ? gather(traj.controls(), plan.starts, static_cast<Eigen::Index>(j - 1))
                            : no_control;
    try {
      z = model.step_columns(z, u);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Integrator) throw;
      pass.diverged = true;
      pass.objective = kInf;
      return pass;
    }
    if (batch_diverged(z, reference)) {
      pass.diverged = true;
      pass.objective = kInf;
      return pass;
    }
    if (plan.is_target[j]) {
      Matrix res = gather(traj.states(), plan.starts, static_cast<Eigen::Index>(j)) - z;
      pass.objective += res.squaredNorm();
      if (keep_states) pass.residuals[j] = std::move(res);
    }
    if (keep_states) {
      pass.states.push_back(z);
      pass.controls.push_back(std::move(u));
    }
  }
  return pass;
}

// Reverse sweep. g holds dJ/dz_j for the batch; each step's sensitivity is
// accumulated into grad.
void backward(const PolyModel& model, const ForwardPass& pass, const WindowPlan& plan,
              OperatorSet& grad) {
  const double dt = model.dt();
  const bool imex = model.scheme() == Scheme::ImexLinearImplicit;
  const std::size_t L = model.degree();
  Matrix g = Matrix::Zero(pass.states[0].rows(), pass.states[0].cols());
  for (std::size_t j = plan.steps; j >= 1; --j) {
    if (plan.is_target[j]) g.noalias() -= 2.0 * pass.residuals[j];
    const Matrix& z_prev = pass.states[j - 1];
    const Matrix lambda = imex ? model.implicit_solve_transpose(g) : g;
    // Linear operator: implicit for IMEX (acts on z_j), explicit otherwise.
    grad.A[0].noalias() += dt * lambda * (imex ? pass.states[j] : z_prev).transpose();
    Matrix g_prev = lambda;
    if (!imex) g_prev.noalias() += dt * model.A(1).transpose() * lambda;
    for (std::size_t l = 2; l <= L; ++l) {
      const auto& idx = model.indexing(l);
      grad.A[l - 1].noalias() += dt * lambda * idx.evaluate_columns(z_prev).transpose();
      const Matrix w = dt * model.A(l).transpose() * lambda;
      idx.add_jacobian_transpose(z_prev, w, g_prev);
    }
    if (model.control_dim() > 0) grad.B.noalias() += dt * lambda * pass.controls[j - 1].transpose();
    g = std::move(g_prev);
  }
}

void check_dims(const PolyModel& model, const TrajectoryDataset& data) {
  if (model.state_dim() != data.state_dim()) {
    throw_argument("model state dimension " + std::to_string(model.state_dim()) +
                   " does not match data dimension " + std::to_string(data.state_dim()));
  }
  if (model.control_dim() != data.control_dim()) {
    throw_argument("model control dimension does not match the data");
  }
}

}  // namespace

void RollConfig::validate() const {
  if (roll_length < 1) throw_argument("roll-out length must be at least 1");
  if (sparse_period < 1) throw_argument("sampling period must be at least 1");
  if (roll_length < sparse_period) {
    throw_argument("roll-out length " + std::to_string(roll_length) +
                   " is shorter than the sampling period " + std::to_string(sparse_period));
  }
  for (std::size_t r : misfit_increments) {
    if (r < 1 || r > observed_roll_length()) {
      throw_argument("misfit increment " + std::to_string(r) + " outside [1, " +
                     std::to_string(observed_roll_length()) + "]");
    }
  }
}

std::vector<std::size_t> RollConfig::resolved_increments() const {
  validate();
  std::vector<std::size_t> inc = misfit_increments;
  if (inc.empty()) {
    for (std::size_t r = 1; r <= observed_roll_length(); ++r) inc.push_back(r);
  }
  std::sort(inc.begin(), inc.end());
  inc.erase(std::unique(inc.begin(), inc.end()), inc.end());
  return inc;
}

double rollout_objective(const PolyModel& model, const TrajectoryDataset& data,
                         const RollConfig& cfg) {
  cfg.validate();
  check_dims(model, data);
  double total = 0.0;
  for (const auto& e : data.entries()) {
    const WindowPlan plan = plan_windows(e.trajectory, cfg);
    const ForwardPass pass = forward(model, e.trajectory, plan, false);
    if (pass.diverged) return kInf;
    total += pass.objective;
  }
  return total;
}

RolloutGradient rollout_gradient(const PolyModel& model, const TrajectoryDataset& data,
                                 const RollConfig& cfg) {
  cfg.validate();
  check_dims(model, data);
  RolloutGradient out;
  out.gradient = OperatorSet::zeros(model.state_dim(), model.degree(), model.control_dim());
  for (const auto& e : data.entries()) {
    const WindowPlan plan = plan_windows(e.trajectory, cfg);
    const ForwardPass pass = forward(model, e.trajectory, plan, true);
    if (pass.diverged) {
      throw Error(ErrorKind::GradientUnavailable,
                  "roll-out diverged; objective is +infinity and has no gradient");
    }
    out.objective += pass.objective;
    backward(model, pass, plan, out.gradient);
  }
  return out;
}

std::vector<std::size_t> log_spaced_increments(std::size_t roll_length, std::size_t count) {
  if (roll_length < 1 || count < 1) throw_argument("log-spaced increments need R >= 1, count >= 1");
  std::vector<std::size_t> out{1};
  const double top = std::log(static_cast<double>(roll_length));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(static_cast<std::size_t>(std::llround(std::exp(t * top))));
  }
  out.push_back(roll_length);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace rollinf
