#include "rollinf/benchgen.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rollinf/errors.hpp"

namespace rollinf {

PolyModel random_quadratic_system(std::size_t n, std::uint64_t seed, double spectral_margin,
                                  double dt, Scheme scheme, std::size_t control_dim) {
  if (n < 1) throw_argument("system dimension must be at least 1");
  if (!(spectral_margin > 0.0 && spectral_margin <= 1.0)) {
    throw_argument("spectral margin must lie in (0, 1]");
  }
  const auto N = static_cast<Eigen::Index>(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, -spectral_margin);

  Matrix G(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i < N; ++i) G(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  Vector lambda(N);
  for (Eigen::Index i = 0; i < N; ++i) lambda(i) = uniform(rng);

  OperatorSet ops = OperatorSet::zeros(n, 2, control_dim);
  ops.A[0] = Q * lambda.asDiagonal() * Q.transpose();
  ops.A[0] = 0.5 * (ops.A[0] + ops.A[0].transpose());
  Matrix& A2 = ops.A[1];
  for (Eigen::Index j = 0; j < A2.cols(); ++j) {
    for (Eigen::Index i = 0; i < A2.rows(); ++i) A2(i, j) = normal(rng);
  }
  A2 *= 0.1 * ops.A[0].norm() / A2.norm();
  return PolyModel(std::move(ops), dt, scheme);
}

void SweConfig::validate() const {
  if (grid_points_per_dim < 8) throw_argument("shallow-water grid needs at least 8 points per dimension");
  if (!(dt > 0.0) || !(T > 0.0)) throw_argument("shallow-water dt and T must be positive");
  if (!(domain_half_width > 0.0)) throw_argument("domain half width must be positive");
  if (mu1 < 0.2 - 1e-12 || mu1 > 0.5 + 1e-12 || mu2 < 1.1 - 1e-12 || mu2 > 1.7 + 1e-12) {
    throw_argument("shallow-water inputs must lie in [0.2, 0.5] x [1.1, 1.7]");
  }
}

std::size_t SweConfig::num_steps() const {
  return static_cast<std::size_t>(std::llround(T / dt));
}

double SweConfig::spacing() const {
  return 2.0 * domain_half_width / static_cast<double>(grid_points_per_dim);
}

Vector periodic_dx(const Vector& f, std::size_t g, double h) {
  const auto G = static_cast<Eigen::Index>(g);
  Vector out(G * G);
  const double s = 0.5 / h;
  for (Eigen::Index j = 0; j < G; ++j) {
    for (Eigen::Index i = 0; i < G; ++i) {
      const Eigen::Index ip = (i + 1) % G;
      const Eigen::Index im = (i + G - 1) % G;
      out(i + G * j) = s * (f(ip + G * j) - f(im + G * j));
    }
  }
  return out;
}

Vector periodic_dy(const Vector& f, std::size_t g, double h) {
  const auto G = static_cast<Eigen::Index>(g);
  Vector out(G * G);
  const double s = 0.5 / h;
  for (Eigen::Index j = 0; j < G; ++j) {
    const Eigen::Index jp = (j + 1) % G;
    const Eigen::Index jm = (j + G - 1) % G;
    for (Eigen::Index i = 0; i < G; ++i) out(i + G * j) = s * (f(i + G * jp) - f(i + G * jm));
  }
  return out;
}

Vector swe_rhs(const Vector& state, std::size_t g, double h) {
  const auto cells = static_cast<Eigen::Index>(g * g);
  if (state.size() != 2 * cells) {
    throw_argument("shallow-water state must have length 2 g^2 = " + std::to_string(2 * cells));
  }
  if (!state.allFinite()) throw DivergenceError("shallow-water state is not finite", 0);
  const Vector qh = state.head(cells);
  const Vector qphi = state.tail(cells);
  const Vector px = periodic_dx(qphi, g, h);
  const Vector py = periodic_dy(qphi, g, h);
  const Vector fx = qh.cwiseProduct(px);
  const Vector fy = qh.cwiseProduct(py);
  Vector out(2 * cells);
  out.head(cells) = -(periodic_dx(fx, g, h) + periodic_dy(fy, g, h));
  out.tail(cells) = -0.5 * (px.cwiseAbs2() + py.cwiseAbs2()) - qh;
  return out;
}

Vector swe_initial_condition(const SweConfig& cfg) {
  const std::size_t g = cfg.grid_points_per_dim;
  const auto G = static_cast<Eigen::Index>(g);
  const double h = cfg.spacing();
  Vector state = Vector::Zero(2 * G * G);
  for (Eigen::Index j = 0; j < G; ++j) {
    const double y = -cfg.domain_half_width + h * static_cast<double>(j);
    for (Eigen::Index i = 0; i < G; ++i) {
      const double x = -cfg.domain_half_width + h * static_cast<double>(i);
      state(i + G * j) = 1.0 + cfg.mu1 * std::exp(-cfg.mu2 * (x * x + y * y));
    }
  }
  return state;
}

Matrix integrate_swe(const Vector& q0, std::size_t g, double h, double dt, std::size_t steps) {
  Matrix states(q0.size(), static_cast<Eigen::Index>(steps + 1));
  Vector q = q0;
  states.col(0) = q;
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector k1 = swe_rhs(q, g, h);
    const Vector k2 = swe_rhs(q + 0.5 * dt * k1, g, h);
    const Vector k3 = swe_rhs(q + 0.5 * dt * k2, g, h);
    const Vector k4 = swe_rhs(q + dt * k3, g, h);
    q += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!q.allFinite()) throw DivergenceError("shallow-water state diverged", k + 1);
    states.col(static_cast<Eigen::Index>(k + 1)) = q;
  }
  return states;
}

TrajectoryDataset generate_swe_dataset(const std::vector<SweConfig>& configs) {
  if (configs.empty()) throw_argument("need at least one shallow-water configuration");
  const auto& ref = configs.front();
  std::vector<DatasetEntry> entries;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& cfg = configs[c];
    cfg.validate();
    if (cfg.grid_points_per_dim != ref.grid_points_per_dim || cfg.dt != ref.dt ||
        cfg.num_steps() != ref.num_steps() || cfg.domain_half_width != ref.domain_half_width) {
      throw_argument("shallow-water configurations must share grid, dt and T");
    }
    const std::size_t K = cfg.num_steps();
    Matrix states;
    try {
      states = integrate_swe(swe_initial_condition(cfg), cfg.grid_points_per_dim, cfg.spacing(), cfg.dt, K);
    } catch (const DivergenceError& e) {
      throw DivergenceError("shallow-water config " + std::to_string(c) + " (mu = " +
                                std::to_string(cfg.mu1) + ", " + std::to_string(cfg.mu2) +
                                "): " + e.what(),
                            e.step());
    }
    Vector param(2);
    param << cfg.mu1, cfg.mu2;
    entries.push_back({param, Trajectory(std::move(states), TimeGrid(0.0, cfg.dt, K))});
  }
  return TrajectoryDataset(std::move(entries));
}

}  // namespace rollinf
