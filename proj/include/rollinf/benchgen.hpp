#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rollinf/datamodel.hpp"
#include "rollinf/polymodel.hpp"

namespace rollinf {

// A_1 = Q diag(lambda) Q^T with lambda ~ U[-1, -spectral_margin] and Q random
// orthogonal; A_2 Gaussian rescaled to ||A_2||_F = 0.1 ||A_1||_F; B = 0.
PolyModel random_quadratic_system(std::size_t n, std::uint64_t seed, double spectral_margin,
                                  double dt = 1e-2, Scheme scheme = Scheme::ImexLinearImplicit,
                                  std::size_t control_dim = 0);

// Periodic shallow-water problem on (-w, w)^2 with the Gaussian-bump height
// initial condition 1 + mu1 exp(-mu2 |x|^2) and zero potential.
struct SweConfig {
  std::size_t grid_points_per_dim = 24;
  double domain_half_width = 4.0;
  double mu1 = 0.35;
  double mu2 = 1.4;
  double dt = 1e-3;
  double T = 0.2;

  void validate() const;
  std::size_t num_steps() const;
  double spacing() const;
};

// Centered periodic first derivatives of a g x g field stored x-fastest.
Vector periodic_dx(const Vector& field, std::size_t g, double h);
Vector periodic_dy(const Vector& field, std::size_t g, double h);

// Time derivative of the stacked state [q_h; q_phi]:
//   d/dt q_h   = -div(q_h grad q_phi)
//   d/dt q_phi = -|grad q_phi|^2 / 2 - q_h
// using centered differences on the fluxes q_h d_x q_phi, q_h d_y q_phi.
Vector swe_rhs(const Vector& state, std::size_t g, double h);

Vector swe_initial_condition(const SweConfig& cfg);

// Classical RK4 on swe_rhs; column k is the state after k steps.
Matrix integrate_swe(const Vector& q0, std::size_t g, double h, double dt, std::size_t steps);

// One RK4 trajectory per config (param = [mu1, mu2]); full states, N = 2 g^2.
TrajectoryDataset generate_swe_dataset(const std::vector<SweConfig>& configs);

}  // namespace rollinf
