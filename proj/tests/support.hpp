#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rollinf/datamodel.hpp"
#include "rollinf/polymodel.hpp"
#include "rollinf/rollout.hpp"

namespace testing {

using rollinf::Matrix;
using rollinf::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

inline double max_relative_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Random model with a contractive linear part and small higher-order terms.
inline rollinf::PolyModel random_model(std::mt19937_64& rng, std::size_t n, std::size_t degree,
                                       std::size_t p, double dt, rollinf::Scheme scheme) {
  auto ops = rollinf::OperatorSet::zeros(n, degree, p);
  const auto N = static_cast<Eigen::Index>(n);
  ops.A[0] = -Matrix::Identity(N, N) + random_matrix(rng, N, N, 0.3);
  for (std::size_t l = 2; l <= degree; ++l) {
    ops.A[l - 1] = random_matrix(rng, N, ops.A[l - 1].cols(), 0.2);
  }
  if (p > 0) ops.B = random_matrix(rng, N, static_cast<Eigen::Index>(p), 0.5);
  return rollinf::PolyModel(std::move(ops), dt, scheme);
}

// Random reduced dataset (entries with K + 1 states of moderate size).
inline rollinf::TrajectoryDataset random_dataset(std::mt19937_64& rng, std::size_t entries,
                                                 std::size_t n, std::size_t p, std::size_t K,
                                                 double dt) {
  std::vector<rollinf::DatasetEntry> out;
  for (std::size_t i = 0; i < entries; ++i) {
    Matrix states = random_matrix(rng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(K + 1), 0.5);
    Matrix controls = p > 0 ? random_matrix(rng, static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(K), 0.5)
                            : Matrix(0, 0);
    Vector param(1);
    param << static_cast<double>(i);
    out.push_back({param, rollinf::Trajectory(std::move(states), std::move(controls),
                                              rollinf::TimeGrid(0.0, dt, K))});
  }
  return rollinf::TrajectoryDataset(std::move(out));
}

// Central finite-difference gradient of the roll-out objective.
inline Vector fd_gradient(const rollinf::PolyModel& model, const rollinf::TrajectoryDataset& data,
                          const rollinf::RollConfig& cfg, double h) {
  rollinf::OperatorSet ops = model.operators();
  const Vector theta = ops.flatten();
  Vector g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vector tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    rollinf::OperatorSet op = ops, om = ops;
    op.assign(tp);
    om.assign(tm);
    const double jp = rollinf::rollout_objective(model.with_operators(op), data, cfg);
    const double jm = rollinf::rollout_objective(model.with_operators(om), data, cfg);
    g(i) = (jp - jm) / (2.0 * h);
  }
  return g;
}

}  // namespace testing
