#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "rollinf/benchgen.hpp"
#include "rollinf/errors.hpp"
#include "support.hpp"

using namespace rollinf;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Field f(x, y) sampled on a periodic g x g grid of (-w, w)^2, x fastest.
template <class F>
Vector sample(std::size_t g, double w, F f) {
  const auto G = static_cast<Eigen::Index>(g);
  const double h = 2.0 * w / static_cast<double>(g);
  Vector out(G * G);
  for (Eigen::Index j = 0; j < G; ++j) {
    for (Eigen::Index i = 0; i < G; ++i) {
      out(i + G * j) = f(-w + h * static_cast<double>(i), -w + h * static_cast<double>(j));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("random quadratic systems") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PolyModel m = random_quadratic_system(4, seed, 0.3);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(m.A(1));
    CHECK(es.eigenvalues().maxCoeff() <= -0.3 + 1e-12);
    CHECK(es.eigenvalues().minCoeff() >= -1.0 - 1e-12);
    CHECK(m.A(2).norm() == doctest::Approx(0.1 * m.A(1).norm()));
    CHECK(m.control_dim() == 0);
  }
  const PolyModel s = random_quadratic_system(1, 3, 0.5);
  CHECK(s.A(1)(0, 0) <= -0.5);
  CHECK(std::abs(s.A(2)(0, 0)) == doctest::Approx(0.1 * std::abs(s.A(1)(0, 0))));
  CHECK(random_quadratic_system(3, 9, 0.2).A(2) == random_quadratic_system(3, 9, 0.2).A(2));
  CHECK_THROWS_AS(random_quadratic_system(0, 1, 0.2), Error);
  CHECK_THROWS_AS(random_quadratic_system(2, 1, 0.0), Error);
}

TEST_CASE("small perturbations stay bounded") {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PolyModel m = random_quadratic_system(5, seed, 0.1, 1e-2);
    Vector q0 = testing::random_matrix(rng, 5, 1);
    q0 *= 0.01 / q0.norm();
    const SimulationResult sim = simulate(m, q0, Matrix(), 1000);
    CHECK_FALSE(sim.diverged);
    CHECK(sim.states.col(1000).norm() <= q0.norm());
  }
}

TEST_CASE("shallow-water right-hand side special cases") {
  const std::size_t g = 12;
  const double h = 8.0 / 12.0;
  const auto G = static_cast<Eigen::Index>(g * g);
  Vector state(2 * G);
  state.head(G) = sample(g, 4.0, [](double x, double y) { return 1.0 + 0.3 * std::exp(-(x * x + y * y)); });
  state.tail(G).setZero();
  const Vector r = swe_rhs(state, g, h);
  CHECK(r.head(G).isZero(0.0));
  CHECK(r.tail(G) == -state.head(G));

  Vector flat(2 * G);
  flat.head(G).setConstant(1.7);
  flat.tail(G).setConstant(-0.4);
  const Vector rf = swe_rhs(flat, g, h);
  CHECK(rf.head(G).isZero(0.0));
  CHECK((rf.tail(G).array() == -1.7).all());

  CHECK_THROWS_AS(swe_rhs(Vector::Zero(10), g, h), Error);
  Vector bad = flat;
  bad(3) = INFINITY;
  CHECK_THROWS_AS(swe_rhs(bad, g, h), DivergenceError);
}

TEST_CASE("centered differences are second order") {
  auto error = [](std::size_t g) {
    const double w = kPi;
    const double h = 2.0 * w / static_cast<double>(g);
    const Vector f = sample(g, w, [](double x, double y) { return std::sin(x) * std::cos(y); });
    const Vector dx = sample(g, w, [](double x, double y) { return std::cos(x) * std::cos(y); });
    const Vector dy = sample(g, w, [](double x, double y) { return -std::sin(x) * std::sin(y); });
    return std::max((periodic_dx(f, g, h) - dx).cwiseAbs().maxCoeff(),
                    (periodic_dy(f, g, h) - dy).cwiseAbs().maxCoeff());
  };
  const double order = std::log2(error(16) / error(32));
  CHECK(order >= 1.9);
}

TEST_CASE("uniform height gives a uniformly falling potential") {
  // q_h = 1, q_phi = 0: the potential stays uniform, so q_phi(t) = -t exactly
  // and RK4 integrates the linear ODE to rounding.
  const std::size_t g = 10;
  const auto G = static_cast<Eigen::Index>(g * g);
  Vector q0(2 * G);
  q0.head(G).setOnes();
  q0.tail(G).setZero();
  const double dt = 1e-3;
  const Matrix traj = integrate_swe(q0, g, 0.8, dt, 50);
  for (Eigen::Index k = 0; k <= 50; ++k) {
    const double t = dt * static_cast<double>(k);
    CHECK((traj.col(k).tail(G).array() + t).abs().maxCoeff() <= 1e-12);
    CHECK((traj.col(k).head(G).array() - 1.0).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("shallow-water data sets") {
  SweConfig a;
  a.grid_points_per_dim = 16;
  a.dt = 2e-3;
  a.T = 0.2;
  a.mu1 = 0.5;
  a.mu2 = 1.1;
  SweConfig b = a;
  b.mu1 = 0.2;
  b.mu2 = 1.7;
  const TrajectoryDataset data = generate_swe_dataset({a, b});
  REQUIRE(data.size() == 2);
  CHECK(data.state_dim() == 2 * 16 * 16);
  CHECK(data.entry(0).trajectory.grid().num_steps == 100);
  CHECK(data.entry(1).param(1) == 1.7);
  const Matrix& Q = data.entry(0).trajectory.states();
  CHECK(Q.col(0).head(256) == swe_initial_condition(a).head(256));
  // Height at the grid point closest to the origin.
  CHECK(Q(8 + 16 * 8, 0) == doctest::Approx(1.5));

  const double h2 = a.spacing() * a.spacing();
  const double m0 = Q.col(0).head(256).sum() * h2;
  for (Eigen::Index k = 0; k < Q.cols(); ++k) {
    CHECK(std::abs(Q.col(k).head(256).sum() * h2 - m0) <= 1e-6 * m0);
  }
  CHECK(generate_swe_dataset({a, b}).entry(1).trajectory.states() == data.entry(1).trajectory.states());

  SweConfig out = a;
  out.mu1 = 0.6;
  CHECK_THROWS_AS(generate_swe_dataset({out}), Error);
  SweConfig other = b;
  other.dt = 1e-3;
  CHECK_THROWS_AS(generate_swe_dataset({a, other}), Error);
  CHECK_THROWS_AS(generate_swe_dataset({}), Error);
}
