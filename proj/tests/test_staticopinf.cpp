#include <cmath>

#include "doctest.h"
#include "rollinf/benchgen.hpp"
#include "rollinf/errors.hpp"
#include "rollinf/staticopinf.hpp"
#include "support.hpp"

using namespace rollinf;

namespace {

TrajectoryDataset single(Matrix states, double dt, Matrix controls = Matrix()) {
  Vector mu(1);
  mu << 0.0;
  const auto K = static_cast<std::size_t>(states.cols() - 1);
  return TrajectoryDataset({{mu, Trajectory(std::move(states), std::move(controls), TimeGrid(0.0, dt, K))}});
}

// Trajectories of a known model plus the model's own right-hand side at every
// state (analytic derivatives); random initial conditions keep D full rank.
struct SyntheticData {
  TrajectoryDataset data;
  std::vector<Matrix> derivatives;
};

SyntheticData synthetic(const PolyModel& truth, std::size_t entries, std::size_t K, std::uint64_t seed,
                        double scale) {
  std::mt19937_64 rng(seed);
  std::vector<DatasetEntry> out;
  std::vector<Matrix> derivs;
  const auto n = static_cast<Eigen::Index>(truth.state_dim());
  for (std::size_t i = 0; i < entries; ++i) {
    const Vector q0 = testing::random_matrix(rng, n, 1, scale);
    const SimulationResult sim = simulate(truth, q0, Matrix(), K);
    Matrix d(n, sim.states.cols());
    for (Eigen::Index k = 0; k < d.cols(); ++k) d.col(k) = truth.rhs(sim.states.col(k), Vector());
    Vector mu(1);
    mu << static_cast<double>(i);
    out.push_back({mu, Trajectory(sim.states, TimeGrid(0.0, truth.dt(), K))});
    derivs.push_back(d);
  }
  return {TrajectoryDataset(std::move(out)), derivs};
}

}  // namespace

TEST_CASE("derivatives of simple trajectories") {
  Vector v(2);
  v << 1.5, -2.0;
  Matrix lin(2, 6);
  for (Eigen::Index k = 0; k < 6; ++k) lin.col(k) = (0.1 * static_cast<double>(k)) * v;
  const Matrix d = approx_derivatives(single(lin, 0.1).entry(0).trajectory);
  CHECK(d.cols() == 5);
  for (Eigen::Index k = 0; k < 5; ++k) CHECK((d.col(k) - v).norm() < 1e-12);

  CHECK(approx_derivatives(single(Matrix::Ones(3, 4), 0.2).entry(0).trajectory).isZero(0.0));

  Matrix quad(1, 5);
  for (Eigen::Index k = 0; k < 5; ++k) quad(0, k) = std::pow(0.1 * static_cast<double>(k), 2);
  CHECK(approx_derivatives(single(quad, 0.1).entry(0).trajectory)(0, 3) == doctest::Approx(0.7));
}

TEST_CASE("sparse derivatives use the retained gap") {
  Matrix quad(1, 7);
  for (Eigen::Index k = 0; k < 7; ++k) quad(0, k) = std::pow(0.1 * static_cast<double>(k), 2);
  const Trajectory t = single(quad, 0.1).entry(0).trajectory;
  const Matrix d = approx_derivatives(t, SparseMask::make(6, 3));
  REQUIRE(d.cols() == 2);
  CHECK(d(0, 0) == doctest::Approx(0.09 / 0.3));
  CHECK(d(0, 1) == doctest::Approx((0.36 - 0.09) / 0.3));
  CHECK(approx_derivatives(t, SparseMask::make(6, 1)) == approx_derivatives(t));
  CHECK_THROWS_AS(approx_derivatives(t, SparseMask::make(6, 7)), Error);
}

TEST_CASE("assembled systems") {
  Matrix s(1, 2);
  s << 1.0, 0.9;
  const RegressionSystem a = assemble_system(single(s, 0.1), 1);
  REQUIRE(a.rows() == 1);
  CHECK(a.data(0, 0) == 1.0);
  CHECK(a.target(0, 0) == doctest::Approx(-1.0));

  Vector q(2);
  q << 1.0, 2.0;
  Vector expected(5);
  expected << 1, 2, 1, 2, 4;
  CHECK(regression_row(q, Vector(), 2) == expected);
  Vector u(1);
  u << 7.0;
  CHECK(regression_row(q, u, 1)(2) == 7.0);

  std::mt19937_64 rng(3);
  const TrajectoryDataset data = testing::random_dataset(rng, 3, 2, 1, 9, 0.1);
  const RegressionSystem dense = assemble_system(data, 2);
  CHECK(dense.rows() == 3 * 9);
  CHECK(dense.nbar() == 2 + 3 + 1);
  const RegressionSystem xi1 = assemble_system(data, 2, std::size_t{1});
  CHECK(xi1.data == dense.data);
  CHECK(xi1.target == dense.target);
  const RegressionSystem xi4 = assemble_system(data, 2, std::size_t{4});
  CHECK(xi4.rows() == 3 * 2);
  // Row ordering: entry-major, time-minor.
  CHECK(dense.data.row(9).head(2).transpose() == data.entry(1).trajectory.states().col(0));
}

TEST_CASE("minimal-norm solutions") {
  RegressionSystem id;
  id.data = Matrix::Identity(2, 2);
  id.target = (Matrix(2, 2) << 1, 2, 3, 4).finished();
  id.state_dim = 2;
  id.degree = 1;
  const StaticSolution s = solve_min_norm(id);
  CHECK(s.operators.A[0].transpose().isApprox(id.target));
  CHECK(s.rank == 2);

  RegressionSystem row;
  row.data = (Matrix(1, 2) << 1, 0).finished();
  row.target = (Matrix(1, 1) << 2).finished();
  row.state_dim = 1;
  row.degree = 1;
  row.control_dim = 1;
  const StaticSolution r = solve_min_norm(row);
  CHECK(r.operators.A[0](0, 0) == doctest::Approx(2.0));
  CHECK(r.operators.B(0, 0) == doctest::Approx(0.0));

  RegressionSystem zero = row;
  zero.data.setZero();
  const StaticSolution z = solve_min_norm(zero);
  CHECK(z.rank_zero);
  CHECK(z.operators.squared_norm() == 0.0);
}

TEST_CASE("minimal-norm characterization") {
  std::mt19937_64 rng(4);
  RegressionSystem sys;
  sys.data = testing::random_matrix(rng, 8, 12);  // underdetermined
  sys.target = testing::random_matrix(rng, 8, 3);
  sys.state_dim = 3;
  sys.degree = 1;
  sys.control_dim = 9;
  const StaticSolution s = solve_min_norm(sys);
  Matrix O(12, 3);
  O.topRows(3) = s.operators.A[0].transpose();
  O.bottomRows(9) = s.operators.B.transpose();
  // O lies in the row space of D.
  const Matrix w = sys.data.transpose().completeOrthogonalDecomposition().solve(O);
  CHECK((sys.data.transpose() * w - O).norm() <= 1e-10 * O.norm());
  const double best = (sys.data * O - sys.target).norm();
  for (int t = 0; t < 100; ++t) {
    const Matrix Op = O + testing::random_matrix(rng, 12, 3, 0.1);
    CHECK(best <= (sys.data * Op - sys.target).norm() + 1e-10);
  }
  // Any other exact solution has a larger norm.
  Matrix null_dir = Matrix::Zero(12, 1);
  Eigen::FullPivLU<Matrix> lu(sys.data);
  null_dir = lu.kernel().col(0);
  const Matrix other = O + null_dir * testing::random_matrix(rng, 1, 3);
  CHECK((sys.data * other - sys.target).norm() <= 1e-9);
  CHECK(other.norm() > O.norm());
  CHECK(static_objective(sys, s.operators) == doctest::Approx(best * best).epsilon(1e-10));
}

TEST_CASE("exact recovery of a linear system from analytic derivatives") {
  std::mt19937_64 rng(5);
  OperatorSet ops = OperatorSet::zeros(3, 1, 0);
  ops.A[0] = -Matrix::Identity(3, 3) + testing::random_matrix(rng, 3, 3, 0.3);
  const PolyModel truth(ops, 0.01, Scheme::ImexLinearImplicit);
  const SyntheticData syn = synthetic(truth, 2, 20, 6, 1.0);
  const RegressionSystem sys = assemble_system_with_derivatives(syn.data, syn.derivatives, 1);
  const StaticSolution s = solve_min_norm(sys);
  CHECK(s.rank == 3);
  CHECK((s.operators.A[0] - ops.A[0]).norm() < 1e-8);
}

TEST_CASE("exact recovery of a quadratic system") {
  const PolyModel truth = random_quadratic_system(5, 17, 0.1, 1e-2);
  const SyntheticData syn = synthetic(truth, 6, 40, 7, 1.0);
  const RegressionSystem sys = assemble_system_with_derivatives(syn.data, syn.derivatives, 2);
  CHECK(sys.rows() == 6 * 41);
  const StaticSolution s = solve_min_norm(sys);
  CHECK(s.rank == sys.nbar());
  CHECK((s.operators.A[0] - truth.A(1)).norm() < 1e-8);
  CHECK((s.operators.A[1] - truth.A(2)).norm() < 1e-8);
}

TEST_CASE("fit_static on forward-Euler data recovers the model") {
  // Forward differences of forward-Euler data are exactly the rhs.
  std::mt19937_64 rng(8);
  const PolyModel truth = testing::random_model(rng, 3, 2, 0, 0.01, Scheme::ForwardEuler);
  const SyntheticData syn = synthetic(truth, 4, 30, 9, 0.5);
  const PolyModel fit = fit_static(syn.data, 2, Scheme::ForwardEuler);
  CHECK((fit.operators().flatten() - truth.operators().flatten()).norm() < 1e-6);
  CHECK(fit.dt() == truth.dt());
}
