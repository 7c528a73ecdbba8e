#include <cmath>

#include "doctest.h"
#include "rollinf/benchgen.hpp"
#include "rollinf/errors.hpp"
#include "rollinf/polymodel.hpp"
#include "support.hpp"

using namespace rollinf;

namespace {

PolyModel scalar_model(std::vector<double> coeffs, double dt, Scheme scheme) {
  OperatorSet ops = OperatorSet::zeros(1, coeffs.size(), 0);
  for (std::size_t l = 0; l < coeffs.size(); ++l) ops.A[l](0, 0) = coeffs[l];
  return PolyModel(std::move(ops), dt, scheme);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("monomial counts") {
  CHECK(monomial_count(3, 2) == 6);
  CHECK(monomial_count(25, 2) == 325);
  for (std::size_t l = 1; l <= 4; ++l) CHECK(monomial_count(1, l) == 1);
  CHECK(monomial_count(256, 4) == 183181376);
  CHECK_THROWS_AS(monomial_count(0, 2), Error);
  try {
    monomial_count(std::size_t(1) << 40, 4);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
}

TEST_CASE("feature map values and order") {
  CHECK(feature_map(vec({1, 2}), 2) == vec({1, 2, 4}));
  CHECK(feature_map(Vector::Zero(3), 2).isZero(0.0));
  CHECK(feature_map(vec({1.5}), 3)(0) == doctest::Approx(3.375));
  CHECK(feature_map(vec({2, 3, 5}), 1) == vec({2, 3, 5}));
  const MonomialIndexing idx(2, 2);
  CHECK(idx.exponents(0) == std::vector<std::size_t>{2, 0});
  CHECK(idx.exponents(1) == std::vector<std::size_t>{1, 1});
  CHECK(idx.exponents(2) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("feature map length matches the count") {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t l = 1; l <= 3; ++l) {
      const Vector q = testing::random_matrix(rng, static_cast<Eigen::Index>(n), 1);
      CHECK(static_cast<std::size_t>(feature_map(q, l).size()) == monomial_count(n, l));
    }
  }
}

TEST_CASE("degree-2 features are the compressed Kronecker product") {
  std::mt19937_64 rng(2);
  for (Eigen::Index n = 1; n <= 6; ++n) {
    const Vector q = testing::random_matrix(rng, n, 1);
    Vector kron(n * n);
    for (Eigen::Index i = 0; i < n; ++i) kron.segment(i * n, n) = q(i) * q;
    Vector compressed(n * (n + 1) / 2);
    Eigen::Index m = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) compressed(m++) = kron(i * n + j);
    }
    CHECK(feature_map(q, 2) == compressed);
  }
}

TEST_CASE("feature Jacobian transpose matches finite differences") {
  std::mt19937_64 rng(3);
  for (std::size_t l = 1; l <= 3; ++l) {
    const MonomialIndexing idx(3, l);
    const Matrix z = testing::random_matrix(rng, 3, 1);
    const Matrix w = testing::random_matrix(rng, static_cast<Eigen::Index>(monomial_count(3, l)), 1);
    Matrix out = Matrix::Zero(3, 1);
    idx.add_jacobian_transpose(z, w, out);
    for (Eigen::Index i = 0; i < 3; ++i) {
      Matrix zp = z, zm = z;
      zp(i, 0) += 1e-6;
      zm(i, 0) -= 1e-6;
      const double fd = (w.col(0).dot(idx.evaluate_columns(zp).col(0)) -
                         w.col(0).dot(idx.evaluate_columns(zm).col(0))) / 2e-6;
      CHECK(out(i, 0) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("operator sets") {
  std::mt19937_64 rng(4);
  const PolyModel m = testing::random_model(rng, 3, 2, 2, 0.1, Scheme::ForwardEuler);
  OperatorSet ops = OperatorSet::zeros(3, 2, 2);
  CHECK(ops.parameter_count() == 3 * 3 + 3 * 6 + 3 * 2);
  ops.assign(m.operators().flatten());
  CHECK(ops.flatten() == m.operators().flatten());
  CHECK(ops.A[1] == m.A(2));
  CHECK(ops.B == m.B());
  OperatorSet wrong = OperatorSet::zeros(3, 2, 0);
  wrong.A[1] = Matrix::Zero(3, 5);
  CHECK_THROWS_AS(validate_shapes(wrong), Error);
  CHECK_THROWS_AS(PolyModel(OperatorSet::zeros(2, 1, 0), 0.0, Scheme::ForwardEuler), Error);
  OperatorSet inf = OperatorSet::zeros(2, 1, 0);
  inf.A[0](0, 0) = INFINITY;
  CHECK_THROWS_AS(PolyModel(inf, 0.1, Scheme::ForwardEuler), Error);
}

TEST_CASE("rhs") {
  CHECK(PolyModel::zeros(2, 2, 1, 0.1, Scheme::ForwardEuler).rhs(vec({1, 2}), vec({3})).isZero(0.0));
  OperatorSet id = OperatorSet::zeros(2, 1, 0);
  id.A[0] = Matrix::Identity(2, 2);
  CHECK(PolyModel(id, 0.1, Scheme::ForwardEuler).rhs(vec({3, -1}), Vector()) == vec({3, -1}));
  CHECK(scalar_model({-1.0, 0.5}, 0.1, Scheme::ForwardEuler).rhs(vec({2}), Vector())(0) == 0.0);
  CHECK_THROWS_AS(scalar_model({-1.0}, 0.1, Scheme::ForwardEuler).rhs(vec({1, 2}), Vector()), Error);
}

TEST_CASE("forward Euler step is q + dt rhs") {
  std::mt19937_64 rng(5);
  const PolyModel m = testing::random_model(rng, 4, 3, 2, 0.07, Scheme::ForwardEuler);
  const Vector q = testing::random_matrix(rng, 4, 1);
  const Vector u = testing::random_matrix(rng, 2, 1);
  const Vector expected = q + 0.07 * m.rhs(q, u);
  CHECK(m.step(q, u) == expected);
}

TEST_CASE("IMEX step") {
  const PolyModel s = scalar_model({-1.0, 0.5}, 0.1, Scheme::ImexLinearImplicit);
  CHECK(s.step(vec({1}), Vector())(0) == doctest::Approx(1.05 / 1.1).epsilon(1e-15));

  std::mt19937_64 rng(6);
  OperatorSet ops = OperatorSet::zeros(3, 1, 0);
  ops.A[0] = testing::random_matrix(rng, 3, 3);
  const PolyModel lin(ops, 0.05, Scheme::ImexLinearImplicit);
  const Vector q = testing::random_matrix(rng, 3, 1);
  const Vector be = (Matrix::Identity(3, 3) - 0.05 * ops.A[0]).partialPivLu().solve(q);
  CHECK((lin.step(q, Vector()) - be).norm() <= 1e-12 * be.norm());

  OperatorSet sing = OperatorSet::zeros(1, 1, 0);
  sing.A[0](0, 0) = 10.0;
  const PolyModel bad(sing, 0.1, Scheme::ImexLinearImplicit);
  try {
    bad.step(vec({1}), Vector());
    FAIL("expected an integrator error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Integrator);
  }
}

TEST_CASE("steps are consistent as dt goes to zero") {
  std::mt19937_64 rng(7);
  for (auto scheme : {Scheme::ForwardEuler, Scheme::ImexLinearImplicit}) {
    const PolyModel m = testing::random_model(rng, 3, 2, 1, 1e-8, scheme);
    const Vector q = testing::random_matrix(rng, 3, 1);
    const Vector u = testing::random_matrix(rng, 1, 1);
    CHECK((m.step(q, u) - q).norm() <= 1e-6);
  }
}

TEST_CASE("simulate") {
  const PolyModel zero = PolyModel::zeros(2, 2, 0, 0.1, Scheme::ImexLinearImplicit);
  const SimulationResult c = simulate(zero, vec({1, 2}), Matrix(), 4);
  for (Eigen::Index k = 0; k < 5; ++k) CHECK(c.states.col(k) == vec({1, 2}));

  const SimulationResult g = simulate(scalar_model({-1.0}, 0.1, Scheme::ForwardEuler), vec({1}), Matrix(), 3);
  CHECK(g.states(0, 1) == doctest::Approx(0.9));
  CHECK(g.states(0, 2) == doctest::Approx(0.81));
  CHECK(g.states(0, 3) == doctest::Approx(0.729));
  CHECK_FALSE(g.diverged);

  const SimulationResult d = simulate(scalar_model({0.0, 1.0}, 0.5, Scheme::ForwardEuler), vec({1}), Matrix(), 100);
  CHECK(d.diverged);
  CHECK(d.divergence_step > 0);
  // The partial trajectory ends with the last state below the threshold.
  CHECK(static_cast<std::size_t>(d.states.cols()) == d.divergence_step);

  std::mt19937_64 rng(8);
  const PolyModel m = testing::random_model(rng, 3, 2, 2, 0.1, Scheme::ImexLinearImplicit);
  const Matrix u = testing::random_matrix(rng, 2, 6);
  CHECK(simulate(m, vec({0.1, 0.2, 0.3}), u, 6).states == simulate(m, vec({0.1, 0.2, 0.3}), u, 6).states);
  CHECK_THROWS_AS(simulate(m, vec({0.1, 0.2, 0.3}), u, 7), Error);
}

TEST_CASE("simulate converges to an RK4 reference") {
  // Fine RK4 at dt / 100 serves as the exact flow; both schemes are first
  // order, so halving dt should roughly halve the error.
  const PolyModel truth = random_quadratic_system(4, 21, 0.2, 1e-2);
  std::mt19937_64 rng(9);
  const Vector q0 = 0.3 * Vector(testing::random_matrix(rng, 4, 1));
  auto f = [&](const Vector& q) { return truth.rhs(q, Vector()); };
  const double T = 1.0;
  auto reference = [&](double dt) {
    const double h = dt / 100.0;
    Vector q = q0;
    const auto steps = static_cast<int>(std::lround(T / h));
    for (int k = 0; k < steps; ++k) {
      const Vector k1 = f(q), k2 = f(q + 0.5 * h * k1), k3 = f(q + 0.5 * h * k2), k4 = f(q + h * k3);
      q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return q;
  };
  const Vector exact = reference(1e-2);
  for (auto scheme : {Scheme::ForwardEuler, Scheme::ImexLinearImplicit}) {
    double errs[2];
    int i = 0;
    for (double dt : {2e-2, 1e-2}) {
      const PolyModel m = truth.with_operators(truth.operators());
      const PolyModel sm(m.operators(), dt, scheme);
      const auto K = static_cast<std::size_t>(std::lround(T / dt));
      errs[i++] = (simulate(sm, q0, Matrix(), K).states.col(static_cast<Eigen::Index>(K)) - exact).norm();
    }
    CHECK(errs[1] <= 0.6 * errs[0]);
    CHECK(errs[1] <= 0.05 * q0.norm());
  }
}

TEST_CASE("scheme names") {
  CHECK(scheme_from_string("forward-euler") == Scheme::ForwardEuler);
  CHECK(scheme_from_string("imex") == Scheme::ImexLinearImplicit);
  CHECK(std::string(to_string(Scheme::ImexLinearImplicit)) == "imex");
  CHECK_THROWS_AS(scheme_from_string("rk4"), Error);
}
