#include "rollinf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "rollinf/errors.hpp"

namespace rollinf {

namespace {

constexpr double kMaxKroneckerCondition = 1e12;

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct LyapunovSolver::Factor {
  Eigen::PartialPivLU<Matrix> lu;
  double rcond = 0.0;
};

LyapunovSolver::LyapunovSolver(const Matrix& A) : A_(A), factor_(std::make_unique<Factor>()) {
  if (A.rows() != A.cols() || A.rows() == 0) throw_argument("Lyapunov operator must be square");
  const auto n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix At = A.transpose();
  factor_->lu.compute(kronecker(I, At) + kronecker(At, I));
  // The LU estimator misses exactly singular operators (zero pivots), so the
  // pivot ratio caps it.
  const Vector pivots = factor_->lu.matrixLU().diagonal().cwiseAbs();
  const double ratio = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
  factor_->rcond = std::min(factor_->lu.rcond(), ratio);
  if (!(factor_->rcond * kMaxKroneckerCondition >= 1.0)) {
    std::ostringstream msg;
    msg << "Lyapunov operator is singular or ill-conditioned (rcond = " << factor_->rcond
        << "); A_1 has eigenvalues summing to nearly zero";
    throw Error(ErrorKind::NoCertificate, msg.str());
  }
}

LyapunovSolver::~LyapunovSolver() = default;
LyapunovSolver::LyapunovSolver(LyapunovSolver&&) noexcept = default;
LyapunovSolver& LyapunovSolver::operator=(LyapunovSolver&&) noexcept = default;

double LyapunovSolver::rcond() const { return factor_->rcond; }

Matrix LyapunovSolver::solve(const Matrix& C) const {
  const auto n = A_.rows();
  if (C.rows() != n || C.cols() != n) throw_argument("Lyapunov right-hand side has the wrong shape");
  const Vector rhs = -C.reshaped();
  const Vector x = factor_->lu.solve(rhs);
  const Matrix P = x.reshaped(n, n);
  return 0.5 * (P + P.transpose());
}

Matrix LyapunovSolver::solve_factor(const Matrix& L) const {
  return solve(L * L.transpose());
}

double LyapunovSolver::residual(const Matrix& P, const Matrix& C) const {
  return (A_.transpose() * P + P * A_ + C).norm();
}

Matrix lyapunov_solve(const Matrix& A1, const Matrix& L) {
  const LyapunovSolver solver(A1);
  return solver.solve_factor(L);
}

double smallest_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

StabilityBound stability_radius_bound(const LyapunovSolver& solver, const Matrix& A2,
                                      const Matrix& L) {
  StabilityBound out;
  const Matrix C = L * L.transpose();
  const Matrix P = solver.solve(C);
  out.residual = solver.residual(P, C);
  const double a2 = A2.norm();
  if (a2 == 0.0) {
    out.infinite = true;
    out.gamma = std::numeric_limits<double>::infinity();
    return out;
  }
  // P need not be definite when A_1 is not Hurwitz; gamma still follows the
  // formula and the flag records it.
  out.certified = Eigen::LLT<Matrix>(P).info() == Eigen::Success;
  out.gamma = smallest_singular_value(L) / (2.0 * std::sqrt(P.norm()) * a2);
  return out;
}

StabilityBound stability_radius_bound(const Matrix& A1, const Matrix& A2, const Matrix& L) {
  const LyapunovSolver solver(A1);
  return stability_radius_bound(solver, A2, L);
}

StabilityReport averaged_bound(const PolyModel& model, std::size_t num_realizations,
                               std::uint64_t seed) {
  if (model.degree() < 2) throw_argument("stability bound needs a model of degree >= 2");
  if (num_realizations < 1) throw_argument("need at least one realization");
  const LyapunovSolver solver(model.A(1));
  const auto n = static_cast<Eigen::Index>(model.state_dim());
  StabilityReport report;
  report.seed = seed;
  report.num_realizations = num_realizations;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t r = 0; r < num_realizations; ++r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix L(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) L(i, j) = normal(rng);
    }
    const StabilityBound b = stability_radius_bound(solver, model.A(2), L);
    report.gammas.push_back(b.gamma);
    report.lyapunov_residuals.push_back(b.residual);
    report.certified.push_back(b.certified);
    if (b.infinite) {
      ++report.infinite_count;
    } else if (std::isfinite(b.gamma)) {
      sum += b.gamma;
      ++used;
    }
  }
  if (used == 0 && report.infinite_count < num_realizations) {
    throw Error(ErrorKind::NoCertificate, "no realization produced a finite bound");
  }
  report.mean_gamma = used > 0 ? sum / static_cast<double>(used)
                               : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace rollinf
