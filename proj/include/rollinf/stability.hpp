#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "rollinf/datamodel.hpp"
#include "rollinf/polymodel.hpp"

namespace rollinf {

// Solves A^T P + P A = -C for symmetric right-hand sides C through the
// vectorized Kronecker system (I (x) A^T + A^T (x) I) vec(P) = -vec(C). The
// n^2 x n^2 operator is factorized once and reused for every solve.
class LyapunovSolver {
 public:
  explicit LyapunovSolver(const Matrix& A);
  ~LyapunovSolver();
  LyapunovSolver(LyapunovSolver&&) noexcept;
  LyapunovSolver& operator=(LyapunovSolver&&) noexcept;

  // P for A^T P + P A = -L L^T, symmetrized.
  Matrix solve_factor(const Matrix& L) const;
  Matrix solve(const Matrix& C) const;
  double rcond() const;
  // ||A^T P + P A + C||_F
  double residual(const Matrix& P, const Matrix& C) const;

 private:
  Matrix A_;
  struct Factor;
  std::unique_ptr<Factor> factor_;
};

Matrix lyapunov_solve(const Matrix& A1, const Matrix& L);

struct StabilityBound {
  double gamma = 0.0;
  bool infinite = false;   // A_2 = 0: the bound is vacuous
  bool certified = true;   // P positive definite (informational)
  double residual = 0.0;   // Lyapunov residual, Frobenius norm
};

// gamma = sigma_min(L) / (2 sqrt(||P||_F) ||A_2||_F) with A_1^T P + P A_1 = -L L^T.
StabilityBound stability_radius_bound(const Matrix& A1, const Matrix& A2, const Matrix& L);
StabilityBound stability_radius_bound(const LyapunovSolver& solver, const Matrix& A2,
                                      const Matrix& L);

struct StabilityReport {
  std::vector<double> gammas;
  std::vector<double> lyapunov_residuals;
  std::vector<bool> certified;
  double mean_gamma = 0.0;
  std::size_t num_realizations = 0;
  std::size_t infinite_count = 0;
  std::uint64_t seed = 0;
};

// Averages gamma over realizations of L with i.i.d. standard-normal entries.
// Realization r draws from its own stream derived from (seed, r).
StabilityReport averaged_bound(const PolyModel& model, std::size_t num_realizations,
                               std::uint64_t seed);

double smallest_singular_value(const Matrix& m);

// splitmix64-derived seed for stream `index` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace rollinf
