#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "rollinf/datamodel.hpp"

namespace rollinf {

enum class Scheme { ForwardEuler, ImexLinearImplicit };

const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

// C(n + l - 1, l): number of distinct degree-l monomials in n variables.
std::size_t monomial_count(std::size_t n, std::size_t l);

// Degree-l monomials of an n-vector in graded lexicographic order. Each
// monomial is stored as its nondecreasing factor index tuple (i_1 <= ... <= i_l);
// lexicographic order on those tuples is lexicographic-descending order on the
// exponent vectors, e.g. n = 2, l = 2 gives [q1^2, q1 q2, q2^2].
class MonomialIndexing {
 public:
  MonomialIndexing(std::size_t n, std::size_t degree);

  std::size_t n() const { return n_; }
  std::size_t degree() const { return degree_; }
  std::size_t size() const { return count_; }

  // Factor indices of monomial m.
  const std::size_t* factors(std::size_t m) const { return &factors_[m * degree_]; }
  std::vector<std::size_t> exponents(std::size_t m) const;

  void evaluate(const double* q, double* out) const;
  // Features of every column of z (n x W) -> (size() x W).
  Matrix evaluate_columns(const Matrix& z) const;
  // Accumulates (d phi / d q)^T w into out, column by column.
  void add_jacobian_transpose(const Matrix& z, const Matrix& w, Matrix& out) const;

 private:
  std::size_t n_;
  std::size_t degree_;
  std::size_t count_;
  std::vector<std::size_t> factors_;
};

Vector feature_map(const Vector& q, std::size_t l);

// The model parameter: A_1..A_L (A_l is n x n_l) and B (n x p).
struct OperatorSet {
  std::vector<Matrix> A;
  Matrix B;

  static OperatorSet zeros(std::size_t n, std::size_t degree, std::size_t p);

  std::size_t degree() const { return A.size(); }
  std::size_t state_dim() const { return A.empty() ? 0 : static_cast<std::size_t>(A[0].rows()); }
  std::size_t control_dim() const { return static_cast<std::size_t>(B.cols()); }
  std::size_t parameter_count() const;

  // Packing order: A_1, ..., A_L, B, each column-major.
  Vector flatten() const;
  void assign(const Vector& flat);

  double squared_norm() const;
  bool all_finite() const;
};

// Shape check shared by the model and the regression/gradient code.
void validate_shapes(const OperatorSet& ops);

struct SimulationResult {
  Matrix states;  // n x (steps completed + 1)
  bool diverged = false;
  std::size_t divergence_step = 0;
};

class PolyModel {
 public:
  PolyModel(OperatorSet ops, double dt, Scheme scheme);

  static PolyModel zeros(std::size_t n, std::size_t degree, std::size_t p, double dt,
                         Scheme scheme);

  const OperatorSet& operators() const { return ops_; }
  const Matrix& A(std::size_t l) const { return ops_.A.at(l - 1); }
  const Matrix& B() const { return ops_.B; }
  std::size_t degree() const { return ops_.degree(); }
  std::size_t state_dim() const { return ops_.state_dim(); }
  std::size_t control_dim() const { return ops_.control_dim(); }
  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }
  const MonomialIndexing& indexing(std::size_t l) const { return *indexing_.at(l - 1); }

  PolyModel with_operators(OperatorSet ops) const;

  Vector rhs(const Vector& q, const Vector& u) const;
  Vector step(const Vector& q, const Vector& u) const;

  // Batched variants on n x W state matrices (one column per independent state).
  Matrix rhs_columns(const Matrix& z, const Matrix& u) const;
  Matrix step_columns(const Matrix& z, const Matrix& u) const;
  // Sum over l >= 2 of A_l phi_l(z) plus B u; the explicit part of the IMEX step.
  Matrix nonlinear_columns(const Matrix& z, const Matrix& u) const;

  // (I - dt A_1) solves, available for the IMEX scheme.
  Matrix implicit_solve(const Matrix& rhs) const;
  Matrix implicit_solve_transpose(const Matrix& rhs) const;
  double implicit_rcond() const;

 private:
  void require_implicit() const;

  OperatorSet ops_;
  double dt_;
  Scheme scheme_;
  std::vector<std::shared_ptr<const MonomialIndexing>> indexing_;
  struct ImplicitFactor;
  std::shared_ptr<const ImplicitFactor> implicit_;
};

// True when a state exceeds the divergence threshold 1e6 * (1 + reference)
// in max-norm or is not finite.
bool exceeds_divergence_threshold(const Vector& q, double reference_magnitude);

// Advances num_steps times from q0. Controls may be empty (p = 0) or hold at
// least num_steps columns. Stops early and flags divergence at the first bad
// step; the partial trajectory is returned.
SimulationResult simulate(const PolyModel& model, const Vector& q0, const Matrix& controls,
                          std::size_t num_steps);

}  // namespace rollinf
