#include "rollinf/polymodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rollinf/errors.hpp"

namespace rollinf {

namespace {

constexpr double kMaxImplicitCondition = 1e12;

std::shared_ptr<const MonomialIndexing> cached_indexing(std::size_t n, std::size_t l) {
  return std::make_shared<const MonomialIndexing>(n, l);
}

}  // namespace

const char* to_string(Scheme scheme) {
  return scheme == Scheme::ForwardEuler ? "forward-euler" : "imex";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "forward-euler" || name == "euler" || name == "fe") return Scheme::ForwardEuler;
  if (name == "imex" || name == "imex-linear-implicit") return Scheme::ImexLinearImplicit;
  throw_argument("unknown time scheme '" + name + "' (expected forward-euler or imex)");
}

std::size_t monomial_count(std::size_t n, std::size_t l) {
  if (n < 1 || l < 1) throw_argument("monomial_count needs n >= 1 and l >= 1");
  // C(n-1+i, i) for i = 1..l; every partial product is an integer.
  std::size_t c = 1;
  for (std::size_t i = 1; i <= l; ++i) {
    std::size_t prod = 0;
    if (__builtin_mul_overflow(c, n - 1 + i, &prod)) {
      throw Error(ErrorKind::Capacity, "monomial count overflows for n = " +
                                           std::to_string(n) + ", l = " + std::to_string(l));
    }
    c = prod / i;
  }
  return c;
}

MonomialIndexing::MonomialIndexing(std::size_t n, std::size_t degree)
    : n_(n), degree_(degree), count_(monomial_count(n, degree)) {
  factors_.reserve(count_ * degree_);
  std::vector<std::size_t> idx(degree_, 0);
  for (std::size_t m = 0; m < count_; ++m) {
    factors_.insert(factors_.end(), idx.begin(), idx.end());
    // Next nondecreasing tuple in lexicographic order.
    std::size_t pos = degree_;
    while (pos > 0 && idx[pos - 1] == n_ - 1) --pos;
    if (pos == 0) break;
    const std::size_t v = idx[pos - 1] + 1;
    for (std::size_t p = pos - 1; p < degree_; ++p) idx[p] = v;
  }
}

std::vector<std::size_t> MonomialIndexing::exponents(std::size_t m) const {
  std::vector<std::size_t> alpha(n_, 0);
  const std::size_t* f = factors(m);
  for (std::size_t p = 0; p < degree_; ++p) ++alpha[f[p]];
  return alpha;
}

void MonomialIndexing::evaluate(const double* q, double* out) const {
  const std::size_t* f = factors_.data();
  for (std::size_t m = 0; m < count_; ++m, f += degree_) {
    double v = q[f[0]];
    for (std::size_t p = 1; p < degree_; ++p) v *= q[f[p]];
    out[m] = v;
  }
}

Matrix MonomialIndexing::evaluate_columns(const Matrix& z) const {
  Matrix out(static_cast<Eigen::Index>(count_), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) evaluate(z.col(c).data(), out.col(c).data());
  return out;
}

void MonomialIndexing::add_jacobian_transpose(const Matrix& z, const Matrix& w,
                                              Matrix& out) const {
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double* q = z.col(c).data();
    const double* wc = w.col(c).data();
    double* o = out.col(c).data();
    const std::size_t* f = factors_.data();
    if (degree_ == 1) {
      for (std::size_t m = 0; m < count_; ++m) o[f[m]] += wc[m];
      continue;
    }
    if (degree_ == 2) {
      for (std::size_t m = 0; m < count_; ++m, f += 2) {
        o[f[0]] += wc[m] * q[f[1]];
        o[f[1]] += wc[m] * q[f[0]];
      }
      continue;
    }
    for (std::size_t m = 0; m < count_; ++m, f += degree_) {
      for (std::size_t p = 0; p < degree_; ++p) {
        double prod = wc[m];
        for (std::size_t r = 0; r < degree_; ++r) {
          if (r != p) prod *= q[f[r]];
        }
        o[f[p]] += prod;
      }
    }
  }
}

Vector feature_map(const Vector& q, std::size_t l) {
  if (!q.allFinite()) throw Error(ErrorKind::Data, "feature_map input is not finite");
  const MonomialIndexing idx(static_cast<std::size_t>(q.size()), l);
  Vector out(static_cast<Eigen::Index>(idx.size()));
  idx.evaluate(q.data(), out.data());
  return out;
}

OperatorSet OperatorSet::zeros(std::size_t n, std::size_t degree, std::size_t p) {
  OperatorSet ops;
  for (std::size_t l = 1; l <= degree; ++l) {
    ops.A.push_back(Matrix::Zero(static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(monomial_count(n, l))));
  }
  ops.B = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  return ops;
}

std::size_t OperatorSet::parameter_count() const {
  std::size_t count = static_cast<std::size_t>(B.size());
  for (const auto& a : A) count += static_cast<std::size_t>(a.size());
  return count;
}

Vector OperatorSet::flatten() const {
  Vector flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index offset = 0;
  for (const auto& a : A) {
    flat.segment(offset, a.size()) = a.reshaped();
    offset += a.size();
  }
  flat.segment(offset, B.size()) = B.reshaped();
  return flat;
}

void OperatorSet::assign(const Vector& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw_argument("parameter vector length does not match the operator layout");
  }
  Eigen::Index offset = 0;
  for (auto& a : A) {
    a.reshaped() = flat.segment(offset, a.size());
    offset += a.size();
  }
  B.reshaped() = flat.segment(offset, B.size());
}

double OperatorSet::squared_norm() const {
  double s = B.squaredNorm();
  for (const auto& a : A) s += a.squaredNorm();
  return s;
}

bool OperatorSet::all_finite() const {
  for (const auto& a : A) {
    if (!a.allFinite()) return false;
  }
  return B.allFinite();
}

void validate_shapes(const OperatorSet& ops) {
  if (ops.A.empty()) throw_argument("model needs degree L >= 1");
  const auto n = ops.A[0].rows();
  if (n < 1) throw_argument("model state dimension must be positive");
  for (std::size_t l = 1; l <= ops.A.size(); ++l) {
    const auto& a = ops.A[l - 1];
    const auto expected =
        static_cast<Eigen::Index>(monomial_count(static_cast<std::size_t>(n), l));
    if (a.rows() != n || a.cols() != expected) {
      throw_argument("operator A_" + std::to_string(l) + " must be " + std::to_string(n) +
                     " x " + std::to_string(expected) + ", got " + std::to_string(a.rows()) +
                     " x " + std::to_string(a.cols()));
    }
  }
  if (ops.B.rows() != n && ops.B.size() != 0) {
    throw_argument("control operator B must have n rows");
  }
}

struct PolyModel::ImplicitFactor {
  Eigen::PartialPivLU<Matrix> lu;
  Eigen::PartialPivLU<Matrix> lu_transpose;
  double rcond = 0.0;
};

PolyModel::PolyModel(OperatorSet ops, double dt, Scheme scheme)
    : ops_(std::move(ops)), dt_(dt), scheme_(scheme) {
  validate_shapes(ops_);
  if (!(dt_ > 0.0)) throw_argument("model time step must be positive");
  if (ops_.B.rows() == 0) ops_.B.resize(static_cast<Eigen::Index>(state_dim()), 0);
  if (!ops_.all_finite()) throw Error(ErrorKind::Data, "model operators contain non-finite entries");
  for (std::size_t l = 1; l <= degree(); ++l) indexing_.push_back(cached_indexing(state_dim(), l));
  if (scheme_ == Scheme::ImexLinearImplicit) {
    const auto n = static_cast<Eigen::Index>(state_dim());
    const Matrix m = Matrix::Identity(n, n) - dt_ * ops_.A[0];
    auto factor = std::make_shared<ImplicitFactor>();
    factor->lu.compute(m);
    factor->lu_transpose.compute(m.transpose());
    // Zero pivots slip past the LU estimator; the pivot ratio catches them.
    const Vector pivots = factor->lu.matrixLU().diagonal().cwiseAbs();
    const double ratio = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
    factor->rcond = std::min(factor->lu.rcond(), ratio);
    implicit_ = std::move(factor);
  }
}

PolyModel PolyModel::zeros(std::size_t n, std::size_t degree, std::size_t p, double dt,
                           Scheme scheme) {
  return PolyModel(OperatorSet::zeros(n, degree, p), dt, scheme);
}

PolyModel PolyModel::with_operators(OperatorSet ops) const {
  return PolyModel(std::move(ops), dt_, scheme_);
}

Vector PolyModel::rhs(const Vector& q, const Vector& u) const {
  if (static_cast<std::size_t>(q.size()) != state_dim()) {
    throw_argument("state has dimension " + std::to_string(q.size()) + ", model expects " +
                   std::to_string(state_dim()));
  }
  if (static_cast<std::size_t>(u.size()) != control_dim()) {
    throw_argument("control has dimension " + std::to_string(u.size()) + ", model expects " +
                   std::to_string(control_dim()));
  }
  Vector out = ops_.A[0] * q;
  Vector phi;
  for (std::size_t l = 2; l <= degree(); ++l) {
    phi.resize(static_cast<Eigen::Index>(indexing(l).size()));
    indexing(l).evaluate(q.data(), phi.data());
    out.noalias() += ops_.A[l - 1] * phi;
  }
  if (control_dim() > 0) out.noalias() += ops_.B * u;
  return out;
}

Vector PolyModel::step(const Vector& q, const Vector& u) const {
  if (scheme_ == Scheme::ForwardEuler) return q + dt_ * rhs(q, u);
  if (static_cast<std::size_t>(q.size()) != state_dim() ||
      static_cast<std::size_t>(u.size()) != control_dim()) {
    throw_argument("state or control dimension does not match the model");
  }
  const Matrix z = q;
  const Matrix uc = u;
  return implicit_solve(z + dt_ * nonlinear_columns(z, uc)).col(0);
}

Matrix PolyModel::nonlinear_columns(const Matrix& z, const Matrix& u) const {
  Matrix out = Matrix::Zero(z.rows(), z.cols());
  for (std::size_t l = 2; l <= degree(); ++l) {
    out.noalias() += ops_.A[l - 1] * indexing(l).evaluate_columns(z);
  }
  if (control_dim() > 0) out.noalias() += ops_.B * u;
  return out;
}

Matrix PolyModel::rhs_columns(const Matrix& z, const Matrix& u) const {
  Matrix out = nonlinear_columns(z, u);
  out.noalias() += ops_.A[0] * z;
  return out;
}

Matrix PolyModel::step_columns(const Matrix& z, const Matrix& u) const {
  if (scheme_ == Scheme::ForwardEuler) return z + dt_ * rhs_columns(z, u);
  return implicit_solve(z + dt_ * nonlinear_columns(z, u));
}

void PolyModel::require_implicit() const {
  if (!implicit_) throw_argument("implicit solve requested for an explicit model");
  if (!(implicit_->rcond * kMaxImplicitCondition >= 1.0)) {
    throw Error(ErrorKind::Integrator,
                "implicit matrix I - dt*A_1 is singular or ill-conditioned (rcond = " +
                    std::to_string(implicit_->rcond) + ")");
  }
}

Matrix PolyModel::implicit_solve(const Matrix& rhs) const {
  require_implicit();
  return implicit_->lu.solve(rhs);
}

Matrix PolyModel::implicit_solve_transpose(const Matrix& rhs) const {
  require_implicit();
  return implicit_->lu_transpose.solve(rhs);
}

double PolyModel::implicit_rcond() const { return implicit_ ? implicit_->rcond : 1.0; }

bool exceeds_divergence_threshold(const Vector& q, double reference_magnitude) {
  if (!q.allFinite()) return true;
  return q.lpNorm<Eigen::Infinity>() > 1e6 * (1.0 + reference_magnitude);
}

SimulationResult simulate(const PolyModel& model, const Vector& q0, const Matrix& controls,
                          std::size_t num_steps) {
  const auto n = static_cast<Eigen::Index>(model.state_dim());
  if (q0.size() != n) throw_argument("initial condition dimension does not match the model");
  const bool use_controls = model.control_dim() > 0;
  if (use_controls && (controls.rows() != static_cast<Eigen::Index>(model.control_dim()) ||
                       controls.cols() < static_cast<Eigen::Index>(num_steps))) {
    throw_argument("controls must be p x K with p = " + std::to_string(model.control_dim()));
  }
  const double reference = q0.lpNorm<Eigen::Infinity>();
  SimulationResult result;
  result.states.resize(n, static_cast<Eigen::Index>(num_steps) + 1);
  result.states.col(0) = q0;
  Vector q = q0;
  const Vector no_control(0);
  for (std::size_t k = 0; k < num_steps; ++k) {
    const auto kc = static_cast<Eigen::Index>(k);
    q = use_controls ? model.step(q, controls.col(kc)) : model.step(q, no_control);
    if (exceeds_divergence_threshold(q, reference)) {
      result.diverged = true;
      result.divergence_step = k + 1;
      result.states.conservativeResize(n, kc + 1);
      return result;
    }
    result.states.col(kc + 1) = q;
  }
  return result;
}

}  // namespace rollinf
