#include "rollinf/staticopinf.hpp"

#include <string>

#include "rollinf/errors.hpp"

namespace rollinf {

namespace {

constexpr double kPinvCutoff = 1e-12;

std::size_t regression_width(std::size_t n, std::size_t degree, std::size_t p) {
  std::size_t width = p;
  for (std::size_t l = 1; l <= degree; ++l) width += monomial_count(n, l);
  return width;
}

// Matrix form O (nbar x n) -> operators, following the row layout of D.
OperatorSet unpack(const Matrix& O, std::size_t n, std::size_t degree, std::size_t p) {
  OperatorSet ops = OperatorSet::zeros(n, degree, p);
  Eigen::Index offset = 0;
  for (auto& a : ops.A) {
    a = O.middleRows(offset, a.cols()).transpose();
    offset += a.cols();
  }
  ops.B = O.middleRows(offset, static_cast<Eigen::Index>(p)).transpose();
  return ops;
}

Matrix pack(const OperatorSet& ops) {
  const std::size_t n = ops.state_dim();
  Matrix O(static_cast<Eigen::Index>(regression_width(n, ops.degree(), ops.control_dim())),
           static_cast<Eigen::Index>(n));
  Eigen::Index offset = 0;
  for (const auto& a : ops.A) {
    O.middleRows(offset, a.cols()) = a.transpose();
    offset += a.cols();
  }
  O.middleRows(offset, ops.B.cols()) = ops.B.transpose();
  return O;
}

}  // namespace

Matrix approx_derivatives(const Trajectory& traj, const std::optional<SparseMask>& mask) {
  const SparseMask m = mask ? *mask : SparseMask::make(traj.num_steps(), 1);
  const auto& idx = m.retained_indices;
  if (idx.size() < 2 || idx.back() > traj.num_steps()) {
    throw Error(ErrorKind::DegenerateData,
                "forward differences need at least two retained states inside the trajectory");
  }
  const double dt = traj.grid().dt;
  Matrix out(traj.states().rows(), static_cast<Eigen::Index>(idx.size() - 1));
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    const auto cur = static_cast<Eigen::Index>(idx[j]);
    const auto next = static_cast<Eigen::Index>(idx[j + 1]);
    const double gap = static_cast<double>(next - cur) * dt;
    out.col(static_cast<Eigen::Index>(j)) = (traj.states().col(next) - traj.states().col(cur)) / gap;
  }
  return out;
}

Vector regression_row(const Vector& q, const Vector& u, std::size_t degree) {
  const auto n = static_cast<std::size_t>(q.size());
  Vector row(static_cast<Eigen::Index>(regression_width(n, degree, static_cast<std::size_t>(u.size()))));
  Eigen::Index offset = 0;
  for (std::size_t l = 1; l <= degree; ++l) {
    const MonomialIndexing idx(n, l);
    idx.evaluate(q.data(), row.data() + offset);
    offset += static_cast<Eigen::Index>(idx.size());
  }
  row.tail(u.size()) = u;
  return row;
}

namespace {

RegressionSystem assemble(const TrajectoryDataset& data, std::size_t degree,
                          const std::vector<std::vector<std::size_t>>& rows_per_entry,
                          const std::vector<Matrix>& targets) {
  if (degree < 1) throw_argument("degree must be at least 1");
  const std::size_t n = data.state_dim();
  const std::size_t p = data.control_dim();
  std::size_t total = 0;
  for (const auto& r : rows_per_entry) total += r.size();
  RegressionSystem sys;
  sys.state_dim = n;
  sys.degree = degree;
  sys.control_dim = p;
  sys.data.resize(static_cast<Eigen::Index>(total),
                  static_cast<Eigen::Index>(regression_width(n, degree, p)));
  sys.target.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(n));
  std::vector<MonomialIndexing> indexing;
  for (std::size_t l = 1; l <= degree; ++l) indexing.emplace_back(n, l);
  Vector row(sys.data.cols());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& traj = data.entry(i).trajectory;
    for (std::size_t j = 0; j < rows_per_entry[i].size(); ++j, ++r) {
      const auto k = static_cast<Eigen::Index>(rows_per_entry[i][j]);
      const Vector q = traj.states().col(k);
      Eigen::Index offset = 0;
      for (const auto& idx : indexing) {
        idx.evaluate(q.data(), row.data() + offset);
        offset += static_cast<Eigen::Index>(idx.size());
      }
      if (p > 0) row.tail(static_cast<Eigen::Index>(p)) = traj.controls().col(k);
      sys.data.row(r) = row.transpose();
      sys.target.row(r) = targets[i].col(static_cast<Eigen::Index>(j)).transpose();
    }
  }
  return sys;
}

}  // namespace

RegressionSystem assemble_system(const TrajectoryDataset& data, std::size_t degree,
                                 std::optional<std::size_t> sparse_period) {
  const std::size_t period = sparse_period.value_or(1);
  std::vector<std::vector<std::size_t>> rows;
  std::vector<Matrix> targets;
  for (const auto& e : data.entries()) {
    const SparseMask mask = SparseMask::make(e.trajectory.num_steps(), period);
    targets.push_back(approx_derivatives(e.trajectory, mask));
    rows.emplace_back(mask.retained_indices.begin(), mask.retained_indices.end() - 1);
  }
  return assemble(data, degree, rows, targets);
}

RegressionSystem assemble_system_with_derivatives(const TrajectoryDataset& data,
                                                  const std::vector<Matrix>& derivatives,
                                                  std::size_t degree) {
  if (derivatives.size() != data.size()) {
    throw_argument("need one derivative matrix per dataset entry");
  }
  std::vector<std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& d = derivatives[i];
    if (d.rows() != static_cast<Eigen::Index>(data.state_dim()) ||
        d.cols() > data.entry(i).trajectory.states().cols()) {
      throw_argument("derivative matrix " + std::to_string(i) + " has the wrong shape");
    }
    std::vector<std::size_t> r(static_cast<std::size_t>(d.cols()));
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = k;
    rows.push_back(std::move(r));
  }
  return assemble(data, degree, rows, derivatives);
}

StaticSolution solve_min_norm(const RegressionSystem& system) {
  if (system.rows() == 0) throw Error(ErrorKind::DegenerateData, "regression system has no rows");
  StaticSolution sol;
  Eigen::BDCSVD<Matrix> svd(system.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = sigma.size() > 0 ? kPinvCutoff * sigma(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff && sigma(rank) > 0.0) ++rank;
  sol.rank = static_cast<std::size_t>(rank);
  sol.rank_zero = rank == 0;
  Matrix O = Matrix::Zero(system.data.cols(), system.target.cols());
  if (rank > 0) {
    const Matrix UtR = svd.matrixU().leftCols(rank).transpose() * system.target;
    const Matrix scaled = sigma.head(rank).cwiseInverse().asDiagonal() * UtR;
    O = svd.matrixV().leftCols(rank) * scaled;
  }
  sol.operators = unpack(O, system.state_dim, system.degree, system.control_dim);
  return sol;
}

double static_objective(const RegressionSystem& system, const OperatorSet& ops) {
  return (system.data * pack(ops) - system.target).squaredNorm();
}

PolyModel fit_static(const TrajectoryDataset& data, std::size_t degree, Scheme scheme,
                     std::size_t sparse_period) {
  const RegressionSystem sys = assemble_system(data, degree, sparse_period);
  return PolyModel(solve_min_norm(sys).operators, data.dt(), scheme);
}

}  // namespace rollinf
