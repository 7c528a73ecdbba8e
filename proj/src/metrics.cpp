#include "rollinf/metrics.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "rollinf/errors.hpp"

namespace rollinf {

namespace {

ErrorReport finish(ErrorReport report) {
  double sum = 0.0;
  for (double e : report.per_entry) sum += e;
  report.mean = sum / static_cast<double>(report.per_entry.size());
  return report;
}

bool same_structure(const PolyModel& a, const PolyModel& b) {
  return a.state_dim() == b.state_dim() && a.degree() == b.degree() &&
         a.control_dim() == b.control_dim() && a.dt() == b.dt() && a.scheme() == b.scheme();
}

OperatorSet weighted_sum(const std::vector<PolyModel>& models,
                         const std::vector<std::pair<std::size_t, double>>& weights) {
  const auto& first = models.front();
  OperatorSet out = OperatorSet::zeros(first.state_dim(), first.degree(), first.control_dim());
  for (const auto& [i, w] : weights) {
    if (w == 0.0) continue;
    const auto& ops = models[i].operators();
    for (std::size_t l = 0; l < out.A.size(); ++l) out.A[l] += w * ops.A[l];
    out.B += w * ops.B;
  }
  return out;
}

// Bracketing cell of x in sorted distinct nodes: (lower index, weight of upper).
std::pair<std::size_t, double> bracket(const std::vector<double>& nodes, double x) {
  constexpr double kSlack = 1e-12;
  const double span = nodes.back() - nodes.front();
  if (x < nodes.front() - kSlack * span || x > nodes.back() + kSlack * span) {
    throw Error(ErrorKind::Extrapolation, "query " + std::to_string(x) + " outside [" +
                                              std::to_string(nodes.front()) + ", " +
                                              std::to_string(nodes.back()) + "]");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (x == nodes[i]) return {i, 0.0};
  }
  std::size_t lo = 0;
  while (lo + 2 < nodes.size() && x > nodes[lo + 1]) ++lo;
  const double t = std::clamp((x - nodes[lo]) / (nodes[lo + 1] - nodes[lo]), 0.0, 1.0);
  return {lo, t};
}

}  // namespace

std::size_t ErrorReport::diverged_count() const {
  return static_cast<std::size_t>(std::count(diverged.begin(), diverged.end(), true));
}

double trajectory_relative_error(const Matrix& truth, const Matrix& prediction) {
  if (truth.rows() != prediction.rows() || truth.cols() != prediction.cols()) {
    throw_argument("prediction and truth have different shapes");
  }
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index k = 0; k < truth.cols(); ++k) {
    num += (truth.col(k) - prediction.col(k)).norm();
    den += truth.col(k).norm();
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

ErrorReport time_averaged_relative_error(const TrajectoryDataset& truth,
                                         const std::vector<PolyModel>& models,
                                         const ReducedBasis& basis) {
  if (models.size() != 1 && models.size() != truth.size()) {
    throw_argument("need one shared model or one model per truth entry");
  }
  if (truth.state_dim() != basis.full_dim()) {
    throw_argument("truth states do not match the basis full dimension");
  }
  ErrorReport report;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& model = models.size() == 1 ? models[0] : models[i];
    if (model.state_dim() != basis.reduced_dim()) {
      throw_argument("model dimension does not match the basis reduced dimension");
    }
    const auto& traj = truth.entry(i).trajectory;
    const Matrix& Q = traj.states();
    const std::size_t K = traj.num_steps();
    SimulationResult sim;
    try {
      sim = simulate(model, basis.project(Q.col(0)), traj.controls(), K);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Integrator) throw;
      sim.diverged = true;
    }
    Matrix prediction;
    if (sim.diverged) {
      prediction = Q.col(0).replicate(1, Q.cols());
    } else {
      prediction = basis.V() * sim.states;
    }
    report.per_entry.push_back(trajectory_relative_error(Q, prediction));
    report.diverged.push_back(sim.diverged);
  }
  return finish(std::move(report));
}

ErrorReport projection_error(const TrajectoryDataset& truth, const ReducedBasis& basis) {
  if (truth.state_dim() != basis.full_dim()) {
    throw_argument("truth states do not match the basis full dimension");
  }
  ErrorReport report;
  for (const auto& e : truth.entries()) {
    const Matrix& Q = e.trajectory.states();
    const Matrix projected = basis.V() * (basis.V().transpose() * Q);
    report.per_entry.push_back(trajectory_relative_error(Q, projected));
    report.diverged.push_back(false);
  }
  return finish(std::move(report));
}

PolyModel interpolate_operators(const std::vector<Vector>& params,
                                const std::vector<PolyModel>& models, const Vector& query) {
  if (params.empty() || params.size() != models.size()) {
    throw_argument("need one model per training parameter");
  }
  for (const auto& m : models) {
    if (!same_structure(m, models.front())) {
      throw_argument("models to interpolate differ in dimension, degree, dt or scheme");
    }
  }
  const auto d = static_cast<std::size_t>(query.size());
  for (const auto& p : params) {
    if (static_cast<std::size_t>(p.size()) != d) throw_argument("parameter dimension mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i] == query) return models[i];
  }
  if (params.size() == 1 || d == 0) {
    throw Error(ErrorKind::Extrapolation, "cannot interpolate from a single parameter");
  }

  // Tensor grid: distinct sorted coordinates per dimension, every vertex present.
  std::vector<std::vector<double>> nodes(d);
  for (std::size_t k = 0; k < d; ++k) {
    for (const auto& p : params) nodes[k].push_back(p(static_cast<Eigen::Index>(k)));
    std::sort(nodes[k].begin(), nodes[k].end());
    nodes[k].erase(std::unique(nodes[k].begin(), nodes[k].end()), nodes[k].end());
    if (nodes[k].size() < 2) {
      throw Error(ErrorKind::Extrapolation,
                  "training parameters are degenerate in dimension " + std::to_string(k));
    }
  }
  std::map<std::vector<std::size_t>, std::size_t> vertex_of;
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<std::size_t> key(d);
    for (std::size_t k = 0; k < d; ++k) {
      const auto it = std::lower_bound(nodes[k].begin(), nodes[k].end(),
                                       params[i](static_cast<Eigen::Index>(k)));
      key[k] = static_cast<std::size_t>(it - nodes[k].begin());
    }
    if (!vertex_of.emplace(key, i).second) throw_argument("duplicate training parameters");
  }
  std::size_t vertices = 1;
  for (const auto& nk : nodes) vertices *= nk.size();
  if (d >= 2 && vertices != params.size()) {
    throw_argument("training parameters do not form an axis-aligned grid");
  }

  std::vector<std::pair<std::size_t, double>> cell(d);
  for (std::size_t k = 0; k < d; ++k) cell[k] = bracket(nodes[k], query(static_cast<Eigen::Index>(k)));
  std::vector<std::pair<std::size_t, double>> weights;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    std::vector<std::size_t> key(d);
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const bool upper = (corner >> k) & 1U;
      key[k] = cell[k].first + (upper ? 1 : 0);
      w *= upper ? cell[k].second : 1.0 - cell[k].second;
    }
    if (w == 0.0) continue;
    const auto it = vertex_of.find(key);
    if (it == vertex_of.end()) throw_argument("interpolation cell is missing a grid vertex");
    weights.emplace_back(it->second, w);
  }
  const auto& first = models.front();
  return PolyModel(weighted_sum(models, weights), first.dt(), first.scheme());
}

std::vector<PolyModel> models_at(const std::vector<Vector>& params,
                                 const std::vector<PolyModel>& models,
                                 const std::vector<Vector>& queries) {
  std::vector<PolyModel> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    out.push_back(models.size() == 1 ? models.front() : interpolate_operators(params, models, q));
  }
  return out;
}

}  // namespace rollinf
