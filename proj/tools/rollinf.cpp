#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "rollinf/basis.hpp"
#include "rollinf/benchgen.hpp"
#include "rollinf/errors.hpp"
#include "rollinf/experiment.hpp"
#include "rollinf/io.hpp"
#include "rollinf/metrics.hpp"
#include "rollinf/rollout.hpp"
#include "rollinf/stability.hpp"
#include "rollinf/staticopinf.hpp"
#include "rollinf/training.hpp"

namespace fs = std::filesystem;
using namespace rollinf;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument:
      return kUsage;
    case ErrorKind::Format:
    case ErrorKind::Data:
    case ErrorKind::DegenerateData:
    case ErrorKind::Extrapolation:
      return kData;
    default:
      return kNumerical;
  }
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ROLLINF_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(n, 1);
}

// Runs body(i) for i < count on up to `workers` threads; rethrows the first failure.
template <class F>
void parallel_for(std::size_t count, std::size_t workers, F body) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Vector parse_mu(const std::string& text) {
  Vector v = io::parse_vector(text);
  if (v.size() != 2) throw_argument("shallow-water input '" + text + "' must be mu1,mu2");
  return v;
}

void write_model_set(const fs::path& dir, const std::vector<Vector>& params,
                     const std::vector<PolyModel>& models) {
  io::save_model_set(dir, {params, models});
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  std::string kind = "swe";
  std::vector<std::string> mu;
  std::size_t grid = 24;
  double dt = 5e-3;
  std::size_t steps = 200;
  std::size_t n = 5;
  std::size_t trajectories = 3;
  double margin = 0.1;
  double ic_scale = 0.5;
  std::string scheme = "imex";
  std::uint64_t seed = 0;
  std::string out;
  std::string model_out;
};

void add_generate(CLI::App& app, GenerateOpts& o) {
  auto* c = app.add_subcommand("generate", "Generate benchmark trajectories");
  c->add_option("--kind", o.kind, "swe or quadratic")->check(CLI::IsMember({"swe", "quadratic"}))->capture_default_str();
  c->add_option("--mu", o.mu, "shallow-water input mu1,mu2 (repeatable)");
  c->add_option("--grid", o.grid, "grid points per dimension")->capture_default_str();
  c->add_option("--dt", o.dt, "time step")->capture_default_str();
  c->add_option("--steps", o.steps, "number of time steps K")->capture_default_str();
  c->add_option("--n", o.n, "quadratic system dimension")->capture_default_str();
  c->add_option("--trajectories", o.trajectories, "quadratic: number of initial conditions")->capture_default_str();
  c->add_option("--margin", o.margin, "quadratic: spectral margin")->capture_default_str();
  c->add_option("--ic-scale", o.ic_scale, "quadratic: std of initial states")->capture_default_str();
  c->add_option("--scheme", o.scheme, "quadratic: forward-euler or imex")->capture_default_str();
  c->add_option("--seed", o.seed, "random seed")->capture_default_str();
  c->add_option("--out", o.out, "dataset manifest to write")->required();
  c->add_option("--model-out", o.model_out, "quadratic: also write the true model");
}

int run_generate(const GenerateOpts& o) {
  if (o.kind == "swe") {
    if (o.mu.empty()) throw_argument("generate --kind swe needs at least one --mu");
    std::vector<SweConfig> configs;
    for (const auto& m : o.mu) {
      const Vector mu = parse_mu(m);
      SweConfig c;
      c.grid_points_per_dim = o.grid;
      c.dt = o.dt;
      c.T = o.dt * static_cast<double>(o.steps);
      c.mu1 = mu(0);
      c.mu2 = mu(1);
      configs.push_back(c);
    }
    io::save_dataset(o.out, generate_swe_dataset(configs));
    return kOk;
  }
  const PolyModel truth = random_quadratic_system(o.n, o.seed, o.margin, o.dt, scheme_from_string(o.scheme));
  std::vector<DatasetEntry> entries;
  for (std::size_t i = 0; i < o.trajectories; ++i) {
    std::mt19937_64 rng(derive_seed(o.seed, i));
    std::normal_distribution<double> normal(0.0, o.ic_scale);
    Vector q0(static_cast<Eigen::Index>(o.n));
    for (auto& v : q0) v = normal(rng);
    const SimulationResult sim = simulate(truth, q0, Matrix(), o.steps);
    if (sim.diverged) throw DivergenceError("true system diverged from initial condition " + std::to_string(i), sim.divergence_step);
    Vector param(1);
    param << static_cast<double>(i);
    entries.push_back({param, Trajectory(sim.states, TimeGrid(0.0, o.dt, o.steps))});
  }
  io::save_dataset(o.out, TrajectoryDataset(std::move(entries)));
  if (!o.model_out.empty()) io::save_model(o.model_out, truth);
  return kOk;
}

// ---------------------------------------------------------------- basis / project

struct BasisOpts {
  std::string input;
  std::size_t n = 10;
  std::string out;
};

void add_basis(CLI::App& app, BasisOpts& o) {
  auto* c = app.add_subcommand("basis", "POD basis from the snapshots of a dataset");
  c->add_option("--input", o.input, "dataset manifest")->required();
  c->add_option("--n", o.n, "reduced dimension")->capture_default_str();
  c->add_option("--out", o.out, "output directory (V.rom, singular_values.csv)")->required();
}

int run_basis(const BasisOpts& o) {
  const TrajectoryDataset data = io::load_dataset(o.input);
  io::save_basis(o.out, pod_basis(snapshot_matrix(data), o.n));
  return kOk;
}

struct ProjectOpts {
  std::string input;
  std::string basis;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void add_project(CLI::App& app, ProjectOpts& o) {
  auto* c = app.add_subcommand("project", "Project a dataset onto a basis, optionally adding noise");
  c->add_option("--input", o.input, "full-state dataset manifest")->required();
  c->add_option("--basis", o.basis, "basis directory")->required();
  c->add_option("--noise", o.noise, "relative noise level rho (0.05 = 5%)")->capture_default_str();
  c->add_option("--seed", o.seed, "noise seed")->capture_default_str();
  c->add_option("--out", o.out, "reduced dataset manifest")->required();
}

int run_project(const ProjectOpts& o) {
  const ReducedBasis basis = io::load_basis(o.basis);
  TrajectoryDataset reduced = project(basis, io::load_dataset(o.input));
  if (o.noise > 0.0) reduced = add_noise(reduced, o.noise, o.seed);
  io::save_dataset(o.out, reduced);
  return kOk;
}

// ---------------------------------------------------------------- training

struct ModelOpts {
  std::size_t degree = 2;
  std::string scheme = "imex";
  std::size_t period = 1;
};

void add_model_options(CLI::App* c, ModelOpts& o) {
  c->add_option("--degree", o.degree, "polynomial degree L")->capture_default_str();
  c->add_option("--scheme", o.scheme, "forward-euler or imex")->capture_default_str();
  c->add_option("--period", o.period, "sparse sampling period xi")->capture_default_str();
}

struct StaticOpts {
  std::string input;
  std::string out;
  ModelOpts model;
};

void add_train_static(CLI::App& app, StaticOpts& o) {
  auto* c = app.add_subcommand("train-static", "Static operator inference, one model per entry");
  c->add_option("--input", o.input, "reduced dataset manifest")->required();
  c->add_option("--out", o.out, "output model directory")->required();
  add_model_options(c, o.model);
}

int run_train_static(const StaticOpts& o) {
  const TrajectoryDataset data = io::load_dataset(o.input);
  const Scheme scheme = scheme_from_string(o.model.scheme);
  std::vector<PolyModel> models;
  for (std::size_t i = 0; i < data.size(); ++i) {
    models.push_back(fit_static(data.subset({i}), o.model.degree, scheme, o.model.period));
  }
  write_model_set(o.out, data.params(), models);
  return kOk;
}

struct RolloutOpts {
  std::string input;
  std::string valid;
  std::string basis;
  std::string out;
  ModelOpts model;
  std::size_t roll_length = 50;
  std::vector<std::size_t> increments;
  std::size_t iters = TrainConfig{}.max_iters;
  std::vector<double> learning_rates = default_learning_rates();
  std::string init = "zeros";
  double grad_clip = 0.0;
  std::uint64_t seed = 0;
};

void add_train_rollout(CLI::App& app, RolloutOpts& o) {
  auto* c = app.add_subcommand("train-rollout", "Operator inference with roll-outs (Adam, per-entry)");
  c->add_option("--input", o.input, "reduced training dataset manifest")->required();
  c->add_option("--valid", o.valid, "full-state validation dataset manifest")->required();
  c->add_option("--basis", o.basis, "basis directory")->required();
  c->add_option("--out", o.out, "output directory")->required();
  add_model_options(c, o.model);
  c->add_option("--roll-length", o.roll_length, "roll-out length R")->capture_default_str();
  c->add_option("--increments", o.increments, "misfit increments (default 1..R)")->delimiter(',');
  c->add_option("--iters", o.iters, "Adam iterations per learning rate")->capture_default_str();
  c->add_option("--lr", o.learning_rates, "learning-rate grid")->delimiter(',')->capture_default_str();
  c->add_option("--init", o.init, "zeros or static")->capture_default_str();
  c->add_option("--grad-clip", o.grad_clip, "gradient norm clip (0 = off)")->capture_default_str();
  c->add_option("--seed", o.seed, "seed")->capture_default_str();
}

int run_train_rollout(const RolloutOpts& o) {
  const TrajectoryDataset train_data = io::load_dataset(o.input);
  const TrajectoryDataset valid = io::load_dataset(o.valid);
  const ReducedBasis basis = io::load_basis(o.basis);
  RollConfig roll{o.roll_length, o.increments, o.model.period};
  TrainConfig tc;
  tc.learning_rates = o.learning_rates;
  tc.max_iters = o.iters;
  tc.init = init_from_string(o.init);
  if (o.grad_clip > 0.0) tc.grad_clip = o.grad_clip;
  tc.seed = o.seed;
  const TrainReport report =
      train(train_data, valid, basis, roll, tc, scheme_from_string(o.model.scheme), o.model.degree);
  write_model_set(o.out, report.params, report.models);

  io::KeyValueFile kv;
  kv.set("format", "rollinf-train-report");
  kv.set("selected_learning_rate", io::format_double(report.selected_learning_rate));
  kv.set("validation_error", io::format_double(report.validation_error));
  kv.set("init_fallbacks", std::to_string(report.init_fallbacks));
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    const auto& cand = report.candidates[i];
    const std::string key = "candidate." + std::to_string(i) + ".";
    kv.set(key + "learning_rate", io::format_double(cand.learning_rate));
    kv.set(key + "diverged", cand.diverged ? "true" : "false");
    if (cand.diverged) kv.set(key + "divergence_iteration", std::to_string(cand.divergence_iteration));
    kv.set(key + "validation_error", io::format_double(cand.validation_error));
    kv.set(key + "loss_history", "loss_" + std::to_string(i) + ".csv");
    std::ostringstream csv;
    for (double v : cand.loss_history) csv << io::format_double(v) << '\n';
    io::write_text_atomic(fs::path(o.out) / ("loss_" + std::to_string(i) + ".csv"), csv.str());
  }
  kv.save(fs::path(o.out) / "report.manifest");
  std::cout << "selected learning rate " << report.selected_learning_rate << ", validation error "
            << report.validation_error << " (" << report.wall_seconds << " s)\n";
  return kOk;
}

// ---------------------------------------------------------------- simulate / evaluate

struct SimulateOpts {
  std::string model;
  std::string input;
  std::string basis;
  std::size_t entry = 0;
  std::size_t steps = 0;
  std::string out;
};

void add_simulate(CLI::App& app, SimulateOpts& o) {
  auto* c = app.add_subcommand("simulate", "Integrate a model from the initial state of a dataset entry");
  c->add_option("--model", o.model, "model manifest")->required();
  c->add_option("--input", o.input, "dataset supplying q0 and controls")->required();
  c->add_option("--basis", o.basis, "basis directory: project q0 and lift the result");
  c->add_option("--entry", o.entry, "dataset entry")->capture_default_str();
  c->add_option("--steps", o.steps, "steps (0 = the entry's K)")->capture_default_str();
  c->add_option("--out", o.out, "output matrix (.csv or ROM1)")->required();
}

int run_simulate(const SimulateOpts& o) {
  const PolyModel model = io::load_model(o.model);
  const TrajectoryDataset data = io::load_dataset(o.input);
  if (o.entry >= data.size()) throw_argument("entry " + std::to_string(o.entry) + " out of range");
  const Trajectory& traj = data.entry(o.entry).trajectory;
  std::optional<ReducedBasis> basis;
  if (!o.basis.empty()) basis = io::load_basis(o.basis);
  Vector q0 = traj.states().col(0);
  if (basis && static_cast<std::size_t>(q0.size()) == basis->full_dim()) q0 = basis->project(q0);
  const std::size_t steps = o.steps > 0 ? o.steps : traj.grid().num_steps;
  Matrix controls = traj.controls();
  if (controls.cols() > 0 && static_cast<std::size_t>(controls.cols()) < steps) {
    throw_argument("the entry has controls for only " + std::to_string(controls.cols()) + " steps");
  }
  if (controls.cols() > 0) controls = controls.leftCols(static_cast<Eigen::Index>(steps)).eval();
  const SimulationResult sim = simulate(model, q0, controls, steps);
  const Matrix out = basis ? Matrix(basis->V() * sim.states) : sim.states;
  if (fs::path(o.out).extension() == ".csv") {
    io::save_csv(o.out, out);
  } else {
    io::save_matrix(o.out, out);
  }
  if (sim.diverged) {
    std::cerr << "rollinf: simulation diverged at step " << sim.divergence_step
              << "; partial trajectory written\n";
    return kNumerical;
  }
  return kOk;
}

struct EvaluateOpts {
  std::string test;
  std::string basis;
  std::vector<std::string> models;
  std::string out;
};

void add_evaluate(CLI::App& app, EvaluateOpts& o) {
  auto* c = app.add_subcommand("evaluate", "Time-averaged relative test errors next to the projection error");
  c->add_option("--test", o.test, "full-state test dataset manifest")->required();
  c->add_option("--basis", o.basis, "basis directory")->required();
  c->add_option("--models", o.models, "model directories (interpolated at the test inputs)");
  c->add_option("--out", o.out, "error CSV")->required();
}

int run_evaluate(const EvaluateOpts& o) {
  const TrajectoryDataset test = io::load_dataset(o.test);
  const ReducedBasis basis = io::load_basis(o.basis);
  std::vector<ErrorReport> reports;
  std::ostringstream csv;
  csv << "entry";
  for (const auto& dir : o.models) {
    const io::ModelSet set = io::load_model_set(dir);
    const auto models = set.models.size() == 1 ? set.models : models_at(set.params, set.models, test.params());
    reports.push_back(time_averaged_relative_error(test, models, basis));
    const std::string name = fs::path(dir).filename().empty() ? fs::path(dir).parent_path().filename().string()
                                                               : fs::path(dir).filename().string();
    csv << ',' << name;
    if (reports.back().diverged_count() > 0) {
      std::cerr << "rollinf: " << name << ": " << reports.back().diverged_count()
                << " test prediction(s) diverged and were replaced by the initial condition\n";
    }
  }
  const ErrorReport proj = projection_error(test, basis);
  csv << ",projection\n";
  for (std::size_t i = 0; i < test.size(); ++i) {
    csv << i;
    for (const auto& r : reports) csv << ',' << io::format_double(r.per_entry[i]);
    csv << ',' << io::format_double(proj.per_entry[i]) << '\n';
  }
  csv << "mean";
  for (const auto& r : reports) csv << ',' << io::format_double(r.mean);
  csv << ',' << io::format_double(proj.mean) << '\n';
  io::write_text_atomic(o.out, csv.str());
  return kOk;
}

// ---------------------------------------------------------------- stability

struct StabilityOpts {
  std::string model;
  std::size_t realizations = 1000;
  std::uint64_t seed = 0;
  std::string out;
};

void add_stability(CLI::App& app, StabilityOpts& o) {
  auto* c = app.add_subcommand("stability", "Averaged stability-radius bound of a quadratic model");
  c->add_option("--model", o.model, "model manifest")->required();
  c->add_option("--realizations", o.realizations, "random certificates L")->capture_default_str();
  c->add_option("--seed", o.seed, "seed")->capture_default_str();
  c->add_option("--out", o.out, "report manifest (gammas go next to it)");
}

int run_stability(const StabilityOpts& o) {
  const StabilityReport r = averaged_bound(io::load_model(o.model), o.realizations, o.seed);
  std::cout << "mean gamma " << io::format_double(r.mean_gamma) << " over " << r.num_realizations
            << " realizations (" << r.infinite_count << " infinite)\n";
  if (!o.out.empty()) {
    const fs::path out(o.out);
    const fs::path gammas = out.parent_path() / (out.stem().string() + "_gammas.csv");
    std::ostringstream csv;
    for (std::size_t i = 0; i < r.gammas.size(); ++i) {
      csv << io::format_double(r.gammas[i]) << ',' << io::format_double(r.lyapunov_residuals[i]) << '\n';
    }
    io::write_text_atomic(gammas, csv.str());
    io::KeyValueFile kv;
    kv.set("format", "rollinf-stability-report");
    kv.set("mean_gamma", io::format_double(r.mean_gamma));
    kv.set("num_realizations", std::to_string(r.num_realizations));
    kv.set("infinite_count", std::to_string(r.infinite_count));
    kv.set("seed", std::to_string(r.seed));
    kv.set("gammas", gammas.filename().string());
    kv.save(out);
  }
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepOpts {
  std::string axis;
  std::vector<double> values;
  std::size_t seeds = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  std::string out;
  SweBenchmarkConfig bench;
  std::size_t trajectories = 4;
  std::string init = "static";
};

void add_sweep(CLI::App& app, SweepOpts& o) {
  auto* c = app.add_subcommand("sweep", "Shallow-water benchmark over one axis; CSV x,rollout,static,projection");
  c->add_option("--axis", o.axis, "roll-length, noise, sampling-period or trajectory-count")
      ->required()
      ->check(CLI::IsMember({"roll-length", "noise", "sampling-period", "trajectory-count"}));
  c->add_option("--values", o.values, "axis values (noise as a fraction)")->delimiter(',')->required();
  c->add_option("--seeds", o.seeds, "seeds averaged per point")->capture_default_str();
  c->add_option("--seed", o.seed, "first seed")->capture_default_str();
  c->add_option("--jobs", o.jobs, "parallel points (0 = hardware threads)")->capture_default_str();
  c->add_option("--out", o.out, "output CSV")->required();
  auto& b = o.bench;
  c->add_option("--grid", b.grid_points_per_dim, "grid points per dimension")->capture_default_str();
  c->add_option("--dt", b.dt, "time step")->capture_default_str();
  c->add_option("--steps", b.num_steps, "time steps K")->capture_default_str();
  c->add_option("--n", b.reduced_dim, "reduced dimension")->capture_default_str();
  c->add_option("--noise", b.noise, "noise level when not swept")->capture_default_str();
  c->add_option("--roll-length", b.roll.roll_length, "roll length when not swept")->capture_default_str();
  c->add_option("--period", b.roll.sparse_period, "sampling period when not swept")->capture_default_str();
  c->add_option("--trajectories", o.trajectories, "training trajectories when not swept (perfect square)")
      ->capture_default_str();
  c->add_option("--iters", b.train.max_iters, "Adam iterations")->capture_default_str();
  c->add_option("--lr", b.train.learning_rates, "learning-rate grid")->delimiter(',')->capture_default_str();
  c->add_option("--init", o.init, "zeros or static")->capture_default_str();
}

std::size_t grid_side(double count) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(count)));
  if (side < 2 || static_cast<double>(side * side) != count) {
    throw_argument("trajectory count must be a perfect square >= 4, got " + io::format_double(count));
  }
  return side;
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) throw_argument(std::string(what) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

int run_sweep(const SweepOpts& o) {
  SweBenchmarkConfig base = o.bench;
  base.train.init = init_from_string(o.init);
  base.train_points_per_dim = grid_side(static_cast<double>(o.trajectories));
  std::vector<SweBenchmarkConfig> configs;
  for (double x : o.values) {
    SweBenchmarkConfig c = base;
    if (o.axis == "roll-length") c.roll.roll_length = as_count(x, "roll length");
    if (o.axis == "noise") c.noise = x;
    if (o.axis == "sampling-period") c.roll.sparse_period = as_count(x, "sampling period");
    if (o.axis == "trajectory-count") c.train_points_per_dim = grid_side(x);
    c.roll.validate();
    configs.push_back(c);
  }
  if (o.seeds < 1) throw_argument("need at least one seed");
  const SweBasisData basis = build_swe_basis(base);

  const fs::path out(o.out);
  const fs::path point_dir = out.parent_path() / (out.filename().string() + ".points");
  fs::create_directories(point_dir);
  std::vector<std::array<double, 3>> rows(configs.size());
  parallel_for(configs.size(), worker_count(o.jobs), [&](std::size_t i) {
    std::array<double, 3> sum{0.0, 0.0, 0.0};
    for (std::size_t s = 0; s < o.seeds; ++s) {
      const BenchmarkResult r = run_swe_benchmark(configs[i], basis.basis, o.seed + s);
      sum[0] += r.rollout_test.mean;
      sum[1] += r.static_test.mean;
      sum[2] += r.projection_test.mean;
    }
    for (auto& v : sum) v /= static_cast<double>(o.seeds);
    rows[i] = sum;
    std::ostringstream line;
    line << io::format_double(o.values[i]) << ',' << io::format_double(sum[0]) << ','
         << io::format_double(sum[1]) << ',' << io::format_double(sum[2]) << '\n';
    io::write_text_atomic(point_dir / ("point_" + std::to_string(i) + ".csv"), line.str());
  });
  std::ostringstream csv;
  csv << "x,rollout,static,projection\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv << io::format_double(o.values[i]) << ',' << io::format_double(rows[i][0]) << ','
        << io::format_double(rows[i][1]) << ',' << io::format_double(rows[i][2]) << '\n';
  }
  io::write_text_atomic(out, csv.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator inference with roll-outs"};
  app.set_config("--config", "", "key=value config file; [section] names a subcommand");
  app.require_subcommand(1);

  GenerateOpts gen;
  BasisOpts bas;
  ProjectOpts proj;
  StaticOpts stat;
  RolloutOpts roll;
  SimulateOpts sim;
  EvaluateOpts eval;
  StabilityOpts stab;
  SweepOpts sweep;
  add_generate(app, gen);
  add_basis(app, bas);
  add_project(app, proj);
  add_train_static(app, stat);
  add_train_rollout(app, roll);
  add_simulate(app, sim);
  add_evaluate(app, eval);
  add_stability(app, stab);
  add_sweep(app, sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "generate") return run_generate(gen);
    if (cmd == "basis") return run_basis(bas);
    if (cmd == "project") return run_project(proj);
    if (cmd == "train-static") return run_train_static(stat);
    if (cmd == "train-rollout") return run_train_rollout(roll);
    if (cmd == "simulate") return run_simulate(sim);
    if (cmd == "evaluate") return run_evaluate(eval);
    if (cmd == "stability") return run_stability(stab);
    if (cmd == "sweep") return run_sweep(sweep);
  } catch (const Error& e) {
    std::cerr << "rollinf: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "rollinf: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "rollinf: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
