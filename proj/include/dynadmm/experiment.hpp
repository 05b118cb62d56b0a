#ifndef DYNADMM_EXPERIMENT_HPP_
#define DYNADMM_EXPERIMENT_HPP_

// Seeded multi-trial experiments: dynamic sharing, dynamic LASSO, and the
// bound audit on the fully quadratic family. Trial t uses seed `seed + t`.
// Trials may run concurrently; results are reduced in trial order so output
// does not depend on the job count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dynadmm/config.hpp"
#include "dynadmm/error.hpp"
#include "dynadmm/lasso.hpp"
#include "dynadmm/metrics.hpp"
#include "dynadmm/oracle.hpp"
#include "dynadmm/sharing.hpp"
#include "dynadmm/solver.hpp"
#include "dynadmm/synth.hpp"
#include "dynadmm/table.hpp"

namespace dynadmm {

/// The per-slice oracle failed for a trial.
class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(std::int64_t trial, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}
  std::int64_t trial() const noexcept { return trial_; }

 private:
  std::int64_t trial_;
};

/// Runs fn(t) for t in [0, trials) on up to `jobs` threads. The first
/// exception (lowest trial index) is rethrown after all workers finish.
template <typename Fn>
void for_each_trial(std::int64_t trials, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::int64_t>(trials, 1))));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t t = next++; t < trials; t = next++) {
      try {
        fn(t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Optima for a stream, each solve warm-started from the previous optimum.
inline std::vector<OptimalTriple> solve_stream(const std::vector<ProblemInstance>& stream, const OracleConfig& cfg) {
  std::vector<OptimalTriple> out;
  out.reserve(stream.size());
  std::optional<AdmmState> warm;
  for (const auto& inst : stream) {
    out.push_back(solve_oracle(inst, cfg, warm));
    warm = AdmmState{out.back().x_star, out.back().z_star, out.back().lambda_star, 0};
  }
  return out;
}

/// Worst subproblem optimality violation over a run that started from zeros.
inline double max_subproblem_violation(const std::vector<ProblemInstance>& stream,
                                       const std::vector<AdmmState>& states, double rho) {
  double worst = 0.0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const AdmmState prev = i == 0 ? AdmmState::zeros(stream[i].N(), stream[i].M()) : states[i - 1];
    worst = std::max(worst, x_subproblem_gradient(prev, stream[i], rho, states[i].x).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, z_subproblem_violation(prev, stream[i], rho, states[i].x, states[i].z));
  }
  return worst;
}

inline std::vector<double> column_mean(const std::vector<std::vector<double>>& per_trial) {
  std::vector<double> mean(per_trial.empty() ? 0 : per_trial.front().size(), 0.0);
  for (const auto& row : per_trial)
    for (std::size_t i = 0; i < row.size(); ++i) mean[i] += row[i];
  for (auto& v : mean) v /= static_cast<double>(per_trial.size());
  return mean;
}

struct SharingRunResult {
  std::vector<double> rhos;
  /// Trial-averaged ||x_k - x_k*|| per rho, index k-1.
  std::vector<std::vector<double>> err_x;
  double max_subproblem_violation = 0.0;
  double max_oracle_residual = 0.0;

  Table table(std::size_t rho_index) const {
    Table t{{"k", "err_x"}, {}};
    const auto& e = err_x[rho_index];
    for (std::size_t i = 0; i < e.size(); ++i) t.rows.push_back({static_cast<double>(i + 1), e[i]});
    return t;
  }
};

inline OracleConfig default_oracle() { return OracleConfig{}; }

inline SharingRunResult run_sharing(const RunConfig& cfg, unsigned jobs = 1,
                                    const OracleConfig& oracle = default_oracle()) {
  cfg.validate();
  if (cfg.experiment != Experiment::Sharing) throw ConfigError("run_sharing: experiment must be sharing");
  const auto rhos = cfg.rhos();
  const auto T = static_cast<std::size_t>(cfg.trials);
  // per_trial[rho][trial][step]
  std::vector<std::vector<std::vector<double>>> per_trial(rhos.size(), std::vector<std::vector<double>>(T));
  std::vector<double> violation(T, 0.0), residual(T, 0.0);

  for_each_trial(cfg.trials, jobs, [&](std::int64_t trial) {
    RngStream rng(cfg.seed + static_cast<std::uint64_t>(trial));
    const auto problems = sharing_stream({cfg.n, cfg.p, cfg.eta, cfg.epsilon}, cfg.gamma, cfg.steps, rng);
    std::vector<ProblemInstance> stream;
    stream.reserve(problems.size());
    for (std::size_t i = 0; i < problems.size(); ++i) stream.push_back(assemble(problems[i], std::int64_t(i) + 1));
    std::vector<OptimalTriple> optima;
    try {
      optima = solve_stream(stream, oracle);
    } catch (const ConvergenceError& e) {
      throw OracleFailure(trial, e.what());
    }
    const auto t = static_cast<std::size_t>(trial);
    for (const auto& o : optima) residual[t] = std::max(residual[t], o.kkt_residual);
    for (std::size_t r = 0; r < rhos.size(); ++r) {
      const auto states = run_dynamic(stream, {rhos[r], SolverMode::Dynamic});
      violation[t] = std::max(violation[t], max_subproblem_violation(stream, states, rhos[r]));
      auto& e = per_trial[r][t];
      e.reserve(states.size());
      for (std::size_t i = 0; i < states.size(); ++i) e.push_back((states[i].x - optima[i].x_star).norm());
    }
  });

  SharingRunResult out;
  out.rhos = rhos;
  for (const auto& r : per_trial) out.err_x.push_back(column_mean(r));
  out.max_subproblem_violation = *std::max_element(violation.begin(), violation.end());
  out.max_oracle_residual = *std::max_element(residual.begin(), residual.end());
  return out;
}

struct LassoRunResult {
  /// Columns: k, err_x, err_x_truth, err_oracle_truth, sparsity_admm, sparsity_oracle.
  Table averaged;
  /// Trial 0, every 10th step from k = 10: the first two support coordinates.
  Table trajectory;
  double max_subproblem_violation = 0.0;
  double max_oracle_residual = 0.0;
};

inline LassoRunResult run_lasso(const RunConfig& cfg, unsigned jobs = 1,
                                const OracleConfig& oracle = default_oracle()) {
  cfg.validate();
  if (cfg.experiment != Experiment::Lasso) throw ConfigError("run_lasso: experiment must be lasso");
  if (!cfg.rho_sweep.empty()) throw ConfigError("rho_sweep is only supported for the sharing experiment");
  const auto T = static_cast<std::size_t>(cfg.trials);
  constexpr std::size_t kCols = 5;
  // per_trial[col][trial][step]
  std::vector<std::vector<std::vector<double>>> per_trial(kCols, std::vector<std::vector<double>>(T));
  std::vector<double> violation(T, 0.0), residual(T, 0.0);
  Table trajectory{{"k", "admm_1", "admm_2", "oracle_1", "oracle_2", "truth_1", "truth_2"}, {}};

  for_each_trial(cfg.trials, jobs, [&](std::int64_t trial) {
    RngStream rng(cfg.seed + static_cast<std::uint64_t>(trial));
    const auto slices = lasso_stream({cfg.m, cfg.p, cfg.q, cfg.eta, cfg.sigma}, cfg.gamma, cfg.steps, rng);
    std::vector<ProblemInstance> stream;
    stream.reserve(slices.size());
    for (std::size_t i = 0; i < slices.size(); ++i) stream.push_back(assemble(slices[i].problem, std::int64_t(i) + 1));
    std::vector<OptimalTriple> optima;
    try {
      optima = solve_stream(stream, oracle);
    } catch (const ConvergenceError& e) {
      throw OracleFailure(trial, e.what());
    }
    const auto states = run_dynamic(stream, {cfg.rho, SolverMode::Dynamic});
    const auto t = static_cast<std::size_t>(trial);
    violation[t] = max_subproblem_violation(stream, states, cfg.rho);
    for (const auto& o : optima) residual[t] = std::max(residual[t], o.kkt_residual);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const Vector& x = states[i].x;
      const Vector& xs = optima[i].x_star;
      const GroundTruth& truth = slices[i].truth;
      per_trial[0][t].push_back((x - xs).norm());
      per_trial[1][t].push_back((x - truth.values).norm());
      per_trial[2][t].push_back((xs - truth.values).norm());
      per_trial[3][t].push_back(sparsity_deviation(x, truth.support));
      per_trial[4][t].push_back(sparsity_deviation(xs, truth.support));
    }
    if (trial == 0 && cfg.q >= 2) {
      for (std::size_t k = 10; k <= states.size(); k += 10) {
        const auto& truth = slices[k - 1].truth;
        const auto j1 = truth.support[0], j2 = truth.support[1];
        trajectory.rows.push_back({static_cast<double>(k), states[k - 1].x(j1), states[k - 1].x(j2),
                                   optima[k - 1].x_star(j1), optima[k - 1].x_star(j2), truth.values(j1),
                                   truth.values(j2)});
      }
    }
  });

  LassoRunResult out;
  out.averaged.header = {"k", "err_x", "err_x_truth", "err_oracle_truth", "sparsity_admm", "sparsity_oracle"};
  std::vector<std::vector<double>> means;
  for (const auto& c : per_trial) means.push_back(column_mean(c));
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.steps); ++i) {
    std::vector<double> row{static_cast<double>(i + 1)};
    for (const auto& c : means) row.push_back(c[i]);
    out.averaged.rows.push_back(std::move(row));
  }
  out.trajectory = std::move(trajectory);
  out.max_subproblem_violation = *std::max_element(violation.begin(), violation.end());
  out.max_oracle_residual = *std::max_element(residual.begin(), residual.end());
  return out;
}

/// One trial of the bound audit.
struct BoundsTrial {
  std::uint64_t seed = 0;
  ConvexityConstants constants;
  DeltaParams delta;
  double d = 0.0;  // max_k d_k
  ErrorNorms limsup;  // trailing-window maxima
  SteadyStateBounds bounds;
  double min_prop1 = std::numeric_limits<double>::infinity();
  double min_thm1 = std::numeric_limits<double>::infinity();
  Thm2Margins min_thm2{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
  double max_subproblem_violation = 0.0;
  std::vector<TrajectoryRecord> records;
};

struct BoundViolation {
  std::int64_t trial = 0;
  std::int64_t k = 0;
  std::string check;
  double margin = 0.0;
};

struct BoundsRunResult {
  /// Columns: k, err_x, err_u_c, drift, prop1_margin, thm1_margin, thm2_x_margin (trial means).
  Table averaged;
  Table summary;
  std::vector<BoundsTrial> trials;
  std::vector<BoundViolation> violations;
};

inline BoundsTrial run_bounds_trial(const RunConfig& cfg, std::uint64_t seed, bool keep_records) {
  RngStream rng(seed);
  const QuadFamilyConfig qcfg{cfg.p, cfg.p, cfg.eta, cfg.epsilon, cfg.steps, false};
  const auto stream = quad_family_stream(qcfg, rng);
  BoundsTrial tr;
  tr.seed = seed;
  tr.constants = constants_from_stream(stream);
  tr.delta = compute_delta_max(tr.constants, cfg.rho);
  std::vector<OptimalTriple> optima;
  optima.reserve(stream.size());
  for (const auto& inst : stream) optima.push_back(solve_exact_kkt(inst));
  const auto states = run_dynamic(stream, {cfg.rho, SolverMode::Dynamic});
  tr.max_subproblem_violation = max_subproblem_violation(stream, states, cfg.rho);
  auto records = audit_trajectory(stream, states, optima, tr.constants, cfg.rho, tr.delta.delta_max);
  const auto w0 = trailing_window_start(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    tr.d = std::max(tr.d, r.drift);
    tr.min_prop1 = std::min(tr.min_prop1, r.prop1_margin);
    if (r.k >= 2) {
      tr.min_thm1 = std::min(tr.min_thm1, r.thm1_margin);
      tr.min_thm2.x = std::min(tr.min_thm2.x, r.thm2.x);
    }
    tr.min_thm2.z = std::min(tr.min_thm2.z, r.thm2.z);
    tr.min_thm2.lambda = std::min(tr.min_thm2.lambda, r.thm2.lambda);
    if (i >= w0) {
      tr.limsup.u_c = std::max(tr.limsup.u_c, r.err.u_c);
      tr.limsup.x = std::max(tr.limsup.x, r.err.x);
      tr.limsup.z = std::max(tr.limsup.z, r.err.z);
      tr.limsup.lambda = std::max(tr.limsup.lambda, r.err.lambda);
    }
  }
  tr.bounds = steady_state_bounds(tr.d, tr.delta.delta_max, tr.constants, cfg.rho);
  tr.records = std::move(records);
  if (!keep_records) {
    // keep only the scalar columns needed for averaging
    for (auto& r : tr.records) {
      r.state = {};
      r.optimum = {};
    }
  }
  return tr;
}

/// Every margin below kMarginTolerance in one trial, including the
/// steady-state comparison (reported at the step attaining the window maximum).
inline std::vector<BoundViolation> violations_of(const BoundsTrial& tr, std::int64_t trial) {
  std::vector<BoundViolation> out;
  auto check = [&](std::int64_t k, const char* name, double margin) {
    if (!(margin >= kMarginTolerance)) out.push_back({trial, k, name, margin});
  };
  for (const auto& r : tr.records) {
    check(r.k, "prop1", r.prop1_margin);
    if (r.k >= 2) {
      check(r.k, "thm1", r.thm1_margin);
      check(r.k, "thm2_x", r.thm2.x);
    }
    check(r.k, "thm2_z", r.thm2.z);
    check(r.k, "thm2_lambda", r.thm2.lambda);
  }
  const auto w0 = trailing_window_start(tr.records.size());
  auto argmax_k = [&](auto get) {
    std::int64_t k = 0;
    double best = -1.0;
    for (std::size_t i = w0; i < tr.records.size(); ++i)
      if (get(tr.records[i].err) > best) best = get(tr.records[i].err), k = tr.records[i].k;
    return k;
  };
  check(argmax_k([](const ErrorNorms& e) { return e.u_c; }), "steady_u_c", tr.bounds.u_c - tr.limsup.u_c);
  check(argmax_k([](const ErrorNorms& e) { return e.x; }), "steady_x", tr.bounds.x - tr.limsup.x);
  check(argmax_k([](const ErrorNorms& e) { return e.z; }), "steady_z", tr.bounds.z - tr.limsup.z);
  check(argmax_k([](const ErrorNorms& e) { return e.lambda; }), "steady_lambda", tr.bounds.lambda - tr.limsup.lambda);
  return out;
}

inline BoundsRunResult run_bounds(const RunConfig& cfg, unsigned jobs = 1) {
  cfg.validate();
  if (cfg.experiment != Experiment::Bounds) throw ConfigError("run_bounds: experiment must be bounds");
  if (!cfg.rho_sweep.empty()) throw ConfigError("rho_sweep is only supported for the sharing experiment");
  BoundsRunResult out;
  out.trials.resize(static_cast<std::size_t>(cfg.trials));
  for_each_trial(cfg.trials, jobs, [&](std::int64_t trial) {
    out.trials[static_cast<std::size_t>(trial)] =
        run_bounds_trial(cfg, cfg.seed + static_cast<std::uint64_t>(trial), false);
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.averaged.header = {"k", "err_x", "err_u_c", "drift", "prop1_margin", "thm1_margin", "thm2_x_margin"};
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.steps); ++i) {
    std::vector<double> row(7, 0.0);
    row[0] = static_cast<double>(i + 1);
    for (const auto& tr : out.trials) {
      const auto& r = tr.records[i];
      row[1] += r.err.x;
      row[2] += r.err.u_c;
      row[3] += r.drift;
      row[4] += r.prop1_margin;
      row[5] += r.k >= 2 ? r.thm1_margin : 0.0;
      row[6] += r.k >= 2 ? r.thm2.x : 0.0;
    }
    for (std::size_t c = 1; c < row.size(); ++c) row[c] /= static_cast<double>(out.trials.size());
    if (i == 0) row[5] = row[6] = nan;
    out.averaged.rows.push_back(std::move(row));
  }

  out.summary.header = {"trial", "seed", "m", "m_f", "L", "alpha", "norm_A", "norm_B", "delta_max", "t_star", "d",
                        "limsup_u_c", "bound_u_c", "limsup_x", "bound_x", "limsup_z", "bound_z", "limsup_lambda",
                        "bound_lambda", "min_prop1", "min_thm1", "min_thm2_x", "min_thm2_z", "min_thm2_lambda",
                        "violations"};
  for (std::size_t t = 0; t < out.trials.size(); ++t) {
    const auto& tr = out.trials[t];
    const auto v = violations_of(tr, static_cast<std::int64_t>(t));
    out.violations.insert(out.violations.end(), v.begin(), v.end());
    const auto& c = tr.constants;
    out.summary.rows.push_back({static_cast<double>(t), static_cast<double>(tr.seed), c.m, c.m_f, c.L, c.alpha,
                                c.norm_A, c.norm_B, tr.delta.delta_max, tr.delta.t_star, tr.d, tr.limsup.u_c,
                                tr.bounds.u_c, tr.limsup.x, tr.bounds.x, tr.limsup.z, tr.bounds.z,
                                tr.limsup.lambda, tr.bounds.lambda, tr.min_prop1,
                                cfg.steps >= 2 ? tr.min_thm1 : nan, cfg.steps >= 2 ? tr.min_thm2.x : nan,
                                tr.min_thm2.z, tr.min_thm2.lambda, static_cast<double>(v.size())});
  }
  return out;
}

}  // namespace dynadmm

#endif  // DYNADMM_EXPERIMENT_HPP_
