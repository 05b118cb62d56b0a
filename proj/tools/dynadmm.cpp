// dynadmm: experiment harness for dynamic ADMM tracking.
//
//   dynadmm <sharing|lasso|bounds> --config PATH [--seed N] [--trials N]
//           [--steps N] [--rho R[,R...]] [--jobs N] [--plot] --out DIR
//
// Exit codes: 0 success, 2 config error, 3 oracle failure, 4 bound-margin violation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dynadmm/dynadmm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitViolation = 4;

struct Options {
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::optional<std::int64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::int64_t> steps;
  std::optional<std::string> rho;
  unsigned jobs = 0;
  bool plot = false;
};

std::string rho_tag(double rho) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", rho);
  return buf;
}

void emit(const std::filesystem::path& dir, const std::string& stem, const dynadmm::Table& t, bool plot) {
  dynadmm::write_text((dir / (stem + ".csv")).string(), dynadmm::to_csv(t));
  if (plot) dynadmm::write_text((dir / (stem + ".svg")).string(), dynadmm::to_svg(t, stem));
}

int run(const Options& opt) {
  using namespace dynadmm;
  const Experiment exp = parse_experiment(opt.experiment);
  RunConfig cfg = load_config_file(exp, opt.config_path);
  if (opt.seed) {
    if (*opt.seed < 0) throw ConfigError("--seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(*opt.seed);
  }
  if (opt.trials) cfg.trials = *opt.trials;
  if (opt.steps) cfg.steps = *opt.steps;
  if (opt.rho) {
    const auto list = detail::parse_list("--rho", *opt.rho);
    if (list.empty()) throw ConfigError("--rho needs at least one value");
    if (list.size() == 1) {
      cfg.rho = list.front();
      cfg.rho_sweep.clear();
    } else {
      cfg.rho_sweep = list;
    }
  }
  cfg.output_dir = opt.out_dir;
  cfg.validate();

  const unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);

  switch (exp) {
    case Experiment::Sharing: {
      const auto res = run_sharing(cfg, jobs);
      if (cfg.rho_sweep.empty()) {
        emit(dir, "sharing", res.table(0), opt.plot);
      } else {
        for (std::size_t r = 0; r < res.rhos.size(); ++r) {
          emit(dir, "sharing_rho_" + rho_tag(res.rhos[r]), res.table(r), opt.plot);
        }
      }
      std::cerr << "sharing: " << cfg.trials << " trials x " << cfg.steps << " steps, max oracle KKT residual "
                << res.max_oracle_residual << ", max subproblem violation " << res.max_subproblem_violation << "\n";
      return kExitOk;
    }
    case Experiment::Lasso: {
      const auto res = run_lasso(cfg, jobs);
      emit(dir, "lasso", res.averaged, opt.plot);
      if (!res.trajectory.rows.empty()) emit(dir, "lasso_trajectory", res.trajectory, false);
      std::cerr << "lasso: " << cfg.trials << " trials x " << cfg.steps << " steps, max oracle KKT residual "
                << res.max_oracle_residual << ", max subproblem violation " << res.max_subproblem_violation << "\n";
      return kExitOk;
    }
    case Experiment::Bounds: {
      const auto res = run_bounds(cfg, jobs);
      emit(dir, "bounds", res.averaged, false);
      write_text((dir / "bounds_summary.csv").string(), to_csv(res.summary));
      if (!res.violations.empty()) {
        for (const auto& v : res.violations) {
          std::cerr << "violation: trial " << v.trial << " step " << v.k << " " << v.check << " margin "
                    << format_real(v.margin) << "\n";
        }
        return kExitViolation;
      }
      std::cerr << "bounds: " << cfg.trials << " trials x " << cfg.steps << " steps, no margin violations\n";
      return kExitOk;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic ADMM tracking experiments"};
  Options opt;
  app.add_option("experiment", opt.experiment, "sharing | lasso | bounds")
      ->required()
      ->check(CLI::IsMember({"sharing", "lasso", "bounds"}));
  app.add_option("--config", opt.config_path, "key=value run configuration")->required();
  app.add_option("--out", opt.out_dir, "output directory")->required();
  app.add_option("--seed", opt.seed, "base seed; trial t uses seed + t");
  app.add_option("--trials", opt.trials, "number of trials");
  app.add_option("--steps", opt.steps, "time steps per trial");
  app.add_option("--rho", opt.rho, "penalty, or comma-separated sweep (sharing only)");
  app.add_option("--jobs", opt.jobs, "worker threads (default: hardware concurrency)");
  app.add_flag("--plot", opt.plot, "also write SVG line charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    return run(opt);
  } catch (const dynadmm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dynadmm::OracleFailure& e) {
    std::cerr << "oracle failure: " << e.what() << "\n";
    return kExitOracle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
