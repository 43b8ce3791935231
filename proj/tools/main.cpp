// rhomctdh command-line driver.
//
//   rhomctdh run   [--config F] [--tau T] [--t-final T] [--gamma-off] [--out DIR]
//   rhomctdh relax [same flags]       ground state only, propagated with the absorber
//   rhomctdh check [--seed-basis L]   invariant suite on small instances

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "check.hpp"
#include "rhomctdh/errors.hpp"
#include "rhomctdh/experiment.hpp"
#include "rhomctdh/log.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<double> tau;
  std::optional<double> t_final;
  bool gamma_off = false;
  std::string out;
  bool quiet = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app->add_option("--tau", f.tau, "time step");
  app->add_option("--t-final", f.t_final, "final time");
  app->add_flag("--gamma-off", f.gamma_off, "switch the absorber off");
  app->add_option("--out", f.out, "output directory");
  app->add_flag("-q,--quiet", f.quiet, "warnings and errors only");
}

rhomctdh::ExperimentConfig resolve(const CommonFlags& f) {
  rhomctdh::ExperimentConfig c;
  if (!f.config_path.empty()) c = rhomctdh::load_config(f.config_path);
  if (f.tau) c.tau = *f.tau;
  if (f.t_final) c.t_final = *f.t_final;
  if (f.gamma_off) c.gamma_off = true;
  if (!f.out.empty()) c.output_dir = f.out;
  c.validate();
  return c;
}

void summarize(const rhomctdh::RunResult& res) {
  if (res.records.empty()) return;
  const auto& last = res.records.back();
  std::printf("relaxed energy   %.10f\n", res.relaxed_energy);
  std::printf("initial energy   %.10f\n", res.initial_energy);
  std::printf("t = %g:", last.t);
  for (Eigen::Index n = 0; n < last.probabilities.size(); ++n)
    std::printf(" p%d = %.6e", static_cast<int>(n), last.probabilities[n]);
  std::printf("\ntrace - 1        %.3e\n", last.trace - 1.0);
  std::printf("sigma_min        %.6e\n", last.sigma_min);
  std::printf("energy           %.10f\n", last.energy);
  std::printf("relax %.1f s, propagate %.1f s\n", res.relax_seconds, res.propagate_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational density-operator propagation with absorbing boundaries"};
  app.require_subcommand(1);

  CommonFlags run_flags, relax_flags;
  auto* run = app.add_subcommand("run", "full scattering experiment");
  add_common(run, run_flags);
  auto* relax = app.add_subcommand("relax", "ground state only, propagated with the absorber");
  add_common(relax, relax_flags);

  int seed_basis = 6;
  auto* check = app.add_subcommand("check", "invariant suite on small instances");
  check->add_option("--seed-basis", seed_basis, "grid size and SPF count of the oracle comparison")
      ->check(CLI::Range(2, 10));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (run_flags.quiet) rhomctdh::set_log_level(rhomctdh::LogLevel::warning);
      summarize(rhomctdh::run_experiment(resolve(run_flags)));
    } else if (*relax) {
      if (relax_flags.quiet) rhomctdh::set_log_level(rhomctdh::LogLevel::warning);
      summarize(rhomctdh::run_ground_state(resolve(relax_flags)));
    } else if (*check) {
      return run_checks(seed_basis) ? 0 : 1;
    }
  } catch (const rhomctdh::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const rhomctdh::ConvergenceFailure& e) {
    std::cerr << "relaxation failed: " << e.what() << " (last energy " << e.last_energy() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
