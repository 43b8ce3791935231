#pragma once

// Scattering experiment: a Gaussian packet fired at a correlated two-fermion
// ground state in a Gaussian trap, with absorbers at both ends of the box.
// The initial density operator is c^dag(g)|Psi_2><Psi_2|c(g), with g projected
// onto the complement of the ground-state SPFs.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rhomctdh/propagate.hpp"

namespace rhomctdh {

struct ExperimentConfig {
  double R = 20.0;
  int n_points = 128;
  double R_prime = 16.0;
  double trap_depth = 8.0;
  double trap_width = 1.25;
  double coulomb_strength = 2.0;
  double coulomb_smoothing = 0.1;
  double packet_center = -2.0;
  double packet_width = 0.75;
  double packet_momentum = 3.0;
  int L_ground = 4;
  int L_total = 5;
  int N = 3;
  double t_final = 30.0;
  double tau = 3.125e-4;
  double eps_reg = default_eps_reg;
  double record_interval = 0.1;
  double relax_ds = 0.01;
  double relax_tolerance = 1e-10;
  double relax_residual = 1e-8;
  double relax_eps_reg = 1e-6;
  int relax_max_steps = 200000;
  bool gamma_off = false;
  std::string output_dir = "out";

  /// Throws InvalidArgument on inconsistent values.
  void validate() const;
  /// Records every this many steps, from record_interval / tau.
  int record_every() const;
};

/// Flat `key = value` text; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
/// One `key = value` line per field, in declaration order.
std::string format_config(const ExperimentConfig& config);

Model build_model(const ExperimentConfig& config);

struct GroundState {
  McSystem system;  // L_ground modes, N - 1 particles, no absorber
  RelaxResult relaxed;
  int bound_states = 0;
};

/// Relaxes the (N - 1)-body ground state from the determinant of the lowest
/// one-body orbitals.
GroundState relax_ground_state(const ExperimentConfig& config);

struct InitialState {
  McSystem system;  // L_total modes, N particles
  McState state;
  GroundState ground;
};

InitialState prepare_initial_state(const ExperimentConfig& config);

/// The (N - 1)-body ground state as a density state in its own basis.
McState ground_density_state(const GroundState& ground);

struct RunResult {
  std::vector<TrajectoryRecord> records;
  double initial_energy = 0.0;
  double relaxed_energy = 0.0;
  double relax_seconds = 0.0;
  double propagate_seconds = 0.0;
};

/// Full run: relax, build rho(0), propagate and write probabilities.csv,
/// density.csv, spectrum.csv and meta.json into config.output_dir.
RunResult run_experiment(const ExperimentConfig& config);

/// Ground state only: relax, then propagate the (N - 1)-body state with the
/// absorber and write the same files.
RunResult run_ground_state(const ExperimentConfig& config);

void write_probabilities_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);
void write_density_csv(std::ostream& out, const GridSpec& grid, const std::vector<TrajectoryRecord>& records);
void write_spectrum_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);

}  // namespace rhomctdh
