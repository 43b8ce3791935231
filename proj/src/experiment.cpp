#include "rhomctdh/experiment.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "rhomctdh/errors.hpp"
#include "rhomctdh/log.hpp"

namespace rhomctdh {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidArgument("config key '" + key + "': not a number: " + v);
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidArgument("config key '" + key + "': not an integer: " + v);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidArgument("config key '" + key + "': not a boolean: " + v);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Field table shared by the parser and the formatter.
struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<nlohmann::ordered_json(const ExperimentConfig&)> json;
};

template <typename T>
Field field(T ExperimentConfig::*member, const char* key) {
  Field f;
  f.set = [member, key](ExperimentConfig& c, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) c.*member = to_double(key, v);
    else if constexpr (std::is_same_v<T, int>) c.*member = to_int(key, v);
    else if constexpr (std::is_same_v<T, bool>) c.*member = to_bool(key, v);
    else c.*member = v;
  };
  f.get = [member](const ExperimentConfig& c) {
    if constexpr (std::is_same_v<T, double>) return fmt(c.*member);
    else if constexpr (std::is_same_v<T, int>) return std::to_string(c.*member);
    else if constexpr (std::is_same_v<T, bool>) return std::string(c.*member ? "true" : "false");
    else return c.*member;
  };
  f.json = [member](const ExperimentConfig& c) { return nlohmann::ordered_json(c.*member); };
  return f;
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"R", field(&ExperimentConfig::R, "R")},
      {"n_points", field(&ExperimentConfig::n_points, "n_points")},
      {"R_prime", field(&ExperimentConfig::R_prime, "R_prime")},
      {"trap_depth", field(&ExperimentConfig::trap_depth, "trap_depth")},
      {"trap_width", field(&ExperimentConfig::trap_width, "trap_width")},
      {"coulomb_strength", field(&ExperimentConfig::coulomb_strength, "coulomb_strength")},
      {"coulomb_smoothing", field(&ExperimentConfig::coulomb_smoothing, "coulomb_smoothing")},
      {"packet_center", field(&ExperimentConfig::packet_center, "packet_center")},
      {"packet_width", field(&ExperimentConfig::packet_width, "packet_width")},
      {"packet_momentum", field(&ExperimentConfig::packet_momentum, "packet_momentum")},
      {"L_ground", field(&ExperimentConfig::L_ground, "L_ground")},
      {"L_total", field(&ExperimentConfig::L_total, "L_total")},
      {"N", field(&ExperimentConfig::N, "N")},
      {"t_final", field(&ExperimentConfig::t_final, "t_final")},
      {"tau", field(&ExperimentConfig::tau, "tau")},
      {"eps_reg", field(&ExperimentConfig::eps_reg, "eps_reg")},
      {"record_interval", field(&ExperimentConfig::record_interval, "record_interval")},
      {"relax_ds", field(&ExperimentConfig::relax_ds, "relax_ds")},
      {"relax_tolerance", field(&ExperimentConfig::relax_tolerance, "relax_tolerance")},
      {"relax_residual", field(&ExperimentConfig::relax_residual, "relax_residual")},
      {"relax_eps_reg", field(&ExperimentConfig::relax_eps_reg, "relax_eps_reg")},
      {"relax_max_steps", field(&ExperimentConfig::relax_max_steps, "relax_max_steps")},
      {"gamma_off", field(&ExperimentConfig::gamma_off, "gamma_off")},
      {"output_dir", field(&ExperimentConfig::output_dir, "output_dir")},
  };
  return table;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int count_bound_states(const Model& model) {
  const OneBodySpectrum spec = one_body_spectrum(model.grid, model.potential, model.grid.size());
  return static_cast<int>((spec.energies.array() < 0.0).count());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void write_outputs(const ExperimentConfig& config, const McSystem& sys, const RunResult& res, int bound_states,
                   int relax_steps, const std::string& mode) {
  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "probabilities.csv");
    write_probabilities_csv(out, res.records);
  }
  {
    auto out = open_output(dir / "density.csv");
    write_density_csv(out, sys.grid(), res.records);
  }
  {
    auto out = open_output(dir / "spectrum.csv");
    write_spectrum_csv(out, res.records);
  }
  nlohmann::ordered_json meta;
  nlohmann::ordered_json cfg;
  for (const auto& [key, f] : fields()) cfg[key] = f.json(config);
  meta["mode"] = mode;
  meta["config"] = cfg;
  meta["grid"] = {{"n_points", sys.grid().size()},
                  {"half_width", sys.grid().half_width()},
                  {"spacing", sys.grid().spacing()},
                  {"k_max", sys.grid().wavenumbers().cwiseAbs().maxCoeff()},
                  {"nodes_first", sys.grid().nodes()[0]},
                  {"nodes_last", sys.grid().nodes()[sys.grid().size() - 1]}};
  meta["modes"] = sys.basis->modes();
  meta["max_particles"] = sys.basis->max_particles();
  meta["bound_states"] = bound_states;
  meta["relaxed_energy"] = res.relaxed_energy;
  meta["relax_steps"] = relax_steps;
  meta["initial_energy"] = res.initial_energy;
  meta["records"] = res.records.size();
  meta["timings"] = {{"relax_seconds", res.relax_seconds}, {"propagate_seconds", res.propagate_seconds}};
  auto out = open_output(dir / "meta.json");
  out << meta.dump(2) << '\n';
}

PropagationConfig propagation_config(const ExperimentConfig& config) {
  PropagationConfig pc;
  pc.tau = config.tau;
  pc.t_final = config.t_final;
  pc.record_every = config.record_every();
  pc.eps_reg = config.eps_reg;
  return pc;
}

RelaxConfig relax_config(const ExperimentConfig& config) {
  RelaxConfig rc;
  rc.ds = config.relax_ds;
  rc.tolerance = config.relax_tolerance;
  rc.eps_reg = config.relax_eps_reg;
  rc.residual_tolerance = config.relax_residual;
  rc.max_steps = config.relax_max_steps;
  return rc;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(R > 0.0)) throw InvalidArgument("R must be positive");
  if (n_points < 2) throw InvalidArgument("n_points must be at least 2");
  if (!(R_prime > 0.0) || !(R_prime < R)) throw InvalidArgument("R_prime must satisfy 0 < R_prime < R");
  if (!(packet_width > 0.0)) throw InvalidArgument("packet_width must be positive");
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (L_ground < N - 1) throw InvalidArgument("L_ground must hold N - 1 fermions");
  if (L_total != L_ground + 1) throw InvalidArgument("L_total must equal L_ground + 1");
  if (L_total > n_points) throw InvalidArgument("L_total must not exceed n_points");
  if (L_total > 62) throw InvalidArgument("L_total too large for the bit encoding");
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (t_final < 0.0) throw InvalidArgument("t_final must be non-negative");
  if (!(eps_reg > 0.0) || !(relax_eps_reg > 0.0)) throw InvalidArgument("regularization must be positive");
  if (!(record_interval > 0.0)) throw InvalidArgument("record_interval must be positive");
  if (!(relax_ds > 0.0) || relax_max_steps < 1 || !(relax_tolerance > 0.0) || !(relax_residual > 0.0))
    throw InvalidArgument("relaxation settings must be positive");
  if (output_dir.empty()) throw InvalidArgument("output_dir must not be empty");
}

int ExperimentConfig::record_every() const {
  return std::max(1, static_cast<int>(std::lround(record_interval / tau)));
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::map<std::string, const Field*> lookup;
  for (const auto& [key, f] : fields()) lookup[key] = &f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second->set(base, value);
  }
  base.validate();
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path.string());
  return parse_config(in, std::move(base));
}

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, f] : fields()) out += key + " = " + f.get(config) + "\n";
  return out;
}

Model build_model(const ExperimentConfig& config) {
  config.validate();
  GridSpec grid = make_grid(config.R, config.n_points);
  RealGridFunction v = eval_trap(grid, config.trap_depth, config.trap_width);
  RealGridFunction gamma = config.gamma_off ? RealGridFunction::Zero(grid.size()) : eval_cap(grid, config.R_prime);
  PairPotential u = PairPotential::smoothed_coulomb(grid, config.coulomb_strength, config.coulomb_smoothing);
  return Model(std::move(grid), std::move(v), std::move(gamma), std::move(u));
}

GroundState relax_ground_state(const ExperimentConfig& config) {
  Model model = build_model(config);
  const int bound = count_bound_states(model);
  const int n = config.N - 1;
  auto basis = std::make_shared<const FockBasis>(config.L_ground, n, Statistics::fermion);

  PureMcState guess;
  guess.spfs = one_body_spectrum(model.grid, model.potential, config.L_ground).orbitals;
  guess.particles = n;
  FockState det{Statistics::fermion, std::vector<int>(config.L_ground, 0)};
  for (int j = 0; j < n; ++j) det.occupations[j] = 1;
  guess.coeffs = Eigen::VectorXcd::Zero(basis->block_dim(n));
  guess.coeffs[*basis->index_of(det)] = 1.0;

  McSystem sys{std::move(model), basis};
  RelaxResult relaxed = relax_imaginary(sys, std::move(guess), relax_config(config));
  return {std::move(sys), std::move(relaxed), bound};
}

McState ground_density_state(const GroundState& ground) {
  return to_density_state(*ground.system.basis, ground.relaxed.state);
}

InitialState prepare_initial_state(const ExperimentConfig& config) {
  GroundState ground = relax_ground_state(config);
  const Model& model = ground.system.model;
  const GridSpec& grid = model.grid;
  const FockBasis& small = *ground.system.basis;
  const PureMcState& psi = ground.relaxed.state;
  const int Lg = config.L_ground;

  // g = Q exp(-(x - x0)^2 / w + i k x), normalized after projection
  GridFunction g(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.nodes()[i];
    const double d = x - config.packet_center;
    g[i] = std::exp(-d * d / config.packet_width) * std::polar(1.0, config.packet_momentum * x);
  }
  g = project_complement(grid, psi.spfs, g);
  g = project_complement(grid, psi.spfs, g);
  const double norm = grid.norm(g);
  if (!(norm > 0.0)) throw ConsistencyError("packet lies entirely in the ground-state SPF span");
  g /= norm;

  SpfSet spfs;
  spfs.functions.resize(grid.size(), config.L_total);
  spfs.functions.leftCols(Lg) = psi.spfs.functions;
  spfs.functions.col(Lg) = g;

  auto basis = std::make_shared<const FockBasis>(config.L_total, config.N, Statistics::fermion);
  Eigen::MatrixXcd embed = Eigen::MatrixXcd::Zero(config.L_total, Lg);
  embed.topRows(Lg).setIdentity();
  const BlockMatrix t = basis_transform(small, *basis, embed);
  const Eigen::VectorXcd psi_small = t.at(config.N - 1) * psi.coeffs;
  // c^dag(g) = c^dag_{L_ground}: transpose of the real annihilator
  Eigen::VectorXcd psi_full = basis->annihilator_complex(Lg, config.N).transpose() * psi_small;
  psi_full.normalize();

  McState state{std::move(spfs), pure_density(*basis, config.N, psi_full), 0.0};
  McSystem sys{model, basis};
  return {std::move(sys), std::move(state), std::move(ground)};
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunResult res;
  const auto t_relax = std::chrono::steady_clock::now();
  InitialState init = prepare_initial_state(config);
  res.relax_seconds = seconds_since(t_relax);
  res.relaxed_energy = init.ground.relaxed.energy;
  res.initial_energy = energy(init.system, init.state);
  {
    std::ostringstream msg;
    msg.precision(10);
    msg << "bound states " << init.ground.bound_states << ", relaxed E = " << res.relaxed_energy
        << ", initial E = " << res.initial_energy;
    log_info(msg.str());
  }

  const auto t_prop = std::chrono::steady_clock::now();
  res.records = propagate(init.system, init.state, propagation_config(config));
  res.propagate_seconds = seconds_since(t_prop);
  write_outputs(config, init.system, res, init.ground.bound_states, init.ground.relaxed.steps, "run");
  return res;
}

RunResult run_ground_state(const ExperimentConfig& config) {
  config.validate();
  RunResult res;
  const auto t_relax = std::chrono::steady_clock::now();
  GroundState ground = relax_ground_state(config);
  res.relax_seconds = seconds_since(t_relax);
  res.relaxed_energy = ground.relaxed.energy;

  McSystem sys{build_model(config), ground.system.basis};
  McState state = ground_density_state(ground);
  res.initial_energy = energy(sys, state);
  const auto t_prop = std::chrono::steady_clock::now();
  res.records = propagate(sys, state, propagation_config(config));
  res.propagate_seconds = seconds_since(t_prop);
  write_outputs(config, sys, res, ground.bound_states, ground.relaxed.steps, "relax");
  return res;
}

void write_probabilities_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  const int blocks = records.empty() ? 0 : static_cast<int>(records.front().probabilities.size());
  out << "t";
  for (int n = 0; n < blocks; ++n) out << ",p" << n;
  out << ",trace,energy_re,sigma_min\n";
  for (const auto& r : records) {
    out << fmt(r.t);
    for (int n = 0; n < blocks; ++n) out << ',' << fmt(r.probabilities[n]);
    out << ',' << fmt(r.trace) << ',' << fmt(r.energy) << ',' << fmt(r.sigma_min) << '\n';
  }
}

void write_density_csv(std::ostream& out, const GridSpec& grid, const std::vector<TrajectoryRecord>& records) {
  for (int i = 0; i < grid.size(); ++i) out << (i ? "," : "") << fmt(grid.nodes()[i]);
  out << '\n';
  for (const auto& r : records) {
    out << fmt(r.t);
    for (Eigen::Index i = 0; i < r.density.size(); ++i) out << ',' << fmt(r.density[i]);
    out << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  out << "t,sigma_min\n";
  for (const auto& r : records) out << fmt(r.t) << ',' << fmt(r.sigma_min) << '\n';
}

}  // namespace rhomctdh
