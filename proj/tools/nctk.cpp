// Command-line harness: verify, blockdiag, evolve.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "nctk/dynamics.hpp"
#include "nctk/suites.hpp"

using namespace nctk;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Raised for malformed configs; maps to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json environment(double seconds) {
  const char* qmax = std::getenv("NC_QUADRATURE_MAX");
  return {{"timestamp", utc_now()},
          {"tool", "nctk 1.0.0"},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"NC_QUADRATURE_MAX", qmax ? qmax : ""},
          {"quadrature_max_order", quadrature_max_order()},
          {"seconds", seconds}};
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::string& config_path, bool all, std::vector<std::string> suites, const std::string& out_dir) {
  SuiteConfig cfg;
  json conf = json::object();
  if (!config_path.empty()) conf = read_json_file(config_path);
  if (!conf.is_object()) throw ConfigError("config must be a JSON object");
  cfg.seed = get_or<std::uint64_t>(conf, "seed", cfg.seed);
  if (conf.contains("tolerance")) {
    cfg.tolerance_override = get_or<double>(conf, "tolerance", -1.0);
    if (cfg.tolerance_override < 0.0) throw ConfigError("tolerance must be non-negative");
  }
  cfg.kernel_draws = get_or<int>(conf, "kernel_draws", cfg.kernel_draws);
  cfg.coherent_draws = get_or<int>(conf, "coherent_draws", cfg.coherent_draws);
  cfg.blockframe_draws = get_or<int>(conf, "blockframe_draws", cfg.blockframe_draws);
  cfg.envrep_pairs = get_or<int>(conf, "envrep_pairs", cfg.envrep_pairs);
  cfg.sweep_levels_small = get_or<int>(conf, "sweep_levels_small", cfg.sweep_levels_small);
  if (cfg.kernel_draws < 3 || cfg.coherent_draws < 2 || cfg.blockframe_draws < 1 || cfg.envrep_pairs < 1) {
    throw ConfigError("draw counts are too small");
  }
  if (suites.empty()) suites = get_or<std::vector<std::string>>(conf, "suites", {});
  if (all || suites.empty()) suites = suite_names();
  for (const std::string& s : suites) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) throw ConfigError("unknown suite '" + s + "'");
  }

  VerificationReport rep;
  json timings = json::object();
  const auto t0 = std::chrono::steady_clock::now();
  for (const std::string& s : suites) {
    const auto ts = std::chrono::steady_clock::now();
    const VerificationReport r = run_suite(s, cfg);
    timings[s] = seconds_since(ts);
    std::cout << (r.all_pass() ? "PASS " : "FAIL ") << s << " (" << r.passed() << "/" << r.rows().size() << ")\n";
    for (const CheckRow& row : r.rows()) {
      if (!row.pass) {
        std::cout << "  failed " << row.id << " residual " << format_double(row.residual) << " > "
                  << format_double(row.tolerance) << "\n";
      }
    }
    rep.append(r);
  }
  json env = environment(seconds_since(t0));
  env["suite_seconds"] = timings;
  env["seed"] = cfg.seed;
  write_file_atomic(path_in(out_dir, "report.json"), rep.to_json(env).dump(2) + "\n");
  write_file_atomic(path_in(out_dir, "report.csv"), rep.to_csv());
  std::cout << rep.passed() << " passed, " << rep.failed() << " failed\n";
  return rep.all_pass() ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- blockdiag

json frame_json(const BlockFrame& f) {
  return {{"R", real_matrix_to_json(f.rotation)},
          {"thetas", real_vector_to_json(f.thetas)},
          {"orientation", f.orientation},
          {"degenerate", f.degenerate}};
}

RealMatrix parse_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  const std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
  for (const json& row : j) {
    if (!row.is_array() || row.size() != cols) throw ConfigError("matrix rows must be arrays of equal length");
    for (const json& v : row) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError("matrix entries must be finite numbers");
    }
  }
  return real_matrix_from_json(j);
}

int cmd_blockdiag(const std::string& file, const std::string& out) {
  const json in = read_json_file(file);
  const RealMatrix A = parse_matrix(in.is_object() ? in.value("A", json()) : in);
  if (A.rows() != A.cols()) throw ConfigError("matrix must be square");
  const BlockFrame f = block_diagonalize(A);
  json j = frame_json(f);
  j["residual"] = block_form_residual(A, f);
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) std::cout << text;
  else write_file_atomic(out, text);
  return kExitPass;
}

// ---------------------------------------------------------------- evolve

PolynomialPotential parse_potential(const json& j, int N, double mu) {
  const std::string type = get_or<std::string>(j, "type", "harmonic");
  if (type == "free") return PolynomialPotential::free(N, mu);
  if (type == "harmonic") {
    const double w = get_or<double>(j, "omega", 1.0);
    require_positive(w, "omega");
    return PolynomialPotential::harmonic(N, mu, w);
  }
  if (type == "polynomial") {
    Polynomial p(N);
    for (const json& t : j.value("terms", json::array())) {
      const auto powers = get_or<std::vector<int>>(t, "powers", {});
      if (static_cast<int>(powers.size()) != N) throw ConfigError("term powers must have one entry per coordinate");
      for (int e : powers) {
        if (e < 0) throw ConfigError("negative power");
      }
      p.add_term(powers, get_or<double>(t, "coeff", 0.0));
    }
    return PolynomialPotential(p, mu);
  }
  throw ConfigError("unknown potential type '" + type + "'");
}

int run_sweep(const json& conf, const json& sw, const std::string& out_dir) {
  const auto thetas = get_or<std::vector<double>>(sw, "thetas", {1.0, 0.1, 0.01});
  const auto levels = get_or<std::vector<int>>(sw, "levels", {40, 64, 500});
  if (thetas.size() != levels.size() || thetas.empty()) throw ConfigError("sweep thetas and levels must match");
  for (double t : thetas) require_positive(t, "sweep theta");
  const RealVector x0 = real_vector_from_json(sw.value("x0", json::array({0.5, 0.0})));
  if (x0.size() != 2) throw ConfigError("sweep x0 must have two entries");
  const double t_final = get_or<double>(sw, "t_final", 1.0);
  const int steps = get_or<int>(sw, "steps", 50);
  const double mu = get_or<double>(conf, "mu", 1.0), hbar = get_or<double>(conf, "hbar", 1.0);
  const double omega = get_or<double>(sw, "omega", 1.0);
  require_positive(mu, "mu");
  require_positive(hbar, "hbar");
  require_positive(omega, "omega");
  if (steps < 1) throw ConfigError("steps must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<OscillatorComparison> runs;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    runs.push_back(compare_with_commutative_oscillator(thetas[k], levels[k], x0, t_final, steps, mu, omega, hbar));
  }
  std::ostringstream table, traj;
  table << "theta,levels,max_relative_error,max_norm_drift\n";
  traj << "t,oracle_x_1,oracle_x_2";
  for (const auto& r : runs) traj << ",x_1_theta_" << format_double(r.theta) << ",x_2_theta_" << format_double(r.theta);
  traj << "\n";
  bool monotone = true;
  json rows = json::array();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& r = runs[k];
    table << format_double(r.theta) << ',' << r.levels << ',' << format_double(r.max_relative_error) << ','
          << format_double(r.nc.max_norm_drift) << '\n';
    if (k > 0 && r.max_relative_error > runs[k - 1].max_relative_error) monotone = false;
    rows.push_back({{"theta", r.theta}, {"levels", r.levels}, {"max_relative_error", r.max_relative_error}});
  }
  const auto& times = runs.front().oracle.t;
  for (std::size_t i = 0; i < times.size(); ++i) {
    traj << format_double(times[i]) << ',' << format_double(runs.front().oracle.x[i](0)) << ','
         << format_double(runs.front().oracle.x[i](1));
    for (const auto& r : runs) {
      const RealVector xf{{r.nc.points[i].x[0].real(), r.nc.points[i].x[1].real()}};
      traj << ',' << format_double(xf(0)) << ',' << format_double(xf(1));  // canonical frame: R = I
    }
    traj << '\n';
  }
  json manifest = {{"config", conf}, {"sweep", rows}, {"monotone", monotone}, {"environment", environment(seconds_since(t0))}};
  write_file_atomic(path_in(out_dir, "sweep.csv"), table.str());
  write_file_atomic(path_in(out_dir, "trajectory.csv"), traj.str());
  write_file_atomic(path_in(out_dir, "manifest.json"), manifest.dump(2) + "\n");
  std::cout << table.str() << (monotone ? "monotone approach to the commutative oracle\n" : "NOT monotone\n");
  return monotone ? kExitPass : kExitFail;
}

int cmd_evolve(const std::string& config_path, const std::string& out_dir) {
  const json conf = read_json_file(config_path);
  if (!conf.is_object()) throw ConfigError("config must be a JSON object");
  if (conf.contains("sweep")) return run_sweep(conf, conf.at("sweep"), out_dir);

  const double hbar = get_or<double>(conf, "hbar", 1.0), mu = get_or<double>(conf, "mu", 1.0);
  require_positive(hbar, "hbar");
  require_positive(mu, "mu");
  const int K = get_or<int>(conf, "K", 32);
  if (K < 2) throw ConfigError("K must be at least 2");
  BlockFrame frame;
  if (conf.contains("A")) {
    const RealMatrix A = parse_matrix(conf.at("A"));
    if (A.rows() != A.cols()) throw ConfigError("A must be square");
    frame = block_diagonalize(A);
  } else {
    const auto th = get_or<std::vector<double>>(conf, "thetas", {1.0});
    for (double t : th) require_positive(t, "theta");
    frame = BlockFrame::canonical(Eigen::Map<const RealVector>(th.data(), static_cast<long>(th.size())));
  }
  const EnvelopingAlgebra alg(frame, K, hbar);
  const int N = alg.N();
  const PolynomialPotential V = parse_potential(conf.value("potential", json::object()), N, mu);

  const json init = conf.value("initial", json::object());
  const RealVector x0 = init.contains("x0") ? real_vector_from_json(init.at("x0")) : RealVector::Zero(N);
  if (x0.size() != N) throw ConfigError("initial x0 has the wrong dimension");
  const PosDefSymMatrix lambda =
      init.contains("lambda") ? PosDefSymMatrix(parse_matrix(init.at("lambda"))) : frame_lambda(frame);
  if (lambda.dim() != N) throw ConfigError("initial lambda has the wrong dimension");

  EvolutionConfig ec;
  ec.t_final = get_or<double>(conf, "t_final", ec.t_final);
  ec.steps = get_or<int>(conf, "steps", ec.steps);
  ec.integrator = integrator_from_string(get_or<std::string>(conf, "integrator", "auto"));
  ec.norm_tolerance = get_or<double>(conf, "norm_tolerance", ec.norm_tolerance);
  ec.hermiticity_tolerance = get_or<double>(conf, "hermiticity_tolerance", ec.hermiticity_tolerance);
  ec.seed = get_or<std::uint64_t>(conf, "seed", ec.seed);
  ec.max_block = get_or<int>(conf, "max_block", ec.max_block);
  require_positive(ec.norm_tolerance, "norm_tolerance");
  require_positive(ec.hermiticity_tolerance, "hermiticity_tolerance");
  if (ec.steps < 1) throw ConfigError("steps must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  const EnvelopingState s0 = state_to_operator(momentum_wavefunction(CoherentLabel::real(x0, lambda, hbar)), alg);
  const Hamiltonian H(alg, hermitize(V, alg), mu);
  const double herm = hermiticity_residual(H, alg, 2, ec.seed);
  const Trajectory tr = evolve(s0, H, alg, ec);

  json manifest = {
      {"config", conf},
      {"frame", frame_json(frame)},
      {"truncation", {{"K", K}, {"dim", alg.dim()}}},
      {"integrator", to_string(tr.used)},
      {"tolerances", {{"norm", ec.norm_tolerance}, {"hermiticity", ec.hermiticity_tolerance}}},
      {"residuals",
       {{"max_norm_drift", tr.max_norm_drift}, {"max_energy_drift", tr.max_energy_drift}, {"hermiticity", herm}}},
      {"environment", environment(seconds_since(t0))}};
  write_file_atomic(path_in(out_dir, "trajectory.csv"), trajectory_csv(tr));
  write_file_atomic(path_in(out_dir, "manifest.json"), manifest.dump(2) + "\n");
  std::cout << "integrator " << to_string(tr.used) << ", " << tr.points.size() - 1 << " steps, norm drift "
            << format_double(tr.max_norm_drift) << ", energy drift " << format_double(tr.max_energy_drift) << "\n";
  return kExitPass;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotPositiveDefinite:
      return kExitUsage;
    default:
      return kExitFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noncommutative quantum mechanics verification toolkit"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run verification suites and write report.json / report.csv");
  std::string v_config, v_out = ".";
  bool v_all = false;
  std::vector<std::string> v_suites;
  verify->add_option("--config", v_config, "JSON config (seed, tolerance, suites, draw counts)");
  verify->add_flag("--all", v_all, "run every suite");
  verify->add_option("--suite", v_suites, "suite name (repeatable)");
  verify->add_option("--out", v_out, "output directory");

  auto* bd = app.add_subcommand("blockdiag", "canonical frame of an antisymmetric matrix");
  std::string b_file, b_out;
  bd->add_option("matrix", b_file, "JSON file: array of rows, or {\"A\": rows}")->required();
  bd->add_option("--out", b_out, "write the frame JSON here instead of stdout");

  auto* ev = app.add_subcommand("evolve", "time evolution; writes trajectory.csv and manifest.json");
  std::string e_config, e_out = ".";
  ev->add_option("--config", e_config, "JSON run config")->required();
  ev->add_option("--out", e_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(v_config, v_all, v_suites, v_out);
    if (*bd) return cmd_blockdiag(b_file, b_out);
    return cmd_evolve(e_config, e_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
