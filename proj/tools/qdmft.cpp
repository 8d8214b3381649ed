// Copyright 2026 The qdmft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qdmft command-line front end. Energies are in units of t*, times in 1/t*.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance_suite.hpp"
#include "qdmft/analysis.hpp"
#include "qdmft/dmft.hpp"
#include "qdmft/interferometry.hpp"
#include "qdmft/io.hpp"
#include "qdmft/siam.hpp"
#include "qdmft/trotter.hpp"
#include "qdmft/version.hpp"

namespace fs = std::filesystem;
using namespace qdmft;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kInvariant = 3 };

struct ModelFlags {
  double u = 4.0;
  double v = 1.0;
  double mu = 2.0;
  double eps_c = 0.0;
  double t_star = 1.0;
  double tau_max = 6.0;
  int n_points = 24;

  SiamParams params() const { return {u, mu, eps_c, v, t_star}; }
  TimeGrid grid() const { return {tau_max, n_points}; }
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--u", m.u, "Hubbard interaction U [t*]")->capture_default_str();
  app->add_option("--v", m.v, "Hybridization V [t*]")->capture_default_str();
  app->add_option("--mu", m.mu, "Chemical potential mu [t*]")->capture_default_str();
  app->add_option("--eps-c", m.eps_c, "Bath level eps_c [t*]")->capture_default_str();
}

void add_time_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--t-star", m.t_star, "Energy unit t*")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--tau-max", m.tau_max, "Longest time [1/t*]")->capture_default_str()->check(CLI::NonNegativeNumber);
  app->add_option("--n-points", m.n_points, "Time intervals on [0, tau_max]")->capture_default_str()->check(CLI::PositiveNumber);
}

void method_option(CLI::App* app, std::string& s, const std::string& def) {
  s = def;
  app->add_option("--method", s, "Evolution method: xy, cz or exact")
      ->check(CLI::IsMember({"xy", "cz", "exact"}))
      ->capture_default_str();
}

class OutputSet {
 public:
  OutputSet(std::string command, fs::path out) : command_(std::move(command)), out_(std::move(out)) {
    fs::create_directories(out_);
    start_ = std::chrono::steady_clock::now();
  }

  std::ofstream open(const std::string& name) {
    outputs_.push_back(name);
    std::ofstream f(out_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out_ / name).string());
    f.precision(17);
    return f;
  }

  void write_json(const std::string& name, const Json& j) { open(name) << j.dump(2) << '\n'; }

  void finish(const Json& parameters, std::uint64_t seed) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json m = {{"schema", kManifestSchema},
              {"tool", "qdmft"},
              {"version", kVersion},
              {"command", command_},
              {"parameters", parameters},
              {"seed", seed},
              {"units", {{"energy", "t*"}, {"time", "1/t*"}}},
              {"outputs", outputs_},
              {"duration_seconds", secs}};
    std::ofstream f(out_ / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
    std::cout << "wrote " << outputs_.size() << " file(s) and manifest.json to " << out_.string() << '\n';
  }

 private:
  std::string command_;
  fs::path out_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

Json model_json(const ModelFlags& m) {
  return {{"u", m.u}, {"v", m.v}, {"mu", m.mu}, {"epsilon_c", m.eps_c}, {"t_star", m.t_star},
          {"tau_max", m.tau_max}, {"n_points", m.n_points}};
}

// Self-consistent runs fix mu = U/2, eps_c = 0 and find V themselves.
Json loop_json(const ModelFlags& m, const std::vector<double>& us) {
  return {{"u", us}, {"half_filling", true}, {"t_star", m.t_star}, {"tau_max", m.tau_max},
          {"n_points", m.n_points}, {"v_tol", 1e-6}, {"accelerate", true}};
}

std::string tag(double x) {
  std::string s = fmt(x);
  for (char& ch : s) if (ch == '.') ch = 'p';
  return s;
}

// ---- fidelity ---------------------------------------------------------

void cmd_fidelity(const ModelFlags& m, const std::vector<int>& steps, const fs::path& out) {
  const SiamParams p = m.params();
  p.validate();
  const TimeGrid grid = m.grid();
  const StateVector psi = StateVector::normalized(
      kSystemQubits, jw_creation_operator(1, Spin::down) * ground_state(p).state.amplitudes());
  const EigenSystem es = diagonalize(p);
  OutputSet files("fidelity", out);
  for (int n : steps) {
    std::ofstream f = files.open("fidelity_N" + std::to_string(n) + ".csv");
    f << "tau,fidelity_xy,fidelity_cz\n";
    for (double tau : grid.times()) {
      const StateVector exact(kSystemQubits, exact_propagator(es, tau) * psi.amplitudes());
      const int k = steps_for_time(tau, grid.tau_max, n);
      const double fxy = fidelity(exact, apply_circuit(psi, build_evolution({TrotterMethod::xy, k, tau, p})));
      const double fcz = fidelity(exact, apply_circuit(psi, build_evolution({TrotterMethod::cz, k, tau, p})));
      f << fmt(tau) << ',' << fmt(fxy) << ',' << fmt(fcz) << '\n';
    }
  }
  Json params = model_json(m);
  params["trotter_steps"] = steps;
  files.finish(params, 0);
}

// ---- green ------------------------------------------------------------

// Shot-sampled estimate of F = <Z_anc> + i <Y_anc>.
Complex sample_term(Complex f, std::int64_t shots, std::uint64_t seed) {
  return {sample_shots(std::clamp(f.real(), -1.0, 1.0), shots, seed),
          sample_shots(std::clamp(f.imag(), -1.0, 1.0), shots, seed ^ 0x9e3779b97f4a7c15ULL)};
}

void cmd_green(const ModelFlags& m, EvolutionMethod method, int n_steps, std::int64_t shots, std::uint64_t seed,
               const fs::path& out) {
  const SiamParams p = m.params();
  p.validate();
  if (!(p.v > 0.0)) throw PreconditionError("Green function measurement requires V > 0");
  const EigenSystem es = diagonalize(p);
  const StateVector gs = ground_state(es).state;
  const TimeGrid grid = m.grid();
  GreenSeries s;
  s.params = p;
  s.method = method;
  s.n_steps = method == EvolutionMethod::exact ? 0 : n_steps;
  s.times = grid.times();
  std::vector<Complex> exact;
  std::uint64_t counter = 0;
  for (double tau : s.times) {
    const Evolution ev = make_evolution(p, es, method, tau, steps_for_time(tau, grid.tau_max, n_steps));
    RamseyTerms t = measure_ramsey_terms(ev, gs, Spin::down, tau);
    if (shots > 0) {
      for (auto& row : t.f)
        for (Complex& f : row) f = sample_term(f, shots, seed + 1000003ULL * counter++);
    }
    s.values.push_back(retarded_from_terms(t));
    exact.push_back(retarded_from_terms(measure_ramsey_terms(exact_propagator(es, tau), gs, Spin::down, tau)));
  }
  OutputSet files("green", out);
  {
    std::ofstream f = files.open("green.csv");
    f << "tau,re_igr,im_igr,re_igr_exact,im_igr_exact\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
      f << fmt(s.times[k]) << ',' << fmt(s.values[k].real()) << ',' << fmt(s.values[k].imag()) << ','
        << fmt(exact[k].real()) << ',' << fmt(exact[k].imag()) << '\n';
    }
  }
  files.write_json("green.json", to_json(s));
  Json params = model_json(m);
  params["method"] = to_string(method);
  params["trotter_steps"] = n_steps;
  params["shots"] = shots;
  files.finish(params, seed);
}

// ---- spectral ---------------------------------------------------------

DmftConfig loop_config(const ModelFlags& m, double u, EvolutionMethod method, int n_steps) {
  DmftConfig c;
  c.u = u;
  c.t_star = m.t_star;
  c.method = method;
  c.n_steps = n_steps;
  c.tau_max = m.tau_max;
  c.n_points = m.n_points;
  c.accelerate = true;
  c.v_tol = 1e-6;
  return c;
}

void cmd_spectral(const ModelFlags& m, const std::vector<double>& us, EvolutionMethod method, int n_steps,
                  double eta, const fs::path& out) {
  OutputSet files("spectral", out);
  for (double u : us) {
    const DmftResult r = run(loop_config(m, u, method, n_steps));
    const SiamParams p = SiamParams::half_filled(u, r.v_final, m.t_star);
    const FrequencyGrid real_axis = FrequencyGrid::uniform(-8 * m.t_star, 8 * m.t_star, 1601, 0.0);
    const SelfEnergyEval se = dyson_self_energy(r.final_fit, p, real_axis, SingularPolicy::limit);
    const auto a = spectral_function(se, p);
    {
      std::ofstream f = files.open("spectral_u" + tag(u) + ".csv");
      write_spectral_csv(f, se.omegas, a);
    }
    const FrequencyGrid broadened = FrequencyGrid::uniform(-8 * m.t_star, 8 * m.t_star, 1601, eta);
    {
      std::ofstream f = files.open("green_omega_u" + tag(u) + ".csv");
      write_complex_curve_csv(f, broadened.omegas, green_frequency(r.final_fit, broadened));
    }
    Json j = spectral_json(p, r.final_fit, se, a);
    j["dmft"] = to_json(r);
    j["green_eta"] = eta;
    files.write_json("spectral_u" + tag(u) + ".json", j);
  }
  Json params = loop_json(m, us);
  params["method"] = to_string(method);
  params["trotter_steps"] = n_steps;
  params["eta"] = eta;
  files.finish(params, 0);
}

// ---- sweep-z ----------------------------------------------------------

void cmd_sweep(const ModelFlags& m, const std::vector<double>& us, EvolutionMethod method,
               const std::vector<int>& steps, const fs::path& out) {
  OutputSet files("sweep-z", out);
  {
    std::ofstream f = files.open("sweep_exact.csv");
    write_sweep_csv(f, sweep_z(loop_config(m, 0.0, EvolutionMethod::exact, 24), us));
  }
  if (method != EvolutionMethod::exact) {
    for (int n : steps) {
      std::ofstream f = files.open("sweep_" + to_string(method) + "_N" + std::to_string(n) + ".csv");
      write_sweep_csv(f, sweep_z(loop_config(m, 0.0, method, n), us));
    }
  }
  Json params = loop_json(m, us);
  params["method"] = to_string(method);
  params["trotter_steps"] = steps;
  files.finish(params, 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdmft: two-site DMFT with a simulated quantum impurity solver.\n"
               "Energies are in units of t*, times in units of 1/t*."};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ModelFlags model;
  std::string out, method_name;
  std::vector<int> steps;
  int n_steps = 24;
  std::int64_t shots = 0;
  std::uint64_t seed = 1;
  double eta = 0.01;
  std::vector<double> u_list;

  auto* fid = app.add_subcommand("fidelity", "State fidelity of Trotterized vs exact evolution of c^dagger|GS>");
  add_model_flags(fid, model);
  add_time_flags(fid, model);
  fid->add_option("--trotter-steps", steps, "Trotter steps at tau_max (list)")->default_str("6 12 18 24");
  fid->add_option("--out", out, "Output directory")->required();

  auto* green = app.add_subcommand("green", "Retarded Green function iG^R(tau) with exact overlay");
  add_model_flags(green, model);
  add_time_flags(green, model);
  method_option(green, method_name, "xy");
  green->add_option("--trotter-steps", n_steps, "Trotter steps at tau_max")->capture_default_str()->check(CLI::PositiveNumber);
  green->add_option("--shots", shots, "Measurements per expectation value (0: exact expectations)")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  green->add_option("--seed", seed, "Seed for shot sampling")->capture_default_str();
  green->add_option("--out", out, "Output directory")->required();

  auto* spectral = app.add_subcommand("spectral", "Self-consistent spectral function A(omega) at half filling");
  add_time_flags(spectral, model);
  spectral->add_option("--u", u_list, "Interaction values [t*] (list)")->default_str("5 8");
  method_option(spectral, method_name, "xy");
  spectral->add_option("--trotter-steps", n_steps, "Trotter steps at tau_max")->capture_default_str()->check(CLI::PositiveNumber);
  spectral->add_option("--eta", eta, "Broadening of the G(omega) curve [t*]")->capture_default_str()->check(CLI::PositiveNumber);
  spectral->add_option("--out", out, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep-z", "Quasiparticle weight Z(U) at half filling");
  add_time_flags(sweep, model);
  sweep->add_option("--u", u_list, "Interaction values [t*] (list)")->default_str("0.1 0.5 1 ... 8");
  method_option(sweep, method_name, "xy");
  sweep->add_option("--trotter-steps", steps, "Trotter steps at tau_max (list)")->default_str("24 48");
  sweep->add_option("--out", out, "Output directory")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const EvolutionMethod method = method_name.empty() ? EvolutionMethod::xy : parse_evolution_method(method_name);
    if (*fid) {
      if (steps.empty()) steps = {6, 12, 18, 24};
      cmd_fidelity(model, steps, out);
    } else if (*green) {
      cmd_green(model, method, n_steps, shots, seed, out);
    } else if (*spectral) {
      if (u_list.empty()) u_list = {5.0, 8.0};
      cmd_spectral(model, u_list, method, n_steps, eta, out);
    } else if (*sweep) {
      if (u_list.empty()) {
        u_list.push_back(0.1);
        for (int k = 1; k <= 16; ++k) u_list.push_back(0.5 * k);
      }
      if (steps.empty()) steps = {24, 48};
      cmd_sweep(model, u_list, method, steps, out);
    } else if (*selftest) {
      return acceptance::run_all(std::cout) ? kOk : kNumerical;
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariant;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
