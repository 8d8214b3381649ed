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

#pragma once

// CSV and JSON serialization of series, curves and DMFT results. CSV uses
// '.' decimals, LF line endings and 17 significant digits.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdmft/analysis.hpp"
#include "qdmft/dmft.hpp"
#include "qdmft/interferometry.hpp"
#include "qdmft/pole_fit.hpp"
#include "qdmft/siam.hpp"

namespace qdmft {

using Json = nlohmann::ordered_json;

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Json to_json(const SiamParams& p) {
  return {{"u", p.u}, {"mu", p.mu}, {"epsilon_c", p.epsilon_c}, {"v", p.v}, {"t_star", p.t_star}};
}

inline SiamParams params_from_json(const Json& j) {
  return {j.at("u").get<double>(), j.at("mu").get<double>(), j.at("epsilon_c").get<double>(),
          j.at("v").get<double>(), j.at("t_star").get<double>()};
}

inline Json to_json(const PoleFit& f) {
  return {{"alpha1", f.alpha1},
          {"omega1", f.omega1},
          {"alpha2", f.alpha2},
          {"omega2", f.omega2},
          {"rms_residual", f.rms_residual},
          {"second_pole_identifiable", f.second_pole_identifiable()}};
}

inline void write_green_csv(std::ostream& os, const GreenSeries& s) {
  os << "tau,re_igr,im_igr\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    os << fmt(s.times[k]) << ',' << fmt(s.values[k].real()) << ',' << fmt(s.values[k].imag()) << '\n';
  }
}

inline Json to_json(const GreenSeries& s) {
  Json re = Json::array(), im = Json::array();
  for (const Complex& v : s.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return {{"params", to_json(s.params)},
          {"method", to_string(s.method)},
          {"n_steps", s.n_steps},
          {"times", s.times},
          {"values_re", re},
          {"values_im", im}};
}

inline GreenSeries green_series_from_json(const Json& j) {
  GreenSeries s;
  s.params = params_from_json(j.at("params"));
  s.method = parse_evolution_method(j.at("method").get<std::string>());
  s.n_steps = j.at("n_steps").get<int>();
  s.times = j.at("times").get<std::vector<double>>();
  const auto re = j.at("values_re").get<std::vector<double>>();
  const auto im = j.at("values_im").get<std::vector<double>>();
  if (re.size() != im.size()) throw DomainError("values_re and values_im differ in length");
  for (std::size_t k = 0; k < re.size(); ++k) s.values.emplace_back(re[k], im[k]);
  s.validate();
  return s;
}

inline void write_complex_curve_csv(std::ostream& os, const std::vector<double>& omegas,
                                    const std::vector<Complex>& values) {
  os << "omega,re,im\n";
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    os << fmt(omegas[i]) << ',' << fmt(values[i].real()) << ',' << fmt(values[i].imag()) << '\n';
  }
}

inline void write_spectral_csv(std::ostream& os, const std::vector<double>& omegas,
                               const std::vector<double>& a) {
  os << "omega,a\n";
  for (std::size_t i = 0; i < omegas.size(); ++i) os << fmt(omegas[i]) << ',' << fmt(a[i]) << '\n';
}

inline Json grid_json(const std::vector<double>& omegas, double eta) {
  return {{"omega_min", omegas.empty() ? 0.0 : omegas.front()},
          {"omega_max", omegas.empty() ? 0.0 : omegas.back()},
          {"n_points", omegas.size()},
          {"eta", eta}};
}

inline Json spectral_json(const SiamParams& p, const PoleFit& fit, const SelfEnergyEval& se,
                          const std::vector<double>& a) {
  Json sigma_re = Json::array(), sigma_im = Json::array();
  for (const Complex& v : se.values) {
    // JSON has no infinity; poles of the self-energy are written as null.
    sigma_re.push_back(std::isfinite(v.real()) ? Json(v.real()) : Json(nullptr));
    sigma_im.push_back(std::isfinite(v.imag()) ? Json(v.imag()) : Json(nullptr));
  }
  return {{"params", to_json(p)},
          {"fit", to_json(fit)},
          {"eta", se.eta},
          {"grid", grid_json(se.omegas, se.eta)},
          {"omegas", se.omegas},
          {"sigma_re", sigma_re},
          {"sigma_im", sigma_im},
          {"a", a}};
}

inline Json to_json(const IterationRecord& r) {
  return {{"iteration", r.iteration}, {"v_in", r.v_in},         {"v_out", r.v_out},
          {"v_next", r.v_next},       {"z", r.z},               {"epsilon_c", r.epsilon_c},
          {"n_imp", r.n_imp},         {"fit", to_json(r.fit)},  {"insulating_branch", r.insulating_branch}};
}

inline Json to_json(const DmftResult& r) {
  Json hist = Json::array();
  for (const auto& h : r.history) hist.push_back(to_json(h));
  return {{"converged", r.converged},
          {"phase", to_string(r.phase)},
          {"z_final", r.z_final},
          {"v_final", r.v_final},
          {"epsilon_c_final", r.epsilon_c_final},
          {"iterations", r.iterations()},
          {"final_fit", to_json(r.final_fit)},
          {"history", hist}};
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& pts) {
  os << "u,z,v,iterations,converged,phase\n";
  for (const auto& pt : pts) {
    if (pt.ok()) {
      const DmftResult& r = *pt.result;
      os << fmt(pt.u) << ',' << fmt(r.z_final) << ',' << fmt(r.v_final) << ',' << r.iterations() << ','
         << (r.converged ? "true" : "false") << ',' << to_string(r.phase) << '\n';
    } else {
      os << fmt(pt.u) << ",nan,nan,0,false,failed\n";
    }
  }
}

}  // namespace qdmft
