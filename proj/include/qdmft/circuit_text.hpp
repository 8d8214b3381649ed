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

// Line-oriented circuit text: one gate per line, "NAME q0[,q1] [angle]".
// Angles are printed in radians with 17 significant digits so that a
// round trip is exact. Controlled Paulis are named CP<axis><control value>,
// e.g. "CPY0 4,0". An optional first line "QUBITS n" fixes the register.

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "qdmft/errors.hpp"
#include "qdmft/qsim.hpp"

namespace qdmft {

inline std::string gate_name(const Gate& g) {
  switch (g.kind) {
    case GateKind::rot_x:
      return "RX";
    case GateKind::rot_y:
      return "RY";
    case GateKind::rot_z:
      return "RZ";
    case GateKind::hadamard:
      return "H";
    case GateKind::xy:
      return "XY";
    case GateKind::zz:
      return "ZZ";
    case GateKind::cz_phi:
      return "CZPHI";
    case GateKind::swap:
      return "SWAP";
    case GateKind::controlled_pauli: {
      static constexpr const char* axes[] = {"X", "Y", "Z"};
      return std::string("CP") + axes[static_cast<int>(g.axis)] + std::to_string(g.control_value);
    }
  }
  throw InvariantError("unknown gate kind");
}

inline std::string format_angle(double a) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", a == 0.0 ? 0.0 : a);  // no "-0"
  return buf;
}

inline std::string to_text(const Gate& g) {
  std::string line = gate_name(g) + " " + std::to_string(g.targets[0]);
  if (g.arity() == 2) line += "," + std::to_string(g.targets[1]);
  if (g.has_angle()) line += " " + format_angle(g.angle);
  return line;
}

inline void write_circuit(std::ostream& os, const Circuit& c) {
  os << "QUBITS " << c.n_qubits() << '\n';
  for (const Gate& g : c.gates()) os << to_text(g) << '\n';
}

inline std::string to_text(const Circuit& c) {
  std::ostringstream os;
  write_circuit(os, c);
  return os.str();
}

namespace detail {

inline int parse_int(std::string_view s, int line_no) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw DomainError("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

inline Gate parse_gate_line(const std::string& line, int line_no) {
  std::istringstream is(line);
  std::string name, qubits, angle_text, extra;
  is >> name >> qubits >> angle_text >> extra;
  const auto fail = [&](const std::string& why) {
    return DomainError("line " + std::to_string(line_no) + ": " + why);
  };
  if (name.empty() || qubits.empty()) throw fail("expected 'NAME qubits [angle]'");
  if (!extra.empty()) throw fail("trailing tokens");

  Gate g;
  if (name == "RX") g.kind = GateKind::rot_x;
  else if (name == "RY") g.kind = GateKind::rot_y;
  else if (name == "RZ") g.kind = GateKind::rot_z;
  else if (name == "H") g.kind = GateKind::hadamard;
  else if (name == "XY") g.kind = GateKind::xy;
  else if (name == "ZZ") g.kind = GateKind::zz;
  else if (name == "CZPHI") g.kind = GateKind::cz_phi;
  else if (name == "SWAP") g.kind = GateKind::swap;
  else if (name.size() == 4 && name.starts_with("CP")) {
    g.kind = GateKind::controlled_pauli;
    switch (name[2]) {
      case 'X': g.axis = PauliAxis::x; break;
      case 'Y': g.axis = PauliAxis::y; break;
      case 'Z': g.axis = PauliAxis::z; break;
      default: throw fail("unknown Pauli axis in '" + name + "'");
    }
    if (name[3] != '0' && name[3] != '1') throw fail("control value must be 0 or 1");
    g.control_value = name[3] - '0';
  } else {
    throw fail("unknown gate '" + name + "'");
  }

  const auto comma = qubits.find(',');
  if ((comma != std::string::npos) != (g.arity() == 2)) throw fail("wrong number of qubits");
  if (comma == std::string::npos) {
    g.targets = {parse_int(qubits, line_no), -1};
  } else {
    g.targets = {parse_int(std::string_view(qubits).substr(0, comma), line_no),
                 parse_int(std::string_view(qubits).substr(comma + 1), line_no)};
  }

  if (g.has_angle() == angle_text.empty()) throw fail(g.has_angle() ? "missing angle" : "unexpected angle");
  if (g.has_angle()) {
    std::size_t used = 0;
    try {
      g.angle = std::stod(angle_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != angle_text.size()) throw fail("bad angle '" + angle_text + "'");
  }
  return g;
}

}  // namespace detail

/// Parses circuit text. Blank lines and lines starting with '#' are
/// skipped. Without a QUBITS header the register is default_qubits wide.
inline Circuit read_circuit(std::istream& is, int default_qubits = 4) {
  std::string line;
  int line_no = 0;
  Circuit c(default_qubits);
  bool seen_gate = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (line.starts_with("QUBITS ")) {
      if (seen_gate) throw DomainError("line " + std::to_string(line_no) + ": QUBITS after gates");
      c = Circuit(detail::parse_int(std::string_view(line).substr(7), line_no));
      continue;
    }
    const Gate g = detail::parse_gate_line(line, line_no);
    try {
      c.append(g);
    } catch (const DomainError& e) {
      throw DomainError("line " + std::to_string(line_no) + ": " + e.what());
    }
    seen_gate = true;
  }
  return c;
}

inline Circuit circuit_from_text(const std::string& text, int default_qubits = 4) {
  std::istringstream is(text);
  return read_circuit(is, default_qubits);
}

}  // namespace qdmft
