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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qdmft/circuit_text.hpp"
#include "qdmft/trotter.hpp"

namespace qdmft {
namespace {

constexpr const char* kGoldenXyStep =
    "QUBITS 4\n"
    "RZ 0 -0.25\n"
    "RZ 2 -0.25\n"
    "RZ 1 -0.125\n"
    "RZ 3 -0.125\n"
    "ZZ 0,2 0.5\n"
    "XY 0,1 0.25\n"
    "XY 2,3 0.25\n";

constexpr const char* kGoldenCzStepHead =
    "QUBITS 4\n"
    "RZ 0 0\n"
    "RZ 2 0\n"
    "RZ 1 0\n"
    "RZ 3 0\n"
    "SWAP 1,2\n"
    "RX 1 3.1415926535897931\n"
    "CZPHI 0,1 0.5\n"
    "RX 1 3.1415926535897931\n"
    "RX 0 3.1415926535897931\n"
    "CZPHI 0,1 0.5\n"
    "RX 0 3.1415926535897931\n"
    "SWAP 1,2\n"
    "RX 0 1.5707963267948966\n";

TEST(CircuitText, GoldenXyStep) {
  EXPECT_EQ(to_text(build_xy_step({4, 1, 0.5, 1}, 0.25)), kGoldenXyStep);
}

TEST(CircuitText, GoldenCzStepPrefix) {
  const std::string text = to_text(build_cz_step({4, 2, 0, 1}, 0.25, Parity::odd, false));
  EXPECT_EQ(text.substr(0, std::string(kGoldenCzStepHead).size()), kGoldenCzStepHead);
}

TEST(CircuitText, RoundTripIsExact) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const SiamParams p{std::abs(d(rng)), d(rng), d(rng), std::abs(d(rng))};
    for (const TrotterPlan& plan :
         {TrotterPlan{TrotterMethod::xy, 3, 1.7, p}, TrotterPlan{TrotterMethod::cz, 4, 1.7, p, true}}) {
      const Circuit c = build_evolution(plan);
      const Circuit back = circuit_from_text(to_text(c));
      EXPECT_EQ(back, c);
    }
  }
}

TEST(CircuitText, AllGateNamesRoundTrip) {
  Circuit c(5);
  c.append(Gate::h(4)).append(Gate::rx(0, 0.1)).append(Gate::ry(1, -0.2)).append(Gate::rz(2, 1e-300));
  c.append(Gate::xy(0, 3, 2.5)).append(Gate::zz(1, 4, -7)).append(Gate::cz_phi(2, 3, 0.3)).append(Gate::swap(0, 4));
  c.append(Gate::controlled_pauli(4, 0, PauliAxis::x, 0)).append(Gate::controlled_pauli(4, 1, PauliAxis::y, 1));
  c.append(Gate::controlled_pauli(4, 2, PauliAxis::z, 1));
  const std::string text = to_text(c);
  EXPECT_NE(text.find("CPX0 4,0\n"), std::string::npos);
  EXPECT_NE(text.find("CPY1 4,1\n"), std::string::npos);
  EXPECT_NE(text.find("H 4\n"), std::string::npos);
  EXPECT_EQ(circuit_from_text(text), c);
}

TEST(CircuitText, SkipsCommentsAndDefaultsQubitCount) {
  const Circuit c = circuit_from_text("# comment\n\nRX 0 0.5\n  \nXY 1,2 1\n");
  EXPECT_EQ(c.n_qubits(), 4);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.gates()[1], Gate::xy(1, 2, 1.0));
}

TEST(CircuitText, MalformedLinesReportLineNumber) {
  const auto message = [](const std::string& text) {
    try {
      circuit_from_text(text);
    } catch (const DomainError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("QUBITS 4\nRX 0\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("FOO 0 1\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("H 0 0.5\n").find("unexpected angle"), std::string::npos);
  EXPECT_NE(message("XY 0 0.5\n").find("wrong number"), std::string::npos);
  EXPECT_NE(message("RX 0 abc\n").find("bad angle"), std::string::npos);
  EXPECT_NE(message("RX 7 0.1\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("RX 0 0.1\nQUBITS 4\n").find("QUBITS after gates"), std::string::npos);
  EXPECT_NE(message("CPX2 0,1\n").find("control value"), std::string::npos);
}

TEST(CircuitText, StreamWriter) {
  std::ostringstream os;
  write_circuit(os, build_xy_step({4, 1, 0.5, 1}, 0.25));
  EXPECT_EQ(os.str(), kGoldenXyStep);
}

}  // namespace
}  // namespace qdmft
