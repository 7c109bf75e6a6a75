// Copyright 2026 The cbfdt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference scenarios.
//
//   sim-*   identified planar quadrotor model, ellipsoid centred at the
//           origin, dt = 1 ms, 15 s.
//   real-*  z-axis double integrator in delta-thrust, ellipsoid centred at
//           z = 1.125 m, dt = 0.167 s, 30 s.

#ifndef CBFDT_PRESETS_HPP_
#define CBFDT_PRESETS_HPP_

#include <string>
#include <vector>

#include "cbfdt/cbf.hpp"
#include "cbfdt/dynamics.hpp"
#include "cbfdt/sim.hpp"

namespace cbfdt::presets {

inline constexpr double kQuadMass = 0.033;  // kg
inline constexpr double kGravity = 9.81;    // m/s^2

// x' = [[0, 1], [-0.09, 0.10]] x + [0; 18.09] u
LtiSystem sim_system();
// x' = [[0, 1], [0, 0]] x + [0; 30.30] u
LtiSystem real_system();

// beta = 1, P = diag(1.31, 4.00), centred at `center`.
QuadraticCbf ellipse(const StateVec& center);

// Seven half-spaces inscribed in the sim ellipse, none with p^T B = 0.
CbfSet sim_polytope();
// Five half-spaces inscribed in the real ellipse, none with p^T B = 0.
CbfSet real_polytope();

AdmissibleBox sim_box();
AdmissibleBox real_box();

std::vector<std::string> names();
// Throws InvalidArgument listing the valid names for an unknown preset.
Scenario preset(const std::string& name);

}  // namespace cbfdt::presets

#endif  // CBFDT_PRESETS_HPP_
