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

// Trajectory CSV:
//
//   t,x1..xn,u1..um,u_proposed1..m,h_min,lg_norm,active,fallback
//
// Reals use 9 significant digits, flags are 0/1, LF line endings.

#ifndef CBFDT_TRAJECTORY_IO_HPP_
#define CBFDT_TRAJECTORY_IO_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "cbfdt/sim.hpp"

namespace cbfdt {

std::string format_real(double v);

std::string csv_header(int state_dim, int input_dim);
void write_csv(std::ostream& os, const Trajectory& traj);
std::string to_csv(const Trajectory& traj);

// Parses the format written by write_csv. Per-constraint h values collapse to
// the single recorded h_min.
Trajectory read_csv(std::istream& is);

struct SweepRow {
  double dt;
  Metrics metrics;
};
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace cbfdt

#endif  // CBFDT_TRAJECTORY_IO_HPP_
