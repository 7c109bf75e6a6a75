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

// Sampled-data closed loop: the filter is evaluated at t_k = k dt and its
// output is held over [t_k, t_k + dt).

#ifndef CBFDT_SIM_HPP_
#define CBFDT_SIM_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbfdt/cbf.hpp"
#include "cbfdt/dynamics.hpp"
#include "cbfdt/filter.hpp"
#include "cbfdt/types.hpp"

namespace cbfdt {

// A failure at a specific closed-loop step: filter infeasibility under
// InfeasiblePolicy::kHalt, or a non-finite state.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

using System = std::variant<LtiSystem, ControlAffineSystem>;

inline constexpr double kDefaultChatterThreshold = 0.05;

struct Scenario {
  std::string name;
  System system;
  // Safe set, class-K_e function and filter variant. Kind::kNone runs the
  // uncertified policy while still recording h and ||L_g h||.
  FilterStrategy strategy;
  Policy pi;
  StateVec x0;
  double dt = 0.001;       // seconds
  double horizon = 15.0;   // seconds
  double chatter_threshold = kDefaultChatterThreshold;
  double singular_eps = kSingularEps;
  // Used by grid diagnostics only.
  std::optional<AdmissibleBox> box;

  int state_dim() const;
  int input_dim() const;
  ControlAffineSystem control_affine() const;
  // floor(horizon / dt), tolerant to representation error in the quotient.
  std::size_t step_count() const;
  // Throws InvalidArgument on inconsistent dimensions or parameters.
  void validate() const;
};

struct StepRecord {
  double t = 0.0;
  StateVec x;
  InputVec u_proposed;
  InputVec u_applied;
  // One entry per safe-set constraint.
  std::vector<double> h;
  double lg_norm = 0.0;
  bool active = false;
  bool fallback = false;

  double h_min() const;
};

struct Trajectory {
  std::vector<StepRecord> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  // Index of the first record with lg_norm <= threshold.
  std::optional<std::size_t> first_below(double lg_threshold) const;
};

struct Metrics {
  double min_h = 0.0;
  bool violated = false;
  double input_min = 0.0;
  double input_max = 0.0;
  double total_variation = 0.0;
  std::size_t chatter_count = 0;
  std::size_t steps_near_singular = 0;
  std::size_t fallback_steps = 0;
  std::size_t active_steps = 0;
};

// Chattering: sign changes between consecutive input increments whose
// magnitude exceeds `chatter_threshold`, counted per input channel. Only
// records from `from_step` on are considered.
Metrics compute_metrics(const Trajectory& traj, double chatter_threshold, double eps,
                        std::size_t from_step = 0);

struct RunResult {
  Trajectory trajectory;
  Metrics metrics;
  // Set when x0 lies outside the safe set.
  std::optional<std::string> warning;
};

// Deterministic: the same scenario always yields a bit-identical trajectory.
RunResult run(const Scenario& scn);

// Reruns `scn` at each sampling time; results are in input order.
std::vector<Metrics> dt_sweep(const Scenario& scn, const std::vector<double>& dts);

}  // namespace cbfdt

#endif  // CBFDT_SIM_HPP_
