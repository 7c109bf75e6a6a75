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

#include "cbfdt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

namespace cbfdt {

int Scenario::state_dim() const {
  return std::visit([](const auto& s) { return s.state_dim(); }, system);
}

int Scenario::input_dim() const {
  return std::visit([](const auto& s) { return s.input_dim(); }, system);
}

ControlAffineSystem Scenario::control_affine() const {
  if (const auto* lti = std::get_if<LtiSystem>(&system)) return ControlAffineSystem::from_lti(*lti);
  return std::get<ControlAffineSystem>(system);
}

std::size_t Scenario::step_count() const {
  return static_cast<std::size_t>(std::floor(horizon / dt * (1.0 + 1e-12)));
}

void Scenario::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be >= dt");
  const int n = state_dim();
  if (x0.size() != n || !x0.allFinite()) throw InvalidArgument("x0 must be finite with n entries");
  if (strategy.safe_set.state_dim() != n) throw InvalidArgument("safe set dimension differs from system");
  if (pi.input_dim() != input_dim()) throw InvalidArgument("policy input dimension differs from system");
  if (strategy.pi_safe && strategy.pi_safe->input_dim() != input_dim()) {
    throw InvalidArgument("backup policy input dimension differs from system");
  }
  if (!(chatter_threshold >= 0.0)) throw InvalidArgument("chatter_threshold must be nonnegative");
  if (!(singular_eps > 0.0)) throw InvalidArgument("singular eps must be positive");
  if (box && box->dim() != n) throw InvalidArgument("admissible box dimension differs from system");
  strategy.validate();
}

double StepRecord::h_min() const { return *std::min_element(h.begin(), h.end()); }

std::optional<std::size_t> Trajectory::first_below(double lg_threshold) const {
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].lg_norm <= lg_threshold) return k;
  }
  return std::nullopt;
}

Metrics compute_metrics(const Trajectory& traj, double chatter_threshold, double eps,
                        std::size_t from_step) {
  if (traj.empty()) throw InvalidArgument("cannot compute metrics of an empty trajectory");
  if (from_step >= traj.size()) throw InvalidArgument("from_step is past the end of the trajectory");

  Metrics m;
  m.min_h = std::numeric_limits<double>::infinity();
  m.input_min = std::numeric_limits<double>::infinity();
  m.input_max = -std::numeric_limits<double>::infinity();
  const Eigen::Index n_in = traj.steps[from_step].u_applied.size();
  // Sign of the last increment above threshold, per channel (0 = none yet).
  std::vector<int> last_sign(static_cast<std::size_t>(n_in), 0);

  for (std::size_t k = from_step; k < traj.size(); ++k) {
    const StepRecord& r = traj.steps[k];
    m.min_h = std::min(m.min_h, r.h_min());
    m.input_min = std::min(m.input_min, r.u_applied.minCoeff());
    m.input_max = std::max(m.input_max, r.u_applied.maxCoeff());
    if (r.lg_norm <= eps) ++m.steps_near_singular;
    if (r.fallback) ++m.fallback_steps;
    if (r.active) ++m.active_steps;
    if (k == from_step) continue;

    const InputVec du = r.u_applied - traj.steps[k - 1].u_applied;
    m.total_variation += du.lpNorm<1>();
    for (Eigen::Index j = 0; j < n_in; ++j) {
      if (std::abs(du(j)) <= chatter_threshold) continue;
      const int sign = du(j) > 0.0 ? 1 : -1;
      auto& last = last_sign[static_cast<std::size_t>(j)];
      if (last != 0 && sign != last) ++m.chatter_count;
      last = sign;
    }
  }
  m.violated = m.min_h < 0.0;
  return m;
}

RunResult run(const Scenario& scn) {
  scn.validate();
  const ControlAffineSystem dyn = scn.control_affine();
  const LtiSystem* lti = std::get_if<LtiSystem>(&scn.system);
  std::optional<ZohStepper> zoh;
  if (lti != nullptr) zoh.emplace(*lti, scn.dt);

  RunResult out;
  if (!scn.strategy.safe_set.contains(scn.x0)) {
    out.warning = "x0 lies outside the safe set (h_min = " +
                  std::to_string(scn.strategy.safe_set.h_min(scn.x0)) + ")";
  }

  const std::size_t n_steps = scn.step_count();
  auto& steps = out.trajectory.steps;
  steps.reserve(n_steps + 1);

  StateVec x = scn.x0;
  for (std::size_t k = 0; k <= n_steps; ++k) {
    StepRecord rec;
    rec.t = static_cast<double>(k) * scn.dt;
    rec.x = x;
    rec.u_proposed = scn.pi(x);
    FilterDecision d;
    try {
      d = apply_filter(dyn, scn.strategy, x, rec.u_proposed);
    } catch (const Infeasible& e) {
      throw SimulationError("filter infeasible at step " + std::to_string(k) + " (t = " +
                                std::to_string(rec.t) + "): " + e.what(),
                            k);
    }
    rec.u_applied = d.u_out;
    rec.h = scn.strategy.safe_set.h_values(x);
    rec.lg_norm = d.lie.lg_norm;
    rec.active = d.active;
    rec.fallback = d.fallback_engaged;
    if (!rec.u_applied.allFinite()) {
      throw SimulationError("non-finite input at step " + std::to_string(k), k);
    }

    if (k < n_steps) {
      x = zoh ? zoh->step(x, rec.u_applied) : step_rk4(dyn, x, rec.u_applied, scn.dt);
      if (!x.allFinite()) {
        throw SimulationError("state diverged at step " + std::to_string(k + 1), k + 1);
      }
    }
    steps.push_back(std::move(rec));
  }

  out.metrics = compute_metrics(out.trajectory, scn.chatter_threshold, scn.singular_eps);
  return out;
}

std::vector<Metrics> dt_sweep(const Scenario& scn, const std::vector<double>& dts) {
  if (dts.empty()) throw InvalidArgument("dt sweep needs at least one sampling time");
  std::vector<std::future<Metrics>> jobs;
  jobs.reserve(dts.size());
  for (double dt : dts) {
    Scenario s = scn;
    s.dt = dt;
    jobs.push_back(std::async(std::launch::async, [s = std::move(s)] { return run(s).metrics; }));
  }
  std::vector<Metrics> out;
  out.reserve(dts.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace cbfdt
