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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "cbfdt/cbf.hpp"
#include "cbfdt/dynamics.hpp"
#include "cbfdt/filter.hpp"
#include "cbfdt/lie.hpp"
#include "cbfdt/presets.hpp"
#include "cbfdt/sim.hpp"
#include "cbfdt/trajectory_io.hpp"
#include "support/oracles.hpp"

namespace cbfdt {
namespace {

using ::cbfdt::testing::fd_gradient;
using ::cbfdt::testing::grid_oracle;
using ::cbfdt::testing::penalty_objective;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

StateVec v2(double a, double b) {
  StateVec v(2);
  v << a, b;
  return v;
}

bool within_pct(double value, double target, double pct) {
  return std::abs(value - target) <= pct * std::abs(target);
}

// Standard filter on the ellipse: leaves the set, chatters near the singular
// line and spans the reported input range.
Check standard_filter_failure() {
  Check c;
  const Scenario s = presets::preset("sim-standard");
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto entry = r.trajectory.first_below(1e-3);
  std::size_t flips = 0;
  if (entry) flips = compute_metrics(r.trajectory, 0.05, s.singular_eps, *entry).chatter_count;
  c.detail << "min_h=" << r.metrics.min_h << " flips_after_entry=" << flips
           << " input=[" << r.metrics.input_min << ", " << r.metrics.input_max << "]"
           << " steps=" << r.trajectory.size() << " runtime=" << secs << "s";
  c.require(r.metrics.violated, "violated");
  c.require(entry.has_value(), "reaches lg_norm <= 1e-3");
  c.require(flips >= 10, ">= 10 sign flips after entry");
  c.require(within_pct(r.metrics.input_min, -3.20, 0.25), "input_min within 25% of -3.20");
  c.require(within_pct(r.metrics.input_max, 2.04, 0.25), "input_max within 25% of 2.04");
  c.require(r.trajectory.size() == 15001, "15001 records");
  c.require(secs <= 10.0, "runtime <= 10 s");
  return c;
}

Check uncertified_baseline() {
  Check c;
  const RunResult r = run(presets::preset("sim-uncertified"));
  c.detail << "min_h=" << r.metrics.min_h;
  c.require(r.metrics.violated, "violated");
  return c;
}

Check penalty_filter() {
  Check c;
  const Scenario s = presets::preset("sim-penalty");
  const RunResult r = run(s);
  double min_w = INFINITY;
  for (const auto& rec : r.trajectory.steps) min_w = std::min(min_w, rec.lg_norm);
  c.detail << "min_h=" << r.metrics.min_h << " fallback_steps=" << r.metrics.fallback_steps
           << " chatter=" << r.metrics.chatter_count << " min_lg_norm=" << min_w
           << " horizon=" << r.trajectory.steps.back().t;
  c.require(s.strategy.r == 1.0 && s.strategy.eps == 1e-8, "r = 1, eps = 1e-8");
  c.require(!r.metrics.violated, "not violated");
  c.require(r.trajectory.steps.back().t >= 15.0 - 1e-9, "full 15 s");
  c.require(r.metrics.fallback_steps >= 1, "fallback engaged at >= 1 step");
  c.require(compute_metrics(r.trajectory, 0.05, s.singular_eps).chatter_count == 0, "chatter = 0");
  return c;
}

Check transformed_cbf() {
  Check c;
  const Scenario s = presets::preset("sim-transformed");
  const RunResult r = run(s);
  const auto orig = ControlAffineSystem::from_lti(presets::sim_system());
  const Cbf original(presets::ellipse(v2(0.0, 0.0)));
  std::size_t near = 0;
  double min_orig = INFINITY;
  for (const auto& rec : r.trajectory.steps) {
    const double lg = lie_derivatives(orig, original, rec.x).lg_norm;
    min_orig = std::min(min_orig, lg);
    if (lg <= 1e-3) ++near;
  }
  const auto* t = s.strategy.safe_set.single()->get_if<TransformedCbf>();
  c.detail << "min_h_transformed=" << r.metrics.min_h << " steps_original_lg<=1e-3=" << near
           << " min_original_lg=" << min_orig << " chatter=" << r.metrics.chatter_count;
  c.require(t != nullptr, "transformed CBF");
  if (t != nullptr) {
    c.require((t->R - make_rotation_2d(std::numbers::pi / 6.0)).norm() == 0.0, "theta = pi/6");
    c.require(t->delta.norm() == 0.0, "delta = 0");
  }
  c.require(!r.metrics.violated, "transformed h >= 0 at every step");
  c.require(near >= 1, ">= 1 step with original lg_norm <= 1e-3");
  c.require(r.metrics.chatter_count == 0, "chatter = 0");
  return c;
}

Check affine_polytope() {
  Check c;
  const Scenario s = presets::preset("sim-affine");
  const CbfSet& poly = *s.strategy.safe_set.polytope();
  const LtiSystem sys = presets::sim_system();
  double min_pb = INFINITY;
  for (const auto& m : poly.members()) min_pb = std::min(min_pb, std::abs((m.p.transpose() * sys.B())(0, 0)));
  const RunResult r = run(s);
  double min_member = INFINITY;
  for (const auto& rec : r.trajectory.steps) {
    for (double h : rec.h) min_member = std::min(min_member, h);
  }
  const InnerCheckReport inner =
      polytope_inner_check(poly, Cbf(presets::ellipse(v2(0.0, 0.0))), presets::sim_box(), 201);
  c.detail << "members=" << poly.size() << " min|p^T B|=" << min_pb << " min_member_h=" << min_member
           << " inner_violations=" << inner.violations.size() << " of " << inner.points_checked;
  c.require(poly.size() == 7, "7 members");
  c.require(min_pb > 1e-3, "all |p_i^T B| > 1e-3");
  c.require(min_member >= 0.0, "all member h >= 0");
  c.require(inner.empty() && inner.points_checked == 201u * 201u, "inner check empty at 201x201");
  return c;
}

Check qp_oracle() {
  Check c;
  std::mt19937 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> mid(-5.0, 5.0);
  const double step = 1e-4;
  double worst = 0.0;
  double worst_slack = 0.0;
  int n = 0;
  double min_a = INFINITY;
  double max_a = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double mag = std::pow(10.0, -6.0 + 8.0 * unit(rng));
    const double a = unit(rng) < 0.5 ? -mag : mag;
    const double b = a * mid(rng);
    const double pi = mid(rng);
    min_a = std::min(min_a, mag);
    max_a = std::max(max_a, mag);
    std::function<double(double)> obj = [pi](double u) { return 0.5 * (u - pi) * (u - pi); };
    InputVec target = InputVec::Constant(1, pi);
    if (trial % 2 == 1) {
      const double r = 0.1 + unit(rng);
      const double w = 0.05 + 3.0 * unit(rng);
      obj = penalty_objective(pi, 0.0, r, w);
      target = penalty_target(target, InputVec::Zero(1), r, w);
    }
    const QpSolution s = solve_qp({target, {{InputRow::Constant(1, a), b}}, std::nullopt});
    const auto ref = grid_oracle(obj, {{a, b}}, -10.0, 10.0, step);
    if (!ref) {
      c.require(false, "oracle found no feasible point");
      continue;
    }
    worst = std::max(worst, std::abs(s.u(0) - ref->u));
    if (s.active) worst_slack = std::max(worst_slack, std::abs(a * s.u(0) - b));
    ++n;
  }
  c.detail << "instances=" << n << " |a| in [" << min_a << ", " << max_a << "] max|u-oracle|=" << worst
           << " max_active_residual=" << worst_slack;
  c.require(n >= 1000, ">= 1000 instances");
  c.require(worst <= step, "agreement within grid step 1e-4");
  c.require(worst_slack <= 1e-8, "complementary slackness 1e-8");
  return c;
}

Check gradients_and_lie() {
  Check c;
  const LtiSystem sys = presets::sim_system();
  const auto ca = ControlAffineSystem::from_lti(sys);
  const QuadraticCbf q = presets::ellipse(v2(0.0, 0.0));
  const Cbf quad(q);
  const Cbf aff(AffineCbf(v2(0.6, -0.8), 0.3));
  const Cbf rot = transform(quad, make_rotation_2d(std::numbers::pi / 6.0), v2(0.1, -0.05));
  const CbfSet poly = presets::sim_polytope();
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> d(-0.9, 0.9);
  double worst_grad = 0.0;
  double worst_lie = 0.0;
  bool exact = true;
  auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-3);
  };
  for (int i = 0; i < 100; ++i) {
    const StateVec x = v2(d(rng), 0.6 * d(rng));
    for (const Cbf* cbf : {&quad, &aff, &rot}) {
      const auto f = [&](const Eigen::VectorXd& y) { return h_value(*cbf, y); };
      worst_grad = std::max(worst_grad, rel(h_grad(*cbf, x), fd_gradient(f, x)));
      const LieData lie = lie_derivatives(ca, *cbf, x);
      const double tau = 1e-6;
      const StateVec fx = ca.f(x);
      const StateVec gx = ca.g(x).col(0);
      const double lf = (f(x + tau * fx) - f(x - tau * fx)) / (2 * tau);
      const double lg = (f(x + tau * gx) - f(x - tau * gx)) / (2 * tau);
      worst_lie = std::max(worst_lie, std::abs(lie.lf_h - lf) / std::max(std::abs(lf), 1e-3));
      worst_lie = std::max(worst_lie, std::abs(lie.lg_h(0) - lg) / std::max(std::abs(lg), 1e-3));
    }
    // Member gradient, differentiated on the active member away from kinks.
    const std::size_t k = poly.active_index(x);
    const Cbf member(poly.members()[k]);
    worst_grad = std::max(worst_grad, rel(poly.h_grad(x), fd_gradient([&](const Eigen::VectorXd& y) {
                                                      return h_value(member, y);
                                                    }, x)));
    const LieData a = quadratic_lie_closed_form(sys, q, x);
    const LieData b = lie_derivatives(ca, quad, x);
    exact = exact && a.lf_h == b.lf_h && a.lg_h == b.lg_h;
  }
  c.detail << "max_rel_grad_err=" << worst_grad << " max_rel_lie_err=" << worst_lie
           << " closed_form_exact=" << (exact ? "yes" : "no");
  c.require(worst_grad <= 1e-6, "gradient rel err <= 1e-6");
  c.require(worst_lie <= 1e-6, "Lie derivative rel err <= 1e-6");
  c.require(exact, "closed form equals generic path exactly");
  return c;
}

Check relative_degree() {
  Check c;
  const auto real = global_relative_degree_affine_lti(presets::real_system(), AffineCbf(v2(1.0, 0.0), 0.0), 1e-8);
  const auto sim = global_relative_degree_affine_lti(presets::sim_system(), AffineCbf(v2(0.0, 1.0), 0.0), 1e-8);
  double worst = 0.0;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const auto ca = ControlAffineSystem::from_lti(presets::sim_system());
  for (int i = 0; i < 100; ++i) {
    const AffineCbf a(v2(d(rng), 0.2 + std::abs(d(rng))), d(rng));
    const double k = 0.1 + 2.0 * std::abs(d(rng));
    const HocbfChain chain(presets::sim_system(), a, {k});
    const StateVec x = v2(d(rng), d(rng));
    const LinearConstraint h = hocbf_constraint(chain, x);
    const auto rows = cbf_constraints(ca, FilterStrategy::standard(Cbf(a), ClassKappaE::linear(k)), x);
    worst = std::max(worst, std::abs(h.coeff_u(0) - rows[0].constraint.coeff_u(0)));
    worst = std::max(worst, std::abs(h.lower_bound - rows[0].constraint.lower_bound));
  }
  c.detail << "real p=[1,0] s=" << (real.s ? std::to_string(*real.s) : "undetermined")
           << " sim p=[0,1] s=" << (sim.s ? std::to_string(*sim.s) : "undetermined")
           << " max|hocbf - standard|=" << worst;
  c.require(real.s && *real.s == 2, "s = 2 on double integrator");
  c.require(sim.s && *sim.s == 1, "s = 1 on simulation plant");
  c.require(worst <= 1e-12, "HOCBF s = 1 equals standard within 1e-12");
  return c;
}

Check discretization() {
  Check c;
  double worst = 0.0;
  for (const LtiSystem& sys : {presets::sim_system(), presets::real_system()}) {
    const double dt = 0.01;
    const double u = -0.1;
    const ZohStepper zoh(sys, dt);
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    M.topLeftCorner(2, 2) = sys.A();
    M.topRightCorner(2, 1) = sys.B();
    StateVec x = v2(0.5, -0.1);
    for (int k = 1; k <= 1000; ++k) {
      x = zoh.step(x, InputVec::Constant(1, u));
      Eigen::Vector3d z0(0.5, -0.1, u);
      const Eigen::Matrix3d E = (M * (k * dt)).exp();
      const Eigen::Vector3d z = E * z0;
      worst = std::max(worst, (x - z.head(2)).norm() / std::max(1.0, z.head(2).norm()));
    }
  }
  const LtiSystem sys = presets::sim_system();
  const auto ca = ControlAffineSystem::from_lti(sys);
  const StateVec x0 = v2(0.5, -0.1);
  const InputVec u = InputVec::Constant(1, -0.1);
  auto err = [&](double dt) { return (step_rk4(ca, x0, u, dt) - step_exact(sys, x0, u, dt)).norm(); };
  const double ratio = err(0.2) / err(0.1);
  c.detail << "max_step_err=" << worst << " rk4_ratio=" << ratio;
  c.require(worst <= 1e-9, "ZOH matches analytic solution within 1e-9 per step");
  c.require(std::abs(ratio - 32.0) <= 0.2 * 32.0, "RK4 error ratio 32 +- 20%");
  return c;
}

Check determinism() {
  Check c;
  std::size_t same = 0;
  const auto names = presets::names();
  for (const std::string& n : names) {
    const Scenario s = presets::preset(n);
    if (to_csv(run(s).trajectory) == to_csv(run(s).trajectory)) {
      ++same;
    } else {
      c.detail << " differs:" << n;
    }
  }
  c.detail << "identical=" << same << "/" << names.size();
  c.require(same == names.size(), "byte-identical CSV for every preset");
  return c;
}

Check real_presets() {
  Check c;
  for (const char* n : {"real-penalty", "real-transformed"}) {
    const Scenario s = presets::preset(n);
    const RunResult r = run(s);
    c.detail << n << ": min_h=" << r.metrics.min_h << " dt=" << s.dt << " horizon=" << s.horizon
             << " last_sample=" << r.trajectory.steps.back().t << "; ";
    c.require(s.dt == 0.167 && s.horizon == 30.0, std::string(n) + " dt and horizon");
    c.require(!r.metrics.violated, std::string(n) + " not violated");
  }
  return c;
}

}  // namespace
}  // namespace cbfdt

int main() {
  using namespace cbfdt;
  struct Criterion {
    const char* id;
    const char* name;
    Check (*fn)();
  };
  const Criterion criteria[] = {
      {"1", "standard filter failure on the ellipse", standard_filter_failure},
      {"2", "uncertified baseline leaves the safe set", uncertified_baseline},
      {"3", "penalty objective stays safe without chattering", penalty_filter},
      {"4", "rotated CBF passes the singular region safely", transformed_cbf},
      {"5", "affine inner approximation", affine_polytope},
      {"6", "QP agrees with grid oracle", qp_oracle},
      {"7", "gradients and Lie derivatives", gradients_and_lie},
      {"8", "relative degree and HOCBF reduction", relative_degree},
      {"9", "discretization exactness and RK4 order", discretization},
      {"10", "deterministic CSV output", determinism},
      {"R", "double-integrator presets stay safe", real_presets},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    try {
      c = cr.fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    if (!c.ok) ++failed;
    std::printf("%s [%s] %s: %s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.name, c.detail.str().c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
