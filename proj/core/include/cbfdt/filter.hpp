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

// Per-step safety filter:
//
//   u_s(x) = argmin_u  1/2 ||u - pi(x)||^2
//            s.t.      L_f h_i(x) + L_g h_i(x) u >= -gamma(h_i(x))   for every CBF h_i
//
// and the penalty-augmented variant that adds r / (2 w^2) ||u - pi_safe(x)||^2,
// w = ||L_g L_f^{s-1} h(x)||, with a hard switch to pi_safe when w <= eps.

#ifndef CBFDT_FILTER_HPP_
#define CBFDT_FILTER_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbfdt/cbf.hpp"
#include "cbfdt/dynamics.hpp"
#include "cbfdt/lie.hpp"
#include "cbfdt/types.hpp"

namespace cbfdt {

class Policy {
 public:
  enum class Kind { kZero, kConstant, kCustom };
  using Fn = std::function<InputVec(const StateVec&)>;

  static Policy zero(int input_dim);
  static Policy constant(InputVec value);
  static Policy custom(int input_dim, Fn fn, std::string name = "custom");

  InputVec operator()(const StateVec& x) const;

  Kind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  // Meaningful for kZero and kConstant.
  const InputVec& value() const { return value_; }
  const std::string& name() const { return name_; }

 private:
  Policy(Kind kind, int input_dim, InputVec value, Fn fn, std::string name);

  Kind kind_;
  int input_dim_;
  InputVec value_;
  Fn fn_;
  std::string name_;
};

struct InputBox {
  InputVec lower;
  InputVec upper;
};

// minimize 1/2 ||u - u_ref||^2  s.t.  constraints[i].coeff_u u >= constraints[i].lower_bound,
// optionally lower <= u <= upper.
struct QpInstance {
  InputVec u_ref;
  std::vector<LinearConstraint> constraints;
  std::optional<InputBox> box;
};

struct QpSolution {
  InputVec u;
  // One Lagrange multiplier per entry of QpInstance::constraints (box rows
  // are not reported).
  std::vector<double> multipliers;
  // True when at least one constraint multiplier is positive.
  bool active = false;
  int iterations = 0;
};

// Throws Infeasible when the feasible set is empty.
QpSolution solve_qp(const QpInstance& inst);

// Closed-loop reaction to an infeasible filter QP.
enum class InfeasiblePolicy { kHalt, kApplySafe };

struct FilterStrategy {
  enum class Kind { kNone, kStandard, kPenalty };

  Kind kind = Kind::kStandard;
  SafeSetSpec safe_set;
  ClassKappaE gamma = ClassKappaE::identity();
  // Penalty only.
  double r = 1.0;
  double eps = kSingularEps;
  // Backup policy: penalty fallback target, and the input applied under
  // InfeasiblePolicy::kApplySafe.
  std::optional<Policy> pi_safe;
  // Replaces the order-1 constraint of a single affine CBF on an LTI plant.
  std::optional<HocbfChain> hocbf;
  InfeasiblePolicy on_infeasible = InfeasiblePolicy::kHalt;
  // Disabled by default; the filter optimizes over all of R^m.
  std::optional<InputBox> input_box;

  static FilterStrategy none(SafeSetSpec safe_set, ClassKappaE gamma = ClassKappaE::identity());
  static FilterStrategy standard(SafeSetSpec safe_set, ClassKappaE gamma = ClassKappaE::identity());
  static FilterStrategy penalty(SafeSetSpec safe_set, ClassKappaE gamma, double r, double eps,
                                Policy pi_safe);

  // Throws InvalidArgument on inconsistent settings.
  void validate() const;
};

struct FilterDecision {
  InputVec u_out;
  bool active = false;
  bool fallback_engaged = false;
  // Lie data of the constraint with the smallest ||L_g h|| (lowest index on ties).
  LieData lie;
  // ||L_g L_f^{s-1} h||; equals lie.lg_norm unless an HOCBF chain is configured.
  double input_gain = 0.0;
  double objective_value = 0.0;
};

// One CBF condition per safe-set member, written as coeff_u u >= lower_bound.
struct CbfRow {
  LinearConstraint constraint;
  LieData lie;
};
std::vector<CbfRow> cbf_constraints(const ControlAffineSystem& sys, const FilterStrategy& strategy,
                                    const StateVec& x);

// Dispatches on strategy.kind; kNone passes u_proposed through.
FilterDecision apply_filter(const ControlAffineSystem& sys, const FilterStrategy& strategy,
                            const StateVec& x, const InputVec& u_proposed);

FilterDecision filter_standard(const ControlAffineSystem& sys, const FilterStrategy& strategy,
                               const Policy& pi, const StateVec& x);
FilterDecision filter_penalty(const ControlAffineSystem& sys, const FilterStrategy& strategy,
                              const Policy& pi, const StateVec& x);

// Unconstrained minimizer of the penalty objective:
// (pi + lambda pi_safe) / (1 + lambda), lambda = r / w^2.
InputVec penalty_target(const InputVec& pi, const InputVec& pi_safe, double r, double w);

}  // namespace cbfdt

#endif  // CBFDT_FILTER_HPP_
