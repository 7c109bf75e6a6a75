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

#include "cbfdt/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace cbfdt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Residual tolerance below which a constraint counts as satisfied.
double feas_tol(const LinearConstraint& c) {
  return 1e-12 * std::max(1.0, std::abs(c.lower_bound));
}

void validate_instance(const QpInstance& inst) {
  const Eigen::Index m = inst.u_ref.size();
  if (m == 0 || !inst.u_ref.allFinite()) throw InvalidArgument("QP target must be finite and nonempty");
  for (const auto& c : inst.constraints) {
    if (c.coeff_u.size() != m) throw InvalidArgument("QP constraint row has wrong length");
    if (!c.coeff_u.allFinite() || !std::isfinite(c.lower_bound)) {
      throw InvalidArgument("QP constraint coefficients must be finite");
    }
  }
  if (inst.box) {
    if (inst.box->lower.size() != m || inst.box->upper.size() != m) {
      throw InvalidArgument("QP input box has wrong length");
    }
    if ((inst.box->lower.array() > inst.box->upper.array()).any()) {
      throw Infeasible("input box is empty", -1, (inst.box->lower - inst.box->upper).maxCoeff());
    }
  }
}

// m = 1: intersect the half-lines a u >= b, then clamp the target.
QpSolution solve_scalar(const QpInstance& inst) {
  const auto& cons = inst.constraints;
  double lo = -kInf;
  double hi = kInf;
  int lo_idx = -1;
  int hi_idx = -1;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const double a = cons[i].coeff_u(0);
    const double b = cons[i].lower_bound;
    if (a > 0.0) {
      if (b / a > lo) {
        lo = b / a;
        lo_idx = static_cast<int>(i);
      }
    } else if (a < 0.0) {
      if (b / a < hi) {
        hi = b / a;
        hi_idx = static_cast<int>(i);
      }
    } else if (b > 0.0) {
      throw Infeasible("constraint " + std::to_string(i) + " reads 0 * u >= " + std::to_string(b),
                       static_cast<int>(i), b);
    }
  }
  if (inst.box) {
    if (inst.box->lower(0) > lo) {
      lo = inst.box->lower(0);
      lo_idx = -1;
    }
    if (inst.box->upper(0) < hi) {
      hi = inst.box->upper(0);
      hi_idx = -1;
    }
  }
  if (lo > hi) {
    const int idx = lo_idx >= 0 ? lo_idx : hi_idx;
    throw Infeasible("empty feasible interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
                     idx, lo - hi);
  }

  QpSolution sol;
  sol.multipliers.assign(cons.size(), 0.0);
  const double target = inst.u_ref(0);
  double u = target;
  if (target < lo) {
    u = lo;
    if (lo_idx >= 0) sol.multipliers[lo_idx] = (u - target) / cons[lo_idx].coeff_u(0);
  } else if (target > hi) {
    u = hi;
    if (hi_idx >= 0) sol.multipliers[hi_idx] = (u - target) / cons[hi_idx].coeff_u(0);
  }
  sol.u = InputVec::Constant(1, u);
  sol.active = (lo_idx >= 0 && target < lo) || (hi_idx >= 0 && target > hi);
  return sol;
}

// Single constraint, no box: Euclidean projection onto one half-space.
QpSolution solve_single(const QpInstance& inst) {
  const LinearConstraint& c = inst.constraints.front();
  QpSolution sol;
  sol.multipliers.assign(1, 0.0);
  const double residual = c.lower_bound - c.coeff_u.dot(inst.u_ref.transpose());
  const double aa = c.coeff_u.squaredNorm();
  if (aa == 0.0) {
    if (c.lower_bound > 0.0) {
      throw Infeasible("constraint 0 reads 0 * u >= " + std::to_string(c.lower_bound), 0,
                       c.lower_bound);
    }
    sol.u = inst.u_ref;
    return sol;
  }
  const double step = std::max(0.0, residual) / aa;
  sol.u = inst.u_ref + step * c.coeff_u.transpose();
  sol.multipliers[0] = step;
  sol.active = step > 0.0;
  return sol;
}

// Dual active-set method of Goldfarb and Idnani specialised to an identity
// Hessian. Starts at the unconstrained minimizer and adds the most violated
// constraint (lowest index on ties) until primal feasibility.
QpSolution solve_active_set(const QpInstance& inst) {
  const Eigen::Index m = inst.u_ref.size();
  std::vector<LinearConstraint> rows = inst.constraints;
  const std::size_t n_cbf = rows.size();
  if (inst.box) {
    for (Eigen::Index j = 0; j < m; ++j) {
      InputRow e = InputRow::Zero(m);
      e(j) = 1.0;
      if (std::isfinite(inst.box->lower(j))) rows.push_back({e, inst.box->lower(j)});
      if (std::isfinite(inst.box->upper(j))) rows.push_back({-e, -inst.box->upper(j)});
    }
  }
  const std::size_t n_rows = rows.size();

  InputVec u = inst.u_ref;
  std::vector<std::size_t> active;
  std::vector<double> lambda;
  std::vector<bool> in_active(n_rows, false);

  const int max_iter = static_cast<int>(10 * (n_rows + 1) * (n_rows + 1));
  int iter = 0;
  auto slack = [&](std::size_t j) { return rows[j].coeff_u.dot(u.transpose()) - rows[j].lower_bound; };

  while (true) {
    // Pick the most violated inactive constraint.
    std::size_t p = n_rows;
    double worst = 0.0;
    for (std::size_t j = 0; j < n_rows; ++j) {
      if (in_active[j]) continue;
      const double s = slack(j);
      if (s < -feas_tol(rows[j]) && s < worst) {
        worst = s;
        p = j;
      }
    }
    if (p == n_rows) break;

    const Eigen::VectorXd np = rows[p].coeff_u.transpose();
    double lambda_p = 0.0;
    while (true) {
      if (++iter > max_iter) {
        throw Infeasible("active-set iteration limit reached", static_cast<int>(p), -slack(p));
      }
      const Eigen::Index k_act = static_cast<Eigen::Index>(active.size());
      Eigen::VectorXd r = Eigen::VectorXd::Zero(k_act);
      Eigen::VectorXd z = np;
      if (k_act > 0) {
        Matrix N(m, k_act);
        for (Eigen::Index c = 0; c < k_act; ++c) N.col(c) = rows[active[c]].coeff_u.transpose();
        r = (N.transpose() * N).ldlt().solve(N.transpose() * np);
        z = np - N * r;
      }

      // Largest dual step keeping the active multipliers nonnegative.
      double t1 = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index c = 0; c < k_act; ++c) {
        if (r(c) > 0.0 && lambda[c] / r(c) < t1) {
          t1 = lambda[c] / r(c);
          drop = c;
        }
      }

      const bool z_zero = z.squaredNorm() <= 1e-14 * std::max(np.squaredNorm(), 1e-300);
      if (z_zero) {
        if (drop < 0) {
          throw Infeasible("constraint " + std::to_string(p) +
                               " cannot be satisfied together with the active set",
                           static_cast<int>(p), -slack(p));
        }
        for (Eigen::Index c = 0; c < k_act; ++c) lambda[c] -= t1 * r(c);
        lambda_p += t1;
        in_active[active[drop]] = false;
        active.erase(active.begin() + drop);
        lambda.erase(lambda.begin() + drop);
        continue;
      }

      const double t2 = -slack(p) / z.dot(np);
      const double t = std::min(t1, t2);
      u += t * z;
      for (Eigen::Index c = 0; c < k_act; ++c) lambda[c] -= t * r(c);
      lambda_p += t;
      if (t2 <= t1) {
        active.push_back(p);
        lambda.push_back(lambda_p);
        in_active[p] = true;
        break;
      }
      in_active[active[drop]] = false;
      active.erase(active.begin() + drop);
      lambda.erase(lambda.begin() + drop);
    }
  }

  QpSolution sol;
  sol.u = u;
  sol.iterations = iter;
  sol.multipliers.assign(n_cbf, 0.0);
  for (std::size_t c = 0; c < active.size(); ++c) {
    if (active[c] < n_cbf) {
      sol.multipliers[active[c]] = lambda[c];
      if (lambda[c] > 0.0) sol.active = true;
    }
  }
  return sol;
}

int input_dim_of(const ControlAffineSystem& sys, const InputVec& u) {
  if (u.size() != sys.input_dim()) throw InvalidArgument("proposed input has wrong dimension");
  return sys.input_dim();
}

Policy backup_policy(const FilterStrategy& strategy, int m) {
  return strategy.pi_safe ? *strategy.pi_safe : Policy::zero(m);
}

std::size_t weakest_row(const std::vector<CbfRow>& rows) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].lie.lg_norm < rows[best].lie.lg_norm) best = i;
  }
  return best;
}

double input_gain(const std::vector<CbfRow>& rows) {
  double w = kInf;
  for (const auto& row : rows) w = std::min(w, row.constraint.coeff_u.norm());
  return w;
}

FilterDecision solve_filter_qp(const FilterStrategy& strategy, const std::vector<CbfRow>& rows,
                               const InputVec& target, const InputVec& u_proposed) {
  QpInstance inst;
  inst.u_ref = target;
  inst.box = strategy.input_box;
  inst.constraints.reserve(rows.size());
  for (const auto& row : rows) inst.constraints.push_back(row.constraint);
  const QpSolution sol = solve_qp(inst);

  FilterDecision d;
  d.u_out = sol.u;
  d.active = sol.active;
  d.lie = rows[weakest_row(rows)].lie;
  d.input_gain = input_gain(rows);
  d.objective_value = 0.5 * (sol.u - u_proposed).squaredNorm();
  return d;
}

}  // namespace

Policy::Policy(Kind kind, int input_dim, InputVec value, Fn fn, std::string name)
    : kind_(kind), input_dim_(input_dim), value_(std::move(value)), fn_(std::move(fn)),
      name_(std::move(name)) {}

Policy Policy::zero(int input_dim) {
  if (input_dim <= 0) throw InvalidArgument("policy input dimension must be positive");
  return Policy(Kind::kZero, input_dim, InputVec::Zero(input_dim), nullptr, "zero");
}

Policy Policy::constant(InputVec value) {
  if (value.size() == 0 || !value.allFinite()) {
    throw InvalidArgument("constant policy value must be finite and nonempty");
  }
  const int m = static_cast<int>(value.size());
  return Policy(Kind::kConstant, m, std::move(value), nullptr, "constant");
}

Policy Policy::custom(int input_dim, Fn fn, std::string name) {
  if (input_dim <= 0 || !fn) throw InvalidArgument("custom policy needs a dimension and evaluator");
  return Policy(Kind::kCustom, input_dim, InputVec(), std::move(fn), std::move(name));
}

InputVec Policy::operator()(const StateVec& x) const {
  if (kind_ != Kind::kCustom) return value_;
  InputVec u = fn_(x);
  if (u.size() != input_dim_) throw InvalidArgument("policy '" + name_ + "' returned wrong dimension");
  return u;
}

QpSolution solve_qp(const QpInstance& inst) {
  validate_instance(inst);
  if (inst.u_ref.size() == 1) return solve_scalar(inst);
  if (inst.constraints.empty() && !inst.box) {
    QpSolution sol;
    sol.u = inst.u_ref;
    return sol;
  }
  if (inst.constraints.size() == 1 && !inst.box) return solve_single(inst);
  return solve_active_set(inst);
}

namespace {

FilterStrategy make_strategy(FilterStrategy::Kind kind, SafeSetSpec safe_set, ClassKappaE gamma) {
  return FilterStrategy{kind,         std::move(safe_set), gamma,
                        1.0,          kSingularEps,        std::nullopt,
                        std::nullopt, InfeasiblePolicy::kHalt, std::nullopt};
}

}  // namespace

FilterStrategy FilterStrategy::none(SafeSetSpec safe_set, ClassKappaE gamma) {
  return make_strategy(Kind::kNone, std::move(safe_set), gamma);
}

FilterStrategy FilterStrategy::standard(SafeSetSpec safe_set, ClassKappaE gamma) {
  return make_strategy(Kind::kStandard, std::move(safe_set), gamma);
}

FilterStrategy FilterStrategy::penalty(SafeSetSpec safe_set, ClassKappaE gamma, double r,
                                       double eps, Policy pi_safe) {
  FilterStrategy s = make_strategy(Kind::kPenalty, std::move(safe_set), gamma);
  s.r = r;
  s.eps = eps;
  s.pi_safe = std::move(pi_safe);
  s.validate();
  return s;
}

void FilterStrategy::validate() const {
  if (kind == Kind::kPenalty) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("penalty weight r must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("penalty eps must be positive");
    if (!pi_safe) throw InvalidArgument("penalty strategy requires a backup policy pi_safe");
  }
  if (hocbf) {
    const Cbf* c = safe_set.single();
    if (c == nullptr || c->get_if<AffineCbf>() == nullptr) {
      throw Unsupported("HOCBF constraints require a single affine CBF");
    }
    const AffineCbf& a = *c->get_if<AffineCbf>();
    if (a.p != hocbf->cbf().p || a.b != hocbf->cbf().b) {
      throw InvalidArgument("HOCBF chain was built for a different CBF than the safe set");
    }
  }
  if (input_box && (input_box->lower.size() != input_box->upper.size())) {
    throw InvalidArgument("input box bounds differ in length");
  }
}

std::vector<CbfRow> cbf_constraints(const ControlAffineSystem& sys, const FilterStrategy& strategy,
                                    const StateVec& x) {
  std::vector<CbfRow> rows;
  for (const Cbf& cbf : strategy.safe_set.constraints()) {
    CbfRow row;
    row.lie = lie_derivatives(sys, cbf, x);
    row.constraint.coeff_u = row.lie.lg_h;
    row.constraint.lower_bound = -strategy.gamma(h_value(cbf, x)) - row.lie.lf_h;
    rows.push_back(std::move(row));
  }
  if (strategy.hocbf) rows.front().constraint = hocbf_constraint(*strategy.hocbf, x);
  return rows;
}

InputVec penalty_target(const InputVec& pi, const InputVec& pi_safe, double r, double w) {
  const double lambda = r / (w * w);
  return (pi + lambda * pi_safe) / (1.0 + lambda);
}

FilterDecision apply_filter(const ControlAffineSystem& sys, const FilterStrategy& strategy,
                            const StateVec& x, const InputVec& u_proposed) {
  const int m = input_dim_of(sys, u_proposed);
  if (!x.allFinite()) throw InvalidArgument("filter called with a non-finite state");
  const std::vector<CbfRow> rows = cbf_constraints(sys, strategy, x);

  if (strategy.kind == FilterStrategy::Kind::kNone) {
    FilterDecision d;
    d.u_out = u_proposed;
    d.lie = rows[weakest_row(rows)].lie;
    d.input_gain = input_gain(rows);
    return d;
  }

  try {
    if (strategy.kind == FilterStrategy::Kind::kStandard) {
      return solve_filter_qp(strategy, rows, u_proposed, u_proposed);
    }

    const InputVec safe = backup_policy(strategy, m)(x);
    const double w = input_gain(rows);
    if (w <= strategy.eps) {
      FilterDecision d;
      d.u_out = safe;
      d.fallback_engaged = true;
      d.lie = rows[weakest_row(rows)].lie;
      d.input_gain = w;
      d.objective_value = 0.5 * (safe - u_proposed).squaredNorm();
      return d;
    }
    const InputVec target = penalty_target(u_proposed, safe, strategy.r, w);
    FilterDecision d = solve_filter_qp(strategy, rows, target, u_proposed);
    d.objective_value += 0.5 * strategy.r / (w * w) * (d.u_out - safe).squaredNorm();
    return d;
  } catch (const Infeasible&) {
    if (strategy.on_infeasible == InfeasiblePolicy::kHalt) throw;
    FilterDecision d;
    d.u_out = backup_policy(strategy, m)(x);
    d.fallback_engaged = true;
    d.lie = rows[weakest_row(rows)].lie;
    d.input_gain = input_gain(rows);
    d.objective_value = 0.5 * (d.u_out - u_proposed).squaredNorm();
    return d;
  }
}

FilterDecision filter_standard(const ControlAffineSystem& sys, const FilterStrategy& strategy,
                               const Policy& pi, const StateVec& x) {
  if (strategy.kind != FilterStrategy::Kind::kStandard) {
    throw InvalidArgument("filter_standard called with a non-standard strategy");
  }
  return apply_filter(sys, strategy, x, pi(x));
}

FilterDecision filter_penalty(const ControlAffineSystem& sys, const FilterStrategy& strategy,
                              const Policy& pi, const StateVec& x) {
  if (strategy.kind != FilterStrategy::Kind::kPenalty) {
    throw InvalidArgument("filter_penalty called with a non-penalty strategy");
  }
  return apply_filter(sys, strategy, x, pi(x));
}

}  // namespace cbfdt
