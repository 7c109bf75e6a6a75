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

#include "cbfdt/lie.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cbfdt {

LieData lie_derivatives(const ControlAffineSystem& sys, const Cbf& cbf, const StateVec& x) {
  if (cbf.state_dim() != sys.state_dim()) {
    throw InvalidArgument("CBF and system state dimensions differ");
  }
  const StateVec grad = h_grad(cbf, x);
  LieData out;
  out.lf_h = grad.dot(sys.f(x));
  out.lg_h = grad.transpose() * sys.g(x);
  out.lg_norm = out.lg_h.norm();
  return out;
}

LieData quadratic_lie_closed_form(const LtiSystem& sys, const QuadraticCbf& cbf,
                                  const StateVec& x) {
  const StateVec minus_two_pe = -2.0 * (cbf.P * (x - cbf.c));
  LieData out;
  out.lf_h = minus_two_pe.dot(sys.A() * x);
  out.lg_h = minus_two_pe.transpose() * sys.B();
  out.lg_norm = out.lg_h.norm();
  return out;
}

RelativeDegreeReport global_relative_degree_affine_lti(const LtiSystem& sys,
                                                       const AffineCbf& cbf, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("relative degree tolerance must be positive");
  if (cbf.p.size() != sys.state_dim()) {
    throw InvalidArgument("CBF and system state dimensions differ");
  }
  RelativeDegreeReport report;
  report.eps = tol;
  // row = p^T A^{i-1}
  Eigen::RowVectorXd row = cbf.p.transpose();
  for (int i = 1; i <= sys.state_dim(); ++i) {
    if ((row * sys.B()).norm() > tol) {
      report.s = i;
      break;
    }
    row = row * sys.A();
  }
  return report;
}

RelativeDegreeReport singular_set_scan(const ControlAffineSystem& sys, const Cbf& cbf,
                                       const AdmissibleBox& box, int grid_per_dim, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("singular-set eps must be positive");
  if (box.dim() != sys.state_dim()) throw InvalidArgument("box and system dimensions differ");
  RelativeDegreeReport report;
  report.eps = eps;
  for (const StateVec& x : box.grid(grid_per_dim)) {
    ++report.points_checked;
    if (lie_derivatives(sys, cbf, x).lg_norm <= eps) report.singular_points.push_back(x);
  }
  if (report.singular_points.empty()) report.s = 1;
  return report;
}

HocbfChain::HocbfChain(LtiSystem sys, AffineCbf cbf, std::vector<double> gains, double tol)
    : sys_(std::move(sys)), cbf_(std::move(cbf)), gains_(std::move(gains)) {
  const RelativeDegreeReport rd = global_relative_degree_affine_lti(sys_, cbf_, tol);
  if (!rd.s) throw InvalidArgument("relative degree is undetermined for this CBF and system");
  s_ = *rd.s;
  if (static_cast<int>(gains_.size()) != s_) {
    throw InvalidArgument("HOCBF needs exactly s = " + std::to_string(s_) + " gains, got " +
                          std::to_string(gains_.size()));
  }
  for (double k : gains_) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw InvalidArgument("HOCBF gains must be positive (class-K_e)");
    }
  }
  // Below order s the input does not appear, so hdot_{i-1} = q_{i-1}^T A x.
  levels_.push_back({cbf_.p, cbf_.b});
  for (int i = 1; i < s_; ++i) {
    const AffineLevel& prev = levels_.back();
    const double k = gains_[i - 1];
    levels_.push_back({sys_.A().transpose() * prev.q + k * prev.q, k * prev.d});
  }
}

LinearConstraint hocbf_constraint(const HocbfChain& chain, const StateVec& x) {
  const LtiSystem& sys = chain.system();
  if (x.size() != sys.state_dim()) throw InvalidArgument("state dimension mismatch");
  const AffineLevel& top = chain.levels().back();
  const double k_s = chain.gains().back();
  const double h_top = top.q.dot(x) + top.d;
  LinearConstraint c;
  c.coeff_u = top.q.transpose() * sys.B();
  c.lower_bound = -top.q.dot(sys.A() * x) - k_s * h_top;
  return c;
}

}  // namespace cbfdt
