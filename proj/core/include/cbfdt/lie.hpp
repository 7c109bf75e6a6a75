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

// Lie derivatives of CBFs along control-affine dynamics, relative-degree
// diagnostics, and higher-order CBF constraints for affine CBFs on LTI plants.

#ifndef CBFDT_LIE_HPP_
#define CBFDT_LIE_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "cbfdt/cbf.hpp"
#include "cbfdt/dynamics.hpp"
#include "cbfdt/types.hpp"

namespace cbfdt {

// Default threshold below which ||L_g h|| counts as zero.
inline constexpr double kSingularEps = 1e-8;
inline constexpr int kDefaultGridPerDim = 201;

// hdot(x, u) = lf_h + lg_h u.
struct LieData {
  double lf_h = 0.0;
  InputRow lg_h;
  double lg_norm = 0.0;

  double hdot(const InputVec& u) const { return lf_h + lg_h.dot(u.transpose()); }
};

LieData lie_derivatives(const ControlAffineSystem& sys, const Cbf& cbf, const StateVec& x);

// L_f h = -2 (x - c)^T P A x and L_g h = -2 (x - c)^T P B for an ellipsoidal
// CBF on an LTI plant.
LieData quadratic_lie_closed_form(const LtiSystem& sys, const QuadraticCbf& cbf,
                                  const StateVec& x);

struct RelativeDegreeReport {
  // Empty when no order up to n exposes the input.
  std::optional<int> s;
  std::vector<StateVec> singular_points;
  double eps = kSingularEps;
  std::size_t points_checked = 0;
};

// Smallest i in {1..n} with ||p^T A^{i-1} B|| > tol. State independent.
RelativeDegreeReport global_relative_degree_affine_lti(const LtiSystem& sys,
                                                       const AffineCbf& cbf, double tol);

// Grid points of `box` with ||L_g h(x)|| <= eps. s is reported as 1 when no
// such point exists and left undetermined otherwise.
RelativeDegreeReport singular_set_scan(const ControlAffineSystem& sys, const Cbf& cbf,
                                       const AdmissibleBox& box, int grid_per_dim = kDefaultGridPerDim,
                                       double eps = kSingularEps);

// h_i = q_i^T x + d_i.
struct AffineLevel {
  StateVec q;
  double d;
};

// Recursion h_0 = h, h_i = hdot_{i-1} + k_i h_{i-1} for an affine CBF on an
// LTI plant with linear class-K_e gains k_1..k_s. Every level stays affine.
class HocbfChain {
 public:
  HocbfChain(LtiSystem sys, AffineCbf cbf, std::vector<double> gains, double tol = kSingularEps);

  int relative_degree() const { return s_; }
  const std::vector<double>& gains() const { return gains_; }
  // h_0 .. h_{s-1}.
  const std::vector<AffineLevel>& levels() const { return levels_; }
  const LtiSystem& system() const { return sys_; }
  const AffineCbf& cbf() const { return cbf_; }

 private:
  LtiSystem sys_;
  AffineCbf cbf_;
  std::vector<double> gains_;
  int s_ = 0;
  std::vector<AffineLevel> levels_;
};

// coeff_u * u >= lower_bound.
struct LinearConstraint {
  InputRow coeff_u;
  double lower_bound = 0.0;
};

// The order-s condition  L_f^s h + L_g L_f^{s-1} h u + O(h) >= -k_s h_{s-1}.
// For s = 1 this is exactly L_g h u >= -k_1 h - L_f h.
LinearConstraint hocbf_constraint(const HocbfChain& chain, const StateVec& x);

}  // namespace cbfdt

#endif  // CBFDT_LIE_HPP_
