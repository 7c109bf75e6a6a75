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

// Candidate control barrier functions h(x) with safe set C = {x : h(x) >= 0},
// class-K_e functions, and the two set modifications: rigid transformation
// h~(x) = h(R (x - delta)) and polytopic inner approximation by affine CBFs.

#ifndef CBFDT_CBF_HPP_
#define CBFDT_CBF_HPP_

#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

#include "cbfdt/dynamics.hpp"
#include "cbfdt/types.hpp"

namespace cbfdt {

// Extended class-K function: gamma(0) = 0, strictly increasing on R.
class ClassKappaE {
 public:
  enum class Kind { kIdentity, kLinear };

  static ClassKappaE identity() { return ClassKappaE(Kind::kIdentity, 1.0); }
  static ClassKappaE linear(double gain);

  double operator()(double h) const { return kind_ == Kind::kIdentity ? h : gain_ * h; }

  Kind kind() const { return kind_; }
  double gain() const { return gain_; }

 private:
  ClassKappaE(Kind kind, double gain) : kind_(kind), gain_(gain) {}

  Kind kind_;
  double gain_;
};

// h(x) = beta - (x - c)^T P (x - c), P symmetric positive definite.
struct QuadraticCbf {
  double beta;
  StateVec c;
  Matrix P;

  QuadraticCbf(double beta, StateVec c, Matrix P);
};

// h(x) = p^T x + b, p != 0.
struct AffineCbf {
  StateVec p;
  double b;

  AffineCbf(StateVec p, double b);
};

class Cbf;

// h~(x) = inner.h(R (x - delta)), R in SO(n).
struct TransformedCbf {
  std::shared_ptr<const Cbf> inner;
  Matrix R;
  StateVec delta;

  TransformedCbf(std::shared_ptr<const Cbf> inner, Matrix R, StateVec delta);
};

// Closed sum type over the supported CBF shapes. Cheap to copy; transformed
// CBFs share their immutable inner function.
class Cbf {
 public:
  using Variant = std::variant<QuadraticCbf, AffineCbf, TransformedCbf>;

  Cbf(QuadraticCbf q) : v_(std::move(q)) {}      // NOLINT(google-explicit-constructor)
  Cbf(AffineCbf a) : v_(std::move(a)) {}         // NOLINT(google-explicit-constructor)
  Cbf(TransformedCbf t) : v_(std::move(t)) {}    // NOLINT(google-explicit-constructor)

  const Variant& variant() const { return v_; }
  int state_dim() const;

  template <typename T>
  const T* get_if() const { return std::get_if<T>(&v_); }

 private:
  Variant v_;
};

// Wraps `inner` in a rigid transformation.
Cbf transform(const Cbf& inner, const Matrix& R, const StateVec& delta);

double h_value(const Cbf& cbf, const StateVec& x);
StateVec h_grad(const Cbf& cbf, const StateVec& x);

// Planar rotation [[cos, -sin], [sin, cos]]. Only n = 2 is supported.
Matrix make_rotation_2d(double theta, int n = 2);

// Ordered list of affine CBFs; the induced set is the intersection of their
// zero-superlevel half-spaces.
class CbfSet {
 public:
  explicit CbfSet(std::vector<AffineCbf> members);

  const std::vector<AffineCbf>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  int state_dim() const { return static_cast<int>(members_.front().p.size()); }

  // Pointwise minimum over members. Diagnostic only; it is not smooth.
  double h_value(const StateVec& x) const;
  // Index of the minimizing member, lowest index on ties.
  std::size_t active_index(const StateVec& x) const;
  StateVec h_grad(const StateVec& x) const;
  bool contains(const StateVec& x) const;

 private:
  std::vector<AffineCbf> members_;
};

// Either one CBF or a polytope of affine CBFs. The filter imposes one
// constraint per entry of `constraints()`.
class SafeSetSpec {
 public:
  SafeSetSpec(Cbf single) : v_(std::move(single)) {}       // NOLINT(google-explicit-constructor)
  SafeSetSpec(CbfSet polytope) : v_(std::move(polytope)) {} // NOLINT(google-explicit-constructor)

  bool is_polytope() const { return std::holds_alternative<CbfSet>(v_); }
  const Cbf* single() const { return std::get_if<Cbf>(&v_); }
  const CbfSet* polytope() const { return std::get_if<CbfSet>(&v_); }

  int state_dim() const;
  // One Cbf per constraint, in member order.
  std::vector<Cbf> constraints() const;
  // min over constraints of h(x).
  double h_min(const StateVec& x) const;
  std::vector<double> h_values(const StateVec& x) const;
  bool contains(const StateVec& x) const { return h_min(x) >= 0.0; }

 private:
  std::variant<Cbf, CbfSet> v_;
};

struct InnerCheckReport {
  int grid_per_dim = 0;
  std::size_t points_checked = 0;
  // Grid points inside the polytope but outside the outer set.
  std::vector<StateVec> violations;

  bool empty() const { return violations.empty(); }
};

// Grid test of polytope \subseteq {outer >= 0}. An empty report certifies the
// inclusion at grid resolution only.
InnerCheckReport polytope_inner_check(const CbfSet& set, const Cbf& outer,
                                      const AdmissibleBox& box, int grid_per_dim);

}  // namespace cbfdt

#endif  // CBFDT_CBF_HPP_
