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

// Continuous-time control-affine dynamics  x' = f(x) + g(x) u  and their
// one-interval propagation under a zero-order-hold input.

#ifndef CBFDT_DYNAMICS_HPP_
#define CBFDT_DYNAMICS_HPP_

#include <functional>
#include <vector>

#include "cbfdt/types.hpp"

namespace cbfdt {

// x' = A x + B u.
class LtiSystem {
 public:
  LtiSystem(Matrix A, Matrix B);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  int state_dim() const { return static_cast<int>(A_.rows()); }
  int input_dim() const { return static_cast<int>(B_.cols()); }

 private:
  Matrix A_;
  Matrix B_;
};

// General control-affine system. Evaluators must be deterministic.
class ControlAffineSystem {
 public:
  using DriftFn = std::function<StateVec(const StateVec&)>;
  using InputMatrixFn = std::function<Matrix(const StateVec&)>;

  ControlAffineSystem(int state_dim, int input_dim, DriftFn f, InputMatrixFn g);

  // f(x) = A x, g(x) = B.
  static ControlAffineSystem from_lti(const LtiSystem& sys);

  int state_dim() const { return n_; }
  int input_dim() const { return m_; }

  StateVec f(const StateVec& x) const { return f_(x); }
  Matrix g(const StateVec& x) const { return g_(x); }
  StateVec xdot(const StateVec& x, const InputVec& u) const;

 private:
  int n_;
  int m_;
  DriftFn f_;
  InputMatrixFn g_;
};

// Compact box X = [lower, upper] used for grid diagnostics.
struct AdmissibleBox {
  StateVec lower;
  StateVec upper;

  AdmissibleBox(StateVec lo, StateVec hi);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const StateVec& x) const;

  // Row-major tensor grid with `per_dim` points per axis, endpoints
  // included; the last coordinate varies fastest.
  std::vector<StateVec> grid(int per_dim) const;
};

// exp(M) by scaling and squaring around a truncated Taylor series.
Matrix matrix_exp(const Matrix& M);

struct Discretization {
  Matrix Ad;
  Matrix Bd;
  double dt;
};

// Exact zero-order-hold discretization via the exponential of the augmented
// block matrix [[A, B], [0, 0]] * dt.
Discretization lti_discretize(const LtiSystem& sys, double dt);

// Single exact ZOH step. Recomputes the discretization; for repeated stepping
// build a ZohStepper once instead.
StateVec step_exact(const LtiSystem& sys, const StateVec& x, const InputVec& u, double dt);

// Classical RK4 with u held constant over the interval.
StateVec step_rk4(const ControlAffineSystem& sys, const StateVec& x, const InputVec& u,
                  double dt);

// Caches the discretization of one (system, dt) pair. Immutable after
// construction.
class ZohStepper {
 public:
  ZohStepper(const LtiSystem& sys, double dt);

  StateVec step(const StateVec& x, const InputVec& u) const;
  const Discretization& discretization() const { return disc_; }

 private:
  Discretization disc_;
};

}  // namespace cbfdt

#endif  // CBFDT_DYNAMICS_HPP_
