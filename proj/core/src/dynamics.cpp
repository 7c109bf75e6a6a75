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

#include "cbfdt/dynamics.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cbfdt {

namespace {

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidArgument("dt must be positive and finite, got " + std::to_string(dt));
  }
}

void require_dims(const StateVec& x, const InputVec& u, int n, int m) {
  if (x.size() != n || u.size() != m) {
    throw InvalidArgument("state/input dimension mismatch: expected (" + std::to_string(n) +
                          ", " + std::to_string(m) + "), got (" + std::to_string(x.size()) +
                          ", " + std::to_string(u.size()) + ")");
  }
}

}  // namespace

LtiSystem::LtiSystem(Matrix A, Matrix B) : A_(std::move(A)), B_(std::move(B)) {
  if (A_.rows() != A_.cols() || A_.rows() == 0) {
    throw InvalidArgument("A must be a nonempty square matrix");
  }
  if (B_.rows() != A_.rows() || B_.cols() == 0) {
    throw InvalidArgument("B must have as many rows as A and at least one column");
  }
  if (!A_.allFinite() || !B_.allFinite()) {
    throw InvalidArgument("invalid system: non-finite entries in A or B");
  }
}

ControlAffineSystem::ControlAffineSystem(int state_dim, int input_dim, DriftFn f,
                                         InputMatrixFn g)
    : n_(state_dim), m_(input_dim), f_(std::move(f)), g_(std::move(g)) {
  if (n_ <= 0 || m_ <= 0) throw InvalidArgument("system dimensions must be positive");
  if (!f_ || !g_) throw InvalidArgument("f and g evaluators are required");
}

ControlAffineSystem ControlAffineSystem::from_lti(const LtiSystem& sys) {
  const Matrix A = sys.A();
  const Matrix B = sys.B();
  return ControlAffineSystem(
      sys.state_dim(), sys.input_dim(), [A](const StateVec& x) -> StateVec { return A * x; },
      [B](const StateVec&) -> Matrix { return B; });
}

StateVec ControlAffineSystem::xdot(const StateVec& x, const InputVec& u) const {
  return f_(x) + g_(x) * u;
}

AdmissibleBox::AdmissibleBox(StateVec lo, StateVec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InvalidArgument("box bounds must be nonempty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw InvalidArgument("box lower bound must be below upper bound in every dimension");
    }
  }
}

bool AdmissibleBox::contains(const StateVec& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

std::vector<StateVec> AdmissibleBox::grid(int per_dim) const {
  if (per_dim < 2) throw InvalidArgument("grid needs at least 2 points per dimension");
  const int n = dim();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_dim);

  std::vector<StateVec> points;
  points.reserve(total);
  std::vector<int> idx(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    StateVec x(n);
    for (int i = 0; i < n; ++i) {
      const double frac = static_cast<double>(idx[i]) / (per_dim - 1);
      x[i] = lower[i] + frac * (upper[i] - lower[i]);
    }
    points.push_back(std::move(x));
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < per_dim) break;
      idx[i] = 0;
    }
  }
  return points;
}

Matrix matrix_exp(const Matrix& M) {
  if (M.rows() != M.cols()) throw InvalidArgument("matrix_exp requires a square matrix");
  if (!M.allFinite()) throw InvalidArgument("matrix_exp: non-finite input");
  const Eigen::Index n = M.rows();

  // Scale so that ||M / 2^s||_1 <= 1/2; 18 Taylor terms then leave a
  // truncation error below 1e-17 relative.
  const double norm = M.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = M / std::ldexp(1.0, squarings);

  constexpr int kTerms = 18;
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= kTerms; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Discretization lti_discretize(const LtiSystem& sys, double dt) {
  require_positive_dt(dt);
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = sys.A() * dt;
  aug.topRightCorner(n, m) = sys.B() * dt;
  const Matrix e = matrix_exp(aug);
  return Discretization{e.topLeftCorner(n, n), e.topRightCorner(n, m), dt};
}

StateVec step_exact(const LtiSystem& sys, const StateVec& x, const InputVec& u, double dt) {
  return ZohStepper(sys, dt).step(x, u);
}

StateVec step_rk4(const ControlAffineSystem& sys, const StateVec& x, const InputVec& u,
                  double dt) {
  require_positive_dt(dt);
  require_dims(x, u, sys.state_dim(), sys.input_dim());
  const StateVec k1 = sys.xdot(x, u);
  const StateVec k2 = sys.xdot(x + 0.5 * dt * k1, u);
  const StateVec k3 = sys.xdot(x + 0.5 * dt * k2, u);
  const StateVec k4 = sys.xdot(x + dt * k3, u);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

ZohStepper::ZohStepper(const LtiSystem& sys, double dt) : disc_(lti_discretize(sys, dt)) {}

StateVec ZohStepper::step(const StateVec& x, const InputVec& u) const {
  require_dims(x, u, static_cast<int>(disc_.Ad.rows()), static_cast<int>(disc_.Bd.cols()));
  return disc_.Ad * x + disc_.Bd * u;
}

}  // namespace cbfdt
