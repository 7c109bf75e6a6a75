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

#include "cbfdt/presets.hpp"

#include <array>
#include <initializer_list>
#include <numbers>
#include <string>
#include <utility>

namespace cbfdt::presets {

namespace {

StateVec vec2(double a, double b) {
  StateVec v(2);
  v << a, b;
  return v;
}

std::vector<AffineCbf> members(std::initializer_list<std::array<double, 3>> rows) {
  std::vector<AffineCbf> out;
  for (const auto& r : rows) out.emplace_back(vec2(r[0], r[1]), r[2]);
  return out;
}

const StateVec& sim_center() {
  static const StateVec c = vec2(0.0, 0.0);
  return c;
}

const StateVec& real_center() {
  static const StateVec c = vec2(1.125, 0.0);
  return c;
}

// Rotation by theta about the ellipse centre c: h(R (x - delta)) with
// delta = c - R^T c. For the origin-centred sim ellipse this is delta = 0.
Cbf rotated_about_center(const QuadraticCbf& q, double theta) {
  const Matrix R = make_rotation_2d(theta);
  const StateVec delta = q.c - R.transpose() * q.c;
  return transform(Cbf(q), R, delta);
}

Scenario sim_base(std::string name, FilterStrategy strategy) {
  return Scenario{std::move(name),
                  sim_system(),
                  std::move(strategy),
                  Policy::constant(InputVec::Constant(1, -0.1)),
                  vec2(0.5, -0.1),
                  0.001,
                  15.0,
                  0.05,
                  kSingularEps,
                  sim_box()};
}

Scenario real_base(std::string name, FilterStrategy strategy) {
  const double mg = kQuadMass * kGravity;
  return Scenario{std::move(name),
                  real_system(),
                  std::move(strategy),
                  Policy::constant(InputVec::Constant(1, -0.05 * mg)),
                  vec2(1.25, 0.0),
                  0.167,
                  30.0,
                  0.005 * mg,
                  kSingularEps,
                  real_box()};
}

}  // namespace

LtiSystem sim_system() {
  Matrix A(2, 2);
  A << 0.00, 1.00, -0.09, 0.10;
  Matrix B(2, 1);
  B << 0.0, 18.09;
  return LtiSystem(A, B);
}

LtiSystem real_system() {
  Matrix A(2, 2);
  A << 0.00, 1.00, 0.00, 0.00;
  Matrix B(2, 1);
  B << 0.0, 30.30;
  return LtiSystem(A, B);
}

QuadraticCbf ellipse(const StateVec& center) {
  Matrix P = Matrix::Zero(2, 2);
  P(0, 0) = 1.31;
  P(1, 1) = 4.00;
  return QuadraticCbf(1.0, center, P);
}

// Heptagon with vertices at 98% of the ellipse radius, phase offset pi/14 so
// that no edge is vertical (a vertical edge would have p^T B = 0).
CbfSet sim_polytope() {
  return CbfSet(members({
      {-0.5830, -0.8125, 0.5753},
      {0.0000, -1.0000, 0.4415},
      {0.5830, -0.8125, 0.5753},
      {0.9288, 0.3705, 0.7350},
      {0.2657, 0.9641, 0.4724},
      {-0.2657, 0.9641, 0.4724},
      {-0.9288, 0.3705, 0.7350},
  }));
}

// Pentagon at 95% of the ellipse radius around z = 1.125 m.
CbfSet real_polytope() {
  return CbfSet(members({
      {-0.3937, -0.9192, 0.8841},
      {0.3742, -0.9273, 0.0151},
      {0.8797, 0.4755, -0.3713},
      {0.0081, 1.0000, 0.3752},
      {-0.8593, 0.5115, 1.5763},
  }));
}

AdmissibleBox sim_box() { return AdmissibleBox(vec2(-0.9, -0.55), vec2(0.9, 0.55)); }

AdmissibleBox real_box() { return AdmissibleBox(vec2(0.225, -0.55), vec2(2.025, 0.55)); }

std::vector<std::string> names() {
  return {"sim-uncertified", "sim-standard",   "sim-penalty",      "sim-transformed",
          "sim-affine",      "real-uncertified", "real-standard",  "real-penalty",
          "real-transformed", "real-affine"};
}

Scenario preset(const std::string& name) {
  const ClassKappaE gamma = ClassKappaE::identity();
  const QuadraticCbf sim_q = ellipse(sim_center());
  const QuadraticCbf real_q = ellipse(real_center());
  const double theta = std::numbers::pi / 6.0;

  if (name == "sim-uncertified") return sim_base(name, FilterStrategy::none(Cbf(sim_q), gamma));
  if (name == "sim-standard") return sim_base(name, FilterStrategy::standard(Cbf(sim_q), gamma));
  if (name == "sim-penalty") {
    return sim_base(name, FilterStrategy::penalty(Cbf(sim_q), gamma, 1.0, 1e-8, Policy::zero(1)));
  }
  if (name == "sim-transformed") {
    return sim_base(name, FilterStrategy::standard(rotated_about_center(sim_q, theta), gamma));
  }
  if (name == "sim-affine") return sim_base(name, FilterStrategy::standard(sim_polytope(), gamma));

  if (name == "real-uncertified") return real_base(name, FilterStrategy::none(Cbf(real_q), gamma));
  if (name == "real-standard") return real_base(name, FilterStrategy::standard(Cbf(real_q), gamma));
  if (name == "real-penalty") {
    return real_base(name, FilterStrategy::penalty(Cbf(real_q), gamma, 75.0, 1e-8, Policy::zero(1)));
  }
  if (name == "real-transformed") {
    return real_base(name, FilterStrategy::standard(rotated_about_center(real_q, theta), gamma));
  }
  if (name == "real-affine") return real_base(name, FilterStrategy::standard(real_polytope(), gamma));

  std::string valid;
  for (const auto& n : names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown preset '" + name + "'; valid presets: " + valid);
}

}  // namespace cbfdt::presets
