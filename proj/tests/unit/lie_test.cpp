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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cbfdt/filter.hpp"
#include "cbfdt/presets.hpp"
#include "support/oracles.hpp"

namespace cbfdt {
namespace {

StateVec v2(double a, double b) {
  StateVec v(2);
  v << a, b;
  return v;
}

// Derivative of h along a direction field, by central differences in time.
double fd_along(const Cbf& cbf, const StateVec& x, const StateVec& dir, double tau = 1e-6) {
  return (h_value(cbf, x + tau * dir) - h_value(cbf, x - tau * dir)) / (2.0 * tau);
}

TEST(LieDerivativesTest, InitialStateOfSimulationSetup) {
  const LtiSystem sys = presets::sim_system();
  const Cbf cbf(presets::ellipse(v2(0.0, 0.0)));
  const LieData lie = lie_derivatives(ControlAffineSystem::from_lti(sys), cbf, v2(0.5, -0.1));
  EXPECT_NEAR(lie.lg_h(0), 14.472, 1e-12);
  EXPECT_NEAR(lie.lf_h, 0.087, 1e-15);
  EXPECT_NEAR(lie.lg_norm, 14.472, 1e-12);
  EXPECT_NEAR(fd_along(cbf, v2(0.5, -0.1), sys.B().col(0)), 14.472, 1e-6 * 14.472);
  EXPECT_NEAR(fd_along(cbf, v2(0.5, -0.1), sys.A() * v2(0.5, -0.1)), 0.087, 1e-6 * 0.087);
}

TEST(LieDerivativesTest, VanishesOnSingularLine) {
  const LtiSystem sys = presets::sim_system();
  const Cbf cbf(presets::ellipse(v2(0.0, 0.0)));
  for (double x1 : {-0.7, -0.2, 0.0, 0.4, 0.9}) {
    EXPECT_EQ(lie_derivatives(ControlAffineSystem::from_lti(sys), cbf, v2(x1, 0.0)).lg_norm, 0.0);
  }
}

TEST(LieDerivativesTest, ClosedFormIsBitIdenticalToGenericPath) {
  const LtiSystem sys = presets::sim_system();
  const ControlAffineSystem ca = ControlAffineSystem::from_lti(sys);
  const QuadraticCbf q = presets::ellipse(v2(0.0, 0.0));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const StateVec x = v2(d(rng), d(rng));
    const LieData a = quadratic_lie_closed_form(sys, q, x);
    const LieData b = lie_derivatives(ca, Cbf(q), x);
    EXPECT_EQ(a.lf_h, b.lf_h);
    EXPECT_EQ(a.lg_h, b.lg_h);
    EXPECT_EQ(a.lg_norm, b.lg_norm);
  }
}

TEST(LieDerivativesTest, FiniteDifferencesForEveryVariant) {
  const LtiSystem sys = presets::sim_system();
  const ControlAffineSystem ca = ControlAffineSystem::from_lti(sys);
  const Cbf quad(presets::ellipse(v2(0.0, 0.0)));
  const Cbf aff(AffineCbf(v2(0.6, -0.8), 0.3));
  const Cbf rot = transform(quad, make_rotation_2d(std::numbers::pi / 6.0), v2(0.0, 0.0));
  // A nonlinear plant exercises the state-dependent g.
  const ControlAffineSystem pend(
      2, 1,
      [](const StateVec& x) {
        StateVec f(2);
        f << x(1), -std::sin(x(0));
        return f;
      },
      [](const StateVec& x) {
        Matrix g(2, 1);
        g << 0.0, 1.0 + 0.5 * std::cos(x(0));
        return g;
      });

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (const ControlAffineSystem* s : {&ca, &pend}) {
    for (const Cbf* cbf : {&quad, &aff, &rot}) {
      for (int i = 0; i < 100; ++i) {
        const StateVec x = v2(d(rng), d(rng));
        const LieData lie = lie_derivatives(*s, *cbf, x);
        const double lf = fd_along(*cbf, x, s->f(x));
        const double lg = fd_along(*cbf, x, s->g(x).col(0));
        EXPECT_LE(std::abs(lie.lf_h - lf), 1e-6 * std::max(std::abs(lf), 1e-3));
        EXPECT_LE(std::abs(lie.lg_h(0) - lg), 1e-6 * std::max(std::abs(lg), 1e-3));
      }
    }
  }
}

TEST(RelativeDegreeTest, AffineOnLti) {
  const auto real = global_relative_degree_affine_lti(presets::real_system(), AffineCbf(v2(1.0, 0.0), 0.0), 1e-8);
  ASSERT_TRUE(real.s.has_value());
  EXPECT_EQ(*real.s, 2);
  const auto sim = global_relative_degree_affine_lti(presets::sim_system(), AffineCbf(v2(0.0, 1.0), 0.0), 1e-8);
  ASSERT_TRUE(sim.s.has_value());
  EXPECT_EQ(*sim.s, 1);

  Matrix B(2, 1);
  B << 0.0, 1.0;
  const LtiSystem frozen(Matrix::Zero(2, 2), B);
  EXPECT_FALSE(global_relative_degree_affine_lti(frozen, AffineCbf(v2(1.0, 0.0), 0.0), 1e-8).s);
  EXPECT_THROW(global_relative_degree_affine_lti(frozen, AffineCbf(v2(1.0, 0.0), 0.0), 0.0),
               InvalidArgument);
}

TEST(SingularSetScanTest, EllipseOnSimulationPlant) {
  const auto sys = ControlAffineSystem::from_lti(presets::sim_system());
  const Cbf cbf(presets::ellipse(v2(0.0, 0.0)));
  const auto rep = singular_set_scan(sys, cbf, presets::sim_box(), 201, 1e-8);
  EXPECT_FALSE(rep.s.has_value());
  EXPECT_EQ(rep.points_checked, 201u * 201u);
  // One full grid row sits on x2 = 0.
  EXPECT_EQ(rep.singular_points.size(), 201u);
  for (const auto& x : rep.singular_points) EXPECT_NEAR(x(1), 0.0, 1e-12);
}

TEST(SingularSetScanTest, NoInputAuthority) {
  const ControlAffineSystem dead(
      2, 1, [](const StateVec& x) { return StateVec(-x); }, [](const StateVec&) { return Matrix::Zero(2, 1); });
  const auto rep = singular_set_scan(dead, Cbf(presets::ellipse(v2(0.0, 0.0))), presets::sim_box(), 11, 1e-8);
  EXPECT_EQ(rep.singular_points.size(), 121u);
}

TEST(SingularSetScanTest, AffineWithInputDirection) {
  const auto sys = ControlAffineSystem::from_lti(presets::sim_system());
  const auto rep = singular_set_scan(sys, Cbf(AffineCbf(v2(0.0, 1.0), 0.5)), presets::sim_box(), 51, 1e-8);
  EXPECT_TRUE(rep.singular_points.empty());
  ASSERT_TRUE(rep.s.has_value());
  EXPECT_EQ(*rep.s, 1);
}

TEST(HocbfTest, FirstOrderConstraint) {
  const LtiSystem sys = presets::sim_system();
  const HocbfChain chain(sys, AffineCbf(v2(0.0, 1.0), 0.5), {1.0});
  EXPECT_EQ(chain.relative_degree(), 1);
  const LinearConstraint c = hocbf_constraint(chain, v2(0.5, -0.1));
  EXPECT_NEAR(c.coeff_u(0), 18.09, 1e-15);
  EXPECT_NEAR(c.lower_bound, -0.345, 1e-15);
}

TEST(HocbfTest, FirstOrderReducesToStandardConstraint) {
  const LtiSystem sys = presets::sim_system();
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const AffineCbf a(v2(d(rng), 0.2 + std::abs(d(rng))), d(rng));
    const double k = 0.1 + std::abs(d(rng)) * 3.0;
    const HocbfChain chain(sys, a, {k});
    FilterStrategy st = FilterStrategy::standard(Cbf(a), ClassKappaE::linear(k));
    const StateVec x = v2(d(rng), d(rng));
    const auto rows = cbf_constraints(ControlAffineSystem::from_lti(sys), st, x);
    const LinearConstraint c = hocbf_constraint(chain, x);
    EXPECT_LE(std::abs(c.coeff_u(0) - rows[0].constraint.coeff_u(0)), 1e-12);
    EXPECT_LE(std::abs(c.lower_bound - rows[0].constraint.lower_bound), 1e-12);
  }
}

TEST(HocbfTest, SecondOrderOnDoubleIntegrator) {
  const HocbfChain chain(presets::real_system(), AffineCbf(v2(1.0, 0.0), 0.0), {1.0, 1.0});
  EXPECT_EQ(chain.relative_degree(), 2);
  ASSERT_EQ(chain.levels().size(), 2u);
  const StateVec x = v2(1.25, 0.0);
  const AffineLevel& h1 = chain.levels()[1];
  EXPECT_DOUBLE_EQ(h1.q.dot(x) + h1.d, 1.25);
  const LinearConstraint c = hocbf_constraint(chain, x);
  EXPECT_NEAR(c.coeff_u(0), 30.30, 1e-15);
  EXPECT_NEAR(c.lower_bound, -1.25, 1e-15);
}

// h1 = hdot0 + k1 h0 evaluated by finite differences along the flow.
TEST(HocbfTest, SecondOrderMatchesFiniteDifferences) {
  const LtiSystem sys = presets::real_system();
  const AffineCbf a(v2(-2.0, 0.0), 1.4);
  const double k1 = 0.7;
  const double k2 = 2.0;
  const HocbfChain chain(sys, a, {k1, k2});
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Cbf h0(a);
  for (int i = 0; i < 100; ++i) {
    const StateVec x = v2(d(rng), d(rng));
    const double u = d(rng);
    auto h1 = [&](const StateVec& y) {
      return fd_along(h0, y, sys.A() * y, 1e-3) + k1 * h_value(h0, y);
    };
    const StateVec xdot = sys.A() * x + sys.B() * InputVec::Constant(1, u);
    // Both levels are affine in x, so wide steps are exact up to rounding.
    const double tau = 1e-3;
    const double h1dot = (h1(x + tau * xdot) - h1(x - tau * xdot)) / (2.0 * tau);
    const LinearConstraint c = hocbf_constraint(chain, x);
    // Constraint reads h1dot + k2 h1 >= 0.
    const double slack = c.coeff_u(0) * u - c.lower_bound;
    EXPECT_NEAR(slack, h1dot + k2 * h1(x), 1e-8 * std::max(1.0, std::abs(slack)));
  }
}

TEST(HocbfTest, RejectsBadGains) {
  EXPECT_THROW(HocbfChain(presets::real_system(), AffineCbf(v2(1.0, 0.0), 0.0), {0.0, 1.0}),
               InvalidArgument);
  EXPECT_THROW(HocbfChain(presets::real_system(), AffineCbf(v2(1.0, 0.0), 0.0), {1.0}),
               InvalidArgument);
}

}  // namespace
}  // namespace cbfdt
