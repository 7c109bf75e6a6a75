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

#include "cbfdt/cbf.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace cbfdt {

namespace {

constexpr double kRotationTol = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const StateVec& x, int n) {
  if (x.size() != n) {
    throw InvalidArgument("state dimension mismatch: expected " + std::to_string(n) + ", got " +
                          std::to_string(x.size()));
  }
}

}  // namespace

ClassKappaE ClassKappaE::linear(double gain) {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw InvalidArgument("class-K_e linear gain must be positive and finite");
  }
  return ClassKappaE(Kind::kLinear, gain);
}

QuadraticCbf::QuadraticCbf(double beta_in, StateVec c_in, Matrix P_in)
    : beta(beta_in), c(std::move(c_in)), P(std::move(P_in)) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
  if (P.rows() != P.cols() || P.rows() != c.size() || c.size() == 0) {
    throw InvalidArgument("P must be n x n with n = dim(c)");
  }
  if (!P.allFinite() || !c.allFinite()) throw InvalidArgument("non-finite CBF parameters");
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("P must be symmetric");
  }
  if (Eigen::LLT<Matrix>(P).info() != Eigen::Success) {
    throw InvalidArgument("P must be positive definite");
  }
}

AffineCbf::AffineCbf(StateVec p_in, double b_in) : p(std::move(p_in)), b(b_in) {
  if (p.size() == 0 || !p.allFinite() || !std::isfinite(b)) {
    throw InvalidArgument("affine CBF coefficients must be finite and nonempty");
  }
  if (p.isZero(0.0)) throw InvalidArgument("affine CBF requires p != 0");
}

TransformedCbf::TransformedCbf(std::shared_ptr<const Cbf> inner_in, Matrix R_in,
                               StateVec delta_in)
    : inner(std::move(inner_in)), R(std::move(R_in)), delta(std::move(delta_in)) {
  if (!inner) throw InvalidArgument("transformed CBF needs an inner function");
  const Eigen::Index n = inner->state_dim();
  if (R.rows() != n || R.cols() != n || delta.size() != n) {
    throw InvalidArgument("transformation dimensions do not match the inner CBF");
  }
  if ((R * R.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kRotationTol ||
      std::abs(R.determinant() - 1.0) > kRotationTol) {
    throw InvalidArgument("R must be a rotation: R R^T = I and det R = 1");
  }
}

int Cbf::state_dim() const {
  return std::visit(Overloaded{
                        [](const QuadraticCbf& q) { return static_cast<int>(q.c.size()); },
                        [](const AffineCbf& a) { return static_cast<int>(a.p.size()); },
                        [](const TransformedCbf& t) { return static_cast<int>(t.delta.size()); },
                    },
                    v_);
}

Cbf transform(const Cbf& inner, const Matrix& R, const StateVec& delta) {
  return Cbf(TransformedCbf(std::make_shared<const Cbf>(inner), R, delta));
}

double h_value(const Cbf& cbf, const StateVec& x) {
  require_dim(x, cbf.state_dim());
  return std::visit(Overloaded{
                        [&](const QuadraticCbf& q) {
                          const StateVec e = x - q.c;
                          return q.beta - e.dot(q.P * e);
                        },
                        [&](const AffineCbf& a) { return a.p.dot(x) + a.b; },
                        [&](const TransformedCbf& t) {
                          return h_value(*t.inner, StateVec(t.R * (x - t.delta)));
                        },
                    },
                    cbf.variant());
}

StateVec h_grad(const Cbf& cbf, const StateVec& x) {
  require_dim(x, cbf.state_dim());
  return std::visit(Overloaded{
                        [&](const QuadraticCbf& q) -> StateVec { return -2.0 * (q.P * (x - q.c)); },
                        [&](const AffineCbf& a) -> StateVec { return a.p; },
                        [&](const TransformedCbf& t) -> StateVec {
                          return t.R.transpose() * h_grad(*t.inner, StateVec(t.R * (x - t.delta)));
                        },
                    },
                    cbf.variant());
}

Matrix make_rotation_2d(double theta, int n) {
  if (n != 2) {
    throw Unsupported("rotation construction is only implemented for n = 2, got n = " +
                      std::to_string(n));
  }
  Matrix R(2, 2);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  R << c, -s, s, c;
  return R;
}

CbfSet::CbfSet(std::vector<AffineCbf> members) : members_(std::move(members)) {
  if (members_.empty()) throw InvalidArgument("a CBF set needs at least one member");
  const Eigen::Index n = members_.front().p.size();
  for (const auto& m : members_) {
    if (m.p.size() != n) throw InvalidArgument("CBF set members differ in dimension");
  }
}

double CbfSet::h_value(const StateVec& x) const {
  const AffineCbf& m = members_[active_index(x)];
  return m.p.dot(x) + m.b;
}

std::size_t CbfSet::active_index(const StateVec& x) const {
  require_dim(x, state_dim());
  std::size_t best = 0;
  double best_h = members_[0].p.dot(x) + members_[0].b;
  for (std::size_t i = 1; i < members_.size(); ++i) {
    const double h = members_[i].p.dot(x) + members_[i].b;
    if (h < best_h) {
      best = i;
      best_h = h;
    }
  }
  return best;
}

StateVec CbfSet::h_grad(const StateVec& x) const { return members_[active_index(x)].p; }

bool CbfSet::contains(const StateVec& x) const {
  require_dim(x, state_dim());
  for (const auto& m : members_) {
    if (m.p.dot(x) + m.b < 0.0) return false;
  }
  return true;
}

int SafeSetSpec::state_dim() const {
  if (const Cbf* c = single()) return c->state_dim();
  return polytope()->state_dim();
}

std::vector<Cbf> SafeSetSpec::constraints() const {
  if (const Cbf* c = single()) return {*c};
  std::vector<Cbf> out;
  out.reserve(polytope()->size());
  for (const auto& m : polytope()->members()) out.emplace_back(m);
  return out;
}

double SafeSetSpec::h_min(const StateVec& x) const {
  if (const Cbf* c = single()) return h_value(*c, x);
  return polytope()->h_value(x);
}

std::vector<double> SafeSetSpec::h_values(const StateVec& x) const {
  if (const Cbf* c = single()) return {h_value(*c, x)};
  std::vector<double> out;
  out.reserve(polytope()->size());
  for (const auto& m : polytope()->members()) out.push_back(m.p.dot(x) + m.b);
  return out;
}

InnerCheckReport polytope_inner_check(const CbfSet& set, const Cbf& outer,
                                      const AdmissibleBox& box, int grid_per_dim) {
  if (grid_per_dim < 2) throw InvalidArgument("grid_per_dim must be at least 2");
  if (box.dim() != set.state_dim() || box.dim() != outer.state_dim()) {
    throw InvalidArgument("box, polytope and outer CBF dimensions differ");
  }
  InnerCheckReport report;
  report.grid_per_dim = grid_per_dim;
  for (const StateVec& x : box.grid(grid_per_dim)) {
    ++report.points_checked;
    if (set.contains(x) && h_value(outer, x) < 0.0) report.violations.push_back(x);
  }
  return report;
}

}  // namespace cbfdt
