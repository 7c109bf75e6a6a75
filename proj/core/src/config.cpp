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

#include "cbfdt/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <utility>
#include <vector>

#include "cbfdt/presets.hpp"

namespace cbfdt {

using nlohmann::json;

namespace {

// A JSON value together with its path from the document root.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_, msg); }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : j_.items()) {
      if (!keys.count(item.key())) child_path_fail(item.key(), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Node at(const char* key) const {
    if (!j_.contains(key)) child_path_fail(key, "missing required field");
    return Node(j_.at(key), child_path(key));
  }

  std::optional<Node> opt(const char* key) const {
    if (!j_.contains(key)) return std::nullopt;
    return Node(j_.at(key), child_path(key));
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0");
    return v;
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  Eigen::VectorXd vector() const {
    if (!j_.is_array() || j_.empty()) fail("expected a nonempty array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j_.size()));
    for (std::size_t i = 0; i < j_.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = Node(j_[i], path_ + "[" + std::to_string(i) + "]").number();
    }
    return v;
  }

  Matrix matrix() const {
    if (!j_.is_array() || j_.empty()) fail("expected a nonempty array of rows");
    const std::size_t rows = j_.size();
    std::size_t cols = 0;
    Matrix M;
    for (std::size_t i = 0; i < rows; ++i) {
      const Node row(j_[i], path_ + "[" + std::to_string(i) + "]");
      const Eigen::VectorXd r = row.vector();
      if (i == 0) {
        cols = static_cast<std::size_t>(r.size());
        M.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      } else if (static_cast<std::size_t>(r.size()) != cols) {
        row.fail("row length differs from row 0");
      }
      M.row(static_cast<Eigen::Index>(i)) = r.transpose();
    }
    return M;
  }

  std::string type_tag(std::initializer_list<const char*> allowed) const {
    const Node t = at("type");
    const std::string s = t.string();
    for (const char* a : allowed) {
      if (s == a) return s;
    }
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    t.fail("unknown type '" + s + "'; expected one of: " + list);
  }

 private:
  std::string child_path(const std::string& key) const { return path_ + "." + key; }
  [[noreturn]] void child_path_fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(child_path(key), msg);
  }

  const json& j_;
  std::string path_;
};

// Re-raise library validation errors with the field path that caused them.
template <typename F>
auto at_path(const Node& node, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    node.fail(e.what());
  }
}

LtiSystem parse_system(const Node& node) {
  if (node.has("named")) {
    node.require_object({"named"});
    const Node named = node.at("named");
    const std::string s = named.string();
    if (s == "sim") return presets::sim_system();
    if (s == "real") return presets::real_system();
    named.fail("unknown named system '" + s + "'; expected 'sim' or 'real'");
  }
  node.require_object({"A", "B"});
  const Matrix A = node.at("A").matrix();
  const Matrix B = node.at("B").matrix();
  return at_path(node, [&] { return LtiSystem(A, B); });
}

Cbf apply_transform(const Node& node, Cbf inner) {
  node.require_object({"theta", "R", "delta"});
  if (node.has("theta") == node.has("R")) node.fail("exactly one of 'theta' or 'R' is required");
  const Matrix R = node.has("theta")
                       ? at_path(node, [&] {
                           return make_rotation_2d(node.at("theta").number(), inner.state_dim());
                         })
                       : node.at("R").matrix();
  const StateVec delta = node.has("delta") ? node.at("delta").vector()
                                           : StateVec::Zero(inner.state_dim());
  return at_path(node, [&] { return transform(inner, R, delta); });
}

AffineCbf parse_affine(const Node& node) {
  const StateVec p = node.at("p").vector();
  const double b = node.at("b").number();
  return at_path(node, [&] { return AffineCbf(p, b); });
}

SafeSetSpec parse_cbf(const Node& node) {
  const std::string type = node.type_tag({"quadratic", "affine", "polytope"});
  if (type == "polytope") {
    node.require_object({"type", "members"});
    const Node list = node.at("members");
    if (!list.raw().is_array() || list.raw().empty()) list.fail("expected a nonempty array");
    std::vector<AffineCbf> members;
    for (std::size_t i = 0; i < list.raw().size(); ++i) {
      const Node m(list.raw()[i], list.path() + "[" + std::to_string(i) + "]");
      m.require_object({"p", "b"});
      members.push_back(parse_affine(m));
    }
    return at_path(node, [&] { return CbfSet(std::move(members)); });
  }

  std::optional<Cbf> cbf;
  if (type == "quadratic") {
    node.require_object({"type", "beta", "P", "c", "transform"});
    const double beta = node.at("beta").number();
    const Matrix P = node.at("P").matrix();
    const StateVec c = node.at("c").vector();
    cbf = at_path(node, [&] { return Cbf(QuadraticCbf(beta, c, P)); });
  } else {
    node.require_object({"type", "p", "b", "transform"});
    cbf = Cbf(parse_affine(node));
  }
  if (auto t = node.opt("transform")) cbf = apply_transform(*t, *cbf);
  return *cbf;
}

ClassKappaE parse_gamma(const Node& node) {
  const std::string type = node.type_tag({"identity", "linear"});
  if (type == "identity") {
    node.require_object({"type"});
    return ClassKappaE::identity();
  }
  node.require_object({"type", "k"});
  return ClassKappaE::linear(node.at("k").positive());
}

Policy parse_policy(const Node& node, int m) {
  const std::string type = node.type_tag({"zero", "constant"});
  if (type == "zero") {
    node.require_object({"type"});
    return Policy::zero(m);
  }
  node.require_object({"type", "value"});
  const Node v = node.at("value");
  const InputVec value = v.raw().is_number() ? InputVec::Constant(1, v.number()) : v.vector();
  if (value.size() != m) v.fail("expected " + std::to_string(m) + " entries (input dimension)");
  return Policy::constant(value);
}

InputBox parse_input_box(const Node& node, int m) {
  node.require_object({"lower", "upper"});
  InputBox box{node.at("lower").vector(), node.at("upper").vector()};
  if (box.lower.size() != m || box.upper.size() != m) {
    node.fail("bounds must have " + std::to_string(m) + " entries");
  }
  if ((box.lower.array() > box.upper.array()).any()) node.fail("lower must not exceed upper");
  return box;
}

FilterStrategy parse_strategy(const Node& node, SafeSetSpec safe_set, ClassKappaE gamma,
                              const LtiSystem& sys) {
  const std::string type = node.type_tag({"none", "standard", "penalty"});
  const int m = sys.input_dim();
  FilterStrategy s = FilterStrategy::standard(std::move(safe_set), gamma);
  if (type == "none") {
    node.require_object({"type"});
    s.kind = FilterStrategy::Kind::kNone;
    return s;
  }
  if (type == "penalty") {
    node.require_object({"type", "r", "eps", "pi_safe", "hocbf_gains", "on_infeasible", "input_box"});
    s.kind = FilterStrategy::Kind::kPenalty;
    s.r = node.at("r").positive();
    s.eps = node.at("eps").positive();
    s.pi_safe = parse_policy(node.at("pi_safe"), m);
  } else {
    node.require_object({"type", "pi_safe", "hocbf_gains", "on_infeasible", "input_box"});
    if (auto ps = node.opt("pi_safe")) s.pi_safe = parse_policy(*ps, m);
  }
  if (auto g = node.opt("hocbf_gains")) {
    const Eigen::VectorXd k = g->vector();
    const Cbf* c = s.safe_set.single();
    if (c == nullptr || c->get_if<AffineCbf>() == nullptr) {
      g->fail("HOCBF gains require a single affine CBF without transform");
    }
    s.hocbf = at_path(*g, [&] {
      return HocbfChain(sys, *c->get_if<AffineCbf>(), std::vector<double>(k.data(), k.data() + k.size()));
    });
  }
  if (auto oi = node.opt("on_infeasible")) {
    const std::string v = oi->string();
    if (v == "halt") {
      s.on_infeasible = InfeasiblePolicy::kHalt;
    } else if (v == "apply_safe") {
      s.on_infeasible = InfeasiblePolicy::kApplySafe;
    } else {
      oi->fail("expected 'halt' or 'apply_safe'");
    }
  }
  if (auto ib = node.opt("input_box")) s.input_box = parse_input_box(*ib, m);
  return s;
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Matrix& M) {
  json a = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) a.push_back(vec_json(M.row(r).transpose()));
  return a;
}

json policy_json(const Policy& p) {
  switch (p.kind()) {
    case Policy::Kind::kZero:
      return {{"type", "zero"}};
    case Policy::Kind::kConstant:
      return {{"type", "constant"}, {"value", vec_json(p.value())}};
    case Policy::Kind::kCustom:
      break;
  }
  throw Unsupported("policy '" + p.name() + "' cannot be serialized");
}

json cbf_json(const Cbf& cbf) {
  if (const auto* q = cbf.get_if<QuadraticCbf>()) {
    return {{"type", "quadratic"}, {"beta", q->beta}, {"P", mat_json(q->P)}, {"c", vec_json(q->c)}};
  }
  if (const auto* a = cbf.get_if<AffineCbf>()) {
    return {{"type", "affine"}, {"p", vec_json(a->p)}, {"b", a->b}};
  }
  const auto& t = *cbf.get_if<TransformedCbf>();
  if (t.inner->get_if<TransformedCbf>() != nullptr) {
    throw Unsupported("nested CBF transformations cannot be serialized");
  }
  json j = cbf_json(*t.inner);
  j["transform"] = {{"R", mat_json(t.R)}, {"delta", vec_json(t.delta)}};
  return j;
}

json box_json(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return {{"lower", vec_json(lo)}, {"upper", vec_json(hi)}};
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  const Node root(doc, "$");
  root.require_object({"name", "system", "cbf", "gamma", "strategy", "pi", "x0", "dt", "horizon",
                       "chatter_threshold", "singular_eps", "box", "probe_input_box", "outer_cbf", "outputs"});

  const LtiSystem sys = parse_system(root.at("system"));
  const int n = sys.state_dim();
  const int m = sys.input_dim();

  SafeSetSpec safe_set = parse_cbf(root.at("cbf"));
  if (safe_set.state_dim() != n) {
    root.at("cbf").fail("CBF dimension " + std::to_string(safe_set.state_dim()) +
                        " differs from system dimension " + std::to_string(n));
  }
  const ClassKappaE gamma = root.has("gamma") ? parse_gamma(root.at("gamma")) : ClassKappaE::identity();
  FilterStrategy strategy = parse_strategy(root.at("strategy"), std::move(safe_set), gamma, sys);
  const Policy pi = parse_policy(root.at("pi"), m);

  const Node x0n = root.at("x0");
  const StateVec x0 = x0n.vector();
  if (x0.size() != n) x0n.fail("expected " + std::to_string(n) + " entries (state dimension)");
  const double dt = root.at("dt").positive();
  const Node hn = root.at("horizon");
  const double horizon = hn.positive();
  if (horizon < dt) hn.fail("must be >= dt");

  std::optional<AdmissibleBox> box;
  if (auto b = root.opt("box")) {
    b->require_object({"lower", "upper"});
    const StateVec lo = b->at("lower").vector();
    const StateVec hi = b->at("upper").vector();
    if (lo.size() != n || hi.size() != n) b->fail("bounds must have " + std::to_string(n) + " entries");
    box = at_path(*b, [&] { return AdmissibleBox(lo, hi); });
  }

  Scenario scn{root.has("name") ? root.at("name").string() : std::string("custom"),
               sys,
               std::move(strategy),
               pi,
               x0,
               dt,
               horizon,
               kDefaultChatterThreshold,
               kSingularEps,
               box};
  if (auto c = root.opt("chatter_threshold")) {
    scn.chatter_threshold = c->number();
    if (scn.chatter_threshold < 0.0) c->fail("must be >= 0");
  }
  if (auto e = root.opt("singular_eps")) scn.singular_eps = e->positive();
  at_path(root, [&] {
    scn.validate();
    return 0;
  });

  ScenarioConfig cfg{std::move(scn), {}, std::nullopt, std::nullopt};
  if (auto pb = root.opt("probe_input_box")) cfg.probe_input_box = parse_input_box(*pb, m);
  if (auto oc = root.opt("outer_cbf")) {
    const SafeSetSpec outer = parse_cbf(*oc);
    if (outer.is_polytope()) oc->fail("must be a single CBF");
    if (outer.state_dim() != n) oc->fail("dimension differs from system dimension");
    cfg.outer_cbf = *outer.single();
  }
  if (auto out = root.opt("outputs")) {
    out->require_object({"csv", "json"});
    if (auto c = out->opt("csv")) cfg.outputs.csv = c->string();
    if (auto j = out->opt("json")) cfg.outputs.json = j->string();
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json scenario_to_json(const Scenario& scn) {
  const auto* lti = std::get_if<LtiSystem>(&scn.system);
  if (lti == nullptr) throw Unsupported("only LTI systems can be serialized");

  json j;
  j["name"] = scn.name;
  j["system"] = {{"A", mat_json(lti->A())}, {"B", mat_json(lti->B())}};

  const FilterStrategy& s = scn.strategy;
  if (const CbfSet* poly = s.safe_set.polytope()) {
    json members = json::array();
    for (const auto& m : poly->members()) members.push_back({{"p", vec_json(m.p)}, {"b", m.b}});
    j["cbf"] = {{"type", "polytope"}, {"members", members}};
  } else {
    j["cbf"] = cbf_json(*s.safe_set.single());
  }
  if (s.gamma.kind() == ClassKappaE::Kind::kIdentity) {
    j["gamma"] = {{"type", "identity"}};
  } else {
    j["gamma"] = {{"type", "linear"}, {"k", s.gamma.gain()}};
  }

  json st;
  switch (s.kind) {
    case FilterStrategy::Kind::kNone:
      st["type"] = "none";
      break;
    case FilterStrategy::Kind::kStandard:
      st["type"] = "standard";
      break;
    case FilterStrategy::Kind::kPenalty:
      st["type"] = "penalty";
      st["r"] = s.r;
      st["eps"] = s.eps;
      break;
  }
  if (s.kind != FilterStrategy::Kind::kNone) {
    if (s.pi_safe) st["pi_safe"] = policy_json(*s.pi_safe);
    if (s.hocbf) st["hocbf_gains"] = s.hocbf->gains();
    st["on_infeasible"] = s.on_infeasible == InfeasiblePolicy::kHalt ? "halt" : "apply_safe";
    if (s.input_box) st["input_box"] = box_json(s.input_box->lower, s.input_box->upper);
  }
  j["strategy"] = st;
  j["pi"] = policy_json(scn.pi);
  j["x0"] = vec_json(scn.x0);
  j["dt"] = scn.dt;
  j["horizon"] = scn.horizon;
  j["chatter_threshold"] = scn.chatter_threshold;
  j["singular_eps"] = scn.singular_eps;
  if (scn.box) j["box"] = box_json(scn.box->lower, scn.box->upper);
  return j;
}

json metrics_to_json(const Metrics& m) {
  return {{"min_h", m.min_h},
          {"violated", m.violated},
          {"input_min", m.input_min},
          {"input_max", m.input_max},
          {"total_variation", m.total_variation},
          {"chatter_count", m.chatter_count},
          {"steps_near_singular", m.steps_near_singular},
          {"fallback_steps", m.fallback_steps},
          {"active_steps", m.active_steps}};
}

json relative_degree_to_json(const RelativeDegreeReport& r) {
  json pts = json::array();
  for (const auto& x : r.singular_points) pts.push_back(vec_json(x));
  return {{"s", r.s ? json(*r.s) : json("undetermined")},
          {"eps", r.eps},
          {"points_checked", r.points_checked},
          {"singular_count", r.singular_points.size()},
          {"singular_points", pts}};
}

json inner_check_to_json(const InnerCheckReport& r) {
  json pts = json::array();
  for (const auto& x : r.violations) pts.push_back(vec_json(x));
  return {{"grid_per_dim", r.grid_per_dim},
          {"points_checked", r.points_checked},
          {"inner_approximation", r.empty()},
          {"violations", pts}};
}

}  // namespace cbfdt
