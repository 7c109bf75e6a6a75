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

// JSON scenario documents. Schema (units: seconds for dt and horizon):
//
//   {
//     "name":     string,                                   optional
//     "system":   {"A": [[..]], "B": [[..]]} | {"named": "sim" | "real"},
//     "cbf":      {"type": "quadratic", "beta": b, "P": [[..]], "c": [..],
//                  "transform": {"theta": t | "R": [[..]], "delta": [..]}}   transform optional
//               | {"type": "affine", "p": [..], "b": b, "transform": {..}}
//               | {"type": "polytope", "members": [{"p": [..], "b": b}, ..]},
//     "gamma":    {"type": "identity"} | {"type": "linear", "k": k},          default identity
//     "strategy": {"type": "none" | "standard" | "penalty",
//                  "r": r, "eps": e, "pi_safe": <policy>,                   penalty only
//                  "hocbf_gains": [..], "on_infeasible": "halt" | "apply_safe",
//                  "input_box": {"lower": [..], "upper": [..]}},
//     "pi":       {"type": "zero"} | {"type": "constant", "value": [..]},
//     "x0": [..], "dt": dt, "horizon": T,
//     "chatter_threshold": c, "singular_eps": e,                            optional
//     "box":      {"lower": [..], "upper": [..]},                           optional
//     "probe_input_box": {"lower": [..], "upper": [..]},                    optional
//     "outer_cbf": <single cbf>,                                            optional
//     "outputs":  {"csv": path, "json": path}                               optional
//   }
//
// Unknown keys are rejected. Errors name the offending field path.

#ifndef CBFDT_CONFIG_HPP_
#define CBFDT_CONFIG_HPP_

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "cbfdt/filter.hpp"
#include "cbfdt/lie.hpp"
#include "cbfdt/sim.hpp"
#include "cbfdt/types.hpp"

namespace cbfdt {

class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : InvalidArgument(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct OutputPaths {
  std::optional<std::string> csv;
  std::optional<std::string> json;
};

struct ScenarioConfig {
  Scenario scenario;
  OutputPaths outputs;
  // Input bounds used when sampling CBF-condition feasibility.
  std::optional<InputBox> probe_input_box;
  // Reference set for the polytope inner check.
  std::optional<Cbf> outer_cbf;
};

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

// Inverse of parse_config for scenarios built from serializable parts.
// Throws Unsupported for custom policies or non-LTI systems.
nlohmann::json scenario_to_json(const Scenario& scn);

nlohmann::json metrics_to_json(const Metrics& m);
nlohmann::json relative_degree_to_json(const RelativeDegreeReport& r);
nlohmann::json inner_check_to_json(const InnerCheckReport& r);

}  // namespace cbfdt

#endif  // CBFDT_CONFIG_HPP_
