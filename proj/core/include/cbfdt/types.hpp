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

#ifndef CBFDT_TYPES_HPP_
#define CBFDT_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cbfdt {

// State x in R^n. Dimensions are small (n <= 4 in practice), so dynamic-size
// Eigen storage is used throughout.
using StateVec = Eigen::VectorXd;
// Input u in R^m.
using InputVec = Eigen::VectorXd;
// A 1 x m row, e.g. L_g h(x) or a constraint coefficient.
using InputRow = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed matrices, mismatched dimensions, non-positive step sizes.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested feature exists only for a restricted class of inputs.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// The constraint system {a_i u >= b_i} (plus optional box) is empty.
// `constraint_index` is the most violated constraint at the point the solver
// gave up and `violation` its residual b_i - a_i u (> 0).
class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, int constraint_index, double violation)
      : Error(what), constraint_index_(constraint_index), violation_(violation) {}

  int constraint_index() const { return constraint_index_; }
  double violation() const { return violation_; }

 private:
  int constraint_index_;
  double violation_;
};

inline bool all_finite(const Eigen::Ref<const Matrix>& m) {
  return m.allFinite();
}

}  // namespace cbfdt

#endif  // CBFDT_TYPES_HPP_
