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

#include "cbfdt/trajectory_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace cbfdt {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidArgument("trajectory CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_header(int state_dim, int input_dim) {
  std::string h = "t";
  for (int i = 1; i <= state_dim; ++i) h += ",x" + std::to_string(i);
  for (int i = 1; i <= input_dim; ++i) h += ",u" + std::to_string(i);
  for (int i = 1; i <= input_dim; ++i) h += ",u_proposed" + std::to_string(i);
  h += ",h_min,lg_norm,active,fallback";
  return h;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.empty()) throw InvalidArgument("cannot write an empty trajectory");
  const auto& first = traj.steps.front();
  os << csv_header(static_cast<int>(first.x.size()), static_cast<int>(first.u_applied.size())) << '\n';
  std::string line;
  for (const StepRecord& r : traj.steps) {
    line = format_real(r.t);
    for (Eigen::Index i = 0; i < r.x.size(); ++i) line += ',' + format_real(r.x(i));
    for (Eigen::Index i = 0; i < r.u_applied.size(); ++i) line += ',' + format_real(r.u_applied(i));
    for (Eigen::Index i = 0; i < r.u_proposed.size(); ++i) line += ',' + format_real(r.u_proposed(i));
    line += ',' + format_real(r.h_min());
    line += ',' + format_real(r.lg_norm);
    line += r.active ? ",1" : ",0";
    line += r.fallback ? ",1" : ",0";
    os << line << '\n';
  }
}

std::string to_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_csv(os, traj);
  return os.str();
}

Trajectory read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("trajectory CSV is empty");
  const std::vector<std::string> header = split(line);
  int n = 0;
  int m = 0;
  for (const auto& col : header) {
    if (col.size() > 1 && col[0] == 'x') ++n;
    if (col.size() > 1 && col[0] == 'u' && col.rfind("u_proposed", 0) != 0) ++m;
  }
  if (header != split(csv_header(n, m))) throw InvalidArgument("unrecognized trajectory CSV header");

  Trajectory traj;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line);
    if (f.size() != header.size()) {
      throw InvalidArgument("trajectory CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
    }
    std::size_t c = 0;
    StepRecord r;
    r.t = parse_real(f[c++], line_no);
    r.x.resize(n);
    for (int i = 0; i < n; ++i) r.x(i) = parse_real(f[c++], line_no);
    r.u_applied.resize(m);
    for (int i = 0; i < m; ++i) r.u_applied(i) = parse_real(f[c++], line_no);
    r.u_proposed.resize(m);
    for (int i = 0; i < m; ++i) r.u_proposed(i) = parse_real(f[c++], line_no);
    r.h = {parse_real(f[c++], line_no)};
    r.lg_norm = parse_real(f[c++], line_no);
    r.active = f[c++] == "1";
    r.fallback = f[c++] == "1";
    traj.steps.push_back(std::move(r));
  }
  return traj;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "dt,min_h,violated,input_min,input_max,total_variation,chatter_count,steps_near_singular,"
        "fallback_steps\n";
  for (const auto& r : rows) {
    const Metrics& m = r.metrics;
    os << format_real(r.dt) << ',' << format_real(m.min_h) << ',' << (m.violated ? 1 : 0) << ','
       << format_real(m.input_min) << ',' << format_real(m.input_max) << ','
       << format_real(m.total_variation) << ',' << m.chatter_count << ',' << m.steps_near_singular
       << ',' << m.fallback_steps << '\n';
  }
}

}  // namespace cbfdt
