// Copyright 2026 The convduel Authors.
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

#ifndef CONVDUEL_CLI_OUTPUT_HPP_
#define CONVDUEL_CLI_OUTPUT_HPP_

#include <string>
#include <vector>

#include "convduel/experiment.hpp"

namespace convduel::cli {

// Shortest-safe text for a double: 17 significant digits.
std::string format_double(double value);

// Per-run rows: header t,seed,instant_regret,cum_regret. The seed column
// holds the run label (user * 100000 + seed).
std::string runs_csv(const RegretTrace& trace);

// Aggregate rows: header t,mean_cum,stderr_cum.
std::string aggregate_csv(const RegretTrace& trace);

struct CurveSeries {
  std::string label;
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

// Reads an aggregate CSV; the label is the file stem without "_aggregate".
// Throws FormatError on a bad header, a malformed row or non-increasing t.
CurveSeries read_aggregate_csv(const std::string& path);

// Standalone SVG line chart: one polyline per series over a shaded
// +/- standard-error band, with axes, ticks and a legend. Throws FormatError
// when series disagree on their t values.
std::string render_svg(const std::vector<CurveSeries>& series, const std::string& title);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace convduel::cli

#endif  // CONVDUEL_CLI_OUTPUT_HPP_
