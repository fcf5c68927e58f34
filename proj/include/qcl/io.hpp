// Copyright 2026 The QCL Authors
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

#pragma once

#include <string>
#include <vector>

namespace qcl {

/// Shortest decimal string that round-trips to the same double.
std::string fmt_double(double v);

double parse_double(const std::string& s);

std::vector<std::string> split_csv_row(const std::string& line);

/// Minimal static SVG line chart (one series). x values may be plotted on
/// a log axis; y is linear in [0, 1.05 * max].
std::string svg_line_chart(const std::vector<double>& x,
                           const std::vector<double>& y, bool log_x,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::string& title);

}  // namespace qcl
