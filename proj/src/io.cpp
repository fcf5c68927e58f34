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

#include "qcl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qcl/errors.hpp"

namespace qcl {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IoError("parse_double: cannot parse '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string svg_line_chart(const std::vector<double>& x,
                           const std::vector<double>& y, bool log_x,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::string& title) {
  const int width = 640;
  const int height = 420;
  const int ml = 70, mr = 25, mt = 40, mb = 55;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  auto xval = [&](double v) { return log_x ? std::log10(v) : v; };
  double xmin = 0, xmax = 1, ymax = 1;
  if (!x.empty()) {
    xmin = xval(*std::min_element(x.begin(), x.end()));
    xmax = xval(*std::max_element(x.begin(), x.end()));
    ymax = std::max(1e-12, *std::max_element(y.begin(), y.end()));
  }
  if (xmax <= xmin) xmax = xmin + 1;
  ymax *= 1.05;

  auto px = [&](double v) { return ml + (xval(v) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return mt + ph - v / ymax * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << width / 2 << "' y='22' text-anchor='middle' "
      << "font-family='sans-serif' font-size='15'>" << title << "</text>\n";
  svg << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw
      << "' y2='" << mt + ph << "' stroke='black'/>\n";
  svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << mt + ph << "' stroke='black'/>\n";
  svg << "<text x='" << ml + pw / 2 << "' y='" << height - 12
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
      << x_label << (log_x ? " (log scale)" : "") << "</text>\n";
  svg << "<text x='16' y='" << mt + ph / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='12' "
      << "transform='rotate(-90 16 " << mt + ph / 2 << ")'>" << y_label
      << "</text>\n";

  if (!x.empty()) {
    svg << "<polyline fill='none' stroke='#1f77b4' stroke-width='2' points='";
    for (size_t i = 0; i < x.size(); ++i) {
      svg << px(x[i]) << ',' << py(y[i]) << ' ';
    }
    svg << "'/>\n";
    for (size_t i = 0; i < x.size(); ++i) {
      svg << "<circle cx='" << px(x[i]) << "' cy='" << py(y[i])
          << "' r='3.5' fill='#1f77b4'/>\n";
      svg << "<text x='" << px(x[i]) << "' y='" << mt + ph + 16
          << "' text-anchor='middle' font-family='sans-serif' "
          << "font-size='10'>" << fmt_double(x[i]) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qcl
