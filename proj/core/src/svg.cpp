// Copyright 2026 The spba Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spba/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "spba/fsio.hpp"

namespace spba {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  const double margin_l = 64, margin_r = 16, margin_t = 36, margin_b = 48;
  const double pw = plot.width - margin_l - margin_r;
  const double ph = plot.height - margin_t - margin_b;

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : plot.series) {
    for (double v : s.x) { x_lo = std::min(x_lo, v); x_hi = std::max(x_hi, v); }
    for (double v : s.y) { y_lo = std::min(y_lo, v); y_hi = std::max(y_hi, v); }
  }
  if (!(x_lo < x_hi)) { x_lo -= 1.0; x_hi += 1.0; }
  if (!(y_lo < y_hi)) { y_lo -= 1.0; y_hi += 1.0; }
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  auto sx = [&](double x) { return margin_l + pw * (x - x_lo) / (x_hi - x_lo); };
  auto sy = [&](double y) { return margin_t + ph * (1.0 - (y - y_lo) / (y_hi - y_lo)); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width
      << "\" height=\"" << plot.height << "\" viewBox=\"0 0 " << plot.width
      << " " << plot.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << plot.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">" << plot.title
      << "</text>\n";

  // Axes with 5 ticks each.
  out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 5.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 5.0;
    out << "<line x1=\"" << fmt(sx(xv)) << "\" y1=\"" << fmt(margin_t)
        << "\" x2=\"" << fmt(sx(xv)) << "\" y2=\"" << fmt(margin_t + ph)
        << "\" stroke=\"#ddd\"/>\n";
    out << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(sy(yv))
        << "\" x2=\"" << fmt(margin_l + pw) << "\" y2=\"" << fmt(sy(yv))
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(margin_t + ph + 14)
        << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    out << "<text x=\"" << fmt(margin_l - 6) << "\" y=\"" << fmt(sy(yv) + 3)
        << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  out << "<text x=\"" << plot.width / 2 << "\" y=\"" << plot.height - 8
      << "\" text-anchor=\"middle\" font-size=\"12\">" << plot.x_label
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << plot.height / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << plot.height / 2 << ")\">" << plot.y_label << "</text>\n";
  out << "</g>\n";

  int legend_y = static_cast<int>(margin_t) + 6;
  for (const auto& s : plot.series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i])) << " ";
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << "<circle cx=\"" << fmt(sx(s.x[i])) << "\" cy=\"" << fmt(sy(s.y[i]))
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    }
    out << "<rect x=\"" << fmt(margin_l + pw - 130) << "\" y=\"" << legend_y
        << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << fmt(margin_l + pw - 116) << "\" y=\"" << legend_y + 9
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::string& path, const SvgPlot& plot) {
  write_file_atomic(path, render_svg(plot));
}

}  // namespace spba
