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

#include "spba/ply.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spba/fsio.hpp"

namespace spba {

void write_ply(const std::string& path, const PointMatrix& points,
               const PointMatrix& albedo) {
  if (albedo.rows() != points.rows()) {
    throw std::invalid_argument("write_ply: albedo size mismatch");
  }
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << points.rows()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\n"
         "end_header\n";
  for (long i = 0; i < points.rows(); ++i) {
    out << format_double(points(i, 0)) << ' ' << format_double(points(i, 1))
        << ' ' << format_double(points(i, 2));
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(albedo(i, c), 0.0, 1.0);
      out << ' ' << static_cast<int>(std::lround(v * 255.0));
    }
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

PlyCloud read_ply(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  long n = -1;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.rfind("element vertex", 0) == 0) {
      n = std::stol(line.substr(15));
    } else if (line == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done || n < 0) {
    throw std::runtime_error("malformed PLY header: " + path);
  }
  PlyCloud cloud;
  cloud.points.resize(n, 3);
  cloud.albedo.resize(n, 3);
  for (long i = 0; i < n; ++i) {
    int r = 0, g = 0, b = 0;
    if (!(in >> cloud.points(i, 0) >> cloud.points(i, 1) >>
          cloud.points(i, 2) >> r >> g >> b)) {
      throw std::runtime_error("truncated PLY payload: " + path);
    }
    cloud.albedo(i, 0) = r / 255.0;
    cloud.albedo(i, 1) = g / 255.0;
    cloud.albedo(i, 2) = b / 255.0;
  }
  return cloud;
}

}  // namespace spba
