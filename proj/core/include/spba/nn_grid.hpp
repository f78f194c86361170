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

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spba/types.hpp"

namespace spba {

struct NearestNeighbor {
  int index = -1;
  double dist2 = std::numeric_limits<double>::infinity();
};

// Number of points per set up to which exact brute force is used; larger
// sets go through the uniform grid. The grid result is exactly equal to
// brute force, including lowest-index tie breaking.
inline constexpr int kBruteForceMax = 4096;

template <int D>
NearestNeighbor nearest_brute_force(
    const std::vector<Eigen::Matrix<double, D, 1>>& targets,
    const Eigen::Matrix<double, D, 1>& query) {
  NearestNeighbor best;
  for (int i = 0; i < static_cast<int>(targets.size()); ++i) {
    const double d2 = (targets[i] - query).squaredNorm();
    if (d2 < best.dist2) {
      best.dist2 = d2;
      best.index = i;
    }
  }
  return best;
}

// Uniform grid over the target bounding box with expanding-ring queries.
// Exact: a ring is abandoned only once no unvisited cell can hold a point
// at distance <= the current best, so equal-distance lower-index candidates
// in farther cells are still found.
template <int D>
class UniformGridNN {
 public:
  using Point = Eigen::Matrix<double, D, 1>;

  explicit UniformGridNN(const std::vector<Point>& targets)
      : targets_(targets) {
    if (targets_.empty()) {
      throw std::invalid_argument("UniformGridNN: empty target set");
    }
    lo_ = targets_[0];
    Point hi = targets_[0];
    for (const Point& p : targets_) {
      lo_ = lo_.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double per_axis = std::ceil(
        std::pow(static_cast<double>(targets_.size()), 1.0 / D));
    const int g = std::clamp(static_cast<int>(per_axis), 1, 512);
    cell_ = std::max((hi - lo_).maxCoeff() / g, 1e-12);
    long total = 1;
    for (int a = 0; a < D; ++a) {
      dims_[a] = static_cast<int>(std::floor((hi[a] - lo_[a]) / cell_)) + 1;
      total *= dims_[a];
    }
    max_ring_ = 0;
    for (int a = 0; a < D; ++a) max_ring_ = std::max(max_ring_, dims_[a]);

    // Counting sort of point indices by cell; ascending index within a cell.
    std::vector<int> cell_of(targets_.size());
    std::vector<int> counts(total + 1, 0);
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      cell_of[i] = cell_id(cell_coords(targets_[i]));
      ++counts[cell_of[i] + 1];
    }
    for (long c = 0; c < total; ++c) counts[c + 1] += counts[c];
    starts_ = counts;
    order_.resize(targets_.size());
    std::vector<int> cursor(starts_.begin(), starts_.end() - 1);
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      order_[cursor[cell_of[i]]++] = static_cast<int>(i);
    }
  }

  NearestNeighbor query(const Point& q) const {
    const std::array<int, D> center = cell_coords(q);
    // Distance from q to its (clamped) center cell; the ring lower bound
    // (ring - 1) * cell - off_center stays valid for out-of-box queries.
    Point proxy = q;
    for (int a = 0; a < D; ++a) {
      const double cell_lo = lo_[a] + center[a] * cell_;
      proxy[a] = std::clamp(q[a], cell_lo, cell_lo + cell_);
    }
    const double off_center = (q - proxy).norm();

    NearestNeighbor best;
    for (int ring = 0; ring <= max_ring_; ++ring) {
      if (best.index >= 0) {
        const double bound =
            std::max(0.0, (ring - 1) * cell_ - off_center);
        if (bound * bound > best.dist2) break;
      }
      visit_ring(center, ring, q, best);
    }
    return best;
  }

 private:
  std::array<int, D> cell_coords(const Point& p) const {
    std::array<int, D> c;
    for (int a = 0; a < D; ++a) {
      const int i = static_cast<int>(std::floor((p[a] - lo_[a]) / cell_));
      c[a] = std::clamp(i, 0, dims_[a] - 1);
    }
    return c;
  }

  int cell_id(const std::array<int, D>& c) const {
    int id = 0;
    for (int a = 0; a < D; ++a) id = id * dims_[a] + c[a];
    return id;
  }

  void scan_cell(const std::array<int, D>& c, const Point& q,
                 NearestNeighbor& best) const {
    const int id = cell_id(c);
    for (int k = starts_[id]; k < starts_[id + 1]; ++k) {
      const int i = order_[k];
      const double d2 = (targets_[i] - q).squaredNorm();
      if (d2 < best.dist2 || (d2 == best.dist2 && i < best.index)) {
        best.dist2 = d2;
        best.index = i;
      }
    }
  }

  // Visits all in-bounds cells at Chebyshev distance `ring` from `center`.
  void visit_ring(const std::array<int, D>& center, int ring, const Point& q,
                  NearestNeighbor& best) const {
    if (ring == 0) {
      scan_cell(center, q, best);
      return;
    }
    std::array<int, D> c{};
    if constexpr (D == 2) {
      for (int dx = -ring; dx <= ring; ++dx) {
        for (int dy = -ring; dy <= ring; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
          c[0] = center[0] + dx;
          c[1] = center[1] + dy;
          if (c[0] < 0 || c[0] >= dims_[0] || c[1] < 0 || c[1] >= dims_[1]) {
            continue;
          }
          scan_cell(c, q, best);
        }
      }
    } else {
      for (int dx = -ring; dx <= ring; ++dx) {
        for (int dy = -ring; dy <= ring; ++dy) {
          for (int dz = -ring; dz <= ring; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) {
              continue;
            }
            c[0] = center[0] + dx;
            c[1] = center[1] + dy;
            c[2] = center[2] + dz;
            bool ok = true;
            for (int a = 0; a < D; ++a) {
              ok = ok && c[a] >= 0 && c[a] < dims_[a];
            }
            if (ok) scan_cell(c, q, best);
          }
        }
      }
    }
  }

  const std::vector<Point>& targets_;
  Point lo_;
  double cell_ = 1.0;
  std::array<int, D> dims_{};
  int max_ring_ = 0;
  std::vector<int> starts_;
  std::vector<int> order_;
};

// Nearest neighbor of every query among the targets. Uses brute force when
// both sets are small (<= kBruteForceMax), the grid otherwise; both paths
// produce identical results.
template <int D>
std::vector<NearestNeighbor> nearest_neighbors(
    const std::vector<Eigen::Matrix<double, D, 1>>& queries,
    const std::vector<Eigen::Matrix<double, D, 1>>& targets) {
  std::vector<NearestNeighbor> out(queries.size());
  if (targets.empty()) return out;
  if (static_cast<int>(targets.size()) <= kBruteForceMax &&
      static_cast<int>(queries.size()) <= kBruteForceMax) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      out[i] = nearest_brute_force<D>(targets, queries[i]);
    }
    return out;
  }
  const UniformGridNN<D> grid(targets);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out[i] = grid.query(queries[i]);
  }
  return out;
}

extern template class UniformGridNN<2>;
extern template class UniformGridNN<3>;

}  // namespace spba
