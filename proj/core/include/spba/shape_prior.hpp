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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spba/procedural.hpp"
#include "spba/types.hpp"

namespace spba {

// The latent shape embedding optimized by bundle adjustment.
using StyleVector = VecX;

// Linear shape generator G(s) = mean + sum_k s_k * basis_k. Flattened basis
// vectors are mutually orthonormal (PCA construction).
struct LinearShapePrior {
  PointMatrix mean;                // N x 3
  std::vector<PointMatrix> basis;  // d slices, each N x 3
  VecX mode_scales;       // stddev of training coefficients per mode
  VecX singular_values;   // raw singular values, kept for diagnostics

  int dims() const { return static_cast<int>(basis.size()); }
  long point_count() const { return mean.rows(); }
};

// Small nonlinear generator: affine -> tanh -> affine -> N x 3 reshape.
struct MlpShapePrior {
  MatX w1;  // hidden x d
  VecX b1;  // hidden
  MatX w2;  // 3N x hidden
  VecX b2;  // 3N

  int dims() const { return static_cast<int>(w1.cols()); }
  long point_count() const { return w2.rows() / 3; }

  static MlpShapePrior random(int d, int hidden, long n_points,
                              std::uint64_t seed);
};

PointMatrix generate(const LinearShapePrior& prior, const StyleVector& s);
PointMatrix generate(const MlpShapePrior& prior, const StyleVector& s);

// dL/ds given dL/dpoints, restricted to `active` rows when provided; rows
// outside `active` contribute exactly zero. The full-set call equals the
// sum over any partition of the indices.
StyleVector generate_backward(const LinearShapePrior& prior,
                              const StyleVector& s,
                              const PointMatrix& grad_points,
                              const IndexList* active = nullptr);
StyleVector generate_backward(const MlpShapePrior& prior, const StyleVector& s,
                              const PointMatrix& grad_points,
                              const IndexList* active = nullptr);

// PCA over index-corresponded shapes: mean plus the top-d right singular
// vectors of the centered (shapes x 3N) data matrix.
LinearShapePrior fit_pca(const std::vector<PointMatrix>& shapes, int d);

// Least-squares style coefficients of a corresponded cloud:
// s_k = <basis_k, cloud - mean>.
StyleVector project_to_style(const LinearShapePrior& prior,
                             const PointMatrix& cloud);

// Prior plus everything needed to synthesize scenes from it.
struct ShapePriorBundle {
  LinearShapePrior prior;
  PointAttributes attrs;  // canonical per-index albedo and normals
  ShapeFamily family;
  int train_shapes = 0;
  std::uint64_t sampling_seed = 0;

  long point_count() const { return prior.point_count(); }
  int dims() const { return prior.dims(); }
};

// Samples `train_shapes` parameter vectors from the family, builds the
// corresponded training clouds, fits the PCA prior and averages the
// per-index attributes.
ShapePriorBundle train_prior(const ShapeFamily& family, int train_shapes,
                             int d, int n_points, std::uint64_t seed);

void save_prior(const std::string& path, const ShapePriorBundle& bundle);
ShapePriorBundle load_prior(const std::string& path);

}  // namespace spba
