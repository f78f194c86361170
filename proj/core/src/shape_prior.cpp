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

#include "spba/shape_prior.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "spba/fsio.hpp"
#include "spba/random.hpp"

namespace spba {

namespace {

void check_dims(int got, int want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

Eigen::Map<const VecX> flat(const PointMatrix& m) {
  return {m.data(), m.size()};
}

}  // namespace

PointMatrix generate(const LinearShapePrior& prior, const StyleVector& s) {
  check_dims(static_cast<int>(s.size()), prior.dims(), "generate");
  PointMatrix out = prior.mean;
  for (int k = 0; k < prior.dims(); ++k) {
    out.noalias() += s[k] * prior.basis[k];
  }
  return out;
}

StyleVector generate_backward(const LinearShapePrior& prior,
                              const StyleVector& s,
                              const PointMatrix& grad_points,
                              const IndexList* active) {
  check_dims(static_cast<int>(s.size()), prior.dims(), "generate_backward");
  if (grad_points.rows() != prior.mean.rows()) {
    throw std::invalid_argument("generate_backward: grad shape mismatch");
  }
  StyleVector grad = StyleVector::Zero(prior.dims());
  if (active == nullptr) {
    for (int k = 0; k < prior.dims(); ++k) {
      grad[k] = flat(prior.basis[k]).dot(flat(grad_points));
    }
    return grad;
  }
  for (int i : *active) {
    if (i < 0 || i >= prior.mean.rows()) {
      throw std::invalid_argument("generate_backward: active index out of range");
    }
    for (int k = 0; k < prior.dims(); ++k) {
      grad[k] += prior.basis[k].row(i).dot(grad_points.row(i));
    }
  }
  return grad;
}

MlpShapePrior MlpShapePrior::random(int d, int hidden, long n_points,
                                    std::uint64_t seed) {
  Rng rng(seed);
  MlpShapePrior mlp;
  mlp.w1.resize(hidden, d);
  mlp.b1.resize(hidden);
  mlp.w2.resize(3 * n_points, hidden);
  mlp.b2.resize(3 * n_points);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(d));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (long i = 0; i < mlp.w1.size(); ++i) mlp.w1.data()[i] = s1 * rng.normal();
  for (long i = 0; i < mlp.b1.size(); ++i) mlp.b1[i] = 0.1 * rng.normal();
  for (long i = 0; i < mlp.w2.size(); ++i) mlp.w2.data()[i] = s2 * rng.normal();
  for (long i = 0; i < mlp.b2.size(); ++i) mlp.b2[i] = 0.1 * rng.normal();
  return mlp;
}

PointMatrix generate(const MlpShapePrior& prior, const StyleVector& s) {
  check_dims(static_cast<int>(s.size()), prior.dims(), "generate(mlp)");
  const VecX hidden = (prior.w1 * s + prior.b1).array().tanh();
  const VecX flat_points = prior.w2 * hidden + prior.b2;
  const long n = prior.point_count();
  PointMatrix out(n, 3);
  std::memcpy(out.data(), flat_points.data(), sizeof(double) * 3 * n);
  return out;
}

StyleVector generate_backward(const MlpShapePrior& prior, const StyleVector& s,
                              const PointMatrix& grad_points,
                              const IndexList* active) {
  check_dims(static_cast<int>(s.size()), prior.dims(), "generate_backward(mlp)");
  const long n = prior.point_count();
  if (grad_points.rows() != n) {
    throw std::invalid_argument("generate_backward(mlp): grad shape mismatch");
  }
  VecX grad_flat = VecX::Zero(3 * n);
  if (active == nullptr) {
    std::memcpy(grad_flat.data(), grad_points.data(), sizeof(double) * 3 * n);
  } else {
    // PointMatrix is column-major: entry (i, c) lives at c * n + i.
    for (int i : *active) {
      for (int c = 0; c < 3; ++c) {
        grad_flat[c * n + i] = grad_points(i, c);
      }
    }
  }
  const VecX pre = prior.w1 * s + prior.b1;
  const VecX tanh_pre = pre.array().tanh();
  const VecX grad_hidden = prior.w2.transpose() * grad_flat;
  const VecX grad_pre =
      grad_hidden.array() * (1.0 - tanh_pre.array().square());
  return prior.w1.transpose() * grad_pre;
}

LinearShapePrior fit_pca(const std::vector<PointMatrix>& shapes, int d) {
  const int m = static_cast<int>(shapes.size());
  if (m < d + 1) {
    throw std::invalid_argument("fit_pca: need at least d + 1 shapes");
  }
  const long n = shapes.front().rows();
  for (const auto& s : shapes) {
    if (s.rows() != n) throw std::invalid_argument("fit_pca: inconsistent N");
  }

  LinearShapePrior prior;
  prior.mean = PointMatrix::Zero(n, 3);
  for (const auto& s : shapes) prior.mean += s;
  prior.mean /= static_cast<double>(m);

  MatX data(m, 3 * n);
  for (int r = 0; r < m; ++r) {
    const PointMatrix centered = shapes[r] - prior.mean;
    data.row(r) = flat(centered).transpose();
  }

  Eigen::BDCSVD<MatX> svd(data, Eigen::ComputeThinV);
  const int rank = static_cast<int>(svd.singularValues().size());
  prior.basis.resize(d);
  prior.singular_values = VecX::Zero(d);
  prior.mode_scales = VecX::Zero(d);
  for (int k = 0; k < d; ++k) {
    PointMatrix mode = PointMatrix::Zero(n, 3);
    if (k < rank) {
      Eigen::Map<VecX>(mode.data(), mode.size()) = svd.matrixV().col(k);
      prior.singular_values[k] = svd.singularValues()[k];
    } else {
      // Rank-deficient data: pad with a coordinate vector orthogonalized
      // against the kept modes so the orthonormality invariant still holds.
      VecX v = VecX::Zero(3 * n);
      for (long seed_coord = k; v.norm() < 0.5; seed_coord += 1) {
        v.setZero();
        v[seed_coord % (3 * n)] = 1.0;
        for (int j = 0; j < k; ++j) {
          v -= flat(prior.basis[j]).dot(v) * flat(prior.basis[j]);
        }
      }
      Eigen::Map<VecX>(mode.data(), mode.size()) = v / v.norm();
    }
    prior.basis[k] = mode;
    prior.mode_scales[k] =
        prior.singular_values[k] / std::sqrt(static_cast<double>(m - 1));
  }
  return prior;
}

StyleVector project_to_style(const LinearShapePrior& prior,
                             const PointMatrix& cloud) {
  if (cloud.rows() != prior.mean.rows()) {
    throw std::invalid_argument("project_to_style: N mismatch");
  }
  const PointMatrix centered = cloud - prior.mean;
  StyleVector s(prior.dims());
  for (int k = 0; k < prior.dims(); ++k) {
    s[k] = flat(prior.basis[k]).dot(flat(centered));
  }
  return s;
}

ShapePriorBundle train_prior(const ShapeFamily& family, int train_shapes,
                             int d, int n_points, std::uint64_t seed) {
  if (train_shapes < d + 1) {
    throw std::invalid_argument("train_prior: need at least d + 1 shapes");
  }
  Rng rng(derive_seed(seed, 0x707269ULL));
  const std::uint64_t sampling_seed = derive_seed(seed, 0x73616dULL);

  std::vector<PointMatrix> clouds;
  clouds.reserve(train_shapes);
  PointMatrix albedo = PointMatrix::Zero(n_points, 3);
  PointMatrix normals = PointMatrix::Zero(n_points, 3);
  for (int i = 0; i < train_shapes; ++i) {
    VecX params(kNumShapeParams);
    for (int k = 0; k < kNumShapeParams; ++k) {
      params[k] = rng.uniform(family.lo[k], family.hi[k]);
    }
    ProceduralCloud cloud =
        sample_procedural_shape(family, params, n_points, sampling_seed);
    clouds.push_back(std::move(cloud.points));
    albedo += cloud.attrs.albedo;
    normals += cloud.attrs.normals;
  }

  ShapePriorBundle bundle;
  bundle.prior = fit_pca(clouds, d);
  bundle.attrs.albedo = albedo / static_cast<double>(train_shapes);
  bundle.attrs.normals.resize(n_points, 3);
  for (int i = 0; i < n_points; ++i) {
    const Vec3 n = normals.row(i).transpose();
    const double len = n.norm();
    bundle.attrs.normals.row(i) =
        (len > 1e-12 ? Vec3(n / len) : Vec3::UnitZ()).transpose();
  }
  bundle.family = family;
  bundle.train_shapes = train_shapes;
  bundle.sampling_seed = sampling_seed;
  return bundle;
}

namespace {

constexpr char kPriorMagic[8] = {'S', 'P', 'B', 'A', 'P', 'R', '1', '\n'};

void append_raw(std::string& out, const void* p, std::size_t bytes) {
  const std::size_t off = out.size();
  out.resize(off + bytes);
  std::memcpy(out.data() + off, p, bytes);
}

void append_matrix(std::string& out, const MatX& m) {
  const std::int64_t rows = m.rows(), cols = m.cols();
  append_raw(out, &rows, sizeof rows);
  append_raw(out, &cols, sizeof cols);
  append_raw(out, m.data(), sizeof(double) * m.size());
}

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;

  void raw(void* p, std::size_t n) {
    if (pos + n > bytes.size()) {
      throw std::runtime_error("prior file truncated");
    }
    std::memcpy(p, bytes.data() + pos, n);
    pos += n;
  }
  MatX matrix() {
    std::int64_t rows = 0, cols = 0;
    raw(&rows, sizeof rows);
    raw(&cols, sizeof cols);
    MatX m(rows, cols);
    raw(m.data(), sizeof(double) * m.size());
    return m;
  }
};

}  // namespace

void save_prior(const std::string& path, const ShapePriorBundle& bundle) {
  std::string out;
  append_raw(out, kPriorMagic, sizeof kPriorMagic);
  const std::int64_t d = bundle.dims();
  const std::int64_t n = bundle.point_count();
  const std::int64_t train = bundle.train_shapes;
  const std::uint64_t seed = bundle.sampling_seed;
  append_raw(out, &d, sizeof d);
  append_raw(out, &n, sizeof n);
  append_raw(out, &train, sizeof train);
  append_raw(out, &seed, sizeof seed);
  append_raw(out, bundle.family.lo.data(), sizeof(double) * kNumShapeParams);
  append_raw(out, bundle.family.hi.data(), sizeof(double) * kNumShapeParams);
  append_matrix(out, bundle.prior.mean);
  for (const auto& b : bundle.prior.basis) append_matrix(out, b);
  append_matrix(out, bundle.prior.mode_scales);
  append_matrix(out, bundle.prior.singular_values);
  append_matrix(out, bundle.attrs.albedo);
  append_matrix(out, bundle.attrs.normals);
  write_file_atomic(path, out);
}

ShapePriorBundle load_prior(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < sizeof kPriorMagic ||
      std::memcmp(bytes.data(), kPriorMagic, sizeof kPriorMagic) != 0) {
    throw std::runtime_error("not a spba prior file: " + path);
  }
  Reader r{bytes, sizeof kPriorMagic};
  std::int64_t d = 0, n = 0, train = 0;
  std::uint64_t seed = 0;
  r.raw(&d, sizeof d);
  r.raw(&n, sizeof n);
  r.raw(&train, sizeof train);
  r.raw(&seed, sizeof seed);
  ShapePriorBundle bundle;
  r.raw(bundle.family.lo.data(), sizeof(double) * kNumShapeParams);
  r.raw(bundle.family.hi.data(), sizeof(double) * kNumShapeParams);
  bundle.prior.mean = r.matrix();
  bundle.prior.basis.resize(d);
  for (int k = 0; k < d; ++k) bundle.prior.basis[k] = r.matrix();
  bundle.prior.mode_scales = r.matrix();
  bundle.prior.singular_values = r.matrix();
  bundle.attrs.albedo = r.matrix();
  bundle.attrs.normals = r.matrix();
  bundle.train_shapes = static_cast<int>(train);
  bundle.sampling_seed = seed;
  if (bundle.prior.point_count() != n) {
    throw std::runtime_error("prior file header/payload mismatch: " + path);
  }
  return bundle;
}

}  // namespace spba
