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

#include "spba/procedural.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spba/random.hpp"

namespace spba {

namespace {

constexpr double kPi = std::numbers::pi;

enum Patch : int { kBody = 0, kCabin = 1, kWheelFront = 2, kWheelRear = 3 };

// Raw per-sample parameterization, drawn once per (n, seed) and shared by
// every params vector of the family.
struct SampleParam {
  int patch = kBody;
  Vec3 dir = Vec3::UnitZ();  // superellipsoid direction
  double theta = 0.0;        // wheel angle
  double axial = 0.0;        // wheel axial coordinate in [-1, 1]
  double cap_rho = 0.0;      // wheel cap radial fraction
  bool on_cap = false;
  bool mirrored = false;  // second element of the mirror pair
  bool on_plane = false;  // odd-n leftover pinned to the x = 0 plane
};

// Geometry derived from one params vector.
struct CarGeometry {
  Vec3 body_half;   // (W/2, L/2, H/2)
  double body_q;    // gauge power 2 / taper
  Vec3 cabin_half;
  double cabin_q;
  Vec3 cabin_center;
  double wheel_radius;
  double wheel_half_width;
  double wheel_x;   // lateral center of the +x wheels
  double wheel_y;   // longitudinal center magnitude
  double wheel_z;
};

CarGeometry make_geometry(const VecX& p) {
  CarGeometry g;
  const double length = p[kBodyLength];
  const double width = p[kBodyWidth];
  const double height = p[kBodyHeight];
  g.body_half = Vec3(width / 2, length / 2, height / 2);
  g.body_q = 2.0 / std::max(p[kBodyTaper], 1e-6);
  g.cabin_half =
      Vec3(0.41 * width, 0.25 * length, std::max(p[kCabinHeight], 0.0) / 2);
  g.cabin_q = 2.0 / std::max(p[kCabinTaper], 1e-6);
  g.cabin_center =
      Vec3(0.0, p[kCabinOffset], height / 2 + 0.64 * g.cabin_half.z());
  g.wheel_radius = std::max(p[kWheelRadius], 0.0);
  g.wheel_half_width = 0.07 * width;
  g.wheel_x = 0.5 * width;
  g.wheel_y = 0.32 * length;
  g.wheel_z = -0.45 * height;
  return g;
}

// Thomsen's approximation of the ellipsoid area; good enough for the
// area-weighted allocation, which only needs rough proportions.
double ellipsoid_area(const Vec3& half) {
  constexpr double p = 1.6075;
  const double a = half.x(), b = half.y(), c = half.z();
  const double s = (std::pow(a * b, p) + std::pow(a * c, p) +
                    std::pow(b * c, p)) /
                   3.0;
  return 4.0 * kPi * std::pow(s, 1.0 / p);
}

double wheel_area(const CarGeometry& g) {
  const double side = 2.0 * kPi * g.wheel_radius * 2.0 * g.wheel_half_width;
  const double caps = 2.0 * kPi * g.wheel_radius * g.wheel_radius;
  return side + caps;
}

// Fraction of a wheel's area on its caps, used to split side/cap draws.
double wheel_cap_fraction(const CarGeometry& g) {
  const double a = wheel_area(g);
  if (a <= 0.0) return 0.0;
  return 2.0 * kPi * g.wheel_radius * g.wheel_radius / a;
}

Vec3 superellipsoid_point(const Vec3& dir, const Vec3& half, double q) {
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    sum += std::pow(std::abs(dir[i]) / half[i], q);
  }
  const double t = std::pow(sum, -1.0 / q);
  return t * dir;
}

Vec3 superellipsoid_normal(const Vec3& x, const Vec3& half, double q) {
  Vec3 n;
  for (int i = 0; i < 3; ++i) {
    const double r = std::abs(x[i]) / half[i];
    n[i] = (x[i] >= 0 ? 1.0 : -1.0) * std::pow(r, q - 1.0) / half[i];
  }
  const double norm = n.norm();
  return norm > 0 ? Vec3(n / norm) : Vec3::UnitZ();
}

// Texture over the surface parameterization. Band wavelengths matter for
// the photometric landscape: the broad bands give the loss long-range
// structure, the fine band sharpens the minimum; too much high frequency
// turns the plateau into noise. Base colors differ per patch so the object
// reads as a car-ish solid.
Vec3 patch_albedo(const SampleParam& s) {
  if (s.patch == kWheelFront || s.patch == kWheelRear) {
    const double stripe = 0.5 + 0.5 * std::sin(3.0 * s.theta);
    const double base = 0.12 + 0.10 * stripe;
    return {base, base, base * 0.9};
  }
  const double a = std::atan2(s.dir.y(), s.dir.x());
  const double b = s.dir.z();
  auto band = [&](double pa, double pb, double phase) {
    return std::sin(pa * a + pb * b + phase);
  };
  Vec3 pattern;
  for (int c = 0; c < 3; ++c) {
    const double phase = 1.7 + 2.1 * c;
    pattern[c] = 0.5 + 0.30 * band(1.2, 0.9, phase) +
                 0.16 * band(3.1, -2.2, 0.6 + 1.3 * c) +
                 0.05 * band(7.0, 5.0, 2.1 + 0.7 * c);
    pattern[c] = std::clamp(pattern[c], 0.0, 1.0);
  }
  if (s.patch == kCabin) {
    return {0.15 + 0.25 * pattern[0], 0.18 + 0.30 * pattern[1],
            0.30 + 0.35 * pattern[2]};
  }
  return {0.25 + 0.60 * pattern[0], 0.15 + 0.55 * pattern[1],
          0.20 + 0.50 * pattern[2]};
}

struct Placed {
  Vec3 point;
  Vec3 normal;
};

Placed place_sample(const SampleParam& s, const CarGeometry& g) {
  Placed out;
  switch (s.patch) {
    case kBody: {
      out.point = superellipsoid_point(s.dir, g.body_half, g.body_q);
      out.normal = superellipsoid_normal(out.point, g.body_half, g.body_q);
      break;
    }
    case kCabin: {
      const Vec3 local = superellipsoid_point(s.dir, g.cabin_half, g.cabin_q);
      out.point = g.cabin_center + local;
      out.normal = superellipsoid_normal(local, g.cabin_half, g.cabin_q);
      break;
    }
    default: {
      const double y_sign = (s.patch == kWheelFront) ? 1.0 : -1.0;
      const Vec3 center(g.wheel_x, y_sign * g.wheel_y, g.wheel_z);
      if (s.on_cap) {
        const double rho = g.wheel_radius * s.cap_rho;
        const double x_sign = (s.axial >= 0.0) ? 1.0 : -1.0;
        out.point = center + Vec3(x_sign * g.wheel_half_width,
                                  rho * std::cos(s.theta),
                                  rho * std::sin(s.theta));
        out.normal = Vec3(x_sign, 0.0, 0.0);
      } else {
        out.point = center + Vec3(s.axial * g.wheel_half_width,
                                  g.wheel_radius * std::cos(s.theta),
                                  g.wheel_radius * std::sin(s.theta));
        out.normal = Vec3(0.0, std::cos(s.theta), std::sin(s.theta));
      }
      break;
    }
  }
  if (s.mirrored) {
    out.point.x() = -out.point.x();
    out.normal.x() = -out.normal.x();
  }
  return out;
}

std::vector<SampleParam> draw_parameterization(const ShapeFamily& family,
                                               int n, std::uint64_t seed) {
  const CarGeometry mid = make_geometry(family.midpoint());

  // Pair-level area weights: each patch covers both mirror halves.
  std::array<double, 4> weight = {ellipsoid_area(mid.body_half),
                                  ellipsoid_area(mid.cabin_half),
                                  2.0 * wheel_area(mid),
                                  2.0 * wheel_area(mid)};
  if (mid.cabin_half.z() <= 0.0) weight[kCabin] = 0.0;
  if (mid.wheel_radius <= 0.0) weight[kWheelFront] = weight[kWheelRear] = 0.0;
  double total = weight[0] + weight[1] + weight[2] + weight[3];
  if (total <= 0.0) {
    weight = {1.0, 0.0, 0.0, 0.0};
    total = 1.0;
  }

  const int n_pairs = n / 2;
  const bool leftover = (n % 2) != 0;

  // Largest-remainder allocation of pairs to patches.
  std::array<int, 4> count{};
  std::array<double, 4> frac{};
  int assigned = 0;
  for (int p = 0; p < 4; ++p) {
    const double exact = n_pairs * weight[p] / total;
    count[p] = static_cast<int>(std::floor(exact));
    frac[p] = exact - count[p];
    assigned += count[p];
  }
  while (assigned < n_pairs) {
    int best = 0;
    for (int p = 1; p < 4; ++p) {
      if (frac[p] > frac[best]) best = p;
    }
    ++count[best];
    frac[best] = -1.0;
    ++assigned;
  }

  const double cap_frac = wheel_cap_fraction(mid);
  Rng rng(seed);
  std::vector<SampleParam> samples;
  samples.reserve(n);
  for (int patch = 0; patch < 4; ++patch) {
    for (int i = 0; i < count[patch]; ++i) {
      SampleParam s;
      s.patch = patch;
      if (patch == kBody || patch == kCabin) {
        s.dir = rng.unit_vector();
      } else {
        s.theta = rng.uniform(0.0, 2.0 * kPi);
        s.axial = rng.uniform(-1.0, 1.0);
        s.on_cap = rng.uniform() < cap_frac;
        s.cap_rho = std::sqrt(rng.uniform());
      }
      samples.push_back(s);
      SampleParam m = s;
      m.mirrored = true;
      samples.push_back(m);
    }
  }
  if (leftover) {
    SampleParam s;
    s.patch = kBody;
    s.dir = rng.unit_vector();
    s.dir.x() = 0.0;
    if (s.dir.norm() < 1e-12) s.dir = Vec3::UnitZ();
    s.dir.normalize();
    s.on_plane = true;
    samples.push_back(s);
  }
  return samples;
}

}  // namespace

ShapeFamily ShapeFamily::standard() {
  ShapeFamily f;
  f.lo = {1.7, 0.80, 0.45, -0.45, 0.25, 0.55, 0.60, 0.14};
  f.hi = {2.6, 1.20, 0.75, 0.20, 0.50, 1.00, 1.10, 0.24};
  return f;
}

VecX ShapeFamily::midpoint() const {
  VecX m(kNumShapeParams);
  for (int i = 0; i < kNumShapeParams; ++i) m[i] = 0.5 * (lo[i] + hi[i]);
  return m;
}

bool ShapeFamily::contains(const VecX& params) const {
  if (params.size() != kNumShapeParams) return false;
  for (int i = 0; i < kNumShapeParams; ++i) {
    if (!(params[i] >= lo[i] && params[i] <= hi[i])) return false;
  }
  return true;
}

VecX ShapeFamily::clamp(const VecX& params) const {
  VecX out = params;
  for (int i = 0; i < kNumShapeParams; ++i) {
    out[i] = std::clamp(out[i], lo[i], hi[i]);
  }
  return out;
}

ProceduralCloud sample_procedural_shape(const ShapeFamily& family,
                                        const VecX& params, int n,
                                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_procedural_shape: n < 1");
  if (!family.contains(params)) {
    throw std::invalid_argument(
        "sample_procedural_shape: params out of family bounds");
  }
  const auto samples = draw_parameterization(family, n, seed);
  const CarGeometry g = make_geometry(params);

  ProceduralCloud cloud;
  cloud.points.resize(n, 3);
  cloud.attrs.albedo.resize(n, 3);
  cloud.attrs.normals.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    const Placed placed = place_sample(samples[i], g);
    cloud.points.row(i) = placed.point.transpose();
    cloud.attrs.normals.row(i) = placed.normal.transpose();
    cloud.attrs.albedo.row(i) = patch_albedo(samples[i]).transpose();
  }
  return cloud;
}

}  // namespace spba
