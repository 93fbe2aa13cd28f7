// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "demix2d/common.hpp"

namespace demix2d {

// Point on the 2D frequency torus, both coordinates in [0,1).
struct Frequency2D {
  double f1 = 0.0;
  double f2 = 0.0;
};

inline double wrap01(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;  // guards against -1e-18 rounding up
  return y;
}

// wrap-around distance of two points on the unit circle, in [0, 1/2]
inline double wrap_dist_1d(double a, double b) {
  const double d = std::fabs(wrap01(a) - wrap01(b));
  return std::min(d, 1.0 - d);
}

// l-infinity wrap-around metric on the torus
inline double wrap_distance(const Frequency2D& a, const Frequency2D& b) {
  return std::max(wrap_dist_1d(a.f1, b.f1), wrap_dist_1d(a.f2, b.f2));
}

struct Atom {
  Frequency2D freq;
  cplx amp;
};

// Atomic spectral measure: T = {freq_i}, d = {amp_i}, r = atoms.size().
struct AtomSet {
  std::vector<Atom> atoms;

  int r() const { return static_cast<int>(atoms.size()); }
};

// minimum pairwise wrap-around separation; requires r >= 2
double min_separation(const AtomSet& set);

// Index on the symmetric grid J = {-m..m}^2 with n = 2m+1 (n odd).
struct Index2 {
  int k1 = 0;
  int k2 = 0;

  friend bool operator==(const Index2&, const Index2&) = default;
};

inline bool index_less(const Index2& a, const Index2& b) {
  return a.k2 != b.k2 ? a.k2 < b.k2 : a.k1 < b.k1;
}

// n x n complex samples indexed by k in J. Storage is column-major with
// row = k1 + m, col = k2 + m, so vec() stacking matches the SDP's
// Theta_{k2} (x) Theta_{k1} convention.
struct SampleGrid {
  int n = 0;
  Eigen::MatrixXcd a;

  SampleGrid() = default;
  explicit SampleGrid(int n_) : n(n_), a(Eigen::MatrixXcd::Zero(n_, n_)) {
    if (n_ < 1 || n_ % 2 == 0) throw ConfigError("SampleGrid: n must be odd and positive");
  }

  int m() const { return (n - 1) / 2; }
  cplx& at(const Index2& k) { return a(k.k1 + m(), k.k2 + m()); }
  cplx at(const Index2& k) const { return a(k.k1 + m(), k.k2 + m()); }
};

// Sparse spiky corruption: support Omega in J plus the nonzero values.
struct SpikePattern {
  std::vector<std::pair<Index2, cplx>> entries;  // kept sorted by index_less

  int s() const { return static_cast<int>(entries.size()); }
  bool contains(const Index2& k) const {
    for (const auto& [idx, v] : entries)
      if (idx == k) return true;
    return false;
  }
};

}  // namespace demix2d
