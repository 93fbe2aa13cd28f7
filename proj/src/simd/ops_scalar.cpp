// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference kernels. These are the semantics the AVX2 variants are
// tested against.

#include <cmath>
#include <complex>
#include <cstddef>

#include "demix2d/simd/ops.hpp"

namespace demix2d::simd {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void conv_full_scalar(const double* a, std::size_t na, const double* b, std::size_t nb, double* out) {
  const std::size_t nout = na + nb - 1;
  for (std::size_t i = 0; i < nout; ++i) out[i] = 0.0;
  for (std::size_t j = 0; j < na; ++j) {
    const double aj = a[j];
    for (std::size_t k = 0; k < nb; ++k) out[j + k] += aj * b[k];
  }
}

// Phase recurrence with periodic exact resync keeps the error near machine
// precision for m up to a few thousand.
void trig_moments_scalar(const double* c, int m, double f, std::complex<double> out[4]) {
  double a0r = 0, a0i = 0, a1r = 0, a1i = 0, a2r = 0, a2i = 0, a3r = 0, a3i = 0;
  const double step = kTwoPi * f;
  const double rc = std::cos(step), rs = std::sin(step);
  double pr = 1.0, pi = 0.0;  // e^{i*2*pi*f*k}, currently k = 0
  for (int k = 1; k <= m; ++k) {
    if ((k & 255) == 1) {
      pr = std::cos(step * k);
      pi = std::sin(step * k);
    } else {
      const double nr = pr * rc - pi * rs;
      pi = pr * rs + pi * rc;
      pr = nr;
    }
    double w = c[k - 1];
    a0r += w * pr;
    a0i += w * pi;
    w *= k;
    a1r += w * pr;
    a1i += w * pi;
    w *= k;
    a2r += w * pr;
    a2i += w * pi;
    w *= k;
    a3r += w * pr;
    a3i += w * pi;
  }
  out[0] = {a0r, a0i};
  out[1] = {a1r, a1i};
  out[2] = {a2r, a2i};
  out[3] = {a3r, a3i};
}

void clip_disk_scalar(std::complex<double>* z, std::size_t n, double radius) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(z[i]);
    if (a > radius) z[i] *= radius / a;
  }
}

double max_abs_scalar(const std::complex<double>* z, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::norm(z[i]));
  return std::sqrt(best);
}

double sum_abs_scalar(const std::complex<double>* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(z[i]);
  return s;
}

double sum_abs2_scalar(const std::complex<double>* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(z[i]);
  return s;
}

std::complex<double> dotc_scalar(const std::complex<double>* a, const std::complex<double>* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    re += x.real() * y.real() + x.imag() * y.imag();
    im += x.real() * y.imag() - x.imag() * y.real();
  }
  return {re, im};
}

void axpy_scalar(std::complex<double> alpha, const std::complex<double>* x, std::complex<double>* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

const Ops kScalarOps = {
    "scalar",       conv_full_scalar, trig_moments_scalar, clip_disk_scalar,
    max_abs_scalar, sum_abs_scalar,   sum_abs2_scalar,     dotc_scalar,
    axpy_scalar,
};

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

}  // namespace demix2d::simd
