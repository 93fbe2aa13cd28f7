// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>

namespace demix2d::simd {

// Data-parallel inner kernels used by the numeric modules. Every entry has a
// scalar reference implementation and (on x86-64) an AVX2+FMA variant; the
// active backend is chosen once at startup from CPUID, overridable with
// DEMIX2D_SIMD=scalar|avx2. Backends are equivalence-tested against each
// other in tests/test_simd.cpp.
struct Ops {
  const char* name;

  // full convolution: out[0..na+nb-2] = sum_j a[j] b[i-j]
  void (*conv_full)(const double* a, std::size_t na, const double* b, std::size_t nb, double* out);

  // trigonometric moments of a real coefficient tail:
  //   out[p] = sum_{k=1}^{m} c[k-1] * k^p * exp(i*2*pi*k*f),  p = 0..3
  // (the k=0 term and the negative-k half are folded in by the caller using
  // symmetry of the coefficient sequence)
  void (*trig_moments)(const double* c, int m, double f, std::complex<double> out[4]);

  // clip every entry to the closed complex disk of the given radius
  void (*clip_disk)(std::complex<double>* z, std::size_t n, double radius);

  double (*max_abs)(const std::complex<double>* z, std::size_t n);
  double (*sum_abs)(const std::complex<double>* z, std::size_t n);
  double (*sum_abs2)(const std::complex<double>* z, std::size_t n);

  // sum_i conj(a_i) * b_i
  std::complex<double> (*dotc)(const std::complex<double>* a, const std::complex<double>* b, std::size_t n);

  // y += alpha * x
  void (*axpy)(std::complex<double> alpha, const std::complex<double>* x, std::complex<double>* y, std::size_t n);
};

// Active backend (runtime-selected, cached).
const Ops& ops();

// Individual backends, for equivalence tests. avx2_ops() returns nullptr when
// the build or the CPU lacks AVX2+FMA.
const Ops& scalar_ops();
const Ops* avx2_ops();

}  // namespace demix2d::simd
