// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// AVX2+FMA kernels. Compiled with -mavx2 -mfma; only reachable through the
// runtime dispatcher after a CPUID check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <immintrin.h>

#include "demix2d/simd/ops.hpp"

namespace demix2d::simd {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void conv_full_avx2(const double* a, std::size_t na, const double* b, std::size_t nb, double* out) {
  const std::size_t nout = na + nb - 1;
  for (std::size_t i = 0; i < nout; ++i) out[i] = 0.0;
  for (std::size_t j = 0; j < na; ++j) {
    const __m256d aj = _mm256_set1_pd(a[j]);
    double* o = out + j;
    std::size_t k = 0;
    for (; k + 4 <= nb; k += 4) {
      const __m256d bv = _mm256_loadu_pd(b + k);
      const __m256d ov = _mm256_loadu_pd(o + k);
      _mm256_storeu_pd(o + k, _mm256_fmadd_pd(aj, bv, ov));
    }
    for (; k < nb; ++k) o[k] += a[j] * b[k];
  }
}

// Four phase lanes k, k+1, k+2, k+3 advanced by a common rotation of 4 steps,
// with exact sincos resync every 256 steps per lane.
void trig_moments_avx2(const double* c, int m, double f, std::complex<double> out[4]) {
  const double step = kTwoPi * f;
  __m256d a0r = _mm256_setzero_pd(), a0i = _mm256_setzero_pd();
  __m256d a1r = _mm256_setzero_pd(), a1i = _mm256_setzero_pd();
  __m256d a2r = _mm256_setzero_pd(), a2i = _mm256_setzero_pd();
  __m256d a3r = _mm256_setzero_pd(), a3i = _mm256_setzero_pd();

  const __m256d rot_c = _mm256_set1_pd(std::cos(4.0 * step));
  const __m256d rot_s = _mm256_set1_pd(std::sin(4.0 * step));
  const __m256d four = _mm256_set1_pd(4.0);

  __m256d pr = _mm256_setzero_pd(), pi = _mm256_setzero_pd();
  __m256d kv = _mm256_setzero_pd();

  int k = 1;
  int block = 0;
  for (; k + 3 <= m; k += 4, ++block) {
    if ((block & 63) == 0) {
      alignas(32) double cr[4], ci[4], kk[4];
      for (int l = 0; l < 4; ++l) {
        cr[l] = std::cos(step * (k + l));
        ci[l] = std::sin(step * (k + l));
        kk[l] = static_cast<double>(k + l);
      }
      pr = _mm256_load_pd(cr);
      pi = _mm256_load_pd(ci);
      kv = _mm256_load_pd(kk);
    } else {
      const __m256d nr = _mm256_fmsub_pd(pr, rot_c, _mm256_mul_pd(pi, rot_s));
      pi = _mm256_fmadd_pd(pr, rot_s, _mm256_mul_pd(pi, rot_c));
      pr = nr;
      kv = _mm256_add_pd(kv, four);
    }
    __m256d w = _mm256_loadu_pd(c + (k - 1));
    a0r = _mm256_fmadd_pd(w, pr, a0r);
    a0i = _mm256_fmadd_pd(w, pi, a0i);
    w = _mm256_mul_pd(w, kv);
    a1r = _mm256_fmadd_pd(w, pr, a1r);
    a1i = _mm256_fmadd_pd(w, pi, a1i);
    w = _mm256_mul_pd(w, kv);
    a2r = _mm256_fmadd_pd(w, pr, a2r);
    a2i = _mm256_fmadd_pd(w, pi, a2i);
    w = _mm256_mul_pd(w, kv);
    a3r = _mm256_fmadd_pd(w, pr, a3r);
    a3i = _mm256_fmadd_pd(w, pi, a3i);
  }

  double m0r = hsum(a0r), m0i = hsum(a0i);
  double m1r = hsum(a1r), m1i = hsum(a1i);
  double m2r = hsum(a2r), m2i = hsum(a2i);
  double m3r = hsum(a3r), m3i = hsum(a3i);

  for (; k <= m; ++k) {
    const double prs = std::cos(step * k), pis = std::sin(step * k);
    double w = c[k - 1];
    m0r += w * prs;
    m0i += w * pis;
    w *= k;
    m1r += w * prs;
    m1i += w * pis;
    w *= k;
    m2r += w * prs;
    m2i += w * pis;
    w *= k;
    m3r += w * prs;
    m3i += w * pis;
  }
  out[0] = {m0r, m0i};
  out[1] = {m1r, m1i};
  out[2] = {m2r, m2i};
  out[3] = {m3r, m3i};
}

void clip_disk_avx2(std::complex<double>* z, std::size_t n, double radius) {
  double* d = reinterpret_cast<double*>(z);
  const __m256d r2 = _mm256_set1_pd(radius * radius);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(d + 2 * i);  // re0 im0 re1 im1
    const __m256d sq = _mm256_mul_pd(v, v);
    const __m256d nrm = _mm256_hadd_pd(sq, sq);  // |z0|^2 |z0|^2 |z1|^2 |z1|^2
    const __m256d over = _mm256_cmp_pd(nrm, r2, _CMP_GT_OQ);
    if (_mm256_movemask_pd(over)) {
      const __m256d scale = _mm256_div_pd(_mm256_set1_pd(radius), _mm256_sqrt_pd(nrm));
      const __m256d clipped = _mm256_mul_pd(v, scale);
      _mm256_storeu_pd(d + 2 * i, _mm256_blendv_pd(v, clipped, over));
    }
  }
  for (; i < n; ++i) {
    const double a = std::abs(z[i]);
    if (a > radius) z[i] *= radius / a;
  }
}

double max_abs_avx2(const std::complex<double>* z, std::size_t n) {
  const double* d = reinterpret_cast<const double*>(z);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(d + 2 * i);
    const __m256d sq = _mm256_mul_pd(v, v);
    best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
  }
  alignas(32) double tmp[4];
  _mm256_store_pd(tmp, best);
  double b = std::max(std::max(tmp[0], tmp[1]), std::max(tmp[2], tmp[3]));
  for (; i < n; ++i) b = std::max(b, std::norm(z[i]));
  return std::sqrt(b);
}

double sum_abs_avx2(const std::complex<double>* z, std::size_t n) {
  const double* d = reinterpret_cast<const double*>(z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(d + 2 * i);
    const __m256d sq = _mm256_mul_pd(v, v);
    const __m256d nrm = _mm256_hadd_pd(sq, sq);
    // lanes 0 and 2 hold |z0|^2, |z1|^2; zero the duplicates before sqrt-sum
    const __m256d mask = _mm256_castsi256_pd(_mm256_set_epi64x(0, -1, 0, -1));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_and_pd(nrm, mask)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::abs(z[i]);
  return s;
}

double sum_abs2_avx2(const std::complex<double>* z, std::size_t n) {
  const double* d = reinterpret_cast<const double*>(z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(d + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::norm(z[i]);
  return s;
}

std::complex<double> dotc_avx2(const std::complex<double>* a, const std::complex<double>* b, std::size_t n) {
  const double* da = reinterpret_cast<const double*>(a);
  const double* db = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(da + 2 * i);  // ar0 ai0 ar1 ai1
    const __m256d y = _mm256_loadu_pd(db + 2 * i);
    acc_re = _mm256_fmadd_pd(x, y, acc_re);  // ar*br + ai*bi per pair
    const __m256d yswap = _mm256_permute_pd(y, 0x5);
    acc_im = _mm256_fmadd_pd(x, yswap, acc_im);  // ar*bi, ai*br interleaved
  }
  alignas(32) double tre[4], tim[4];
  _mm256_store_pd(tre, acc_re);
  _mm256_store_pd(tim, acc_im);
  double re = tre[0] + tre[1] + tre[2] + tre[3];
  double im = (tim[0] - tim[1]) + (tim[2] - tim[3]);
  for (; i < n; ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    re += x.real() * y.real() + x.imag() * y.imag();
    im += x.real() * y.imag() - x.imag() * y.real();
  }
  return {re, im};
}

void axpy_avx2(std::complex<double> alpha, const std::complex<double>* x, std::complex<double>* y, std::size_t n) {
  double* dy = reinterpret_cast<double*>(y);
  const double* dx = reinterpret_cast<const double*>(x);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  const __m256d sign = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(dx + 2 * i);
    const __m256d vswap = _mm256_mul_pd(_mm256_permute_pd(v, 0x5), sign);  // -im0 re0 -im1 re1
    const __m256d prod = _mm256_fmadd_pd(ar, v, _mm256_mul_pd(ai, vswap));
    _mm256_storeu_pd(dy + 2 * i, _mm256_add_pd(_mm256_loadu_pd(dy + 2 * i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

const Ops kAvx2Ops = {
    "avx2",       conv_full_avx2, trig_moments_avx2, clip_disk_avx2,
    max_abs_avx2, sum_abs_avx2,   sum_abs2_avx2,     dotc_avx2,
    axpy_avx2,
};

}  // namespace

const Ops* avx2_ops_impl() { return &kAvx2Ops; }

}  // namespace demix2d::simd
