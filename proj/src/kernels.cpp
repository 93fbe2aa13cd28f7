// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "demix2d/kernels.hpp"

#include <cmath>

#include "demix2d/simd/ops.hpp"

namespace demix2d::kernels {

namespace {
// gamma cut-off fractions of the three Dirichlet factors
constexpr double kGamma[3] = {0.247, 0.339, 0.414};
}  // namespace

cplx dirichlet_eval(int mbar, double f, int order) {
  if (mbar < 1) throw ConfigError("dirichlet_eval: mbar must be >= 1");
  if (order < 0 || order > 3) throw ConfigError("dirichlet_eval: order must be 0..3");
  const double scale = 1.0 / (2.0 * mbar + 1.0);
  cplx acc = 0.0;
  for (int k = -mbar; k <= mbar; ++k) {
    const double theta = kTwoPi * k * f;
    cplx term(std::cos(theta), std::sin(theta));
    const cplx jw(0.0, kTwoPi * k);
    for (int p = 0; p < order; ++p) term *= jw;
    acc += term;
  }
  return acc * scale;
}

KernelCoeffs triple_kernel_coeffs(int m) {
  int h[3];
  for (int i = 0; i < 3; ++i) {
    h[i] = static_cast<int>(std::floor(kGamma[i] * m));
    if (h[i] < 1) throw ConfigError("triple_kernel_coeffs: m too small (need floor(gamma_i*m) >= 1)");
  }
  // the gammas sum to 1.000, so flooring can overshoot m by at most a tap
  while (h[0] + h[1] + h[2] > m) {
    int largest = 0;
    for (int i = 1; i < 3; ++i)
      if (h[i] > h[largest]) largest = i;
    --h[largest];
    if (h[largest] < 1) throw ConfigError("triple_kernel_coeffs: m too small after cut-off adjustment");
  }

  std::vector<double> seq[3];
  for (int i = 0; i < 3; ++i) seq[i].assign(static_cast<std::size_t>(2 * h[i] + 1), 1.0 / (2.0 * h[i] + 1.0));

  const auto& ops = simd::ops();
  std::vector<double> tmp(seq[0].size() + seq[1].size() - 1);
  ops.conv_full(seq[0].data(), seq[0].size(), seq[1].data(), seq[1].size(), tmp.data());
  std::vector<double> full(tmp.size() + seq[2].size() - 1);
  ops.conv_full(tmp.data(), tmp.size(), seq[2].data(), seq[2].size(), full.data());

  KernelCoeffs out;
  out.m = m;
  out.c.assign(static_cast<std::size_t>(2 * m + 1), 0.0);
  const int support = h[0] + h[1] + h[2];  // full has indices -support..support
  for (int k = -support; k <= support; ++k) out.c[static_cast<std::size_t>(k + m)] = full[static_cast<std::size_t>(k + support)];
  return out;
}

std::array<cplx, 4> kernel_eval_1d_all(const KernelCoeffs& coeffs, double f) {
  // Exploits c_k = c_{-k}: with M_p = sum_{k>=1} c_k k^p e^{i*2*pi*k*f},
  //   sum_k c_k (i*2*pi*k)^p e^{i*2*pi*k*f}
  //     = c_0 [p=0] + (i*2*pi)^p (M_p + (-1)^p conj(M_p)),
  // which is real for every order.
  cplx moments[4];
  simd::ops().trig_moments(coeffs.c.data() + (coeffs.m + 1), coeffs.m, f, moments);
  const double c0 = coeffs.at(0);
  std::array<cplx, 4> out;
  out[0] = cplx(c0 + 2.0 * moments[0].real(), 0.0);
  out[1] = cplx(-2.0 * kTwoPi * moments[1].imag(), 0.0);
  out[2] = cplx(-2.0 * kTwoPi * kTwoPi * moments[2].real(), 0.0);
  out[3] = cplx(2.0 * kTwoPi * kTwoPi * kTwoPi * moments[3].imag(), 0.0);
  return out;
}

cplx kernel_eval_1d(const KernelCoeffs& coeffs, double f, int order) {
  if (order < 0 || order > 3) throw ConfigError("kernel_eval_1d: order must be 0..3");
  return kernel_eval_1d_all(coeffs, f)[static_cast<std::size_t>(order)];
}

cplx kernel_eval_2d(const KernelCoeffs& coeffs, const Frequency2D& f, int i1, int i2) {
  return kernel_eval_1d(coeffs, f.f1, i1) * kernel_eval_1d(coeffs, f.f2, i2);
}

KappaConst kappa(const KernelCoeffs& coeffs) {
  const double second = kernel_eval_1d(coeffs, 0.0, 2).real();
  if (!(std::fabs(second) > 0.0)) throw ConfigError("kappa: kernel second derivative vanishes at 0");
  return KappaConst{1.0 / std::sqrt(std::fabs(second))};
}

}  // namespace demix2d::kernels
