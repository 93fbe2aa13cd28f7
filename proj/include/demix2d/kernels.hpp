// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "demix2d/common.hpp"
#include "demix2d/types.hpp"

namespace demix2d::kernels {

// Fourier coefficients of the squared-free product of three Dirichlet kernels
// with cut-offs floor(gamma_i * m). c is real, even-symmetric, indexed
// -m..m via c[k + m], and sums to 1.
struct KernelCoeffs {
  int m = 0;
  std::vector<double> c;  // size 2m+1

  double at(int k) const { return c[static_cast<std::size_t>(k + m)]; }
  int n() const { return 2 * m + 1; }
};

struct KappaConst {
  double value = 0.0;
};

// order-th derivative of the normalized Dirichlet kernel
//   K(mbar, f) = (2*mbar+1)^{-1} sum_{k=-mbar}^{mbar} e^{i*2*pi*k*f}
// computed by direct term summation (oracle-grade path, also used by the
// product-form consistency tests).
cplx dirichlet_eval(int mbar, double f, int order);

// Coefficients of the triple kernel; throws on m too small for three
// nonempty factors (m >= 5). If the floored cut-offs overshoot m the largest
// is shrunk until the convolution support fits -m..m.
KernelCoeffs triple_kernel_coeffs(int m);

// order-th derivative (order 0..3) of K(f) = sum_k c_k e^{i*2*pi*k*f}.
cplx kernel_eval_1d(const KernelCoeffs& coeffs, double f, int order);

// all orders 0..3 in one coefficient pass
std::array<cplx, 4> kernel_eval_1d_all(const KernelCoeffs& coeffs, double f);

// separable 2D evaluation: K^{(i1,i2)}(f) = K^{(i1)}(f1) * K^{(i2)}(f2)
cplx kernel_eval_2d(const KernelCoeffs& coeffs, const Frequency2D& f, int i1, int i2);

// kappa = 1 / sqrt(|K''(0)|)
KappaConst kappa(const KernelCoeffs& coeffs);

}  // namespace demix2d::kernels
