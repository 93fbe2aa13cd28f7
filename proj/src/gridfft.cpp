// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "demix2d/gridfft.hpp"

#include <fftw3.h>

#include <mutex>

#include "demix2d/common.hpp"

namespace demix2d::gridfft {

namespace {
// FFTW planning is not thread-safe; execution on private buffers is.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

Eigen::MatrixXcd eval_poly_grid(const Eigen::MatrixXcd& coef, int P) {
  const int n = static_cast<int>(coef.rows());
  if (coef.cols() != n || n % 2 == 0) throw ConfigError("eval_poly_grid: coefficient grid must be odd square");
  if (P < n) throw ConfigError("eval_poly_grid: grid must have at least n points per axis");
  const int m = (n - 1) / 2;

  fftw_complex* buf;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    buf = fftw_alloc_complex(static_cast<std::size_t>(P) * P);
    plan = fftw_plan_dft_2d(P, P, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(P) * P; ++i) buf[i][0] = buf[i][1] = 0.0;

  // embed with wrap-around indices; FFTW buffers are row-major (a0 slow)
  for (int k1 = -m; k1 <= m; ++k1) {
    const int a0 = (k1 % P + P) % P;
    for (int k2 = -m; k2 <= m; ++k2) {
      const int a1 = (k2 % P + P) % P;
      const cplx v = coef(k1 + m, k2 + m);
      fftw_complex& slot = buf[static_cast<std::size_t>(a0) * P + a1];
      slot[0] += v.real();
      slot[1] += v.imag();
    }
  }

  fftw_execute(plan);

  Eigen::MatrixXcd out(P, P);
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < P; ++q) {
      const fftw_complex& v = buf[static_cast<std::size_t>(p) * P + q];
      out(p, q) = cplx(v[0], v[1]);
    }

  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
    fftw_free(buf);
  }
  return out;
}

}  // namespace demix2d::gridfft
