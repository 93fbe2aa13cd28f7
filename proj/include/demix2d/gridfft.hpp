// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace demix2d::gridfft {

// Zero-padded batch evaluation of P(f) = sum_{k in J} coef_k e^{-i*2*pi*f.k}
// on the uniform grid f = (p/P, q/P): returns G with G(p, q) = P(p/P, q/P).
// coef is n x n with row = k1+m, col = k2+m; requires P >= n.
Eigen::MatrixXcd eval_poly_grid(const Eigen::MatrixXcd& coef, int P);

}  // namespace demix2d::gridfft
