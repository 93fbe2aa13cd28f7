// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "demix2d/kernels.hpp"
#include "demix2d/types.hpp"

namespace demix2d::cert {

// Unit-modulus sign patterns for the atoms (h) and the spike support (rsign).
struct SignPattern {
  std::vector<cplx> h;
  std::vector<cplx> rsign;
};

// Bivariate trigonometric polynomial with coefficients on J = {-m..m}^2,
//   P(f) = sum_k coef_k e^{-i*2*pi*f.k},
// stored with row = k1+m, col = k2+m. Derivatives weight coefficient k by
// (-i*2*pi*k1)^{i1} (-i*2*pi*k2)^{i2}.
struct TrigPoly2D {
  int n = 0;
  Eigen::MatrixXcd coef;

  TrigPoly2D() = default;
  explicit TrigPoly2D(int n_) : n(n_), coef(Eigen::MatrixXcd::Zero(n_, n_)) {}

  int m() const { return (n - 1) / 2; }
  cplx& at(const Index2& k) { return coef(k.k1 + m(), k.k2 + m()); }
  cplx at(const Index2& k) const { return coef(k.k1 + m(), k.k2 + m()); }

  cplx eval(const Frequency2D& f, int i1, int i2) const;
  // all partial derivatives i1,i2 in 0..3 in one coefficient pass
  std::array<std::array<cplx, 4>, 4> eval_derivs(const Frequency2D& f) const;
};

// The scaled interpolation block system: rows/cols ordered
// (value, d/df1, d/df2) x atoms, with the kappa scalings
//   [ E00    k*E10    k*E01  ]
//   [-k*E10 -k^2*E20 -k^2*E11]
//   [-k*E01 -k^2*E11 -k^2*E02]
// where (E_{i1i2})_{l,j} = K^{(i1,i2)}(f_l - f_j) and K is the full kernel or
// its restriction to the spike complement.
struct InterpolationSystem {
  Eigen::MatrixXcd E;
  Eigen::VectorXcd rhs;
};

struct Certificate {
  AtomSet atoms;
  std::vector<Index2> omega;
  SignPattern signs;
  Eigen::VectorXcd alpha, beta1, beta2;  // kernel-combination coefficients
  TrigPoly2D coeffs;                     // C on J
  double lambda = 0.0;                   // 1/sqrt(n^2)
  double kappa = 0.0;
  double rcond = 0.0;           // reciprocal condition number of the system
  double interp_residual = 0.0; // max_i |Q(f_i) - h_i| after assembly
  double grad_residual = 0.0;   // max_i ||grad Q(f_i)||_inf
};

// b(k): the rank-one factor of the interpolation system,
//   [1; +i*2*pi*kappa*k1; +i*2*pi*kappa*k2] (x) [e^{-i*2*pi*f_i.k}]_i
// (derivative entries carry +i so that E = sum_{k in Omega^c} c c b b^* and
// the gradient conditions hold simultaneously).
Eigen::VectorXcd build_b(const Index2& k, const AtomSet& atoms, const kernels::KappaConst& kap);

// Scaled block system; full J when omega is absent (the deterministic E-bar),
// otherwise downdated by the rank-one spike contributions.
InterpolationSystem build_E(const AtomSet& atoms, const kernels::KernelCoeffs& coeffs,
                            const kernels::KappaConst& kap,
                            const std::optional<std::vector<Index2>>& omega = std::nullopt);

// R(f) = (1/sqrt(n^2)) sum_{k_l in Omega} r_l e^{-i*2*pi*f.k_l}
TrigPoly2D build_R(const std::vector<Index2>& omega, const std::vector<cplx>& rsign, int n);

struct SolveOptions {
  double rcond_min = 1e-10;
};

// Solve the interpolation system and assemble the dual-polynomial
// coefficients: C_k = lambda*r_l on Omega, C_k = c_{k1} c_{k2} b(k)^* v on
// the complement. The deterministic construction is the omega-empty case.
Certificate solve_certificate(const AtomSet& atoms, const std::vector<Index2>& omega,
                              const SignPattern& signs, const kernels::KernelCoeffs& coeffs,
                              const kernels::KappaConst& kap, const SolveOptions& opts = {});

// coefficient-form evaluation of Q and its partials
cplx eval_Q(const Certificate& cert, const Frequency2D& f, int i1, int i2);

struct ValidationParams {
  int grid_points_per_axis = 1024;
  double tol_interp = 1e-8;
  double near_radius = -1.0;  // < 0: defaults to 0.09/m
  int near_samples = 9;       // Hessian lattice per axis inside the near box
  int refine_factor = 4;      // near-region refinement relative to the grid
};

struct ValidationReport {
  double interp_max_err = 0.0;        // (a) max |Q(f_i) - h_i|
  double far_grid_max_abs = 0.0;      // (b) max |Q| outside near regions
  double near_refined_max_abs = 0.0;  // (b) refined near-region max, atoms excluded
  bool hessian_ok = false;            // (b) sign-aligned Hessian negative definite near atoms
  double omega_sign_max_err = 0.0;    // (c) max_l |C_{k_l}/lambda - r_l|
  double off_omega_max_abs = 0.0;     // (d) max_{k not in Omega} |C_k|
  double lambda = 0.0;
  int grid_points_per_axis = 0;
  double near_radius = 0.0;
  bool pass_interp = false;
  bool pass_bound = false;
  bool pass_omega_sign = false;
  bool pass_off_omega = false;

  bool pass() const { return pass_interp && pass_bound && pass_omega_sign && pass_off_omega; }
  std::string to_json() const;
};

ValidationReport validate_certificate(const Certificate& cert, const ValidationParams& params = {});

}  // namespace demix2d::cert
