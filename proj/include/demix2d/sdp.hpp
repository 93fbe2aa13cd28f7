// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "demix2d/types.hpp"

namespace demix2d::sdp {

// One autocorrelation constraint family: the Q0 cells (p, q) whose 2D vec
// offset equals `offset`, with target delta (1 at offset 0, else 0). Cells of
// the mirrored offset are implied by Hermitian symmetry.
struct TraceFamily {
  Index2 offset;
  std::vector<std::pair<int, int>> cells;
  double target = 0.0;
};

struct TraceConstraintMap {
  int n = 0;
  std::vector<TraceFamily> families;  // conjugate-deduplicated offsets
};

// Enumerates tr[Theta_{k2} (x) Theta_{k1} . Q0] = delta_k for all offsets
// |k1|,|k2| <= n-1, keeping one representative of each {k, -k} pair.
TraceConstraintMap assemble_trace_constraints(int n);

struct SdpProblem {
  SampleGrid y;
  double lambda = 0.0;

  int n() const { return y.n; }
};

struct SdpOptions {
  double tol_psd = 1e-7;
  double tol_eq = 1e-7;
  double tol_ineq = 1e-9;
  double tol_obj = 1e-8;
  int max_iters = 50000;
  int check_every = 50;
  int obj_window = 4;       // objective-stability window, in checks
  double rho = 1.0;         // ADMM penalty
  double relaxation = 1.6;  // over-relaxation alpha in (0,2)
  bool adapt_rho = true;    // deterministic residual balancing
  std::uint64_t init_seed = 0;
};

struct SdpDiagnostics {
  double psd_residual = 0.0;
  double trace_residuals_max = 0.0;
  double linf_violation = 0.0;
  int iterations = 0;
  double runtime_sec = 0.0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double rho_final = 0.0;
  // combined (primal/dual) residual recorded at every check point; the
  // smoothing window for the monotonicity contract is obj_window checks
  std::vector<double> residual_history;
};

struct SdpSolution {
  int n = 0;
  double lambda = 0.0;
  Eigen::MatrixXcd c;   // n x n dual coefficients, row = k1+m, col = k2+m
  Eigen::MatrixXcd q0;  // n^2 x n^2 Hermitian Gram block
  double objective = 0.0;
  SdpDiagnostics diagnostics;
};

// Operator-splitting (ADMM) solver for the dual program: maximize <C,Y> over
// the bordered PSD block [[Q0, vec(C)], [vec(C)^H, 1]] subject to the
// autocorrelation trace constraints and |C_k| <= lambda.
SdpSolution solve_dual_sdp(const SdpProblem& prob, const SdpOptions& opts = {});

// Frobenius-nearest PSD matrix by eigenvalue clipping; rejects inputs that
// are not Hermitian within 1e-10 (relative to the max entry).
Eigen::MatrixXcd psd_project(const Eigen::MatrixXcd& h);

// ( ||mu_hat||_TV + lambda ||z_hat||_1 ) - <C, Y>, after checking that the
// pair reproduces Y within feas_tol (relative Frobenius).
double duality_gap(const SdpSolution& sol, const SampleGrid& y, const AtomSet& mu_hat,
                   const SpikePattern& z_hat, double feas_tol = 1e-6);

}  // namespace demix2d::sdp
