// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "demix2d/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

#include "demix2d/rng.hpp"
#include "demix2d/signal.hpp"
#include "demix2d/simd/ops.hpp"

namespace demix2d::sdp {

TraceConstraintMap assemble_trace_constraints(int n) {
  if (n < 1 || n % 2 == 0) throw ConfigError("assemble_trace_constraints: n must be odd");
  const int N = n * n;
  TraceConstraintMap map;
  map.n = n;
  for (int o2 = -(n - 1); o2 <= n - 1; ++o2) {
    for (int o1 = -(n - 1); o1 <= n - 1; ++o1) {
      // keep one representative of each conjugate pair {k, -k}
      if (o2 < 0 || (o2 == 0 && o1 < 0)) continue;
      TraceFamily fam;
      fam.offset = {o1, o2};
      fam.target = (o1 == 0 && o2 == 0) ? 1.0 : 0.0;
      for (int q1 = 0; q1 < n; ++q1) {
        const int p1 = q1 + o1;
        if (p1 < 0 || p1 >= n) continue;
        for (int q2 = 0; q2 < n; ++q2) {
          const int p2 = q2 + o2;
          if (p2 < 0 || p2 >= n) continue;
          fam.cells.emplace_back(p1 + n * p2, q1 + n * q2);
        }
      }
      map.families.push_back(std::move(fam));
    }
  }
  (void)N;
  return map;
}

namespace {

// exact Euclidean projection of the Hermitian Q0 block onto the trace
// constraint families (closed-form averaging, mirrored writes)
void project_trace(Eigen::MatrixXcd& M, const TraceConstraintMap& map) {
  for (const auto& fam : map.families) {
    cplx sum = 0.0;
    for (const auto& [p, q] : fam.cells) sum += M(p, q);
    if (fam.offset.k1 == 0 && fam.offset.k2 == 0) {
      const double d = (sum.real() - fam.target) / static_cast<double>(fam.cells.size());
      for (const auto& [p, q] : fam.cells) M(p, q) = cplx(M(p, q).real() - d, 0.0);
    } else {
      const cplx d = (sum - fam.target) / static_cast<double>(fam.cells.size());
      for (const auto& [p, q] : fam.cells) {
        M(p, q) -= d;
        M(q, p) = std::conj(M(p, q));
      }
    }
  }
}

double trace_residual(const Eigen::MatrixXcd& M, const TraceConstraintMap& map) {
  double worst = 0.0;
  for (const auto& fam : map.families) {
    cplx sum = 0.0;
    for (const auto& [p, q] : fam.cells) sum += M(p, q);
    worst = std::max(worst, std::abs(sum - fam.target));
  }
  return worst;
}

Eigen::MatrixXcd psd_clip(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const int d = static_cast<int>(ev.size());
  int neg = 0;
  while (neg < d && ev(neg) < 0.0) ++neg;
  Eigen::MatrixXcd out;
  if (neg <= d - neg) {
    // few negative directions: subtract them from the input
    const Eigen::MatrixXcd vneg = es.eigenvectors().leftCols(neg);
    out = h - vneg * ev.head(neg).asDiagonal() * vneg.adjoint();
  } else {
    const Eigen::MatrixXcd vpos = es.eigenvectors().rightCols(d - neg);
    out = vpos * ev.tail(d - neg).asDiagonal() * vpos.adjoint();
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return out;
}

}  // namespace

Eigen::MatrixXcd psd_project(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw ConfigError("psd_project: matrix must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ConfigError("psd_project: input is not Hermitian within tolerance");
  return psd_clip(0.5 * (h + h.adjoint()));
}

SdpSolution solve_dual_sdp(const SdpProblem& prob, const SdpOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = prob.n();
  if (prob.lambda <= 0.0) throw ConfigError("solve_dual_sdp: lambda must be positive");
  const int N = n * n;
  const int D = N + 1;
  const TraceConstraintMap map = assemble_trace_constraints(n);

  const Eigen::Map<const Eigen::VectorXcd> vecY(prob.y.a.data(), N);

  double rho = opts.rho;
  const double alpha = opts.relaxation;

  // feasible diagonal start; optional seeded perturbation of the Q0 diagonal
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(D, D);
  if (opts.init_seed != 0) {
    Rng rng(opts.init_seed);
    double total = 0.0;
    Eigen::VectorXd diag(N);
    for (int i = 0; i < N; ++i) {
      diag(i) = 1.0 + 1e-3 * rng.uniform01();
      total += diag(i);
    }
    for (int i = 0; i < N; ++i) W(i, i) = diag(i) / total;
  } else {
    for (int i = 0; i < N; ++i) W(i, i) = 1.0 / N;
  }
  W(N, N) = 1.0;

  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(D, D);
  Eigen::MatrixXcd M = W;
  Eigen::MatrixXcd W_prev = W;

  SdpSolution sol;
  sol.n = n;
  sol.lambda = prob.lambda;
  auto& diag = sol.diagnostics;

  double obj_prev = std::numeric_limits<double>::quiet_NaN();
  int obj_stable_checks = 0;
  int it = 0;
  for (it = 1; it <= opts.max_iters; ++it) {
    // M-update: gradient shift on the border, then exact projection onto the
    // affine/trace/box set (disjoint entry groups)
    M = W - U;
    M.col(N).head(N) += vecY * (0.5 / rho);
    simd::ops().clip_disk(M.col(N).head(N).data(), static_cast<std::size_t>(N), prob.lambda);
    M.row(N).head(N) = M.col(N).head(N).adjoint();
    M(N, N) = 1.0;
    project_trace(M, map);

    // W-update with over-relaxation, then dual ascent
    W_prev = W;
    const Eigen::MatrixXcd S = alpha * M + (1.0 - alpha) * W + U;
    W = psd_clip(S);
    U = S - W;

    if (it % opts.check_every == 0) {
      const double mn = std::max(1.0, M.norm());
      const double r_prim = (M - W).norm() / mn;
      const double s_dual = rho * (W - W_prev).norm() / mn;
      diag.residual_history.push_back(std::max(r_prim, s_dual));
      diag.primal_residual = r_prim;
      diag.dual_residual = s_dual;

      const double obj = vecY.dot(M.col(N).head(N)).real();
      if (!std::isnan(obj_prev) && std::fabs(obj - obj_prev) <= opts.tol_obj * std::max(1.0, std::fabs(obj)))
        ++obj_stable_checks;
      else
        obj_stable_checks = 0;
      obj_prev = obj;

      if (r_prim < 50.0 * opts.tol_psd && obj_stable_checks >= opts.obj_window) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
        const double psd_res = std::max(0.0, -es.eigenvalues().minCoeff());
        const double tr_res = trace_residual(M, map);
        double linf = 0.0;
        for (int i = 0; i < N; ++i) linf = std::max(linf, std::abs(M(i, N)) - prob.lambda);
        linf = std::max(0.0, linf);
        if (psd_res <= opts.tol_psd && tr_res <= opts.tol_eq && linf <= opts.tol_ineq) {
          diag.psd_residual = psd_res;
          diag.trace_residuals_max = tr_res;
          diag.linf_violation = linf;
          diag.converged = true;
          break;
        }
      }

      if (opts.adapt_rho && (it % (opts.check_every * 4) == 0)) {
        if (r_prim > 10.0 * s_dual && rho < 1e4) {
          rho *= 2.0;
          U *= 0.5;
        } else if (s_dual > 10.0 * r_prim && rho > 1e-4) {
          rho *= 0.5;
          U *= 2.0;
        }
      }
    }
  }

  if (!diag.converged) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    diag.psd_residual = std::max(0.0, -es.eigenvalues().minCoeff());
    diag.trace_residuals_max = trace_residual(M, map);
    double linf = 0.0;
    for (int i = 0; i < N; ++i) linf = std::max(linf, std::abs(M(i, N)) - prob.lambda);
    diag.linf_violation = std::max(0.0, linf);
  }
  diag.iterations = std::min(it, opts.max_iters);
  diag.rho_final = rho;
  diag.runtime_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  sol.q0 = M.topLeftCorner(N, N);
  sol.c = Eigen::MatrixXcd(n, n);
  for (int j = 0; j < n; ++j) sol.c.col(j) = M.col(N).segment(j * n, n);
  sol.objective = vecY.dot(M.col(N).head(N)).real();
  return sol;
}

double duality_gap(const SdpSolution& sol, const SampleGrid& y, const AtomSet& mu_hat,
                   const SpikePattern& z_hat, double feas_tol) {
  SampleGrid yhat = signal::observe(signal::synthesize(mu_hat, y.n), z_hat);
  const double mismatch = (yhat.a - y.a).norm();
  if (mismatch > feas_tol * std::max(1.0, y.a.norm()))
    throw ConfigError("duality_gap: primal pair does not reproduce Y within tolerance (residual " +
                      std::to_string(mismatch) + ")");
  double primal = 0.0;
  for (const auto& atom : mu_hat.atoms) primal += std::abs(atom.amp);
  double l1 = 0.0;
  for (const auto& [k, v] : z_hat.entries) l1 += std::abs(v);
  primal += sol.lambda * l1;

  const Eigen::Map<const Eigen::VectorXcd> vecY(y.a.data(), y.n * y.n);
  const Eigen::Map<const Eigen::VectorXcd> vecC(sol.c.data(), sol.n * sol.n);
  const double obj = vecY.dot(vecC).real();
  return primal - obj;
}

}  // namespace demix2d::sdp
