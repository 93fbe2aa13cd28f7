// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "demix2d/certificate.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "demix2d/gridfft.hpp"

namespace demix2d::cert {

namespace {

// derivative weight (-i*2*pi*k)^p
cplx deriv_weight(int k, int p) {
  const cplx w(0.0, -kTwoPi * k);
  cplx out = 1.0;
  for (int i = 0; i < p; ++i) out *= w;
  return out;
}

std::vector<cplx> phase_row(double f, int m, double sign) {
  // e^{sign * i * 2*pi * f * k} for k = -m..m
  std::vector<cplx> out(static_cast<std::size_t>(2 * m + 1));
  for (int k = -m; k <= m; ++k) {
    const double t = sign * kTwoPi * f * k;
    out[static_cast<std::size_t>(k + m)] = cplx(std::cos(t), std::sin(t));
  }
  return out;
}

}  // namespace

cplx TrigPoly2D::eval(const Frequency2D& f, int i1, int i2) const {
  const int mm = m();
  const auto w1 = phase_row(f.f1, mm, -1.0);
  const auto w2 = phase_row(f.f2, mm, -1.0);
  cplx acc = 0.0;
  for (int k1 = -mm; k1 <= mm; ++k1) {
    cplx inner = 0.0;
    for (int k2 = -mm; k2 <= mm; ++k2)
      inner += coef(k1 + mm, k2 + mm) * deriv_weight(k2, i2) * w2[static_cast<std::size_t>(k2 + mm)];
    acc += deriv_weight(k1, i1) * w1[static_cast<std::size_t>(k1 + mm)] * inner;
  }
  return acc;
}

std::array<std::array<cplx, 4>, 4> TrigPoly2D::eval_derivs(const Frequency2D& f) const {
  const int mm = m();
  const auto w1 = phase_row(f.f1, mm, -1.0);
  const auto w2 = phase_row(f.f2, mm, -1.0);
  std::array<std::array<cplx, 4>, 4> out{};
  for (int k1 = -mm; k1 <= mm; ++k1) {
    std::array<cplx, 4> inner{};
    for (int k2 = -mm; k2 <= mm; ++k2) {
      const cplx base = coef(k1 + mm, k2 + mm) * w2[static_cast<std::size_t>(k2 + mm)];
      const cplx w(0.0, -kTwoPi * k2);
      cplx term = base;
      inner[0] += term;
      term *= w;
      inner[1] += term;
      term *= w;
      inner[2] += term;
      term *= w;
      inner[3] += term;
    }
    const cplx w(0.0, -kTwoPi * k1);
    cplx outer = w1[static_cast<std::size_t>(k1 + mm)];
    for (int i1 = 0; i1 < 4; ++i1) {
      for (int i2 = 0; i2 < 4; ++i2) out[static_cast<std::size_t>(i1)][static_cast<std::size_t>(i2)] += outer * inner[static_cast<std::size_t>(i2)];
      outer *= w;
    }
  }
  return out;
}

Eigen::VectorXcd build_b(const Index2& k, const AtomSet& atoms, const kernels::KappaConst& kap) {
  const int r = atoms.r();
  if (r == 0) throw ConfigError("build_b: atom set is empty");
  Eigen::VectorXcd b(3 * r);
  const cplx w1(0.0, kTwoPi * kap.value * k.k1);
  const cplx w2(0.0, kTwoPi * kap.value * k.k2);
  for (int i = 0; i < r; ++i) {
    const auto& f = atoms.atoms[static_cast<std::size_t>(i)].freq;
    const double t = -kTwoPi * (f.f1 * k.k1 + f.f2 * k.k2);
    const cplx e(std::cos(t), std::sin(t));
    b(i) = e;
    b(r + i) = w1 * e;
    b(2 * r + i) = w2 * e;
  }
  return b;
}

InterpolationSystem build_E(const AtomSet& atoms, const kernels::KernelCoeffs& coeffs,
                            const kernels::KappaConst& kap,
                            const std::optional<std::vector<Index2>>& omega) {
  const int r = atoms.r();
  if (r == 0) throw ConfigError("build_E: atom set is empty");
  const double kp = kap.value;

  InterpolationSystem sys;
  sys.E = Eigen::MatrixXcd::Zero(3 * r, 3 * r);
  sys.rhs = Eigen::VectorXcd::Zero(3 * r);

  for (int l = 0; l < r; ++l) {
    for (int j = 0; j < r; ++j) {
      const auto& fl = atoms.atoms[static_cast<std::size_t>(l)].freq;
      const auto& fj = atoms.atoms[static_cast<std::size_t>(j)].freq;
      const auto d1 = kernels::kernel_eval_1d_all(coeffs, fl.f1 - fj.f1);
      const auto d2 = kernels::kernel_eval_1d_all(coeffs, fl.f2 - fj.f2);
      const cplx k00 = d1[0] * d2[0];
      const cplx k10 = d1[1] * d2[0];
      const cplx k01 = d1[0] * d2[1];
      const cplx k20 = d1[2] * d2[0];
      const cplx k11 = d1[1] * d2[1];
      const cplx k02 = d1[0] * d2[2];
      sys.E(l, j) = k00;
      sys.E(l, r + j) = kp * k10;
      sys.E(l, 2 * r + j) = kp * k01;
      sys.E(r + l, j) = -kp * k10;
      sys.E(r + l, r + j) = -kp * kp * k20;
      sys.E(r + l, 2 * r + j) = -kp * kp * k11;
      sys.E(2 * r + l, j) = -kp * k01;
      sys.E(2 * r + l, r + j) = -kp * kp * k11;
      sys.E(2 * r + l, 2 * r + j) = -kp * kp * k02;
    }
  }

  if (omega) {
    // restriction to the spike complement: E = E-bar - sum_{k in Omega} c c b b^*
    const int m = coeffs.m;
    for (const auto& k : *omega) {
      if (std::abs(k.k1) > m || std::abs(k.k2) > m) throw ConfigError("build_E: omega index outside J");
      const double cc = coeffs.at(k.k1) * coeffs.at(k.k2);
      if (cc == 0.0) continue;
      const Eigen::VectorXcd b = build_b(k, atoms, kap);
      sys.E.noalias() -= cc * (b * b.adjoint());
    }
  }
  return sys;
}

TrigPoly2D build_R(const std::vector<Index2>& omega, const std::vector<cplx>& rsign, int n) {
  if (omega.size() != rsign.size()) throw ConfigError("build_R: omega/rsign size mismatch");
  TrigPoly2D R(n);
  const double scale = 1.0 / n;  // 1/sqrt(n^2)
  for (std::size_t l = 0; l < omega.size(); ++l) {
    if (std::fabs(std::abs(rsign[l]) - 1.0) > 1e-12) throw ConfigError("build_R: rsign entries must be unit modulus");
    R.at(omega[l]) += scale * rsign[l];
  }
  return R;
}

Certificate solve_certificate(const AtomSet& atoms, const std::vector<Index2>& omega,
                              const SignPattern& signs, const kernels::KernelCoeffs& coeffs,
                              const kernels::KappaConst& kap, const SolveOptions& opts) {
  const int r = atoms.r();
  const int n = coeffs.n();
  const int m = coeffs.m;
  if (static_cast<int>(signs.h.size()) != r) throw ConfigError("solve_certificate: |h| != r");
  if (signs.rsign.size() != omega.size()) throw ConfigError("solve_certificate: |rsign| != |omega|");
  for (const auto& h : signs.h)
    if (std::fabs(std::abs(h) - 1.0) > 1e-12) throw ConfigError("solve_certificate: h entries must be unit modulus");

  Certificate cert;
  cert.atoms = atoms;
  cert.omega = omega;
  cert.signs = signs;
  cert.lambda = 1.0 / n;
  cert.kappa = kap.value;
  cert.coeffs = TrigPoly2D(n);

  Eigen::VectorXcd v;
  if (r > 0) {
    InterpolationSystem sys = build_E(atoms, coeffs, kap, omega.empty() ? std::nullopt : std::make_optional(omega));
    for (int i = 0; i < r; ++i) sys.rhs(i) = signs.h[static_cast<std::size_t>(i)];
    for (std::size_t l = 0; l < omega.size(); ++l)
      sys.rhs -= (signs.rsign[l] * cert.lambda) * build_b(omega[l], atoms, kap);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys.E, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double rcond = sv(sv.size() - 1) / sv(0);
    if (!(rcond >= opts.rcond_min))
      throw ConstructionFailedError("solve_certificate: interpolation system ill-conditioned (rcond=" +
                                    std::to_string(rcond) + ")");
    cert.rcond = rcond;
    v = svd.solve(sys.rhs);

    cert.alpha = v.segment(0, r);
    cert.beta1 = kap.value * v.segment(r, r);
    cert.beta2 = kap.value * v.segment(2 * r, r);
  } else {
    cert.rcond = 1.0;
    cert.alpha = cert.beta1 = cert.beta2 = Eigen::VectorXcd();
  }

  // C_k = c_{k1} c_{k2} b(k)^* v on the spike complement
  if (r > 0) {
    std::vector<std::vector<cplx>> p1(static_cast<std::size_t>(r)), p2(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
      p1[static_cast<std::size_t>(i)] = phase_row(atoms.atoms[static_cast<std::size_t>(i)].freq.f1, m, +1.0);
      p2[static_cast<std::size_t>(i)] = phase_row(atoms.atoms[static_cast<std::size_t>(i)].freq.f2, m, +1.0);
    }
    for (int k1 = -m; k1 <= m; ++k1) {
      const double c1 = coeffs.at(k1);
      if (c1 == 0.0) continue;
      for (int k2 = -m; k2 <= m; ++k2) {
        const double cc = c1 * coeffs.at(k2);
        if (cc == 0.0) continue;
        cplx acc = 0.0;
        for (int i = 0; i < r; ++i) {
          // conj(b_i(k)) entries: [1; -i*2*pi*kappa*k1; -i*2*pi*kappa*k2] * e^{+i*2*pi*f_i.k}
          const cplx e = p1[static_cast<std::size_t>(i)][static_cast<std::size_t>(k1 + m)] *
                         p2[static_cast<std::size_t>(i)][static_cast<std::size_t>(k2 + m)];
          const cplx w = v(i) - cplx(0.0, kTwoPi * kap.value) * (static_cast<double>(k1) * v(r + i) + static_cast<double>(k2) * v(2 * r + i));
          acc += w * e;
        }
        cert.coeffs.coef(k1 + m, k2 + m) = cc * acc;
      }
    }
  }
  // spike support carries the fixed sign coefficients
  for (std::size_t l = 0; l < omega.size(); ++l) cert.coeffs.at(omega[l]) = cert.lambda * signs.rsign[l];

  // post-condition diagnostics
  double interp = 0.0, grad = 0.0;
  for (int i = 0; i < r; ++i) {
    const auto d = cert.coeffs.eval_derivs(atoms.atoms[static_cast<std::size_t>(i)].freq);
    interp = std::max(interp, std::abs(d[0][0] - signs.h[static_cast<std::size_t>(i)]));
    grad = std::max({grad, std::abs(d[1][0]), std::abs(d[0][1])});
  }
  cert.interp_residual = interp;
  cert.grad_residual = grad;
  return cert;
}

cplx eval_Q(const Certificate& cert, const Frequency2D& f, int i1, int i2) {
  if (i1 < 0 || i1 > 3 || i2 < 0 || i2 > 3) throw ConfigError("eval_Q: derivative orders must be 0..3");
  return cert.coeffs.eval(f, i1, i2);
}

namespace {

bool near_any_atom(const Certificate& cert, const Frequency2D& f, double radius) {
  for (const auto& atom : cert.atoms.atoms)
    if (wrap_distance(f, atom.freq) <= radius) return true;
  return false;
}

}  // namespace

ValidationReport validate_certificate(const Certificate& cert, const ValidationParams& params) {
  if (params.grid_points_per_axis < 64) throw ConfigError("validate_certificate: grid must be >= 64 points per axis");
  const int P = params.grid_points_per_axis;
  const int m = cert.coeffs.m();
  const double radius = params.near_radius > 0.0 ? params.near_radius : 0.09 / std::max(1, m);

  ValidationReport rep;
  rep.lambda = cert.lambda;
  rep.grid_points_per_axis = P;
  rep.near_radius = radius;

  // (a) interpolation
  for (std::size_t i = 0; i < cert.atoms.atoms.size(); ++i) {
    const cplx q = cert.coeffs.eval(cert.atoms.atoms[i].freq, 0, 0);
    rep.interp_max_err = std::max(rep.interp_max_err, std::abs(q - cert.signs.h[i]));
  }
  rep.pass_interp = rep.interp_max_err <= params.tol_interp;

  // (b) far-region grid maximum
  const Eigen::MatrixXcd grid = gridfft::eval_poly_grid(cert.coeffs.coef, P);
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < P; ++q) {
      const Frequency2D f{static_cast<double>(p) / P, static_cast<double>(q) / P};
      if (near_any_atom(cert, f, radius)) continue;
      rep.far_grid_max_abs = std::max(rep.far_grid_max_abs, std::abs(grid(p, q)));
    }

  // (b) near regions: refined magnitude scan (excluding one refined cell
  // around the atom itself) and sign-aligned Hessian negativity
  const double h = 1.0 / (static_cast<double>(P) * params.refine_factor);
  rep.hessian_ok = true;
  for (std::size_t i = 0; i < cert.atoms.atoms.size(); ++i) {
    const auto& f0 = cert.atoms.atoms[i].freq;
    const cplx hi = cert.signs.h[i];
    const int steps = static_cast<int>(std::ceil(radius / h));
    for (int a = -steps; a <= steps; ++a)
      for (int b = -steps; b <= steps; ++b) {
        const Frequency2D f{wrap01(f0.f1 + a * h), wrap01(f0.f2 + b * h)};
        if (std::max(std::abs(a), std::abs(b)) >= 1) {
          rep.near_refined_max_abs = std::max(rep.near_refined_max_abs, std::abs(cert.coeffs.eval(f, 0, 0)));
        }
      }
    const int ns = std::max(3, params.near_samples);
    for (int a = 0; a < ns; ++a)
      for (int b = 0; b < ns; ++b) {
        const double u = -radius + 2.0 * radius * a / (ns - 1);
        const double w = -radius + 2.0 * radius * b / (ns - 1);
        const Frequency2D f{wrap01(f0.f1 + u), wrap01(f0.f2 + w)};
        const auto d = cert.coeffs.eval_derivs(f);
        const double q20 = (std::conj(hi) * d[2][0]).real();
        const double q11 = (std::conj(hi) * d[1][1]).real();
        const double q02 = (std::conj(hi) * d[0][2]).real();
        if (!(q20 + q02 < 0.0 && q20 * q02 - q11 * q11 > 0.0)) rep.hessian_ok = false;
      }
  }
  rep.pass_bound = rep.far_grid_max_abs < 1.0 && rep.near_refined_max_abs < 1.0 && rep.hessian_ok;
  if (cert.atoms.r() == 0) rep.pass_bound = rep.far_grid_max_abs < 1.0;

  // (c) spike-sign equality and (d) off-support coefficient bound
  for (std::size_t l = 0; l < cert.omega.size(); ++l) {
    const cplx c = cert.coeffs.at(cert.omega[l]);
    rep.omega_sign_max_err = std::max(rep.omega_sign_max_err, std::abs(c / cert.lambda - cert.signs.rsign[l]));
  }
  rep.pass_omega_sign = rep.omega_sign_max_err <= 1e-12;
  for (int k1 = -m; k1 <= m; ++k1)
    for (int k2 = -m; k2 <= m; ++k2) {
      const Index2 k{k1, k2};
      if (std::find(cert.omega.begin(), cert.omega.end(), k) != cert.omega.end()) continue;
      rep.off_omega_max_abs = std::max(rep.off_omega_max_abs, std::abs(cert.coeffs.at(k)));
    }
  rep.pass_off_omega = rep.off_omega_max_abs < cert.lambda;
  return rep;
}

std::string ValidationReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"interp_max_err\":" << interp_max_err << ",\"far_grid_max_abs\":" << far_grid_max_abs
     << ",\"near_refined_max_abs\":" << near_refined_max_abs << ",\"hessian_ok\":" << (hessian_ok ? "true" : "false")
     << ",\"omega_sign_max_err\":" << omega_sign_max_err << ",\"off_omega_max_abs\":" << off_omega_max_abs
     << ",\"lambda\":" << lambda << ",\"grid_points_per_axis\":" << grid_points_per_axis
     << ",\"near_radius\":" << near_radius << ",\"pass_interp\":" << (pass_interp ? "true" : "false")
     << ",\"pass_bound\":" << (pass_bound ? "true" : "false")
     << ",\"pass_omega_sign\":" << (pass_omega_sign ? "true" : "false")
     << ",\"pass_off_omega\":" << (pass_off_omega ? "true" : "false") << ",\"pass\":" << (pass() ? "true" : "false")
     << "}";
  return os.str();
}

}  // namespace demix2d::cert
