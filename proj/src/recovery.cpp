// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "demix2d/recovery.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "demix2d/gridfft.hpp"
#include "demix2d/signal.hpp"

namespace demix2d::recovery {

Eigen::MatrixXd eval_dual_poly_grid(const Eigen::MatrixXcd& c, int points_per_axis) {
  const int n = static_cast<int>(c.rows());
  if (points_per_axis < 4 * n) throw ConfigError("eval_dual_poly_grid: need at least 4n points per axis");
  return gridfft::eval_poly_grid(c, points_per_axis).cwiseAbs();
}

namespace {

// quadratic surface fit on the wrapped 3x3 neighborhood; returns the vertex
// offset in grid cells, clamped to the cell
Eigen::Vector2d refine_peak(const Eigen::MatrixXd& g, int p, int q) {
  const int P = static_cast<int>(g.rows());
  Eigen::MatrixXd A(9, 6);
  Eigen::VectorXd b(9);
  int row = 0;
  for (int a = -1; a <= 1; ++a)
    for (int c = -1; c <= 1; ++c, ++row) {
      const int pp = (p + a + P) % P;
      const int qq = (q + c + P) % P;
      A(row, 0) = 1.0;
      A(row, 1) = a;
      A(row, 2) = c;
      A(row, 3) = a * a;
      A(row, 4) = a * c;
      A(row, 5) = c * c;
      b(row) = g(pp, qq);
    }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  const double d20 = 2.0 * coef(3), d11 = coef(4), d02 = 2.0 * coef(5);
  const double det = d20 * d02 - d11 * d11;
  if (!(det > 0.0) || !(d20 < 0.0)) return {0.0, 0.0};  // not a proper maximum; keep the grid node
  Eigen::Vector2d off;
  off(0) = (-coef(1) * d02 + coef(2) * d11) / det;
  off(1) = (-coef(2) * d20 + coef(1) * d11) / det;
  off(0) = std::clamp(off(0), -0.5, 0.5);
  off(1) = std::clamp(off(1), -0.5, 0.5);
  return off;
}

}  // namespace

std::vector<Frequency2D> locate_sources(const Eigen::MatrixXcd& c, int points_per_axis, double peak_tol) {
  const int P = points_per_axis;
  const Eigen::MatrixXd g = eval_dual_poly_grid(c, P);
  const double threshold = 1.0 - peak_tol;

  struct Peak {
    Frequency2D f;
    double value;
  };
  std::vector<Peak> peaks;
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < P; ++q) {
      const double v = g(p, q);
      if (v < threshold) continue;
      bool strict_max = true;
      for (int a = -1; a <= 1 && strict_max; ++a)
        for (int b = -1; b <= 1; ++b) {
          if (a == 0 && b == 0) continue;
          if (g((p + a + P) % P, (q + b + P) % P) >= v) {
            strict_max = false;
            break;
          }
        }
      if (!strict_max) continue;
      const Eigen::Vector2d off = refine_peak(g, p, q);
      peaks.push_back({{wrap01((p + off(0)) / P), wrap01((q + off(1)) / P)}, v});
    }

  // merge refined peaks that landed within one grid cell of each other
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
  std::vector<Frequency2D> out;
  for (const auto& pk : peaks) {
    bool dup = false;
    for (const auto& kept : out)
      if (wrap_distance(pk.f, kept) <= 1.0 / P) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(pk.f);
  }
  return out;
}

std::vector<Index2> locate_spikes(const Eigen::MatrixXcd& c, double lambda, double sat_tol) {
  const int n = static_cast<int>(c.rows());
  const int m = (n - 1) / 2;
  std::vector<Index2> out;
  for (int k2 = -m; k2 <= m; ++k2)
    for (int k1 = -m; k1 <= m; ++k1)
      if (std::abs(c(k1 + m, k2 + m)) >= lambda * (1.0 - sat_tol)) out.push_back({k1, k2});
  return out;
}

std::pair<AtomSet, SpikePattern> estimate_amplitudes(const SampleGrid& y,
                                                     const std::vector<Frequency2D>& sources,
                                                     const std::vector<Index2>& spikes) {
  const int n = y.n;
  const int m = y.m();
  const int N = n * n;
  const int cols = static_cast<int>(sources.size() + spikes.size());
  if (cols > N) throw ConfigError("estimate_amplitudes: more unknowns than samples");
  if (cols == 0) return {AtomSet{}, SpikePattern{}};

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, cols);
  for (std::size_t j = 0; j < sources.size(); ++j) {
    for (int k2 = -m; k2 <= m; ++k2)
      for (int k1 = -m; k1 <= m; ++k1) {
        const double t = kTwoPi * (sources[j].f1 * k1 + sources[j].f2 * k2);
        A((k1 + m) + n * (k2 + m), static_cast<Eigen::Index>(j)) = cplx(std::cos(t), std::sin(t));
      }
  }
  for (std::size_t l = 0; l < spikes.size(); ++l) {
    const auto& k = spikes[l];
    A((k.k1 + m) + n * (k.k2 + m), static_cast<Eigen::Index>(sources.size() + l)) = 1.0;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
  if (qr.rank() < cols) throw DegenerateFitError("estimate_amplitudes: design matrix is rank deficient");
  const Eigen::Map<const Eigen::VectorXcd> vecY(y.a.data(), N);
  const Eigen::VectorXcd x = qr.solve(vecY);

  AtomSet atoms;
  for (std::size_t j = 0; j < sources.size(); ++j) atoms.atoms.push_back({sources[j], x(static_cast<Eigen::Index>(j))});
  SpikePattern z;
  for (std::size_t l = 0; l < spikes.size(); ++l)
    z.entries.emplace_back(spikes[l], x(static_cast<Eigen::Index>(sources.size() + l)));
  std::sort(z.entries.begin(), z.entries.end(),
            [](const auto& a, const auto& b) { return index_less(a.first, b.first); });
  return {std::move(atoms), std::move(z)};
}

double nmse(const SampleGrid& x_true, const RecoveryResult& result) {
  const int n = x_true.n;
  SampleGrid xhat = signal::synthesize(result.sources, n);
  const int m = x_true.m();
  Eigen::ArrayXXd mask = Eigen::ArrayXXd::Ones(n, n);
  for (const auto& [k, v] : result.spikes.entries) mask(k.k1 + m, k.k2 + m) = 0.0;

  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (mask(i, j) == 0.0) continue;
      num += std::norm(x_true.a(i, j) - xhat.a(i, j));
      den += std::norm(x_true.a(i, j));
    }
  if (den == 0.0) throw ConfigError("nmse: reference grid has zero norm on the retained indices");
  return std::sqrt(num / den);
}

}  // namespace demix2d::recovery
