// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <set>
#include <vector>

#include "demix2d/types.hpp"

namespace demix2d::recovery {

struct RecoveryOptions {
  int points_per_axis = 256;  // must be >= 4n
  double peak_tol = 1e-2;     // local maxima kept when >= 1 - peak_tol
  double sat_tol = 1e-3;      // spikes kept when |C_k| >= lambda*(1 - sat_tol)
};

struct RecoveryResult {
  AtomSet sources;
  SpikePattern spikes;
  double nmse = 0.0;
  bool success = false;  // nmse <= 1e-3
};

inline constexpr double kNmseSuccessThreshold = 1e-3;

// |F* C| on the uniform P x P grid (zero-padded FFT batch evaluation);
// c is the n x n dual coefficient grid with row = k1+m.
Eigen::MatrixXd eval_dual_poly_grid(const Eigen::MatrixXcd& c, int points_per_axis);

// strict local maxima of the magnitude grid above 1 - peak_tol, refined by a
// quadratic fit on the 3x3 neighborhood, merged when within one grid cell
std::vector<Frequency2D> locate_sources(const Eigen::MatrixXcd& c, int points_per_axis, double peak_tol);

// indices with |C_k| >= lambda * (1 - sat_tol)
std::vector<Index2> locate_spikes(const Eigen::MatrixXcd& c, double lambda, double sat_tol);

// joint least squares of source amplitudes and spike values against Y
std::pair<AtomSet, SpikePattern> estimate_amplitudes(const SampleGrid& y,
                                                     const std::vector<Frequency2D>& sources,
                                                     const std::vector<Index2>& spikes);

// || X - X_hat ||_F / || X ||_F with the detected spike indices omitted from
// both grids; X_hat is synthesized from the estimated sources
double nmse(const SampleGrid& x_true, const RecoveryResult& result);

}  // namespace demix2d::recovery
