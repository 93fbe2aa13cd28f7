// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "demix2d/rng.hpp"
#include "demix2d/types.hpp"

namespace demix2d::signal {

inline constexpr int kRejectionBudget = 10000;

enum class SpikeMode { kExactS, kBernoulli };

// amplitude law shared by sources and spikes: magnitude 0.5 + chi2(1),
// phase uniform on [0, 2*pi)
cplx sample_amplitude(Rng& rng);

// r frequencies i.i.d. uniform on the torus conditioned on
// min_separation >= delta_min (joint rejection sampling), amplitudes from
// sample_amplitude. Throws InfeasibleSeparationError when the budget runs out.
AtomSet sample_sources(int r, double delta_min, Rng& rng);

// X_k = sum_i d_i e^{i*2*pi*f_i.k} on the symmetric index set J
SampleGrid synthesize(const AtomSet& atoms, int n);

// spike support and values; exact-s draws a uniform s-subset of J, bernoulli
// includes each index independently with probability s/n^2
SpikePattern sample_spikes(int s, int n, SpikeMode mode, Rng& rng);

// Y = X + Z
SampleGrid observe(const SampleGrid& x, const SpikePattern& z);

}  // namespace demix2d::signal
