// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "demix2d/signal.hpp"

#include <algorithm>
#include <cmath>

namespace demix2d {

double min_separation(const AtomSet& set) {
  if (set.r() < 2) throw ConfigError("min_separation: needs at least 2 atoms");
  double best = 0.5;
  for (std::size_t i = 0; i < set.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < set.atoms.size(); ++j)
      best = std::min(best, wrap_distance(set.atoms[i].freq, set.atoms[j].freq));
  return best;
}

namespace signal {

cplx sample_amplitude(Rng& rng) {
  const double g = rng.normal();
  const double mag = 0.5 + g * g;
  const double phase = rng.uniform(0.0, kTwoPi);
  return cplx(mag * std::cos(phase), mag * std::sin(phase));
}

AtomSet sample_sources(int r, double delta_min, Rng& rng) {
  if (r < 0) throw ConfigError("sample_sources: r must be nonnegative");
  AtomSet out;
  out.atoms.reserve(static_cast<std::size_t>(r));
  if (r == 0) return out;

  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    std::vector<Frequency2D> freqs(static_cast<std::size_t>(r));
    for (auto& f : freqs) {
      f.f1 = rng.uniform01();
      f.f2 = rng.uniform01();
    }
    bool ok = true;
    if (r >= 2 && delta_min > 0.0) {
      for (std::size_t i = 0; ok && i < freqs.size(); ++i)
        for (std::size_t j = i + 1; j < freqs.size(); ++j)
          if (wrap_distance(freqs[i], freqs[j]) < delta_min) {
            ok = false;
            break;
          }
    }
    if (!ok) continue;
    for (const auto& f : freqs) out.atoms.push_back({f, sample_amplitude(rng)});
    return out;
  }
  throw InfeasibleSeparationError("sample_sources: rejection budget exhausted for r=" + std::to_string(r) +
                                  " delta_min=" + std::to_string(delta_min));
}

SampleGrid synthesize(const AtomSet& atoms, int n) {
  SampleGrid x(n);
  const int m = x.m();
  for (const auto& atom : atoms.atoms) {
    // separable phases keep this O(r*(n + n^2)) without per-entry sincos
    std::vector<cplx> e1(static_cast<std::size_t>(n)), e2(static_cast<std::size_t>(n));
    for (int k = -m; k <= m; ++k) {
      const double t1 = kTwoPi * atom.freq.f1 * k;
      const double t2 = kTwoPi * atom.freq.f2 * k;
      e1[static_cast<std::size_t>(k + m)] = cplx(std::cos(t1), std::sin(t1));
      e2[static_cast<std::size_t>(k + m)] = cplx(std::cos(t2), std::sin(t2));
    }
    for (int k2 = 0; k2 < n; ++k2) {
      const cplx w = atom.amp * e2[static_cast<std::size_t>(k2)];
      for (int k1 = 0; k1 < n; ++k1) x.a(k1, k2) += w * e1[static_cast<std::size_t>(k1)];
    }
  }
  return x;
}

SpikePattern sample_spikes(int s, int n, SpikeMode mode, Rng& rng) {
  const int total = n * n;
  if (s < 0 || s > total) throw ConfigError("sample_spikes: need 0 <= s <= n^2");
  const int m = (n - 1) / 2;
  SpikePattern z;
  if (mode == SpikeMode::kExactS) {
    // partial Fisher-Yates over the flat index set
    std::vector<int> idx(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < s; ++i) {
      const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(total - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(s));
    std::sort(idx.begin(), idx.end());
    for (int flat : idx) {
      const Index2 k{flat % n - m, flat / n - m};
      z.entries.emplace_back(k, sample_amplitude(rng));
    }
  } else {
    const double p = static_cast<double>(s) / total;
    for (int k2 = -m; k2 <= m; ++k2)
      for (int k1 = -m; k1 <= m; ++k1)
        if (rng.uniform01() < p) z.entries.emplace_back(Index2{k1, k2}, sample_amplitude(rng));
    std::sort(z.entries.begin(), z.entries.end(),
              [](const auto& a, const auto& b) { return index_less(a.first, b.first); });
  }
  return z;
}

SampleGrid observe(const SampleGrid& x, const SpikePattern& z) {
  SampleGrid y = x;
  const int m = y.m();
  for (const auto& [k, v] : z.entries) {
    if (std::abs(k.k1) > m || std::abs(k.k2) > m) throw ConfigError("observe: spike index outside J");
    y.at(k) += v;
  }
  return y;
}

}  // namespace signal
}  // namespace demix2d
