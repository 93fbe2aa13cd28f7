// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "demix2d/signal.hpp"

using namespace demix2d;
using namespace demix2d::signal;

TEST_CASE("wrap_distance examples and metric properties") {
  CHECK(wrap_distance({0.1, 0.1}, {0.9, 0.9}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(wrap_distance({0.3, 0.7}, {0.3, 0.7}) == 0.0);
  CHECK(wrap_distance({0.25, 0.5}, {0.5, 0.1}) == doctest::Approx(0.4).epsilon(1e-15));

  Rng rng(21);
  for (int rep = 0; rep < 500; ++rep) {
    const Frequency2D a{rng.uniform01(), rng.uniform01()};
    const Frequency2D b{rng.uniform01(), rng.uniform01()};
    const Frequency2D c{rng.uniform01(), rng.uniform01()};
    CHECK(wrap_distance(a, b) == doctest::Approx(wrap_distance(b, a)).epsilon(1e-15));
    CHECK(wrap_distance(a, a) == 0.0);
    CHECK(wrap_distance(a, b) <= 0.5);
    CHECK(wrap_distance(a, c) <= wrap_distance(a, b) + wrap_distance(b, c) + 1e-15);
  }
}

TEST_CASE("min_separation") {
  AtomSet two{{{{0.0, 0.0}, 1.0}, {{0.5, 0.5}, 1.0}}};
  CHECK(min_separation(two) == doctest::Approx(0.5));

  AtomSet three{{{{0.0, 0.0}, 1.0}, {{0.1, 0.0}, 1.0}, {{0.5, 0.5}, 1.0}}};
  CHECK(min_separation(three) == doctest::Approx(0.1).epsilon(1e-12));

  AtomSet one{{{{0.3, 0.3}, 1.0}}};
  CHECK_THROWS_AS(min_separation(one), ConfigError);

  // brute-force pair scan oracle on 10 random atoms
  Rng rng(22);
  AtomSet many = sample_sources(10, 0.0, rng);
  double ref = 1.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (i != j) ref = std::min(ref, wrap_distance(many.atoms[i].freq, many.atoms[j].freq));
  CHECK(min_separation(many) == doctest::Approx(ref).epsilon(1e-15));
}

TEST_CASE("sample_sources") {
  SUBCASE("r=1 ignores the separation constraint") {
    Rng rng(23);
    const auto set = sample_sources(1, 0.49, rng);
    CHECK(set.r() == 1);
    CHECK(set.atoms[0].freq.f1 >= 0.0);
    CHECK(set.atoms[0].freq.f1 < 1.0);
  }

  SUBCASE("postcondition: requested separation holds") {
    Rng rng(24);
    const auto set = sample_sources(3, 0.2, rng);
    CHECK(set.r() == 3);
    CHECK(min_separation(set) >= 0.2);
  }

  SUBCASE("r=7 at separation 3/8 exhausts the budget") {
    Rng rng(25);
    CHECK_THROWS_AS(sample_sources(7, 3.0 / 8.0, rng), InfeasibleSeparationError);
  }
}

TEST_CASE("sample_amplitude law") {
  Rng rng(26);

  // |d| >= 0.5 always, and E|d| = 1.5 within 3 sigma over 1e5 draws
  const int n = 100000;
  double mean = 0.0;
  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const cplx d = sample_amplitude(rng);
    const double mag = std::abs(d);
    CHECK(mag >= 0.5 - 1e-12);
    mean += mag;
    phases.push_back(std::arg(d) < 0 ? std::arg(d) + kTwoPi : std::arg(d));
  }
  mean /= n;
  // Var(chi2(1)) = 2 so sigma(mean) = sqrt(2/n)
  CHECK(std::fabs(mean - 1.5) <= 3.0 * std::sqrt(2.0 / n));

  // phase uniformity: Kolmogorov-Smirnov at the 1% level over 1e4 draws
  phases.resize(10000);
  std::sort(phases.begin(), phases.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double cdf = phases[i] / kTwoPi;
    const double hi = static_cast<double>(i + 1) / phases.size();
    const double lo = static_cast<double>(i) / phases.size();
    ks = std::max({ks, std::fabs(cdf - hi), std::fabs(cdf - lo)});
  }
  CHECK(ks <= 1.628 / std::sqrt(10000.0));
}

TEST_CASE("synthesize") {
  SUBCASE("zero frequency gives the all-ones grid") {
    AtomSet set{{{{0.0, 0.0}, 1.0}}};
    const auto x = synthesize(set, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) CHECK(std::abs(x.a(i, j) - 1.0) < 1e-13);
  }

  SUBCASE("Nyquist line alternates along dim 1, constant along dim 2") {
    AtomSet set{{{{0.5, 0.0}, 1.0}}};
    const auto x = synthesize(set, 7);
    for (int k1 = -3; k1 <= 3; ++k1)
      for (int k2 = -3; k2 <= 3; ++k2) {
        const double want = (k1 % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(x.at({k1, k2}) - want) < 1e-12);
      }
  }

  SUBCASE("term-by-term oracle at n=5, r=3") {
    Rng rng(27);
    const auto set = sample_sources(3, 0.0, rng);
    const auto x = synthesize(set, 5);
    for (int k1 = -2; k1 <= 2; ++k1)
      for (int k2 = -2; k2 <= 2; ++k2) {
        cplx ref = 0.0;
        for (const auto& atom : set.atoms) {
          const double t = kTwoPi * (atom.freq.f1 * k1 + atom.freq.f2 * k2);
          ref += atom.amp * cplx(std::cos(t), std::sin(t));
        }
        CHECK(std::abs(x.at({k1, k2}) - ref) < 1e-12);
      }
  }

  SUBCASE("linearity in the amplitudes") {
    Rng rng(28);
    const auto s1 = sample_sources(2, 0.0, rng);
    const auto s2 = sample_sources(3, 0.0, rng);
    AtomSet merged = s1;
    merged.atoms.insert(merged.atoms.end(), s2.atoms.begin(), s2.atoms.end());
    const auto x1 = synthesize(s1, 7);
    const auto x2 = synthesize(s2, 7);
    const auto xm = synthesize(merged, 7);
    CHECK((xm.a - x1.a - x2.a).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("DFT lattice atoms match the dense inverse-DFT oracle") {
    for (int n : {1, 3, 5, 7}) {
      Rng rng(29 + n);
      AtomSet set;
      const int p = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      const int q = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
      const cplx d(rng.uniform(-1, 1), rng.uniform(-1, 1));
      set.atoms.push_back({{static_cast<double>(p) / n, static_cast<double>(q) / n}, d});
      const auto x = synthesize(set, n);
      const int m = (n - 1) / 2;
      // dense spectrum S with the single entry d at (p, q)
      for (int k1 = -m; k1 <= m; ++k1)
        for (int k2 = -m; k2 <= m; ++k2) {
          cplx ref = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              const cplx s = (a == p && b == q) ? d : cplx(0.0);
              const double t = kTwoPi * (static_cast<double>(a) / n * k1 + static_cast<double>(b) / n * k2);
              ref += s * cplx(std::cos(t), std::sin(t));
            }
          CHECK(std::abs(x.at({k1, k2}) - ref) < 1e-12);
        }
    }
  }
}

TEST_CASE("sample_spikes") {
  SUBCASE("s=0 empty") {
    Rng rng(30);
    CHECK(sample_spikes(0, 9, SpikeMode::kExactS, rng).s() == 0);
  }

  SUBCASE("exact-s: cardinality and distinctness") {
    Rng rng(31);
    const auto z = sample_spikes(7, 9, SpikeMode::kExactS, rng);
    CHECK(z.s() == 7);
    for (int i = 0; i < z.s(); ++i)
      for (int j = i + 1; j < z.s(); ++j) CHECK_FALSE(z.entries[i].first == z.entries[j].first);
    for (const auto& [k, v] : z.entries) {
      CHECK(std::abs(k.k1) <= 4);
      CHECK(std::abs(k.k2) <= 4);
      CHECK(std::abs(v) > 0.0);
    }
  }

  SUBCASE("bernoulli: mean support size is s over 1e4 draws (3 sigma)") {
    Rng rng(32);
    const int reps = 10000;
    double total = 0.0;
    for (int i = 0; i < reps; ++i) total += sample_spikes(8, 9, SpikeMode::kBernoulli, rng).s();
    // per-draw variance n^2 p (1-p) with p = 8/81
    const double p = 8.0 / 81.0;
    const double sigma = std::sqrt(81.0 * p * (1 - p) / reps);
    CHECK(std::fabs(total / reps - 8.0) <= 3.0 * sigma);
  }

  SUBCASE("invalid count") {
    Rng rng(33);
    CHECK_THROWS_AS(sample_spikes(26, 5, SpikeMode::kExactS, rng), ConfigError);
  }
}

TEST_CASE("observe") {
  Rng rng(34);

  SUBCASE("empty spikes: Y = X") {
    const auto x = synthesize(sample_sources(2, 0.0, rng), 5);
    const auto y = observe(x, {});
    CHECK((y.a - x.a).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("single spike on zero signal") {
    SampleGrid x(5);
    SpikePattern z;
    z.entries.emplace_back(Index2{1, -2}, cplx(2.0, -1.0));
    const auto y = observe(x, z);
    for (int k1 = -2; k1 <= 2; ++k1)
      for (int k2 = -2; k2 <= 2; ++k2) {
        const cplx want = (k1 == 1 && k2 == -2) ? cplx(2.0, -1.0) : cplx(0.0);
        CHECK(y.at({k1, k2}) == want);
      }
  }

  SUBCASE("difference restricted to the support") {
    const auto x = synthesize(sample_sources(2, 0.0, rng), 7);
    const auto z = sample_spikes(5, 7, SpikeMode::kExactS, rng);
    const auto y = observe(x, z);
    for (int k1 = -3; k1 <= 3; ++k1)
      for (int k2 = -3; k2 <= 3; ++k2) {
        cplx want = 0.0;
        for (const auto& [k, v] : z.entries)
          if (k.k1 == k1 && k.k2 == k2) want = v;
        CHECK(std::abs((y.at({k1, k2}) - x.at({k1, k2})) - want) < 1e-15);
      }
  }
}
