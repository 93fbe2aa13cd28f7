// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "demix2d/recovery.hpp"
#include "demix2d/rng.hpp"
#include "demix2d/sdp.hpp"
#include "demix2d/signal.hpp"

using namespace demix2d;
using namespace demix2d::recovery;

TEST_CASE("eval_dual_poly_grid") {
  SUBCASE("single DC coefficient gives the constant grid") {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(5, 5);
    c(2, 2) = 1.0;  // k = (0,0)
    const auto g = eval_dual_poly_grid(c, 64);
    CHECK(g.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("random coefficients match direct summation at 50 nodes") {
    Rng rng(61);
    Eigen::MatrixXcd c(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) c(i, j) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const auto g = eval_dual_poly_grid(c, 64);
    for (int rep = 0; rep < 50; ++rep) {
      const int p = static_cast<int>(rng.uniform_index(64));
      const int q = static_cast<int>(rng.uniform_index(64));
      cplx ref = 0.0;
      for (int k1 = -2; k1 <= 2; ++k1)
        for (int k2 = -2; k2 <= 2; ++k2) {
          const double t = -kTwoPi * (static_cast<double>(p) / 64 * k1 + static_cast<double>(q) / 64 * k2);
          ref += c(k1 + 2, k2 + 2) * cplx(std::cos(t), std::sin(t));
        }
      CHECK(std::fabs(g(p, q) - std::abs(ref)) < 1e-11);
    }
  }

  SUBCASE("resolution precondition") {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(9, 9);
    CHECK_THROWS_AS(eval_dual_poly_grid(c, 35), ConfigError);
  }
}

TEST_CASE("locate_sources") {
  SUBCASE("zero dual coefficients give an empty list") {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(5, 5);
    CHECK(locate_sources(c, 64, 1e-2).empty());
  }

  SUBCASE("noiseless single atom localized within half a grid cell") {
    AtomSet atoms;
    atoms.atoms.push_back({{0.3125, 0.5}, cplx(1.0, 0.4)});
    const auto y = signal::synthesize(atoms, 9);
    const auto sol = sdp::solve_dual_sdp({y, 1.0 / 9.0});
    REQUIRE(sol.diagnostics.converged);
    const auto found = locate_sources(sol.c, 64, 1e-2);
    REQUIRE(found.size() == 1);
    CHECK(wrap_distance(found[0], atoms.atoms[0].freq) <= 1.0 / 128);
  }

  SUBCASE("two atoms at the fig-2 separation stay distinct") {
    AtomSet atoms;
    atoms.atoms.push_back({{0.2, 0.3}, cplx(1.1, 0.0)});
    atoms.atoms.push_back({{0.575, 0.8}, cplx(0.0, -0.9)});
    REQUIRE(min_separation(atoms) >= 3.0 / 8.0);
    const auto y = signal::synthesize(atoms, 9);
    const auto sol = sdp::solve_dual_sdp({y, 1.0 / 9.0});
    REQUIRE(sol.diagnostics.converged);
    const auto found = locate_sources(sol.c, 128, 1e-2);
    REQUIRE(found.size() == 2);
    for (const auto& atom : atoms.atoms) {
      double best = 1.0;
      for (const auto& f : found) best = std::min(best, wrap_distance(f, atom.freq));
      CHECK(best <= 1.0 / 128);
    }
    // structural: merged list has no duplicate within one grid cell
    CHECK(wrap_distance(found[0], found[1]) > 1.0 / 128);
  }

  SUBCASE("invariant to a global phase rotation of the observation") {
    AtomSet atoms;
    atoms.atoms.push_back({{0.62, 0.17}, cplx(1.4, 0.2)});
    auto y = signal::synthesize(atoms, 5);
    const auto sol1 = sdp::solve_dual_sdp({y, 1.0 / 5.0});
    SampleGrid y2 = y;
    y2.a *= cplx(std::cos(0.8), std::sin(0.8));
    const auto sol2 = sdp::solve_dual_sdp({y2, 1.0 / 5.0});
    const auto f1 = locate_sources(sol1.c, 64, 1e-2);
    const auto f2 = locate_sources(sol2.c, 64, 1e-2);
    REQUIRE(f1.size() == 1);
    REQUIRE(f2.size() == 1);
    CHECK(wrap_distance(f1[0], f2[0]) <= 2.0 / 64);
  }
}

TEST_CASE("locate_spikes") {
  SUBCASE("zero coefficients give an empty set") {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(5, 5);
    CHECK(locate_spikes(c, 0.2, 1e-3).empty());
  }

  SUBCASE("single spike instance recovers exactly the true index") {
    SampleGrid x(5);
    SpikePattern z;
    z.entries.emplace_back(Index2{-2, 1}, cplx(1.3, 0.6));
    const auto y = signal::observe(x, z);
    const auto sol = sdp::solve_dual_sdp({y, 1.0 / 5.0});
    REQUIRE(sol.diagnostics.converged);
    const auto spikes = locate_spikes(sol.c, 1.0 / 5.0, 1e-3);
    REQUIRE(spikes.size() == 1);
    CHECK(spikes[0] == Index2{-2, 1});
  }

  SUBCASE("threshold semantics") {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(3, 3);
    c(0, 0) = 0.1999;          // just below lambda
    c(2, 2) = 0.2;             // exactly lambda
    CHECK(locate_spikes(c, 0.2, 0.0).size() == 1);      // equality demanded
    CHECK(locate_spikes(c, 0.2, 1e-3).size() == 2);     // default slack admits both
  }
}

TEST_CASE("estimate_amplitudes") {
  Rng rng(62);

  SUBCASE("exact supports of a noiseless instance reproduce the amplitudes") {
    const auto atoms = signal::sample_sources(3, 0.2, rng);
    const auto spikes = signal::sample_spikes(2, 7, signal::SpikeMode::kExactS, rng);
    const auto y = signal::observe(signal::synthesize(atoms, 7), spikes);
    std::vector<Frequency2D> freqs;
    for (const auto& a : atoms.atoms) freqs.push_back(a.freq);
    std::vector<Index2> idx;
    for (const auto& [k, v] : spikes.entries) idx.push_back(k);
    const auto [est_atoms, est_spikes] = estimate_amplitudes(y, freqs, idx);

    for (int i = 0; i < 3; ++i) CHECK(std::abs(est_atoms.atoms[i].amp - atoms.atoms[i].amp) < 1e-8);
    for (std::size_t l = 0; l < est_spikes.entries.size(); ++l)
      CHECK(std::abs(est_spikes.entries[l].second - spikes.entries[l].second) < 1e-8);

    const auto resid = signal::observe(signal::synthesize(est_atoms, 7), est_spikes);
    CHECK((resid.a - y.a).norm() < 1e-10);
  }

  SUBCASE("spike support covering all of J with sources collides") {
    const auto atoms = signal::sample_sources(1, 0.0, rng);
    const auto y = signal::synthesize(atoms, 3);
    std::vector<Index2> all;
    for (int k2 = -1; k2 <= 1; ++k2)
      for (int k1 = -1; k1 <= 1; ++k1) all.push_back({k1, k2});
    CHECK_THROWS_AS(estimate_amplitudes(y, {atoms.atoms[0].freq}, all), Error);
  }

  SUBCASE("slightly perturbed frequency still fits, residual grows continuously") {
    AtomSet atoms;
    atoms.atoms.push_back({{0.31, 0.62}, cplx(1.5, -0.2)});
    const auto y = signal::synthesize(atoms, 7);
    double prev = 0.0;
    for (const double eps : {0.0, 1e-4, 2e-4}) {
      const auto [est, z] = estimate_amplitudes(y, {{0.31 + eps, 0.62}}, {});
      const auto resid = (signal::synthesize(est, 7).a - y.a).norm();
      CHECK(resid >= prev - 1e-12);
      CHECK(resid <= 1.0);  // continuity: small perturbation, small residual
      prev = resid;
    }
    CHECK(prev > 1e-6);  // the perturbation is visible
  }
}

TEST_CASE("nmse") {
  Rng rng(63);
  const auto atoms = signal::sample_sources(2, 0.2, rng);
  const auto x = signal::synthesize(atoms, 5);

  SUBCASE("perfect recovery scores zero") {
    RecoveryResult res;
    res.sources = atoms;
    CHECK(nmse(x, res) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("empty estimate scores one") {
    RecoveryResult res;
    CHECK(nmse(x, res) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("hand-built wrong amplitude matches the direct ratio") {
    RecoveryResult res;
    res.sources = atoms;
    res.sources.atoms[0].amp += cplx(0.3, 0.0);
    const auto xhat = signal::synthesize(res.sources, 5);
    const double want = (x.a - xhat.a).norm() / x.a.norm();
    CHECK(nmse(x, res) == doctest::Approx(want).epsilon(1e-12));
  }

  SUBCASE("zero-norm reference is rejected") {
    SampleGrid zero(5);
    RecoveryResult res;
    CHECK_THROWS_AS(nmse(zero, res), ConfigError);
  }

  SUBCASE("detected spike indices are omitted from both grids") {
    RecoveryResult res;
    res.sources = atoms;
    res.sources.atoms[0].amp += cplx(0.5, 0.0);
    res.spikes.entries.emplace_back(Index2{0, 0}, cplx(1.0, 0.0));
    const auto xhat = signal::synthesize(res.sources, 5);
    double num = 0.0, den = 0.0;
    for (int k1 = -2; k1 <= 2; ++k1)
      for (int k2 = -2; k2 <= 2; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        num += std::norm(x.at({k1, k2}) - xhat.at({k1, k2}));
        den += std::norm(x.at({k1, k2}));
      }
    CHECK(nmse(x, res) == doctest::Approx(std::sqrt(num / den)).epsilon(1e-12));
  }
}

TEST_CASE("noiseless end-to-end: detected supports match, no spurious spikes") {
  AtomSet atoms;
  atoms.atoms.push_back({{0.15, 0.45}, cplx(1.0, 0.8)});
  atoms.atoms.push_back({{0.6, 0.85}, cplx(-1.2, 0.3)});
  const auto y = signal::synthesize(atoms, 9);
  const auto sol = sdp::solve_dual_sdp({y, 1.0 / 9.0});
  REQUIRE(sol.diagnostics.converged);
  const double gap = sdp::duality_gap(sol, y, atoms, {});
  REQUIRE(std::fabs(gap) <= 1e-5 * (std::abs(atoms.atoms[0].amp) + std::abs(atoms.atoms[1].amp)));

  const auto found = locate_sources(sol.c, 128, 1e-2);
  CHECK(found.size() == 2);
  for (const auto& atom : atoms.atoms) {
    double best = 1.0;
    for (const auto& f : found) best = std::min(best, wrap_distance(f, atom.freq));
    CHECK(best <= 1.0 / 128);
  }
  CHECK(locate_spikes(sol.c, 1.0 / 9.0, 1e-3).empty());
}
