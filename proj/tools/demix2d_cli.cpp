// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: single trials, phase-transition grids, the
// certificate lab, and the kernel/matrix bound checks.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "demix2d/certificate.hpp"
#include "demix2d/harness.hpp"
#include "demix2d/kernels.hpp"
#include "demix2d/rng.hpp"
#include "demix2d/signal.hpp"

namespace {

using namespace demix2d;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitNonConverged = 3;

struct CommonFlags {
  harness::ExperimentConfig config;
  std::string lambda_text = "theorem";
  std::string delta_text = "fig2";
  std::string config_file;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--n", flags.config.n, "grid size per dimension (odd)");
  cmd->add_option("--lambda", flags.lambda_text, "regularization weight or \"theorem\" (=1/n)");
  cmd->add_option("--delta-min", flags.delta_text, "separation: number, \"fig2\" (=3/(n-1)), \"theorem\" (=3.36/(n-1)), \"none\"");
  cmd->add_option("--trials", flags.config.trials, "trials per cell");
  cmd->add_option("--seed", flags.config.seed, "master seed");
  cmd->add_option("--out", flags.config.out_dir, "output directory");
  cmd->add_flag("--force", flags.config.force, "overwrite existing artifacts");
  cmd->add_option("--threads", flags.config.threads, "worker threads (0 = hardware)");
  cmd->add_flag("--timing", flags.config.record_timing, "record per-trial wall time in records");
  cmd->add_option("--points-per-axis", flags.config.recover.points_per_axis, "dual-polynomial grid resolution");
  cmd->add_option("--peak-tol", flags.config.recover.peak_tol, "peak detection tolerance");
  cmd->add_option("--sat-tol", flags.config.recover.sat_tol, "spike saturation tolerance");
  cmd->add_option("--max-iters", flags.config.solver.max_iters, "solver iteration cap");
  cmd->add_option("--rho", flags.config.solver.rho, "solver penalty parameter");
  cmd->add_option("--relaxation", flags.config.solver.relaxation, "solver over-relaxation");
  cmd->add_option("--max-nonconverged-fraction", flags.config.max_nonconverged_fraction,
                  "exit 3 when exceeded");
  cmd->add_option("--config", flags.config_file, "JSON config; its keys override flags");
}

void finalize_config(CommonFlags& flags) {
  flags.config.lambda = harness::LambdaSpec::parse(flags.lambda_text);
  flags.config.delta_min = harness::DeltaSpec::parse(flags.delta_text);
  if (!flags.config_file.empty()) {
    std::ifstream is(flags.config_file);
    if (!is) throw IoError("cannot read config file: " + flags.config_file);
    std::stringstream ss;
    ss << is.rdbuf();
    flags.config.apply_json(ss.str());
  }
  flags.config.validate();
}

int cmd_single(CommonFlags& flags, int r, int s, int trial) {
  finalize_config(flags);
  const auto rec = harness::run_single_trial(flags.config, r, s, trial);
  std::cout << rec.to_json() << "\n";
  if (!flags.config.out_dir.empty()) {
    std::filesystem::create_directories(flags.config.out_dir);
    const auto path = std::filesystem::path(flags.config.out_dir) / "record.json";
    if (std::filesystem::exists(path) && !flags.config.force)
      throw IoError("artifact exists (use --force to overwrite): " + path.string());
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << rec.to_json() << "\n";
  }
  if (!rec.converged && flags.config.max_nonconverged_fraction < 1.0) return kExitNonConverged;
  return kExitOk;
}

int cmd_phase(CommonFlags& flags) {
  finalize_config(flags);
  if (flags.config.out_dir.empty()) throw ConfigError("phase: --out is required");
  const auto run = harness::run_phase_transition(flags.config);
  harness::emit_artifacts(run, flags.config, flags.config.out_dir);
  std::printf("phase grid written to %s (%zu trials, %d not converged)\n", flags.config.out_dir.c_str(),
              run.records.size(), run.nonconverged);
  const double frac = static_cast<double>(run.nonconverged) / static_cast<double>(run.records.size());
  return frac > flags.config.max_nonconverged_fraction ? kExitNonConverged : kExitOk;
}

int cmd_certify(int m, int r, int s, std::uint64_t seed, double sep, int grid, double near_radius,
                const std::string& out, bool force) {
  const auto coeffs = kernels::triple_kernel_coeffs(m);
  const auto kap = kernels::kappa(coeffs);
  Rng rng(derive_seed(seed, 0xCE27));
  const double delta = sep > 0.0 ? sep : 3.36 / (2.0 * m);
  const AtomSet atoms = signal::sample_sources(r, delta, rng);

  std::vector<Index2> omega;
  std::vector<cplx> rsign;
  if (s > 0) {
    const auto spikes = signal::sample_spikes(s, coeffs.n(), signal::SpikeMode::kExactS, rng);
    for (const auto& [k, v] : spikes.entries) {
      omega.push_back(k);
      rsign.push_back(v / std::abs(v));
    }
  }
  cert::SignPattern signs;
  signs.rsign = rsign;
  for (int i = 0; i < r; ++i) {
    const double phase = rng.uniform(0.0, kTwoPi);
    signs.h.emplace_back(std::cos(phase), std::sin(phase));
  }

  const auto certificate = cert::solve_certificate(atoms, omega, signs, coeffs, kap);
  cert::ValidationParams params;
  params.grid_points_per_axis = grid;
  if (near_radius > 0.0) params.near_radius = near_radius;
  const auto report = cert::validate_certificate(certificate, params);
  std::cout << report.to_json() << "\n";
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    const auto path = std::filesystem::path(out) / "validation.json";
    if (std::filesystem::exists(path) && !force)
      throw IoError("artifact exists (use --force to overwrite): " + path.string());
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << report.to_json() << "\n";
  }
  return report.pass() ? kExitOk : kExitNonConverged;
}

int cmd_verify_bounds(int m, std::uint64_t seed, int sets, int draws) {
  int failures = 0;
  auto line = [&failures](bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++failures;
  };

  const auto coeffs = kernels::triple_kernel_coeffs(m);
  const auto kap = kernels::kappa(coeffs);

  double cmax = 0.0;
  for (double v : coeffs.c) cmax = std::max(cmax, std::fabs(v));
  line(cmax <= 1.3 / m, "coefficient bound: ||c||_inf <= 1.3/m");
  line(kap.value >= 0.467 / m && kap.value <= 0.468 / m, "kappa within [0.467/m, 0.468/m]");

  Rng rng(derive_seed(seed, 0xB0B0));
  const AtomSet atoms = signal::sample_sources(10, 0.0, rng);
  double worst_b = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Index2 k{static_cast<int>(rng.uniform_index(2 * m + 1)) - m,
                   static_cast<int>(rng.uniform_index(2 * m + 1)) - m};
    worst_b = std::max(worst_b, cert::build_b(k, atoms, kap).squaredNorm());
  }
  line(worst_b <= 21.0 * atoms.r(), "||b(k)||^2 <= 21 r over random k in J");

  double worst_dev = 0.0, worst_norm = 0.0, worst_inv = 0.0;
  for (int set = 0; set < sets; ++set) {
    const AtomSet a5 = signal::sample_sources(5, 1.68 / m, rng);
    const auto sys = cert::build_E(a5, coeffs, kap);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(sys.E.rows(), sys.E.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> dev(I - sys.E, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> nrm(sys.E, Eigen::EigenvaluesOnly);
    worst_dev = std::max(worst_dev, dev.eigenvalues().cwiseAbs().maxCoeff());
    worst_norm = std::max(worst_norm, nrm.eigenvalues().cwiseAbs().maxCoeff());
    worst_inv = std::max(worst_inv, 1.0 / nrm.eigenvalues().minCoeff());
  }
  line(worst_dev <= 0.24, "||I - E|| <= 0.24 over random separated atom sets");
  line(worst_norm <= 1.24, "||E|| <= 1.24");
  line(worst_inv <= 1.32, "||E^-1|| <= 1.32");

  std::printf("%s (m=%d, %d sets, %d draws)\n", failures == 0 ? "all bounds hold" : "bound violations found", m,
              sets, draws);
  return failures == 0 ? kExitOk : kExitNonConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demix2d: two-dimensional line spectral estimation under spiky noise"};
  app.require_subcommand(1);

  CommonFlags single_flags, phase_flags;
  int single_r = 1, single_s = 0, single_trial = 0;
  auto* single = app.add_subcommand("single", "run one sample/solve/recover trial");
  add_common(single, single_flags);
  single->add_option("--r", single_r, "number of spectral sources");
  single->add_option("--s", single_s, "number of spiky-noise samples");
  single->add_option("--trial-index", single_trial, "trial index for seed derivation");

  auto* phase = app.add_subcommand("phase", "success-rate grid over (r, s)");
  add_common(phase, phase_flags);
  phase->add_option("--r-min", phase_flags.config.r_min);
  phase->add_option("--r-max", phase_flags.config.r_max);
  phase->add_option("--s-min", phase_flags.config.s_min);
  phase->add_option("--s-max", phase_flags.config.s_max);

  int cert_m = 50, cert_r = 3, cert_s = 0, cert_grid = 1024;
  std::uint64_t cert_seed = 1;
  double cert_sep = 0.0, cert_near = 0.0;
  std::string cert_out;
  bool cert_force = false;
  auto* certify = app.add_subcommand("certify", "construct and validate a dual certificate");
  certify->add_option("--m", cert_m, "kernel half-bandwidth");
  certify->add_option("--r", cert_r, "number of atoms");
  certify->add_option("--s", cert_s, "number of spike indices (0 = deterministic certificate)");
  certify->add_option("--seed", cert_seed);
  certify->add_option("--separation", cert_sep, "minimum separation (default 3.36/(2m))");
  certify->add_option("--grid", cert_grid, "validation grid points per axis");
  certify->add_option("--near-radius", cert_near, "near-region radius (default 0.09/m)");
  certify->add_option("--out", cert_out, "output directory");
  certify->add_flag("--force", cert_force);

  int vb_m = 2000, vb_sets = 20, vb_draws = 1000;
  std::uint64_t vb_seed = 1;
  auto* verify = app.add_subcommand("verify-bounds", "kernel-constant and matrix-norm checks");
  verify->add_option("--m", vb_m, "kernel half-bandwidth");
  verify->add_option("--seed", vb_seed);
  verify->add_option("--sets", vb_sets, "random atom sets for the E-matrix checks");
  verify->add_option("--draws", vb_draws, "random indices for the b-vector check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (single->parsed()) return cmd_single(single_flags, single_r, single_s, single_trial);
    if (phase->parsed()) return cmd_phase(phase_flags);
    if (certify->parsed())
      return cmd_certify(cert_m, cert_r, cert_s, cert_seed, cert_sep, cert_grid, cert_near, cert_out, cert_force);
    if (verify->parsed()) return cmd_verify_bounds(vb_m, vb_seed, vb_sets, vb_draws);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
