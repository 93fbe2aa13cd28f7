// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demix2d/recovery.hpp"
#include "demix2d/sdp.hpp"
#include "demix2d/signal.hpp"

namespace demix2d::harness {

// lambda is either a number or "theorem" (= 1/sqrt(n^2))
struct LambdaSpec {
  bool theorem = true;
  double value = 0.0;

  double resolve(int n) const { return theorem ? 1.0 / n : value; }
  static LambdaSpec parse(const std::string& text);
  std::string str() const;
};

// delta_min is a number, "fig2" (= 3/(n-1)), "theorem" (= 3.36/(n-1)), or
// "none" (no separation constraint)
struct DeltaSpec {
  enum class Kind { kValue, kFig2, kTheorem, kNone } kind = Kind::kFig2;
  double value = 0.0;

  double resolve(int n) const;
  static DeltaSpec parse(const std::string& text);
  std::string str() const;
};

struct ExperimentConfig {
  int n = 9;
  int r_min = 1, r_max = 1;
  int s_min = 1, s_max = 1;
  LambdaSpec lambda;
  DeltaSpec delta_min;
  int trials = 10;
  std::uint64_t seed = 1;
  sdp::SdpOptions solver;
  recovery::RecoveryOptions recover;
  std::string out_dir;
  bool force = false;
  int threads = 0;  // 0 = hardware concurrency
  bool record_timing = false;
  double max_nonconverged_fraction = 0.1;

  void validate() const;
  std::string to_json() const;
  // overlays every key present in the JSON text onto this config
  void apply_json(const std::string& json_text);
};

struct TrialRecord {
  int r = 0, s = 0, trial = 0;
  std::uint64_t instance_seed = 0;
  bool converged = false;
  bool recovery_success = false;  // nmse <= 1e-3
  bool success = false;           // converged && recovery_success
  double nmse = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double psd_residual = 0.0;
  double trace_residuals_max = 0.0;
  double linf_violation = 0.0;
  AtomSet true_sources;
  SpikePattern true_spikes;
  AtomSet est_sources;
  SpikePattern est_spikes;
  std::optional<double> wall_ms;  // only with record_timing

  std::string to_json() const;
};

struct PhaseTable {
  std::vector<int> r_values;
  std::vector<int> s_values;
  std::vector<double> rates;  // rates[ri * s_count + si]

  double at(int ri, int si) const { return rates[static_cast<std::size_t>(ri) * s_values.size() + si]; }
};

struct PhaseRun {
  PhaseTable table;
  std::vector<TrialRecord> records;           // canonical (r, s, trial) order
  std::vector<double> cell_wall_ms;           // per (r, s) cell
  int nonconverged = 0;
};

TrialRecord run_single_trial(const ExperimentConfig& config, int r, int s, int trial_index);

PhaseRun run_phase_transition(const ExperimentConfig& config);

// Writes records.jsonl, table.csv, rates.pgm and manifest.json into the
// directory; refuses to overwrite existing artifacts unless force is set.
void emit_artifacts(const PhaseRun& run, const ExperimentConfig& config, const std::string& directory);

// serialization helpers shared by the CLI and tests
std::string table_to_csv(const PhaseTable& table);
std::vector<std::uint8_t> table_to_pgm(const PhaseTable& table);  // full file bytes

}  // namespace demix2d::harness
