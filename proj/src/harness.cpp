// Copyright (c) the demix2d authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "demix2d/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace demix2d::harness {

namespace fs = std::filesystem;
using nlohmann::json;

LambdaSpec LambdaSpec::parse(const std::string& text) {
  LambdaSpec out;
  if (text == "theorem") {
    out.theorem = true;
    return out;
  }
  out.theorem = false;
  try {
    out.value = std::stod(text);
  } catch (const std::exception&) {
    throw ConfigError("lambda: expected a number or \"theorem\", got \"" + text + "\"");
  }
  if (out.value <= 0.0) throw ConfigError("lambda must be positive");
  return out;
}

std::string LambdaSpec::str() const { return theorem ? "theorem" : std::to_string(value); }

double DeltaSpec::resolve(int n) const {
  switch (kind) {
    case Kind::kValue:
      return value;
    case Kind::kFig2:
      return 3.0 / (n - 1);
    case Kind::kTheorem:
      return 3.36 / (n - 1);
    case Kind::kNone:
      return 0.0;
  }
  return 0.0;
}

DeltaSpec DeltaSpec::parse(const std::string& text) {
  DeltaSpec out;
  if (text == "fig2") {
    out.kind = Kind::kFig2;
  } else if (text == "theorem") {
    out.kind = Kind::kTheorem;
  } else if (text == "none") {
    out.kind = Kind::kNone;
  } else {
    out.kind = Kind::kValue;
    try {
      out.value = std::stod(text);
    } catch (const std::exception&) {
      throw ConfigError("delta_min: expected a number, \"fig2\", \"theorem\" or \"none\", got \"" + text + "\"");
    }
    if (out.value < 0.0) throw ConfigError("delta_min must be nonnegative");
  }
  return out;
}

std::string DeltaSpec::str() const {
  switch (kind) {
    case Kind::kValue:
      return std::to_string(value);
    case Kind::kFig2:
      return "fig2";
    case Kind::kTheorem:
      return "theorem";
    case Kind::kNone:
      return "none";
  }
  return "none";
}

void ExperimentConfig::validate() const {
  if (n < 1 || n % 2 == 0) throw ConfigError("config: n must be odd and positive");
  if (r_min > r_max || s_min > s_max || r_min < 0 || s_min < 0) throw ConfigError("config: empty or negative range");
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (recover.points_per_axis < 4 * n) throw ConfigError("config: points_per_axis must be >= 4n");
}

namespace {

json atoms_to_json(const AtomSet& set) {
  json arr = json::array();
  for (const auto& a : set.atoms)
    arr.push_back({{"f1", a.freq.f1}, {"f2", a.freq.f2}, {"re", a.amp.real()}, {"im", a.amp.imag()}});
  return arr;
}

json spikes_to_json(const SpikePattern& z) {
  json arr = json::array();
  for (const auto& [k, v] : z.entries) arr.push_back({{"k1", k.k1}, {"k2", k.k2}, {"re", v.real()}, {"im", v.imag()}});
  return arr;
}

json solver_to_json(const sdp::SdpOptions& o) {
  return {{"tol_psd", o.tol_psd},     {"tol_eq", o.tol_eq},         {"tol_ineq", o.tol_ineq},
          {"tol_obj", o.tol_obj},     {"max_iters", o.max_iters},   {"check_every", o.check_every},
          {"obj_window", o.obj_window}, {"rho", o.rho},             {"relaxation", o.relaxation},
          {"adapt_rho", o.adapt_rho}, {"init_seed", o.init_seed}};
}

void solver_from_json(const json& j, sdp::SdpOptions& o) {
  if (j.contains("tol_psd")) o.tol_psd = j["tol_psd"].get<double>();
  if (j.contains("tol_eq")) o.tol_eq = j["tol_eq"].get<double>();
  if (j.contains("tol_ineq")) o.tol_ineq = j["tol_ineq"].get<double>();
  if (j.contains("tol_obj")) o.tol_obj = j["tol_obj"].get<double>();
  if (j.contains("max_iters")) o.max_iters = j["max_iters"].get<int>();
  if (j.contains("check_every")) o.check_every = j["check_every"].get<int>();
  if (j.contains("obj_window")) o.obj_window = j["obj_window"].get<int>();
  if (j.contains("rho")) o.rho = j["rho"].get<double>();
  if (j.contains("relaxation")) o.relaxation = j["relaxation"].get<double>();
  if (j.contains("adapt_rho")) o.adapt_rho = j["adapt_rho"].get<bool>();
  if (j.contains("init_seed")) o.init_seed = j["init_seed"].get<std::uint64_t>();
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  json j = {{"n", n},
            {"r_min", r_min},
            {"r_max", r_max},
            {"s_min", s_min},
            {"s_max", s_max},
            {"lambda", lambda.str()},
            {"delta_min", delta_min.str()},
            {"trials", trials},
            {"seed", seed},
            {"solver", solver_to_json(solver)},
            {"recovery",
             {{"points_per_axis", recover.points_per_axis}, {"peak_tol", recover.peak_tol}, {"sat_tol", recover.sat_tol}}},
            {"out_dir", out_dir},
            {"force", force},
            {"threads", threads},
            {"record_timing", record_timing},
            {"max_nonconverged_fraction", max_nonconverged_fraction}};
  return j.dump();
}

void ExperimentConfig::apply_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (j.contains("n")) n = j["n"].get<int>();
  if (j.contains("r_min")) r_min = j["r_min"].get<int>();
  if (j.contains("r_max")) r_max = j["r_max"].get<int>();
  if (j.contains("s_min")) s_min = j["s_min"].get<int>();
  if (j.contains("s_max")) s_max = j["s_max"].get<int>();
  if (j.contains("lambda"))
    lambda = j["lambda"].is_string() ? LambdaSpec::parse(j["lambda"].get<std::string>())
                                     : LambdaSpec{false, j["lambda"].get<double>()};
  if (j.contains("delta_min")) {
    if (j["delta_min"].is_string())
      delta_min = DeltaSpec::parse(j["delta_min"].get<std::string>());
    else
      delta_min = DeltaSpec{DeltaSpec::Kind::kValue, j["delta_min"].get<double>()};
  }
  if (j.contains("trials")) trials = j["trials"].get<int>();
  if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  if (j.contains("solver")) solver_from_json(j["solver"], solver);
  if (j.contains("recovery")) {
    const auto& r = j["recovery"];
    if (r.contains("points_per_axis")) recover.points_per_axis = r["points_per_axis"].get<int>();
    if (r.contains("peak_tol")) recover.peak_tol = r["peak_tol"].get<double>();
    if (r.contains("sat_tol")) recover.sat_tol = r["sat_tol"].get<double>();
  }
  if (j.contains("out_dir")) out_dir = j["out_dir"].get<std::string>();
  if (j.contains("force")) force = j["force"].get<bool>();
  if (j.contains("threads")) threads = j["threads"].get<int>();
  if (j.contains("record_timing")) record_timing = j["record_timing"].get<bool>();
  if (j.contains("max_nonconverged_fraction")) max_nonconverged_fraction = j["max_nonconverged_fraction"].get<double>();
}

std::string TrialRecord::to_json() const {
  json j = {{"r", r},
            {"s", s},
            {"trial", trial},
            {"instance_seed", instance_seed},
            {"converged", converged},
            {"recovery_success", recovery_success},
            {"success", success},
            {"nmse", nmse},
            {"objective", objective},
            {"iterations", iterations},
            {"psd_residual", psd_residual},
            {"trace_residuals_max", trace_residuals_max},
            {"linf_violation", linf_violation},
            {"true_sources", atoms_to_json(true_sources)},
            {"true_spikes", spikes_to_json(true_spikes)},
            {"est_sources", atoms_to_json(est_sources)},
            {"est_spikes", spikes_to_json(est_spikes)}};
  if (wall_ms) j["wall_ms"] = *wall_ms;
  return j.dump();
}

TrialRecord run_single_trial(const ExperimentConfig& config, int r, int s, int trial_index) {
  config.validate();
  const int n = config.n;
  if (r + s > n * n) throw ConfigError("run_single_trial: r + s exceeds n^2");
  const double lambda = config.lambda.resolve(n);
  const double delta = config.delta_min.resolve(n);

  const auto t0 = std::chrono::steady_clock::now();

  // joint rejection sampling can exhaust its budget near the packing limit;
  // retry on fresh derived streams (deterministic) before giving up
  AtomSet atoms;
  SpikePattern spikes;
  std::uint64_t inst_seed = 0;
  bool sampled = false;
  for (std::uint64_t attempt = 0; attempt < 16 && !sampled; ++attempt) {
    inst_seed = derive_seed(config.seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(s),
                            static_cast<std::uint64_t>(trial_index), attempt);
    Rng rng(inst_seed);
    try {
      atoms = signal::sample_sources(r, delta, rng);
      spikes = signal::sample_spikes(s, n, signal::SpikeMode::kExactS, rng);
      sampled = true;
    } catch (const InfeasibleSeparationError&) {
      continue;
    }
  }
  if (!sampled)
    throw InfeasibleSeparationError("run_single_trial: could not sample r=" + std::to_string(r) +
                                    " sources at delta_min=" + std::to_string(delta));

  const SampleGrid x = signal::synthesize(atoms, n);
  const SampleGrid y = signal::observe(x, spikes);

  sdp::SdpProblem prob{y, lambda};
  const sdp::SdpSolution sol = sdp::solve_dual_sdp(prob, config.solver);

  recovery::RecoveryResult result;
  try {
    const auto sources = recovery::locate_sources(sol.c, config.recover.points_per_axis, config.recover.peak_tol);
    const auto spike_idx = recovery::locate_spikes(sol.c, lambda, config.recover.sat_tol);
    auto [est_atoms, est_spikes] = recovery::estimate_amplitudes(y, sources, spike_idx);
    result.sources = std::move(est_atoms);
    result.spikes = std::move(est_spikes);
  } catch (const Error&) {
    // degenerate fit or over-saturated support: scored as a failed trial
    result.sources = AtomSet{};
    result.spikes = SpikePattern{};
  }

  // nmse with the detected spike indices omitted; an all-zero reference (r=0)
  // scores 0 when nothing spurious was synthesized
  double err;
  const SampleGrid xhat = signal::synthesize(result.sources, n);
  double ref_norm = 0.0;
  {
    const int m = x.m();
    Eigen::ArrayXXd mask = Eigen::ArrayXXd::Ones(n, n);
    for (const auto& [k, v] : result.spikes.entries) mask(k.k1 + m, k.k2 + m) = 0.0;
    double num = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (mask(i, j) == 0.0) continue;
        num += std::norm(x.a(i, j) - xhat.a(i, j));
        ref_norm += std::norm(x.a(i, j));
      }
    err = ref_norm > 0.0 ? std::sqrt(num / ref_norm) : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  }
  result.nmse = err;
  result.success = err <= recovery::kNmseSuccessThreshold;

  TrialRecord rec;
  rec.r = r;
  rec.s = s;
  rec.trial = trial_index;
  rec.instance_seed = inst_seed;
  rec.converged = sol.diagnostics.converged;
  rec.recovery_success = result.success;
  rec.success = rec.converged && result.success;
  rec.nmse = err;
  rec.objective = sol.objective;
  rec.iterations = sol.diagnostics.iterations;
  rec.psd_residual = sol.diagnostics.psd_residual;
  rec.trace_residuals_max = sol.diagnostics.trace_residuals_max;
  rec.linf_violation = sol.diagnostics.linf_violation;
  rec.true_sources = atoms;
  rec.true_spikes = spikes;
  rec.est_sources = result.sources;
  rec.est_spikes = result.spikes;
  if (config.record_timing)
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

PhaseRun run_phase_transition(const ExperimentConfig& config) {
  config.validate();
  PhaseRun run;
  for (int r = config.r_min; r <= config.r_max; ++r) run.table.r_values.push_back(r);
  for (int s = config.s_min; s <= config.s_max; ++s) run.table.s_values.push_back(s);
  const std::size_t r_count = run.table.r_values.size();
  const std::size_t s_count = run.table.s_values.size();
  const std::size_t cells = r_count * s_count;
  const std::size_t total = cells * static_cast<std::size_t>(config.trials);

  run.records.resize(total);
  run.cell_wall_ms.assign(cells, 0.0);
  std::vector<double> trial_ms(total, 0.0);

  std::atomic<std::size_t> next{0};
  std::atomic<int> nonconverged{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t nthreads = std::max<std::size_t>(
      1, std::min<std::size_t>(config.threads > 0 ? static_cast<std::size_t>(config.threads) : (hw ? hw : 1), total));

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error) return;
      }
      const std::size_t cell = idx / static_cast<std::size_t>(config.trials);
      const int trial = static_cast<int>(idx % static_cast<std::size_t>(config.trials));
      const int r = run.table.r_values[cell / s_count];
      const int s = run.table.s_values[cell % s_count];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        run.records[idx] = run_single_trial(config, r, s, trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      trial_ms[idx] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (!run.records[idx].converged) nonconverged.fetch_add(1);
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  run.nonconverged = nonconverged.load();
  run.table.rates.assign(cells, 0.0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    int wins = 0;
    for (int t = 0; t < config.trials; ++t) {
      const auto& rec = run.records[cell * config.trials + t];
      if (rec.success) ++wins;
      run.cell_wall_ms[cell] += trial_ms[cell * config.trials + t];
    }
    run.table.rates[cell] = static_cast<double>(wins) / config.trials;
  }
  return run;
}

std::string table_to_csv(const PhaseTable& table) {
  std::string out = "r,s,success_rate\n";
  char line[64];
  for (std::size_t ri = 0; ri < table.r_values.size(); ++ri)
    for (std::size_t si = 0; si < table.s_values.size(); ++si) {
      std::snprintf(line, sizeof(line), "%d,%d,%.3f\n", table.r_values[ri], table.s_values[si],
                    table.rates[ri * table.s_values.size() + si]);
      out += line;
    }
  return out;
}

std::vector<std::uint8_t> table_to_pgm(const PhaseTable& table) {
  const int w = static_cast<int>(table.r_values.size());
  const int h = static_cast<int>(table.s_values.size());
  std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  // row = s ascending, column = r ascending; round half up
  for (int si = 0; si < h; ++si)
    for (int ri = 0; ri < w; ++ri) {
      const double rate = table.rates[static_cast<std::size_t>(ri) * h + si];
      bytes.push_back(static_cast<std::uint8_t>(std::floor(rate * 255.0 + 0.5)));
    }
  return bytes;
}

namespace {

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << contents;
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace

void emit_artifacts(const PhaseRun& run, const ExperimentConfig& config, const std::string& directory) {
  const fs::path dir(directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  const char* names[] = {"records.jsonl", "table.csv", "rates.pgm", "manifest.json"};
  if (!config.force) {
    for (const char* name : names)
      if (fs::exists(dir / name)) throw IoError("artifact exists (use force to overwrite): " + (dir / name).string());
  }

  std::string records_text;
  for (const auto& rec : run.records) records_text += rec.to_json() + "\n";
  write_file(dir / "records.jsonl", records_text);
  write_file(dir / "table.csv", table_to_csv(run.table));

  const auto pgm = table_to_pgm(run.table);
  {
    std::ofstream os(dir / "rates.pgm", std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + (dir / "rates.pgm").string());
    os.write(reinterpret_cast<const char*>(pgm.data()), static_cast<std::streamsize>(pgm.size()));
    if (!os) throw IoError("write failed: " + (dir / "rates.pgm").string());
  }

  json manifest;
  manifest["tool"] = "demix2d";
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["config"] = json::parse(config.to_json());
  manifest["trials_total"] = run.records.size();
  manifest["nonconverged"] = run.nonconverged;
  json timing = json::array();
  for (std::size_t cell = 0; cell < run.cell_wall_ms.size(); ++cell) {
    const std::size_t s_count = run.table.s_values.size();
    timing.push_back({{"r", run.table.r_values[cell / s_count]},
                      {"s", run.table.s_values[cell % s_count]},
                      {"wall_ms", run.cell_wall_ms[cell]}});
  }
  manifest["timing"] = timing;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace demix2d::harness
