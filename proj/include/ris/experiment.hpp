#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ris/outer_transmissive.hpp"

namespace ris {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode { kReflective, kTransmissive };
enum class Baseline { kProposed, kFixedMc, kConventional };
enum class SweepKind { kPower, kElements, kUsers };

std::string to_string(Mode m);
std::string to_string(Baseline b);
std::string to_string(SweepKind s);
std::string to_string(ChannelModel c);

double dbm_to_watt(double dbm);

struct ExperimentSpec {
  Mode mode = Mode::kReflective;
  ChannelModel channel_model = ChannelModel::kParametric;
  // Unset means every baseline that applies to the mode.
  std::optional<std::vector<Baseline>> baselines;
  SweepKind sweep = SweepKind::kPower;
  std::vector<double> values{50.0};  // dBm for power, count otherwise
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::string out = "results";

  ScenarioConfig scenario;  // P and noise_var are overwritten from the dBm fields
  double P_dbm = 50.0;
  double noise_dbm = -100.0;
  OuterConfig outer;  // outer.seed is replaced per trial
  InnerConfig inner;
  std::size_t eval_samples = 10;
  double fixed_mc_magnitude = 0.3;
  std::size_t threads = 1;

  std::vector<Baseline> resolved_baselines() const;
  /// Scenario of one sweep cell, before the trial seed is applied.
  ScenarioConfig cell_scenario(double sweep_value) const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Sets one config key from its textual value. Throws ConfigError for an
/// unknown key or a malformed value.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Parses flat `key = value` lines; `#` starts a comment. Errors carry
/// "source:line:" prefixes. The result is validated.
ExperimentSpec parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentSpec load_config(const std::string& path);

/// Seed of trial t, shared by every sweep value and baseline.
std::uint64_t trial_seed(std::uint64_t base, std::size_t trial);

/// Seeded feasible non-optimised coupling: |sigma_aa| = magnitude with uniform
/// phases, symmetrised and projected onto the lossless set.
ReflectiveScattering fixed_mc_scattering(std::size_t M, double magnitude, std::uint64_t seed);

struct HeldOutMetrics {
  double mean_sum_rate = 0.0;
  double mean_mse = 0.0;
};

/// Inner solve on `count` channels from the evaluation stream of `seed`.
HeldOutMetrics evaluate_heldout(const ScenarioConfig& scenario, ChannelModel model,
                                const ScatteringState& state, std::size_t count,
                                std::uint64_t seed, const InnerConfig& inner);

struct CellResult {
  double sweep_value = 0.0;
  Baseline baseline = Baseline::kProposed;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double sum_rate = 0.0;
  double mse = 0.0;
  std::size_t iters = 0;
  std::optional<ScatteringState> state;
};

/// Trains (for the proposed scheme) and evaluates a single cell.
CellResult run_cell(const ExperimentSpec& spec, double sweep_value, Baseline baseline,
                    std::size_t trial);

struct ResultRow {
  double sweep_value = 0.0;
  Baseline baseline = Baseline::kProposed;
  std::size_t trials = 0;  // successful trials
  double mean_sum_rate = 0.0;
  double std_sum_rate = 0.0;  // sample standard deviation
  double mean_mse = 0.0;
  double iters = 0.0;
};

struct ResultTable {
  ExperimentSpec spec;
  std::vector<CellResult> cells;  // (sweep value, baseline, trial) order
  std::vector<ResultRow> rows;    // (sweep value, baseline) order
};

ResultTable run_experiment(const ExperimentSpec& spec);

std::string results_csv(const ResultTable& table);
/// Reloadable config text with every resolved key, plus comment lines with
/// per-cell seeds, failures and the software version.
std::string manifest_text(const ResultTable& table);

/// Writes results.csv, manifest.txt and scattering/<cell>.txt under `dir`.
void emit_results(const ResultTable& table, const std::string& dir);

void write_scattering(std::ostream& out, const ScatteringState& state);
ScatteringState read_scattering(std::istream& in);
void save_scattering(const std::string& path, const ScatteringState& state);
ScatteringState load_scattering(const std::string& path);

}  // namespace ris
