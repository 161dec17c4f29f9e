#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "topostat/signals.hpp"

namespace topostat {

enum class ExperimentKind { CovVsM, DenoiseVsSnr, InterpVsObserved };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

// Textual filter form used by config files and the CLI:
//   ma:0.1,0.1,0.1   ar:0.3   lowpass:0.001   exponential:0.7
//   sigmoid:2,-1     gaussian:1.5             laplacian:0.5,2
FilterSpec parse_filter_spec(const std::string& text);
std::string describe_filter(const FilterSpec& filter);

// One experiment = one signal model, one operator, one sweep. Every trial
// draws its complex, signals, noise, and masks from streams hashed off
// (master_seed, trial), so the emitted CSV is byte-identical for any thread
// count. Opting into timing fills runtime_s with wall-clock seconds and is
// the one switch that breaks byte reproducibility.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::CovVsM;

  int n0 = 20;
  double p_edge = 0.3;
  double p_tri = 0.4;
  std::string complex_file;  // when set, every trial reuses this complex

  OperatorKind operator_kind = OperatorKind::Dirac;
  int hodge_k = -1;
  FilterSpec model = PolynomialFilter{Eigen::VectorXd::Constant(3, 0.1)};

  std::vector<double> sweep;  // M list, SNR-dB list, or observed-fraction list
  std::vector<std::string> methods;
  int trials = 10;
  std::uint64_t master_seed = 1;

  int signals_m = 2000;          // ensemble size (covariance sweeps use max M)
  double noise_variance = 0.01;  // interpolation observation noise
  double sem_alpha = 0.3;
  int fit_order = 3;
  std::string mask_mode = "uniform";  // or order:<k>

  int threads = 0;  // 0 = hardware concurrency
  bool timing = false;

  // String-typed assignment used by config files and flag plumbing; throws
  // ConfigError on unknown keys or unparseable values.
  void set(const std::string& key, const std::string& value);
};

// Kind-specific defaults. Desk scale finishes in seconds on a laptop; paper
// scale follows the published protocol (n0=50, p_edge=0.2, p_tri=0.3,
// 50 trials, ensembles of 1e4).
ExperimentConfig desk_config(ExperimentKind kind);
ExperimentConfig paper_config(ExperimentKind kind);

void validate(const ExperimentConfig& config);  // throws ConfigError

// Runs all trials and writes the CSV: comment header, then
// method,sweep_param,sweep_value,trial,error,runtime_s,flag rows in
// (method, sweep, trial) order, then per-(method, sweep) lower-median
// summary rows with trial=median.
void run_experiment(const ExperimentConfig& config, std::ostream& out);
void run_experiment(const ExperimentConfig& config, const std::string& path);

}  // namespace topostat
