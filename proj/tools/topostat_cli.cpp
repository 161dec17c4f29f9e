// Command-line front end. Everything goes through the shared library's C
// interface, so this binary doubles as an end-to-end exercise of the public
// API. Exit codes: 0 success, 1 data/numeric error, 2 command-line misuse.
#include "topostat.h"

#include "CLI11.hpp"

#include <charconv>
#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace {

struct UsageError {
  std::string message;  // exit 2
};
struct DataError {
  std::string message;  // exit 1
};

void check(ts_status status) {
  if (status != TS_OK) throw DataError{ts_last_error()};
}

template <auto Free>
struct FnDeleter {
  template <class T>
  void operator()(T* p) const {
    Free(p);
  }
};
using ComplexHandle = std::unique_ptr<ts_complex, FnDeleter<ts_complex_free>>;
using BasisHandle = std::unique_ptr<ts_basis, FnDeleter<ts_basis_free>>;
using EnsembleHandle = std::unique_ptr<ts_ensemble, FnDeleter<ts_ensemble_free>>;
using CovarianceHandle = std::unique_ptr<ts_covariance, FnDeleter<ts_covariance_free>>;
using ExperimentHandle = std::unique_ptr<ts_experiment, FnDeleter<ts_experiment_free>>;
using DoubleBuffer = std::unique_ptr<double, FnDeleter<ts_free_doubles>>;
using IntBuffer = std::unique_ptr<int, FnDeleter<ts_free_ints>>;

ComplexHandle read_complex(const std::string& path) {
  ts_complex* raw = nullptr;
  check(ts_complex_read_scf(path.c_str(), &raw));
  return ComplexHandle(raw);
}

BasisHandle make_basis(const ts_complex* complex, const std::string& operator_spec) {
  ts_basis* raw = nullptr;
  check(ts_basis_create(complex, operator_spec.c_str(), &raw));
  return BasisHandle(raw);
}

EnsembleHandle read_signals(const std::string& path) {
  ts_ensemble* raw = nullptr;
  check(ts_ensemble_read_csv(path.c_str(), &raw));
  return EnsembleHandle(raw);
}

// Optional flat key=value file; present keys override the parsed flags.
class ConfigFile {
 public:
  explicit ConfigFile(std::string path) : path_(std::move(path)) {}

  void get(const char* key, std::string& value) const {
    std::string text;
    if (lookup(key, text)) value = std::move(text);
  }
  void get(const char* key, int& value) const { parse(key, value); }
  void get(const char* key, double& value) const { parse(key, value); }
  void get(const char* key, std::uint64_t& value) const { parse(key, value); }

 private:
  bool lookup(const char* key, std::string& out) const {
    if (path_.empty()) return false;
    char buffer[1024];
    int found = 0;
    check(ts_config_lookup(path_.c_str(), key, buffer, sizeof buffer, &found));
    if (found) out.assign(buffer);
    return found != 0;
  }

  template <class T>
  void parse(const char* key, T& value) const {
    std::string text;
    if (!lookup(key, text)) return;
    T parsed{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, parsed);
    if (ec != std::errc{} || ptr != end)
      throw DataError{"ConfigError: " + std::string(key) + ": cannot parse '" + text + "'"};
    value = parsed;
  }

  std::string path_;
};

struct GenComplexOptions {
  int n0 = 20;
  double p_edge = 0.3;
  double p_tri = 0.4;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

void run_gen_complex(GenComplexOptions o) {
  const ConfigFile config(o.config);
  config.get("n0", o.n0);
  config.get("p_edge", o.p_edge);
  config.get("p_tri", o.p_tri);
  config.get("seed", o.seed);
  config.get("out", o.out);
  ts_complex* raw = nullptr;
  check(ts_complex_random(o.n0, o.p_edge, o.p_tri, o.seed, &raw));
  const ComplexHandle complex(raw);
  check(ts_complex_write_scf(complex.get(), o.out.c_str()));
  int order = 0;
  int total = 0;
  check(ts_complex_order(complex.get(), &order));
  check(ts_complex_total_size(complex.get(), &total));
  std::cout << o.out << ": order-" << order << " complex with " << total << " simplices\n";
}

struct GenSignalsOptions {
  std::string complex_path;
  std::string operator_spec = "dirac";
  std::string model = "ma:0.1,0.1,0.1";
  int m = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

void run_gen_signals(GenSignalsOptions o) {
  const ConfigFile config(o.config);
  config.get("complex", o.complex_path);
  config.get("operator", o.operator_spec);
  config.get("model", o.model);
  config.get("m", o.m);
  config.get("seed", o.seed);
  config.get("out", o.out);
  const ComplexHandle complex = read_complex(o.complex_path);
  const BasisHandle basis = make_basis(complex.get(), o.operator_spec);
  ts_ensemble* raw = nullptr;
  check(ts_ensemble_generate(basis.get(), o.model.c_str(), o.m, o.seed, &raw));
  const EnsembleHandle signals(raw);
  check(ts_ensemble_write_csv(signals.get(), o.out.c_str()));
  int rows = 0;
  int cols = 0;
  check(ts_ensemble_shape(signals.get(), &rows, &cols));
  std::cout << o.out << ": " << rows << "x" << cols << " signal matrix (" << o.model << ")\n";
}

struct EstimateOptions {
  std::string complex_path;
  std::string signals_path;
  std::string operator_spec = "dirac";
  std::string method = "periodogram";
  int fit_order = 3;
  std::uint64_t seed = 0;  // accepted for uniformity; estimation is deterministic
  std::string psd_out;
  std::string cov_out;
  std::string config;
};

void run_estimate(EstimateOptions o) {
  const ConfigFile config(o.config);
  config.get("complex", o.complex_path);
  config.get("signals", o.signals_path);
  config.get("operator", o.operator_spec);
  config.get("method", o.method);
  config.get("fit_order", o.fit_order);
  config.get("out", o.psd_out);
  config.get("cov_out", o.cov_out);
  if (o.psd_out.empty() && o.cov_out.empty())
    throw UsageError{"estimate needs --out (PSD csv) and/or --cov-out (covariance matrix csv)"};
  const ComplexHandle complex = read_complex(o.complex_path);
  const BasisHandle basis = make_basis(complex.get(), o.operator_spec);
  const EnsembleHandle signals = read_signals(o.signals_path);
  ts_covariance* raw = nullptr;
  check(ts_estimate_covariance(basis.get(), signals.get(), o.method.c_str(), o.fit_order, &raw));
  const CovarianceHandle estimate(raw);
  int size = 0;
  const char* flags = nullptr;
  check(ts_covariance_size(estimate.get(), &size));
  check(ts_covariance_flags(estimate.get(), &flags));
  if (size == 0) throw DataError{std::string("DegenerateEstimate: ") + flags};
  if (*flags != '\0') std::cerr << "warning: " << flags << '\n';
  if (!o.psd_out.empty()) check(ts_covariance_write_psd_csv(estimate.get(), o.psd_out.c_str()));
  if (!o.cov_out.empty())
    check(ts_covariance_write_matrix_csv(estimate.get(), o.cov_out.c_str()));
  std::cout << o.method << " estimate written";
  if (!o.psd_out.empty()) std::cout << " to " << o.psd_out;
  if (!o.cov_out.empty()) std::cout << (o.psd_out.empty() ? " to " : " and ") << o.cov_out;
  std::cout << '\n';
}

struct DenoiseOptions {
  std::string complex_path;
  std::string signals_path;
  std::string operator_spec = "dirac";
  std::string model;
  std::string psd_path;
  double noise_variance = 0.0;
  std::uint64_t seed = 0;  // accepted for uniformity; denoising is deterministic
  std::string out;
  std::string config;
};

void run_denoise(DenoiseOptions o) {
  const ConfigFile config(o.config);
  config.get("complex", o.complex_path);
  config.get("signals", o.signals_path);
  config.get("operator", o.operator_spec);
  config.get("model", o.model);
  config.get("psd", o.psd_path);
  config.get("noise_variance", o.noise_variance);
  config.get("out", o.out);
  if (o.model.empty() == o.psd_path.empty())
    throw UsageError{"denoise needs exactly one signal prior: --model or --psd"};
  const ComplexHandle complex = read_complex(o.complex_path);
  const BasisHandle basis = make_basis(complex.get(), o.operator_spec);
  const EnsembleHandle noisy = read_signals(o.signals_path);
  CovarianceHandle prior;
  if (!o.model.empty()) {
    ts_covariance* raw = nullptr;
    check(ts_true_covariance(basis.get(), o.model.c_str(), &raw));
    prior.reset(raw);
  } else {
    double* values = nullptr;
    int count = 0;
    check(ts_read_indexed_csv(o.psd_path.c_str(), &values, &count));
    const DoubleBuffer guard(values);
    ts_covariance* raw = nullptr;
    check(ts_psd_covariance(basis.get(), values, count, &raw));
    prior.reset(raw);
  }
  ts_ensemble* raw = nullptr;
  check(ts_wiener_denoise(basis.get(), prior.get(), o.noise_variance, noisy.get(), &raw));
  const EnsembleHandle cleaned(raw);
  check(ts_ensemble_write_csv(cleaned.get(), o.out.c_str()));
  std::cout << o.out << ": denoised signals (noise variance " << o.noise_variance << ")\n";
}

struct InterpolateOptions {
  std::string complex_path;
  std::string signals_path;
  std::string operator_spec = "dirac";
  std::string prior = "map";
  std::string psd_path;
  std::string mask_path;
  double fraction = 0.0;
  double noise_variance = 0.01;
  std::uint64_t seed = 1;
  std::string out;
  std::string mask_out;
  std::string config;
};

void run_interpolate(InterpolateOptions o) {
  const ConfigFile config(o.config);
  config.get("complex", o.complex_path);
  config.get("signals", o.signals_path);
  config.get("operator", o.operator_spec);
  config.get("prior", o.prior);
  config.get("psd", o.psd_path);
  config.get("mask", o.mask_path);
  config.get("fraction", o.fraction);
  config.get("noise_variance", o.noise_variance);
  config.get("seed", o.seed);
  config.get("out", o.out);
  config.get("mask_out", o.mask_out);
  if (o.mask_path.empty() == (o.fraction == 0.0))
    throw UsageError{"interpolate needs exactly one of --mask or --fraction"};
  const ComplexHandle complex = read_complex(o.complex_path);
  const BasisHandle basis = make_basis(complex.get(), o.operator_spec);
  int n = 0;
  check(ts_basis_size(basis.get(), &n));

  int* raw_indices = nullptr;
  int observed_count = 0;
  if (!o.mask_path.empty()) {
    check(ts_read_mask(o.mask_path.c_str(), &raw_indices, &observed_count));
  } else {
    const int keep = static_cast<int>(o.fraction * n + 1e-9);
    check(ts_random_mask(n, keep, o.seed, &raw_indices, &observed_count));
  }
  const IntBuffer indices(raw_indices);
  if (!o.mask_out.empty()) check(ts_write_mask(o.mask_out.c_str(), raw_indices, observed_count));

  // The signal file may hold the full N-row matrix (rows are selected by the
  // mask) or only the observed rows.
  EnsembleHandle observed = read_signals(o.signals_path);
  int rows = 0;
  int cols = 0;
  check(ts_ensemble_shape(observed.get(), &rows, &cols));
  if (rows != observed_count) {
    if (rows != n)
      throw DataError{"DimensionMismatch: signal file has " + std::to_string(rows) +
                      " rows; expected " + std::to_string(n) + " (full) or " +
                      std::to_string(observed_count) + " (observed rows only)"};
    std::vector<double> full(static_cast<std::size_t>(rows) * cols);
    check(ts_ensemble_data(observed.get(), full.data()));
    std::vector<double> picked(static_cast<std::size_t>(observed_count) * cols);
    for (int i = 0; i < observed_count; ++i) {
      const int row = raw_indices[i];
      if (row < 0 || row >= rows)
        throw DataError{"InvalidMask: index " + std::to_string(row) + " outside 0.." +
                        std::to_string(rows - 1)};
      for (int j = 0; j < cols; ++j)
        picked[static_cast<std::size_t>(j) * observed_count + i] =
            full[static_cast<std::size_t>(j) * rows + row];
    }
    ts_ensemble* selected = nullptr;
    check(ts_ensemble_create(observed_count, cols, picked.data(), nullptr, &selected));
    observed.reset(selected);
  }

  double* psd_values = nullptr;
  DoubleBuffer psd_guard;
  if (!o.psd_path.empty()) {
    int psd_count = 0;
    check(ts_read_indexed_csv(o.psd_path.c_str(), &psd_values, &psd_count));
    psd_guard.reset(psd_values);
    if (psd_count != n)
      throw DataError{"DimensionMismatch: PSD file has " + std::to_string(psd_count) +
                      " entries; operator size is " + std::to_string(n)};
  }

  ts_ensemble* raw = nullptr;
  check(ts_interpolate(basis.get(), o.prior.c_str(), psd_values, raw_indices, observed_count,
                       o.noise_variance, observed.get(), &raw));
  const EnsembleHandle reconstructed(raw);
  check(ts_ensemble_write_csv(reconstructed.get(), o.out.c_str()));
  std::cout << o.out << ": " << o.prior << " reconstruction from " << observed_count << "/" << n
            << " observed rows\n";
}

struct ExperimentOptions {
  std::string kind;
  std::string scale = "desk";
  std::uint64_t seed = 1;
  bool timing = false;
  std::string out;
  std::string config;
  // Raw pass-through values; the library parses and validates them.
  std::string values[16];
};

// (flag, config key, help) for every experiment setting forwarded verbatim.
constexpr std::pair<const char*, const char*> kExperimentKeys[16] = {
    {"--n0", "n0"},
    {"--p-edge", "p_edge"},
    {"--p-tri", "p_tri"},
    {"--complex", "complex_file"},
    {"--operator", "operator"},
    {"--model", "model"},
    {"--sweep", "sweep"},
    {"--methods", "methods"},
    {"--trials", "trials"},
    {"--signals-m", "signals_m"},
    {"--noise-var", "noise_variance"},
    {"--sem-alpha", "sem_alpha"},
    {"--fit-order", "fit_order"},
    {"--mask-mode", "mask_mode"},
    {"--threads", "threads"},
    {"--master-seed", "master_seed"},
};

void run_experiment(const ExperimentOptions& o, const std::vector<CLI::Option*>& options,
                    const CLI::Option* seed_option, const CLI::Option* timing_option) {
  ts_experiment* raw = nullptr;
  check(ts_experiment_create(o.kind.c_str(), o.scale.c_str(), &raw));
  const ExperimentHandle experiment(raw);
  if (seed_option->count() > 0)
    check(ts_experiment_set(raw, "master_seed", std::to_string(o.seed).c_str()));
  for (std::size_t i = 0; i < options.size(); ++i)
    if (options[i]->count() > 0)
      check(ts_experiment_set(raw, kExperimentKeys[i].second, o.values[i].c_str()));
  if (timing_option->count() > 0) check(ts_experiment_set(raw, "timing", o.timing ? "1" : "0"));
  if (!o.config.empty()) check(ts_experiment_load_config(raw, o.config.c_str()));
  check(ts_experiment_run(raw, o.out.c_str()));
  std::cout << o.out << ": " << o.kind << " results (" << o.scale << " scale)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary signal processing on simplicial complexes."};
  app.require_subcommand(1);

  GenComplexOptions gen_complex;
  auto* gen_complex_cmd =
      app.add_subcommand("gen-complex", "Generate a random simplicial complex (SCF file)");
  gen_complex_cmd->add_option("--n0", gen_complex.n0, "number of vertices");
  gen_complex_cmd->add_option("--p-edge", gen_complex.p_edge, "edge probability");
  gen_complex_cmd->add_option("--p-tri", gen_complex.p_tri, "triangle probability per 3-clique");
  gen_complex_cmd->add_option("--seed", gen_complex.seed, "random seed");
  gen_complex_cmd->add_option("--out", gen_complex.out, "output SCF path")->required();
  gen_complex_cmd->add_option("--config", gen_complex.config, "key=value file overriding flags");
  gen_complex_cmd->callback([&] { run_gen_complex(gen_complex); });

  GenSignalsOptions gen_signals;
  auto* gen_signals_cmd =
      app.add_subcommand("gen-signals", "Generate stationary signals on a complex (CSV)");
  gen_signals_cmd->add_option("--complex", gen_signals.complex_path, "SCF complex file")
      ->required();
  gen_signals_cmd->add_option("--operator", gen_signals.operator_spec, "dirac or hodge:<k>");
  gen_signals_cmd->add_option("--model", gen_signals.model,
                              "generative filter, e.g. ma:0.1,0.1,0.1 | ar:0.3 | lowpass:0.001");
  gen_signals_cmd->add_option("--m", gen_signals.m, "number of realizations");
  gen_signals_cmd->add_option("--seed", gen_signals.seed, "random seed");
  gen_signals_cmd->add_option("--out", gen_signals.out, "output CSV path")->required();
  gen_signals_cmd->add_option("--config", gen_signals.config, "key=value file overriding flags");
  gen_signals_cmd->callback([&] { run_gen_signals(gen_signals); });

  EstimateOptions estimate;
  auto* estimate_cmd =
      app.add_subcommand("estimate", "Estimate a covariance/PSD from a signal ensemble");
  estimate_cmd->add_option("--complex", estimate.complex_path, "SCF complex file")->required();
  estimate_cmd->add_option("--signals", estimate.signals_path, "signal CSV file")->required();
  estimate_cmd->add_option("--operator", estimate.operator_spec, "dirac or hodge:<k>");
  estimate_cmd->add_option("--method", estimate.method,
                           "sample | correlogram | periodogram | ma-spatial | ma-spectral | "
                           "ar-spatial | ar-spectral | wirtinger | ar1-mle | kernel:<model>");
  estimate_cmd->add_option("--fit-order", estimate.fit_order, "parametric fit order R");
  estimate_cmd->add_option("--seed", estimate.seed, "unused; accepted for uniformity");
  estimate_cmd->add_option("--out", estimate.psd_out, "output PSD CSV (index,value)");
  estimate_cmd->add_option("--cov-out", estimate.cov_out, "output covariance matrix CSV");
  estimate_cmd->add_option("--config", estimate.config, "key=value file overriding flags");
  estimate_cmd->callback([&] { run_estimate(estimate); });

  DenoiseOptions denoise;
  auto* denoise_cmd = app.add_subcommand("denoise", "Wiener-denoise a noisy signal ensemble");
  denoise_cmd->add_option("--complex", denoise.complex_path, "SCF complex file")->required();
  denoise_cmd->add_option("--signals", denoise.signals_path, "noisy signal CSV file")->required();
  denoise_cmd->add_option("--operator", denoise.operator_spec, "dirac or hodge:<k>");
  denoise_cmd->add_option("--model", denoise.model, "generative filter of the clean signal");
  denoise_cmd->add_option("--psd", denoise.psd_path, "signal PSD CSV (e.g. estimate output)");
  denoise_cmd->add_option("--noise-var", denoise.noise_variance, "noise variance sigma_v^2")
      ->required();
  denoise_cmd->add_option("--seed", denoise.seed, "unused; accepted for uniformity");
  denoise_cmd->add_option("--out", denoise.out, "output CSV path")->required();
  denoise_cmd->add_option("--config", denoise.config, "key=value file overriding flags");
  denoise_cmd->callback([&] { run_denoise(denoise); });

  InterpolateOptions interpolate;
  auto* interpolate_cmd =
      app.add_subcommand("interpolate", "Reconstruct unobserved simplex signal values");
  interpolate_cmd->add_option("--complex", interpolate.complex_path, "SCF complex file")
      ->required();
  interpolate_cmd->add_option("--signals", interpolate.signals_path,
                              "signal CSV (full matrix, or observed rows only)")
      ->required();
  interpolate_cmd->add_option("--operator", interpolate.operator_spec, "dirac or hodge:<k>");
  interpolate_cmd->add_option("--prior", interpolate.prior,
                              "map | smooth | sem:<alpha> | zero | mixed:<gamma>");
  interpolate_cmd->add_option("--psd", interpolate.psd_path,
                              "PSD CSV; required by the map and mixed priors");
  interpolate_cmd->add_option("--mask", interpolate.mask_path,
                              "observed row indices, one per line");
  interpolate_cmd->add_option("--fraction", interpolate.fraction,
                              "draw a random mask observing this fraction of rows");
  interpolate_cmd->add_option("--noise-var", interpolate.noise_variance,
                              "observation noise variance");
  interpolate_cmd->add_option("--seed", interpolate.seed, "random seed for --fraction masks");
  interpolate_cmd->add_option("--out", interpolate.out, "output CSV path")->required();
  interpolate_cmd->add_option("--mask-out", interpolate.mask_out,
                              "also record the mask that was used");
  interpolate_cmd->add_option("--config", interpolate.config, "key=value file overriding flags");
  interpolate_cmd->callback([&] { run_interpolate(interpolate); });

  ExperimentOptions experiment;
  std::vector<CLI::Option*> experiment_options;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "Run a seeded sweep and write plot-ready CSV");
  experiment_cmd
      ->add_option("--experiment", experiment.kind,
                   "cov-vs-m | denoise-vs-snr | interp-vs-observed")
      ->required();
  experiment_cmd->add_option("--scale", experiment.scale, "desk or paper defaults");
  auto* experiment_seed =
      experiment_cmd->add_option("--seed", experiment.seed, "master seed (alias of --master-seed)");
  for (std::size_t i = 0; i < std::size(kExperimentKeys); ++i)
    experiment_options.push_back(experiment_cmd->add_option(
        kExperimentKeys[i].first, experiment.values[i],
        std::string("forwarded to the ") + kExperimentKeys[i].second + " setting"));
  auto* experiment_timing = experiment_cmd->add_flag(
      "--timing", experiment.timing, "record wall-clock runtimes (breaks byte determinism)");
  experiment_cmd->add_option("--out", experiment.out, "output CSV path")->required();
  experiment_cmd->add_option("--config", experiment.config,
                             "key=value file overriding flags (same keys as above)");
  experiment_cmd->callback([&] {
    run_experiment(experiment, experiment_options, experiment_seed, experiment_timing);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.message << '\n';
    return 1;
  }
  return 0;
}
