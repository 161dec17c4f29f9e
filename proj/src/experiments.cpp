#include "topostat/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "topostat/common.hpp"
#include "topostat/estimation.hpp"
#include "topostat/io.hpp"
#include "topostat/recovery.hpp"
#include "topostat/rng.hpp"

namespace topostat {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// RNG stream indices hashed off each trial seed. Masks get one stream per
// sweep point so trial output never depends on evaluation order.
constexpr std::uint64_t kStreamComplex = 0;
constexpr std::uint64_t kStreamSignals = 1;
constexpr std::uint64_t kStreamNoise = 2;
constexpr std::uint64_t kStreamMaskBase = 16;

[[noreturn]] void config_fail(const std::string& field, const std::string& what) {
  fail(ErrorCode::Config, "ConfigError: " + field + ": " + what);
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const auto end = pos == std::string::npos ? text.size() : pos;
    const std::string item = trim(text.substr(start, end - start));
    if (!item.empty()) parts.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double_field(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto result = std::from_chars(t.data(), t.data() + t.size(), value);
  if (result.ec != std::errc{} || result.ptr != t.data() + t.size())
    config_fail(field, "invalid number '" + text + "'");
  return value;
}

int parse_int_field(const std::string& field, const std::string& text) {
  const double value = parse_double_field(field, text);
  const int rounded = static_cast<int>(std::llround(value));
  if (rounded != value) config_fail(field, "expected an integer, got '" + text + "'");
  return rounded;
}

std::uint64_t parse_seed_field(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto result = std::from_chars(t.data(), t.data() + t.size(), value);
  if (result.ec != std::errc{} || result.ptr != t.data() + t.size())
    config_fail(field, "invalid seed '" + text + "'");
  return value;
}

Eigen::VectorXd parse_coeff_list(const std::string& field, const std::string& text) {
  const auto parts = split_list(text);
  if (parts.empty()) config_fail(field, "expected at least one coefficient");
  Eigen::VectorXd coeffs(static_cast<int>(parts.size()));
  for (size_t i = 0; i < parts.size(); ++i)
    coeffs[static_cast<int>(i)] = parse_double_field(field, parts[i]);
  return coeffs;
}

std::string format_error(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool is_cov_method(const std::string& name) {
  static const char* kTags[] = {"sample",      "correlogram", "periodogram",
                                "ma-spatial",  "ma-spectral", "ar-spatial",
                                "ar-spectral", "wirtinger",   "ar1-mle"};
  for (const char* tag : kTags)
    if (name == tag) return true;
  if (name.rfind("kernel:", 0) == 0) {
    try {
      spectral_model_from_string(name.substr(7));
    } catch (const Error&) {
      return false;
    }
    return true;
  }
  return false;
}

bool is_interp_method(const std::string& name) {
  if (name == "map" || name == "smooth" || name == "sem" || name == "zero") return true;
  if (name.rfind("mixed:", 0) == 0) {
    const std::string arg = name.substr(6);
    double gamma = 0.0;
    const auto result = std::from_chars(arg.data(), arg.data() + arg.size(), gamma);
    return result.ec == std::errc{} && result.ptr == arg.data() + arg.size() && gamma >= 0.0;
  }
  return false;
}

struct Row {
  int method = 0;  // index into config.methods
  int sweep = 0;   // index into config.sweep
  int trial = 0;
  double error = 0.0;
  double runtime = 0.0;
  std::string flag;
};

// Per-trial state shared by all three experiment kinds.
struct TrialData {
  TopologicalOperator op;
  SpectralBasis basis;
  TrueCovPsd truth;
  SignalEnsemble signals;
  std::uint64_t trial_seed = 0;
};

TrialData make_trial(const ExperimentConfig& cfg, const SimplicialComplex* fixed, int trial,
                     int ensemble_m) {
  TrialData data;
  data.trial_seed = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(trial));
  const SimplicialComplex complex =
      fixed ? *fixed
            : SimplicialComplex::random(cfg.n0, cfg.p_edge, cfg.p_tri,
                                        mix_seed(data.trial_seed, kStreamComplex));
  data.op = cfg.operator_kind == OperatorKind::Dirac ? dirac(complex)
                                                     : hodge_laplacian(complex, cfg.hodge_k);
  data.basis = eigendecompose(data.op);
  data.truth = true_cov_psd(data.basis, cfg.model);
  data.signals =
      generate(data.basis, cfg.model, ensemble_m, mix_seed(data.trial_seed, kStreamSignals));
  return data;
}

// Degenerate method evaluations become flagged infinite-error rows so a bad
// draw never aborts the whole sweep.
template <typename Fn>
void guarded(Row& row, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    row.error = kInf;
    const std::string what = e.what();
    row.flag = what.substr(0, what.find(':'));
  }
}

SignalEnsemble prefix_ensemble(const SignalEnsemble& full, int m) {
  SignalEnsemble out;
  out.data = full.data.leftCols(m);
  out.operator_kind = full.operator_kind;
  out.hodge_k = full.hodge_k;
  out.offsets = full.offsets;
  return out;
}

void score_covariance(Row& row, const CovarianceEstimate& est, const Eigen::MatrixXd& truth) {
  row.flag = est.flags();
  if (est.matrix.size() == 0) {
    row.error = kInf;
  } else {
    row.error = rel_error(est.matrix, truth);
  }
}

void run_cov_trial(const ExperimentConfig& cfg, const SimplicialComplex* fixed, int trial,
                   std::vector<Row>& rows) {
  const int m_max =
      static_cast<int>(std::llround(*std::max_element(cfg.sweep.begin(), cfg.sweep.end())));
  const TrialData data = make_trial(cfg, fixed, trial, m_max);
  for (int i = 0; i < static_cast<int>(cfg.methods.size()); ++i) {
    for (int j = 0; j < static_cast<int>(cfg.sweep.size()); ++j) {
      Row row{i, j, trial};
      guarded(row, [&] {
        const int m = static_cast<int>(std::llround(cfg.sweep[j]));
        const SignalEnsemble prefix = prefix_ensemble(data.signals, m);
        const double t0 = now_seconds();
        const CovarianceEstimate est =
            estimate_covariance(data.basis, prefix, cfg.methods[i], cfg.fit_order);
        if (cfg.timing) row.runtime = now_seconds() - t0;
        score_covariance(row, est, data.truth.covariance);
      });
      rows.push_back(std::move(row));
    }
  }
}

void run_denoise_trial(const ExperimentConfig& cfg, const SimplicialComplex* fixed, int trial,
                       std::vector<Row>& rows) {
  const TrialData data = make_trial(cfg, fixed, trial, cfg.signals_m);
  const int n = data.basis.size();
  const Eigen::MatrixXd noise =
      white_noise(n, cfg.signals_m, mix_seed(data.trial_seed, kStreamNoise)).data;
  const double mean_power = data.truth.covariance.trace() / n;
  const Psd true_psd{data.truth.psd, std::nullopt};

  for (int j = 0; j < static_cast<int>(cfg.sweep.size()); ++j) {
    const double sigma2 = mean_power / std::pow(10.0, cfg.sweep[j] / 10.0);
    SignalEnsemble noisy = data.signals;
    noisy.data += std::sqrt(sigma2) * noise;

    std::optional<SignalEnsemble> filtered;
    double filter_seconds = 0.0;
    const auto wiener_output = [&]() -> const SignalEnsemble& {
      if (!filtered) {
        const double t0 = now_seconds();
        filtered = wiener_denoise(data.basis, true_psd, sigma2, noisy);
        filter_seconds = now_seconds() - t0;
      }
      return *filtered;
    };

    for (int i = 0; i < static_cast<int>(cfg.methods.size()); ++i) {
      Row row{i, j, trial};
      guarded(row, [&] {
        const std::string& method = cfg.methods[i];
        if (method == "noisy") {
          row.error = rel_error(noisy.data, data.signals.data);
        } else if (method == "wiener") {
          const SignalEnsemble& out = wiener_output();
          if (cfg.timing) row.runtime = filter_seconds;
          row.error = rel_error(out.data, data.signals.data);
        } else if (method == "wiener-cov") {
          const SignalEnsemble& out = wiener_output();
          const double t0 = now_seconds();
          const CovarianceEstimate est = sample_covariance(out);
          if (cfg.timing) row.runtime = filter_seconds + (now_seconds() - t0);
          score_covariance(row, est, data.truth.covariance);
        } else {
          const double t0 = now_seconds();
          const CovarianceEstimate est =
              estimate_covariance(data.basis, noisy, method, cfg.fit_order);
          if (cfg.timing) row.runtime = now_seconds() - t0;
          score_covariance(row, est, data.truth.covariance);
        }
      });
      rows.push_back(std::move(row));
    }
  }
}

SelectionMask build_mask(const ExperimentConfig& cfg, const TrialData& data, double fraction,
                         std::uint64_t seed) {
  const int n = data.basis.size();
  if (cfg.mask_mode == "uniform") {
    const int kept = static_cast<int>(std::floor(fraction * n + 1e-9));
    return random_mask(n, std::min(kept, n), seed);
  }
  // order:<k> masks drop rows only inside order k; all other orders stay
  // fully observed and the sweep fraction applies to the k block alone.
  const int k = parse_int_field("mask_mode", cfg.mask_mode.substr(6));
  const auto& offsets = data.basis.offsets;
  if (k < 0 || k >= static_cast<int>(offsets.size()))
    config_fail("mask_mode", "order " + std::to_string(k) + " not present in this complex");
  const int begin = offsets[k];
  const int end = k + 1 < static_cast<int>(offsets.size()) ? offsets[k + 1] : n;
  const int block = end - begin;
  const int kept = static_cast<int>(std::floor(fraction * block + 1e-9));
  const SelectionMask inner = random_mask(block, std::min(kept, block), seed);
  std::vector<int> observed;
  observed.reserve(n - block + kept);
  for (int i = 0; i < begin; ++i) observed.push_back(i);
  for (int i : inner.observed) observed.push_back(begin + i);
  for (int i = end; i < n; ++i) observed.push_back(i);
  return make_mask(n, std::move(observed));
}

void run_interp_trial(const ExperimentConfig& cfg, const SimplicialComplex* fixed, int trial,
                      std::vector<Row>& rows) {
  const TrialData data = make_trial(cfg, fixed, trial, cfg.signals_m);
  const int n = data.basis.size();
  const Eigen::MatrixXd noise =
      white_noise(n, cfg.signals_m, mix_seed(data.trial_seed, kStreamNoise)).data;
  const double sigma2 = cfg.noise_variance;
  const Eigen::MatrixXd noisy_full = data.signals.data + std::sqrt(sigma2) * noise;

  const bool wants_mixed = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                       [](const std::string& m) { return m.rfind("mixed:", 0) == 0; });
  const bool wants_smooth =
      wants_mixed || std::count(cfg.methods.begin(), cfg.methods.end(), "smooth") > 0;
  Eigen::VectorXd pg_psd;
  if (wants_mixed) pg_psd = periodogram(data.basis, data.signals).values;
  Eigen::MatrixXd smooth_quadratic;
  if (wants_smooth) smooth_quadratic = smoothness_quadratic(data.op);

  for (int j = 0; j < static_cast<int>(cfg.sweep.size()); ++j) {
    const SelectionMask mask =
        build_mask(cfg, data, cfg.sweep[j], mix_seed(data.trial_seed, kStreamMaskBase + j));
    const Eigen::MatrixXd observed = mask.select(noisy_full);

    for (int i = 0; i < static_cast<int>(cfg.methods.size()); ++i) {
      Row row{i, j, trial};
      guarded(row, [&] {
        const std::string& method = cfg.methods[i];
        const double t0 = now_seconds();
        InterpolationResult result;
        if (method == "map") {
          result = interpolate_map(data.truth.covariance, mask, sigma2, observed);
        } else if (method == "smooth") {
          result = interpolate_regularized(PrecisionSpec{PrecisionSmoothness{smooth_quadratic}},
                                           mask, sigma2, observed);
        } else if (method == "sem") {
          result = interpolate_regularized(PrecisionSpec{PrecisionSem{cfg.sem_alpha, data.op.matrix}},
                                           mask, sigma2, observed);
        } else if (method == "zero") {
          result.signals = mask.embed(observed);
        } else {
          // mixed:<gamma> solves min ||s_bar - Theta z||^2 + z^T Q_pg z
          // + gamma z^T D^2 z, i.e. a unit-weight data term.
          const double gamma = parse_double_field("methods", method.substr(6));
          PrecisionMixed prior;
          prior.terms.push_back(
              {1.0, PrecisionSpec{PrecisionFromPsd{data.basis.eigenvectors, pg_psd}}});
          prior.terms.push_back({gamma, PrecisionSpec{PrecisionSmoothness{smooth_quadratic}}});
          result = interpolate_regularized(PrecisionSpec{prior}, mask, 1.0, observed);
        }
        if (cfg.timing) row.runtime = now_seconds() - t0;
        row.error = rel_error(result.signals, data.signals.data);
        row.flag = result.flag;
      });
      rows.push_back(std::move(row));
    }
  }
}

void write_rows(const ExperimentConfig& cfg, std::vector<Row> rows, std::ostream& out) {
  const char* sweep_param = cfg.kind == ExperimentKind::CovVsM         ? "M"
                            : cfg.kind == ExperimentKind::DenoiseVsSnr ? "snr_db"
                                                                       : "fraction";
  out << "# experiment " << to_string(cfg.kind) << "\n";
  if (cfg.complex_file.empty()) {
    out << "# complex n0=" << cfg.n0 << " p_edge=" << format_value(cfg.p_edge)
        << " p_tri=" << format_value(cfg.p_tri) << "\n";
  } else {
    out << "# complex file=" << cfg.complex_file << "\n";
  }
  if (cfg.operator_kind == OperatorKind::Dirac) {
    out << "# operator dirac\n";
  } else {
    out << "# operator hodge:" << cfg.hodge_k << "\n";
  }
  out << "# model " << describe_filter(cfg.model) << "\n";
  out << "# trials " << cfg.trials << "\n";
  out << "# master_seed " << cfg.master_seed << "\n";
  if (cfg.kind != ExperimentKind::CovVsM) out << "# signals_m " << cfg.signals_m << "\n";
  out << "# fit_order " << cfg.fit_order << "\n";
  if (cfg.kind == ExperimentKind::DenoiseVsSnr)
    out << "# snr_db = 10*log10((tr(C)/N) / sigma_v^2)\n";
  if (cfg.kind == ExperimentKind::InterpVsObserved) {
    out << "# noise_variance " << format_value(cfg.noise_variance) << "\n";
    out << "# sem_alpha " << format_value(cfg.sem_alpha) << "\n";
    out << "# mask_mode " << cfg.mask_mode << "\n";
  }
  out << "# summary rows use trial=median (lower median for even trial counts)\n";
  out << "method,sweep_param,sweep_value,trial,error,runtime_s,flag\n";

  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    return std::make_tuple(a.method, cfg.sweep[a.sweep], a.trial) <
           std::make_tuple(b.method, cfg.sweep[b.sweep], b.trial);
  });
  for (const Row& row : rows) {
    std::string flag = row.flag;  // multi-flag values must not add CSV columns
    std::replace(flag.begin(), flag.end(), ',', ';');
    out << cfg.methods[row.method] << ',' << sweep_param << ',' << format_value(cfg.sweep[row.sweep])
        << ',' << row.trial << ',' << format_error(row.error) << ','
        << (row.runtime == 0.0 ? "0" : format_value(row.runtime)) << ',' << flag << "\n";
  }

  // Summary block: lower median over trials per (method, sweep point).
  for (int i = 0; i < static_cast<int>(cfg.methods.size()); ++i) {
    std::vector<int> order(cfg.sweep.size());
    for (size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return cfg.sweep[a] < cfg.sweep[b]; });
    for (int j : order) {
      std::vector<double> errors;
      for (const Row& row : rows)
        if (row.method == i && row.sweep == j) errors.push_back(row.error);
      std::sort(errors.begin(), errors.end());
      const double median = errors[(errors.size() - 1) / 2];
      out << cfg.methods[i] << ',' << sweep_param << ',' << format_value(cfg.sweep[j])
          << ",median," << format_error(median) << ",0,\n";
    }
  }
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::CovVsM: return "cov-vs-m";
    case ExperimentKind::DenoiseVsSnr: return "denoise-vs-snr";
    case ExperimentKind::InterpVsObserved: return "interp-vs-observed";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "cov-vs-m") return ExperimentKind::CovVsM;
  if (name == "denoise-vs-snr") return ExperimentKind::DenoiseVsSnr;
  if (name == "interp-vs-observed") return ExperimentKind::InterpVsObserved;
  config_fail("experiment", "unknown kind '" + name + "'");
}

FilterSpec parse_filter_spec(const std::string& text) {
  const auto pos = text.find(':');
  if (pos == std::string::npos)
    config_fail("model", "expected <name>:<coeffs>, got '" + text + "'");
  const std::string name = trim(text.substr(0, pos));
  const Eigen::VectorXd coeffs = parse_coeff_list("model", text.substr(pos + 1));
  if (name == "ma") return PolynomialFilter{coeffs};
  if (name == "ar") return AutoRegressiveFilter{coeffs};
  SpectralModel model;
  try {
    model = spectral_model_from_string(name);
  } catch (const Error&) {
    config_fail("model", "unknown filter '" + name + "'");
  }
  const int want =
      (model == SpectralModel::Sigmoid || model == SpectralModel::LaplacianKernel) ? 2 : 1;
  if (coeffs.size() != want)
    config_fail("model", name + " takes " + std::to_string(want) + " parameter(s)");
  return SpectralResponseFilter{model, coeffs};
}

std::string describe_filter(const FilterSpec& filter) {
  std::string name;
  const Eigen::VectorXd* coeffs = nullptr;
  if (const auto* ma = std::get_if<PolynomialFilter>(&filter)) {
    name = "ma";
    coeffs = &ma->coeffs;
  } else if (const auto* ar = std::get_if<AutoRegressiveFilter>(&filter)) {
    name = "ar";
    coeffs = &ar->coeffs;
  } else {
    const auto& kernel = std::get<SpectralResponseFilter>(filter);
    name = to_string(kernel.model);
    coeffs = &kernel.params;
  }
  std::string out = name + ":";
  for (int i = 0; i < coeffs->size(); ++i) {
    if (i) out += ',';
    out += format_value((*coeffs)[i]);
  }
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment") {
    kind = experiment_kind_from_string(trim(value));
  } else if (key == "n0") {
    n0 = parse_int_field(key, value);
  } else if (key == "p_edge") {
    p_edge = parse_double_field(key, value);
  } else if (key == "p_tri") {
    p_tri = parse_double_field(key, value);
  } else if (key == "complex_file") {
    complex_file = trim(value);
  } else if (key == "operator") {
    const std::string text = trim(value);
    if (text == "dirac") {
      operator_kind = OperatorKind::Dirac;
      hodge_k = -1;
    } else if (text.rfind("hodge:", 0) == 0) {
      operator_kind = OperatorKind::Hodge;
      hodge_k = parse_int_field(key, text.substr(6));
    } else {
      config_fail(key, "expected dirac or hodge:<k>, got '" + value + "'");
    }
  } else if (key == "model") {
    model = parse_filter_spec(trim(value));
  } else if (key == "sweep") {
    const auto parts = split_list(value);
    sweep.clear();
    for (const auto& part : parts) sweep.push_back(parse_double_field(key, part));
  } else if (key == "methods") {
    methods = split_list(value);
  } else if (key == "trials") {
    trials = parse_int_field(key, value);
  } else if (key == "master_seed") {
    master_seed = parse_seed_field(key, value);
  } else if (key == "signals_m") {
    signals_m = parse_int_field(key, value);
  } else if (key == "noise_variance") {
    noise_variance = parse_double_field(key, value);
  } else if (key == "sem_alpha") {
    sem_alpha = parse_double_field(key, value);
  } else if (key == "fit_order") {
    fit_order = parse_int_field(key, value);
  } else if (key == "mask_mode") {
    mask_mode = trim(value);
  } else if (key == "threads") {
    threads = parse_int_field(key, value);
  } else if (key == "timing") {
    const std::string text = trim(value);
    if (text == "1" || text == "true") {
      timing = true;
    } else if (text == "0" || text == "false") {
      timing = false;
    } else {
      config_fail(key, "expected 0/1/true/false, got '" + value + "'");
    }
  } else {
    config_fail(key, "unknown configuration key");
  }
}

ExperimentConfig desk_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::CovVsM:
      cfg.sweep = {100, 316, 1000, 3162, 10000};
      cfg.methods = {"sample",      "correlogram", "periodogram", "ma-spatial",
                     "ma-spectral", "ar-spatial",  "ar-spectral"};
      break;
    case ExperimentKind::DenoiseVsSnr:
      cfg.sweep = {1, 5, 10, 20, 30};
      cfg.methods = {"noisy", "wiener"};
      cfg.signals_m = 2000;
      break;
    case ExperimentKind::InterpVsObserved:
      cfg.sweep = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
      cfg.methods = {"map", "smooth", "sem", "zero"};
      cfg.model = PolynomialFilter{Eigen::VectorXd::Constant(3, 0.3)};
      cfg.signals_m = 1000;
      break;
  }
  return cfg;
}

ExperimentConfig paper_config(ExperimentKind kind) {
  ExperimentConfig cfg = desk_config(kind);
  cfg.n0 = 50;
  cfg.p_edge = 0.2;
  cfg.p_tri = 0.3;
  cfg.trials = 50;
  switch (kind) {
    case ExperimentKind::CovVsM:
      cfg.sweep = {100, 215, 464, 1000, 2154, 4642, 10000};
      break;
    case ExperimentKind::DenoiseVsSnr:
      cfg.sweep = {1, 5, 10, 15, 20, 25, 30};
      cfg.signals_m = 10000;
      break;
    case ExperimentKind::InterpVsObserved:
      cfg.signals_m = 10000;
      break;
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) config_fail("trials", "must be >= 1");
  if (cfg.sweep.empty()) config_fail("sweep", "must be non-empty");
  if (cfg.methods.empty()) config_fail("methods", "must be non-empty");
  if (cfg.complex_file.empty()) {
    if (cfg.n0 < 1) config_fail("n0", "must be >= 1");
    if (cfg.p_edge < 0 || cfg.p_edge > 1) config_fail("p_edge", "must lie in [0, 1]");
    if (cfg.p_tri < 0 || cfg.p_tri > 1) config_fail("p_tri", "must lie in [0, 1]");
  }
  if (cfg.operator_kind == OperatorKind::Hodge && cfg.hodge_k < 0)
    config_fail("operator", "hodge order must be >= 0");
  if (cfg.fit_order < 1) config_fail("fit_order", "must be >= 1");
  if (!(cfg.noise_variance > 0)) config_fail("noise_variance", "must be positive");
  if (cfg.threads < 0) config_fail("threads", "must be >= 0");
  if (cfg.kind != ExperimentKind::CovVsM && cfg.signals_m < 1)
    config_fail("signals_m", "must be >= 1");

  for (size_t i = 0; i < cfg.methods.size(); ++i)
    for (size_t j = i + 1; j < cfg.methods.size(); ++j)
      if (cfg.methods[i] == cfg.methods[j])
        config_fail("methods", "duplicate method '" + cfg.methods[i] + "'");

  switch (cfg.kind) {
    case ExperimentKind::CovVsM:
      for (double m : cfg.sweep)
        if (m < 1 || m != std::llround(m))
          config_fail("sweep", "M values must be positive integers");
      for (const auto& method : cfg.methods)
        if (!is_cov_method(method))
          config_fail("methods", "unknown covariance method '" + method + "'");
      break;
    case ExperimentKind::DenoiseVsSnr:
      for (const auto& method : cfg.methods)
        if (method != "noisy" && method != "wiener" && method != "wiener-cov" &&
            !is_cov_method(method))
          config_fail("methods", "unknown denoising method '" + method + "'");
      break;
    case ExperimentKind::InterpVsObserved:
      for (double f : cfg.sweep)
        if (!(f > 0) || f > 1) config_fail("sweep", "fractions must lie in (0, 1]");
      for (const auto& method : cfg.methods)
        if (!is_interp_method(method))
          config_fail("methods", "unknown interpolation method '" + method + "'");
      if (cfg.mask_mode != "uniform") {
        if (cfg.mask_mode.rfind("order:", 0) != 0)
          config_fail("mask_mode", "expected uniform or order:<k>, got '" + cfg.mask_mode + "'");
        if (parse_int_field("mask_mode", cfg.mask_mode.substr(6)) < 0)
          config_fail("mask_mode", "order must be >= 0");
      }
      break;
  }
}

void run_experiment(const ExperimentConfig& cfg, std::ostream& out) {
  validate(cfg);
  std::unique_ptr<SimplicialComplex> fixed;
  if (!cfg.complex_file.empty())
    fixed = std::make_unique<SimplicialComplex>(read_scf(cfg.complex_file));

  const auto run_trial = [&](int trial, std::vector<Row>& rows) {
    switch (cfg.kind) {
      case ExperimentKind::CovVsM: run_cov_trial(cfg, fixed.get(), trial, rows); break;
      case ExperimentKind::DenoiseVsSnr: run_denoise_trial(cfg, fixed.get(), trial, rows); break;
      case ExperimentKind::InterpVsObserved: run_interp_trial(cfg, fixed.get(), trial, rows); break;
    }
  };

  std::vector<std::vector<Row>> per_trial(cfg.trials);
  std::vector<std::exception_ptr> failures(cfg.trials);
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const int workers =
      std::min(cfg.trials, cfg.threads > 0 ? cfg.threads : static_cast<int>(hardware));
  if (workers <= 1) {
    for (int t = 0; t < cfg.trials; ++t) run_trial(t, per_trial[t]);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1)) {
          try {
            run_trial(t, per_trial[t]);
          } catch (...) {
            failures[t] = std::current_exception();
          }
        }
      });
    }
    for (auto& thread : pool) thread.join();
    for (int t = 0; t < cfg.trials; ++t)
      if (failures[t]) std::rethrow_exception(failures[t]);
  }

  std::vector<Row> rows;
  for (auto& trial_rows : per_trial)
    for (auto& row : trial_rows) rows.push_back(std::move(row));
  write_rows(cfg, std::move(rows), out);
}

void run_experiment(const ExperimentConfig& cfg, const std::string& path) {
  std::ostringstream buffer;  // so a failed run never leaves a partial file
  run_experiment(cfg, buffer);
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "IoError: cannot open '" + path + "' for writing");
  out << buffer.str();
  if (!out) fail(ErrorCode::Io, "IoError: failed writing '" + path + "'");
}

}  // namespace topostat
