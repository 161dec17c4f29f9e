#include "topostat.h"

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "topostat/common.hpp"
#include "topostat/complex.hpp"
#include "topostat/estimation.hpp"
#include "topostat/experiments.hpp"
#include "topostat/io.hpp"
#include "topostat/recovery.hpp"
#include "topostat/signals.hpp"
#include "topostat/spectral.hpp"

struct ts_complex {
  topostat::SimplicialComplex value;
};
struct ts_basis {
  topostat::TopologicalOperator op;
  topostat::SpectralBasis value;
};
struct ts_ensemble {
  topostat::SignalEnsemble value;
};
struct ts_covariance {
  topostat::CovarianceEstimate value;
  std::string flags;  // cached so ts_covariance_flags can hand out a pointer
};
struct ts_experiment {
  topostat::ExperimentConfig value;
};

namespace {

thread_local std::string g_last_error;

ts_status map_code(topostat::ErrorCode code) {
  using topostat::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return TS_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return TS_ERR_PARSE;
    case ErrorCode::Validation: return TS_ERR_VALIDATION;
    case ErrorCode::Dimension: return TS_ERR_DIMENSION;
    case ErrorCode::Numeric: return TS_ERR_NUMERIC;
    case ErrorCode::Singular: return TS_ERR_SINGULAR;
    case ErrorCode::Convergence: return TS_ERR_CONVERGENCE;
    case ErrorCode::Io: return TS_ERR_IO;
    case ErrorCode::Config: return TS_ERR_CONFIG;
  }
  return TS_ERR_INTERNAL;
}

template <typename Fn>
ts_status guarded(Fn&& fn) {
  try {
    fn();
    return TS_OK;
  } catch (const topostat::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TS_ERR_INTERNAL;
  }
}

ts_status null_arg(const char* what) {
  g_last_error = std::string("NullPointer: ") + what;
  return TS_ERR_NULL_POINTER;
}

// Parses "dirac" / "hodge:<k>" against a complex.
topostat::TopologicalOperator build_operator(const topostat::SimplicialComplex& complex,
                                             const std::string& spec) {
  if (spec == "dirac") return topostat::dirac(complex);
  if (spec.rfind("hodge:", 0) == 0) {
    try {
      return topostat::hodge_laplacian(complex, std::stoi(spec.substr(6)));
    } catch (const topostat::Error&) {
      throw;
    } catch (const std::exception&) {
      // fall through to the shared error below
    }
  }
  topostat::fail(topostat::ErrorCode::InvalidArgument,
                 "InvalidArgument: operator must be dirac or hodge:<k>, got '" + spec + "'");
}

topostat::Psd psd_of(const ts_basis* basis, const topostat::CovarianceEstimate& est) {
  if (est.psd.size() > 0) return topostat::Psd{est.psd, std::nullopt};
  return topostat::correlogram(basis->value, est.matrix);
}

}  // namespace

extern "C" {

const char* ts_last_error(void) { return g_last_error.c_str(); }

/* ---- complexes ---- */

ts_status ts_complex_random(int n0, double p_edge, double p_tri, uint64_t seed, ts_complex** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new ts_complex{topostat::SimplicialComplex::random(n0, p_edge, p_tri, seed)};
  });
}

ts_status ts_complex_read_scf(const char* path, ts_complex** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new ts_complex{topostat::read_scf(path)}; });
}

ts_status ts_complex_write_scf(const ts_complex* complex, const char* path) {
  if (!complex) return null_arg("complex");
  if (!path) return null_arg("path");
  return guarded([&] { topostat::write_scf(complex->value, path); });
}

ts_status ts_complex_order(const ts_complex* complex, int* out) {
  if (!complex) return null_arg("complex");
  if (!out) return null_arg("out");
  *out = complex->value.order();
  return TS_OK;
}

ts_status ts_complex_count(const ts_complex* complex, int k, int* out) {
  if (!complex) return null_arg("complex");
  if (!out) return null_arg("out");
  *out = complex->value.count(k);
  return TS_OK;
}

ts_status ts_complex_total_size(const ts_complex* complex, int* out) {
  if (!complex) return null_arg("complex");
  if (!out) return null_arg("out");
  *out = complex->value.total_size();
  return TS_OK;
}

void ts_complex_free(ts_complex* complex) { delete complex; }

/* ---- bases ---- */

ts_status ts_basis_create(const ts_complex* complex, const char* operator_spec, ts_basis** out) {
  if (!complex) return null_arg("complex");
  if (!operator_spec) return null_arg("operator_spec");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto handle = std::make_unique<ts_basis>();
    handle->op = build_operator(complex->value, operator_spec);
    handle->value = topostat::eigendecompose(handle->op);
    *out = handle.release();
  });
}

ts_status ts_basis_size(const ts_basis* basis, int* out) {
  if (!basis) return null_arg("basis");
  if (!out) return null_arg("out");
  *out = basis->value.size();
  return TS_OK;
}

ts_status ts_basis_eigenvalues(const ts_basis* basis, double* out) {
  if (!basis) return null_arg("basis");
  if (!out) return null_arg("out");
  const auto& values = basis->value.eigenvalues;
  std::memcpy(out, values.data(), sizeof(double) * values.size());
  return TS_OK;
}

ts_status ts_basis_labels(const ts_basis* basis, char* out) {
  if (!basis) return null_arg("basis");
  if (!out) return null_arg("out");
  return guarded([&] {
    if (!basis->value.labeled())
      topostat::fail(topostat::ErrorCode::InvalidArgument,
                     "InvalidArgument: this basis carries no subspace labels");
    for (size_t i = 0; i < basis->value.labels.size(); ++i)
      out[i] = static_cast<char>(basis->value.labels[i]);
  });
}

void ts_basis_free(ts_basis* basis) { delete basis; }

/* ---- ensembles ---- */

ts_status ts_ensemble_generate(const ts_basis* basis, const char* filter_spec, int m,
                               uint64_t seed, ts_ensemble** out) {
  if (!basis) return null_arg("basis");
  if (!filter_spec) return null_arg("filter_spec");
  if (!out) return null_arg("out");
  return guarded([&] {
    const topostat::FilterSpec filter = topostat::parse_filter_spec(filter_spec);
    *out = new ts_ensemble{topostat::generate(basis->value, filter, m, seed)};
  });
}

ts_status ts_ensemble_create(int rows, int cols, const double* column_major,
                             const char* operator_spec, ts_ensemble** out) {
  if (!column_major) return null_arg("column_major");
  if (!out) return null_arg("out");
  return guarded([&] {
    if (rows < 1 || cols < 1)
      topostat::fail(topostat::ErrorCode::InvalidArgument,
                     "InvalidArgument: ensemble shape must be positive");
    topostat::SignalEnsemble signals;
    signals.data = Eigen::Map<const Eigen::MatrixXd>(column_major, rows, cols);
    if (operator_spec) {
      const std::string spec = operator_spec;
      if (spec == "dirac") {
        signals.operator_kind = topostat::OperatorKind::Dirac;
      } else if (spec.rfind("hodge:", 0) == 0) {
        signals.operator_kind = topostat::OperatorKind::Hodge;
        signals.hodge_k = std::atoi(spec.c_str() + 6);
      } else {
        topostat::fail(topostat::ErrorCode::InvalidArgument,
                       "InvalidArgument: operator must be dirac or hodge:<k>, got '" + spec + "'");
      }
    }
    *out = new ts_ensemble{std::move(signals)};
  });
}

ts_status ts_ensemble_read_csv(const char* path, ts_ensemble** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new ts_ensemble{topostat::read_signals_csv(path)}; });
}

ts_status ts_ensemble_write_csv(const ts_ensemble* signals, const char* path) {
  if (!signals) return null_arg("signals");
  if (!path) return null_arg("path");
  return guarded([&] { topostat::write_signals_csv(path, signals->value); });
}

ts_status ts_ensemble_shape(const ts_ensemble* signals, int* rows, int* cols) {
  if (!signals) return null_arg("signals");
  if (!rows) return null_arg("rows");
  if (!cols) return null_arg("cols");
  *rows = signals->value.rows();
  *cols = signals->value.cols();
  return TS_OK;
}

ts_status ts_ensemble_data(const ts_ensemble* signals, double* out) {
  if (!signals) return null_arg("signals");
  if (!out) return null_arg("out");
  std::memcpy(out, signals->value.data.data(), sizeof(double) * signals->value.data.size());
  return TS_OK;
}

void ts_ensemble_free(ts_ensemble* signals) { delete signals; }

/* ---- estimation ---- */

ts_status ts_estimate_covariance(const ts_basis* basis, const ts_ensemble* signals,
                                 const char* method, int fit_order, ts_covariance** out) {
  if (!basis) return null_arg("basis");
  if (!signals) return null_arg("signals");
  if (!method) return null_arg("method");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto handle = std::make_unique<ts_covariance>();
    handle->value = topostat::estimate_covariance(basis->value, signals->value, method, fit_order);
    handle->flags = handle->value.flags();
    *out = handle.release();
  });
}

ts_status ts_true_covariance(const ts_basis* basis, const char* filter_spec, ts_covariance** out) {
  if (!basis) return null_arg("basis");
  if (!filter_spec) return null_arg("filter_spec");
  if (!out) return null_arg("out");
  return guarded([&] {
    const topostat::FilterSpec filter = topostat::parse_filter_spec(filter_spec);
    const topostat::TrueCovPsd truth = topostat::true_cov_psd(basis->value, filter);
    auto handle = std::make_unique<ts_covariance>();
    handle->value.matrix = truth.covariance;
    handle->value.psd = truth.psd;
    *out = handle.release();
  });
}

ts_status ts_psd_covariance(const ts_basis* basis, const double* psd, int count,
                            ts_covariance** out) {
  if (!basis) return null_arg("basis");
  if (!psd) return null_arg("psd");
  if (!out) return null_arg("out");
  return guarded([&] {
    topostat::Psd spec;
    spec.values = Eigen::Map<const Eigen::VectorXd>(psd, count);
    auto handle = std::make_unique<ts_covariance>();
    handle->value = topostat::psd_to_cov(basis->value, spec);
    *out = handle.release();
  });
}

ts_status ts_covariance_size(const ts_covariance* est, int* out) {
  if (!est) return null_arg("est");
  if (!out) return null_arg("out");
  *out = static_cast<int>(est->value.matrix.rows());
  return TS_OK;
}

ts_status ts_covariance_matrix(const ts_covariance* est, double* out) {
  if (!est) return null_arg("est");
  if (!out) return null_arg("out");
  std::memcpy(out, est->value.matrix.data(), sizeof(double) * est->value.matrix.size());
  return TS_OK;
}

ts_status ts_covariance_has_psd(const ts_covariance* est, int* has_psd) {
  if (!est) return null_arg("est");
  if (!has_psd) return null_arg("has_psd");
  *has_psd = est->value.psd.size() > 0 ? 1 : 0;
  return TS_OK;
}

ts_status ts_covariance_psd(const ts_covariance* est, double* out) {
  if (!est) return null_arg("est");
  if (!out) return null_arg("out");
  return guarded([&] {
    if (est->value.psd.size() == 0)
      topostat::fail(topostat::ErrorCode::InvalidArgument,
                     "InvalidArgument: this estimate defines no PSD");
    std::memcpy(out, est->value.psd.data(), sizeof(double) * est->value.psd.size());
  });
}

ts_status ts_covariance_flags(const ts_covariance* est, const char** out) {
  if (!est) return null_arg("est");
  if (!out) return null_arg("out");
  *out = est->flags.c_str();
  return TS_OK;
}

ts_status ts_covariance_write_psd_csv(const ts_covariance* est, const char* path) {
  if (!est) return null_arg("est");
  if (!path) return null_arg("path");
  return guarded([&] {
    if (est->value.psd.size() == 0)
      topostat::fail(topostat::ErrorCode::InvalidArgument,
                     "InvalidArgument: this estimate defines no PSD");
    topostat::write_indexed_csv(path, est->value.psd);
  });
}

ts_status ts_covariance_write_matrix_csv(const ts_covariance* est, const char* path) {
  if (!est) return null_arg("est");
  if (!path) return null_arg("path");
  return guarded([&] {
    topostat::SignalEnsemble wrapper;
    wrapper.data = est->value.matrix;
    topostat::write_signals_csv(path, wrapper);
  });
}

void ts_covariance_free(ts_covariance* est) { delete est; }

ts_status ts_covariance_rel_error(const ts_covariance* estimate, const ts_covariance* reference,
                                  double* out) {
  if (!estimate) return null_arg("estimate");
  if (!reference) return null_arg("reference");
  if (!out) return null_arg("out");
  return guarded([&] { *out = topostat::rel_error(estimate->value.matrix, reference->value.matrix); });
}

/* ---- recovery ---- */

ts_status ts_wiener_denoise(const ts_basis* basis, const ts_covariance* est,
                            double noise_variance, const ts_ensemble* noisy, ts_ensemble** out) {
  if (!basis) return null_arg("basis");
  if (!est) return null_arg("est");
  if (!noisy) return null_arg("noisy");
  if (!out) return null_arg("out");
  return guarded([&] {
    const topostat::Psd psd = psd_of(basis, est->value);
    *out = new ts_ensemble{
        topostat::wiener_denoise(basis->value, psd, noise_variance, noisy->value)};
  });
}

ts_status ts_interpolate(const ts_basis* basis, const char* prior, const double* psd,
                         const int* observed, int observed_count, double noise_variance,
                         const ts_ensemble* observed_signals, ts_ensemble** out) {
  if (!basis) return null_arg("basis");
  if (!prior) return null_arg("prior");
  if (!observed && observed_count > 0) return null_arg("observed");
  if (!observed_signals) return null_arg("observed_signals");
  if (!out) return null_arg("out");
  return guarded([&] {
    const int n = basis->value.size();
    const topostat::SelectionMask mask =
        topostat::make_mask(n, std::vector<int>(observed, observed + observed_count));
    const Eigen::MatrixXd& data = observed_signals->value.data;
    const std::string name = prior;

    const auto require_psd = [&]() -> Eigen::VectorXd {
      if (!psd)
        topostat::fail(topostat::ErrorCode::InvalidArgument,
                       "InvalidArgument: prior '" + name + "' needs a PSD");
      return Eigen::Map<const Eigen::VectorXd>(psd, n);
    };

    topostat::InterpolationResult result;
    if (name == "map") {
      const Eigen::VectorXd p = require_psd();
      const topostat::CovarianceEstimate cov =
          topostat::psd_to_cov(basis->value, topostat::Psd{p, std::nullopt});
      result = topostat::interpolate_map(cov.matrix, mask, noise_variance, data);
    } else if (name == "smooth") {
      result = topostat::interpolate_regularized(
          topostat::PrecisionSpec{
              topostat::PrecisionSmoothness{topostat::smoothness_quadratic(basis->op)}},
          mask, noise_variance, data);
    } else if (name.rfind("sem:", 0) == 0) {
      const double alpha = std::strtod(name.c_str() + 4, nullptr);
      result = topostat::interpolate_regularized(
          topostat::PrecisionSpec{topostat::PrecisionSem{alpha, basis->op.matrix}}, mask,
          noise_variance, data);
    } else if (name == "zero") {
      result.signals = mask.embed(data);
    } else if (name.rfind("mixed:", 0) == 0) {
      const double gamma = std::strtod(name.c_str() + 6, nullptr);
      topostat::PrecisionMixed mixed;
      mixed.terms.push_back({1.0, topostat::PrecisionSpec{topostat::PrecisionFromPsd{
                                      basis->value.eigenvectors, require_psd()}}});
      mixed.terms.push_back(
          {gamma, topostat::PrecisionSpec{
                      topostat::PrecisionSmoothness{topostat::smoothness_quadratic(basis->op)}}});
      result = topostat::interpolate_regularized(topostat::PrecisionSpec{mixed}, mask, 1.0, data);
    } else {
      topostat::fail(topostat::ErrorCode::InvalidArgument,
                     "InvalidArgument: unknown prior '" + name +
                         "' (map, smooth, sem:<alpha>, zero, mixed:<gamma>)");
    }

    topostat::SignalEnsemble full;
    full.data = std::move(result.signals);
    full.operator_kind = basis->value.operator_kind;
    full.hodge_k = basis->value.hodge_k;
    full.offsets = basis->value.offsets;
    *out = new ts_ensemble{std::move(full)};
  });
}

ts_status ts_random_mask(int size, int observed_count, uint64_t seed, int** indices, int* count) {
  if (!indices) return null_arg("indices");
  if (!count) return null_arg("count");
  return guarded([&] {
    const topostat::SelectionMask mask = topostat::random_mask(size, observed_count, seed);
    int* buffer = static_cast<int*>(std::malloc(sizeof(int) * std::max<std::size_t>(1, mask.observed.size())));
    if (!buffer) throw std::bad_alloc();
    std::memcpy(buffer, mask.observed.data(), sizeof(int) * mask.observed.size());
    *indices = buffer;
    *count = mask.observed_count();
  });
}

/* ---- io helpers ---- */

ts_status ts_read_indexed_csv(const char* path, double** values, int* count) {
  if (!path) return null_arg("path");
  if (!values) return null_arg("values");
  if (!count) return null_arg("count");
  return guarded([&] {
    const Eigen::VectorXd data = topostat::read_indexed_csv(path);
    double* buffer = static_cast<double*>(std::malloc(sizeof(double) * data.size()));
    if (!buffer) throw std::bad_alloc();
    std::memcpy(buffer, data.data(), sizeof(double) * data.size());
    *values = buffer;
    *count = static_cast<int>(data.size());
  });
}

ts_status ts_write_indexed_csv(const char* path, const double* values, int count) {
  if (!path) return null_arg("path");
  if (!values && count > 0) return null_arg("values");
  return guarded([&] {
    topostat::write_indexed_csv(path, Eigen::Map<const Eigen::VectorXd>(values, count));
  });
}

ts_status ts_read_mask(const char* path, int** indices, int* count) {
  if (!path) return null_arg("path");
  if (!indices) return null_arg("indices");
  if (!count) return null_arg("count");
  return guarded([&] {
    const std::vector<int> data = topostat::read_mask_indices(path);
    int* buffer = static_cast<int*>(std::malloc(sizeof(int) * std::max<size_t>(data.size(), 1)));
    if (!buffer) throw std::bad_alloc();
    std::memcpy(buffer, data.data(), sizeof(int) * data.size());
    *indices = buffer;
    *count = static_cast<int>(data.size());
  });
}

ts_status ts_write_mask(const char* path, const int* indices, int count) {
  if (!path) return null_arg("path");
  if (!indices && count > 0) return null_arg("indices");
  return guarded(
      [&] { topostat::write_mask_indices(path, std::vector<int>(indices, indices + count)); });
}

ts_status ts_config_lookup(const char* path, const char* key, char* value, size_t cap,
                           int* found) {
  if (!path) return null_arg("path");
  if (!key) return null_arg("key");
  if (!value || cap == 0) return null_arg("value");
  if (!found) return null_arg("found");
  return guarded([&] {
    const auto config = topostat::read_config(path);
    const auto it = config.find(key);
    if (it == config.end()) {
      *found = 0;
      value[0] = '\0';
      return;
    }
    *found = 1;
    std::snprintf(value, cap, "%s", it->second.c_str());
  });
}

void ts_free_doubles(double* values) { std::free(values); }
void ts_free_ints(int* values) { std::free(values); }

/* ---- experiments ---- */

ts_status ts_experiment_create(const char* kind, const char* scale, ts_experiment** out) {
  if (!kind) return null_arg("kind");
  if (!scale) return null_arg("scale");
  if (!out) return null_arg("out");
  return guarded([&] {
    const topostat::ExperimentKind parsed = topostat::experiment_kind_from_string(kind);
    const std::string which = scale;
    topostat::ExperimentConfig config;
    if (which == "desk") {
      config = topostat::desk_config(parsed);
    } else if (which == "paper") {
      config = topostat::paper_config(parsed);
    } else {
      topostat::fail(topostat::ErrorCode::Config,
                     "ConfigError: scale: expected desk or paper, got '" + which + "'");
    }
    *out = new ts_experiment{std::move(config)};
  });
}

ts_status ts_experiment_set(ts_experiment* config, const char* key, const char* value) {
  if (!config) return null_arg("config");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return guarded([&] { config->value.set(key, value); });
}

ts_status ts_experiment_load_config(ts_experiment* config, const char* path) {
  if (!config) return null_arg("config");
  if (!path) return null_arg("path");
  return guarded([&] {
    for (const auto& [key, value] : topostat::read_config(path)) config->value.set(key, value);
  });
}

ts_status ts_experiment_run(const ts_experiment* config, const char* out_path) {
  if (!config) return null_arg("config");
  if (!out_path) return null_arg("out_path");
  return guarded([&] { topostat::run_experiment(config->value, out_path); });
}

void ts_experiment_free(ts_experiment* config) { delete config; }

}  // extern "C"
