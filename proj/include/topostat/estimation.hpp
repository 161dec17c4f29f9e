#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topostat/signals.hpp"

namespace topostat {

// Power spectral density over a spectral basis. values has one entry per
// basis column; when the estimate was restricted to a subspace, support
// lists the indices that were actually estimated (values are zero elsewhere).
struct Psd {
  Eigen::VectorXd values;
  std::optional<std::vector<int>> support;
};

enum class CovMethod {
  Sample,
  Correlogram,
  Periodogram,
  MaSpatial,
  MaSpectral,
  ArSpatial,
  ArSpectral,
  Wirtinger,
  Kernel,
  Ar1Mle,
};

const char* to_string(CovMethod method);

// A covariance estimate plus provenance. Parametric fits carry their
// coefficients twice: params is the plain-eigenvalue parameterization,
// params_normalized the internally fitted one over lambda / lambda_scale
// (reconstructions always use the normalized powers). Degeneracies are
// flagged, never silently repaired: fitted PSDs are not clipped.
struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  CovMethod method = CovMethod::Sample;
  Eigen::VectorXd params;
  Eigen::VectorXd params_normalized;
  double lambda_scale = 1.0;
  Eigen::VectorXd psd;  // empty when the method defines no PSD (Sample)
  bool rank_deficient = false;
  bool negative_psd = false;
  bool singular_reconstruction = false;
  bool converged = true;
  std::string flags() const;  // comma-joined flag names, empty when clean
};

// (1/M) S S^T.
CovarianceEstimate sample_covariance(const SignalEnsemble& signals);

// p_i = (1/M) sum_m (U^T s_m)_i^2.
Psd periodogram(const SpectralBasis& basis, const SignalEnsemble& signals);

// diag(U^T C U), with negative entries floored at zero.
Psd correlogram(const SpectralBasis& basis, const Eigen::MatrixXd& cov);

// U diag(p) U^T tagged with the method that produced p.
CovarianceEstimate psd_to_cov(const SpectralBasis& basis, const Psd& psd,
                              CovMethod method = CovMethod::Periodogram);

// Periodogram restricted to the basis columns in support; zeros elsewhere.
Psd periodogram_subspace(const SpectralBasis& basis, const std::vector<int>& support,
                         const SignalEnsemble& signals);

// Least-squares fit of a degree-2(R-1) PSD polynomial p ~ sum_r gamma_r
// lambda^r (the self-convolution form of an order-R moving average). The
// spatial variant fits the full Frobenius covariance objective, which
// reduces to the same least squares with diag(U^T C U) as target.
struct PolyFit {
  Eigen::VectorXd coeffs;             // plain parameterization
  Eigen::VectorXd coeffs_normalized;  // over lambda / lambda_scale
  double lambda_scale = 1.0;
  CovarianceEstimate estimate;
};

PolyFit fit_ma_gamma_spatial(const SpectralBasis& basis, const Eigen::MatrixXd& sample_cov,
                             int order);
PolyFit fit_ma_gamma_spectral(const SpectralBasis& basis, const Eigen::VectorXd& psd_hat,
                              int order);

// Autoregressive precision polynomial eta (2R coefficients, powers 1..2R of
// the operator), from min || C (I - sum eta_r T^r) - I ||_F (spatial) or
// min || p ∘ (1 - Psi eta) - 1 ||_2 (spectral). The two objectives weight
// frequencies differently and generally disagree on noisy input.
PolyFit fit_ar_eta_spatial(const SpectralBasis& basis, const Eigen::MatrixXd& sample_cov,
                           int order);
PolyFit fit_ar_eta_spectral(const SpectralBasis& basis, const Eigen::VectorXd& psd_hat,
                            int order);

struct WirtingerOptions {
  int max_iter = 500;
  double step = 1.0;        // initial backtracking step
  double tol = 1e-10;       // gradient norm stopping threshold
};

// Direct fit of MA coefficients beta from min || p_hat - (Psi beta)^2 ||^2
// by gradient descent with backtracking, initialized from the spectral MA
// fit (envelope sqrt projected back onto the beta polynomial). beta is
// identifiable only up to a global sign.
struct WirtingerFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd beta_normalized;
  double lambda_scale = 1.0;
  bool converged = false;
  double residual = 0.0;
  std::vector<double> loss_history;
  CovarianceEstimate estimate;
};

WirtingerFit fit_ma_beta_wirtinger(const SpectralBasis& basis, const Eigen::VectorXd& psd_hat,
                                   int order, const WirtingerOptions& options = {});

// Nonlinear PSD models fitted by coarse grid search plus local simplex
// refinement. Exponential/Sigmoid fit the squared response; the kernel
// models fit the PSD profile directly.
struct SpectralFitResult {
  SpectralModel model = SpectralModel::Exponential;
  Eigen::VectorXd theta;
  double residual = 0.0;
  CovarianceEstimate estimate;
};

SpectralFitResult fit_spectral_params(const SpectralBasis& basis,
                                      const Eigen::VectorXd& psd_hat, SpectralModel model);

// Exact Gaussian ML estimate for the one-parameter autoregressive model:
// minimizes -2 sum_i log|1 - a l_i| + tr(C U diag((1 - a l)^2) U^T) over
// a in [0, (1 - 1e-6) / lambda_max).
struct Ar1MleResult {
  double alpha = 0.0;
  CovarianceEstimate estimate;
};

Ar1MleResult fit_ar1_gaussian_mle(const SpectralBasis& basis, const Eigen::MatrixXd& sample_cov);

// Squared relative Frobenius error ||est - ref||^2 / ||ref||^2.
double rel_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& reference);

// Method dispatcher used by the experiment engine and the C interface.
// Accepted names: sample, correlogram, periodogram, ma-spatial, ma-spectral,
// ar-spatial, ar-spectral, wirtinger, ar1-mle, kernel:<gaussian|laplacian|
// exponential|sigmoid>.
CovarianceEstimate estimate_covariance(const SpectralBasis& basis, const SignalEnsemble& signals,
                                       const std::string& method, int fit_order);

}  // namespace topostat
