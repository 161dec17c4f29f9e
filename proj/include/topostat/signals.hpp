#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Dense>

#include "topostat/spectral.hpp"

namespace topostat {

// Moving-average style filter H = sum_r h_r T^r with spectral response
// h(lambda) = sum_r h_r lambda^r (coeffs holds h_0..h_{R-1}).
struct PolynomialFilter {
  Eigen::VectorXd coeffs;
};

// Autoregressive filter: s solves (I - sum_r alpha_r T^r) s = w, i.e. the
// response is 1 / (1 - sum_r alpha_r lambda^r); coeffs holds alpha_1..alpha_R.
struct AutoRegressiveFilter {
  Eigen::VectorXd coeffs;
};

enum class SpectralModel {
  LowPassRational,  // h = 1 / (lambda^2 + theta1)
  Exponential,      // h = exp(-theta1 * lambda)
  Sigmoid,          // h = 1 / (1 + exp(-(theta1 * lambda + theta2)))
  GaussianKernel,   // response applied as sqrt of the kernel: p = exp(-theta1 lambda^2)
  LaplacianKernel,  // p = (1 + theta1 * lambda)^(-theta2)
};

const char* to_string(SpectralModel model);
SpectralModel spectral_model_from_string(const std::string& name);

// Closed-form frequency response. Kernel models parameterize the PSD kappa
// directly, so their generator response is sqrt(kappa).
struct SpectralResponseFilter {
  SpectralModel model = SpectralModel::LowPassRational;
  Eigen::VectorXd params;
};

using FilterSpec = std::variant<PolynomialFilter, AutoRegressiveFilter, SpectralResponseFilter>;

// Response g(lambda_i) per eigenvalue. Throws SingularARResponse when an
// autoregressive response hits a zero of 1 - sum alpha_r lambda^r.
Eigen::VectorXd frequency_response(const FilterSpec& filter, const Eigen::VectorXd& lambdas);

// Column-major bundle of M stacked signals plus provenance (which operator
// domain they live on; per-order start rows for the Dirac domain).
struct SignalEnsemble {
  Eigen::MatrixXd data;
  OperatorKind operator_kind = OperatorKind::Hodge;
  int hodge_k = -1;
  std::vector<int> offsets = {0};
  int rows() const { return static_cast<int>(data.rows()); }
  int cols() const { return static_cast<int>(data.cols()); }
};

// n x m standard normal draws; column j is generated from the stream derived
// as (seed, j), so any column prefix is independent of m and of thread count.
SignalEnsemble white_noise(int n, int m, std::uint64_t seed);

// Filters every column in the spectral domain: y = U g(diag(lambda)) U^T x.
SignalEnsemble apply_filter(const SpectralBasis& basis, const FilterSpec& filter,
                            const SignalEnsemble& input);

// Stationary ensemble: filtered unit-variance white noise.
SignalEnsemble generate(const SpectralBasis& basis, const FilterSpec& filter, int m,
                        std::uint64_t seed);

struct TrueCovPsd {
  Eigen::MatrixXd covariance;
  Eigen::VectorXd psd;
};

// Model covariance C = U diag(p) U^T with p_i = g(lambda_i)^2.
TrueCovPsd true_cov_psd(const SpectralBasis& basis, const FilterSpec& filter);

// Ensemble-level transform wrappers.
SignalEnsemble tft(const SpectralBasis& basis, const SignalEnsemble& signals);
SignalEnsemble itft(const SpectralBasis& basis, const SignalEnsemble& coefficients);

}  // namespace topostat
