#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "topostat/estimation.hpp"

namespace topostat {

// Row-selection operator: keeps the listed rows of a full-length signal.
struct SelectionMask {
  int size = 0;                // full signal length N
  std::vector<int> observed;   // strictly ascending, unique, in [0, size)
  int observed_count() const { return static_cast<int>(observed.size()); }
  Eigen::MatrixXd dense() const;                                  // P x N 0/1 matrix
  Eigen::MatrixXd select(const Eigen::MatrixXd& full) const;      // P x M from N x M
  Eigen::MatrixXd embed(const Eigen::MatrixXd& observed_rows) const;  // N x M zero-fill
};

SelectionMask make_mask(int size, std::vector<int> observed);
// Uniformly random mask keeping exactly observed_count rows.
SelectionMask random_mask(int size, int observed_count, std::uint64_t seed);

enum class WienerPath { Spectral, Spatial };

// MMSE denoiser for y = s + v: spectral path applies g_i = p_i/(p_i + sigma^2)
// per frequency, spatial path solves C (C + sigma^2 I)^{-1} y. The two agree.
SignalEnsemble wiener_denoise(const SpectralBasis& basis, const Psd& psd, double noise_variance,
                              const SignalEnsemble& noisy, WienerPath path = WienerPath::Spectral);

struct InterpolationResult {
  Eigen::MatrixXd signals;  // full-length estimate, one column per observed column
  bool flagged = false;
  std::string flag;  // "empty_mask" or "singular_system" when flagged
};

// Observation-space MMSE interpolator s_hat = C Theta^T (Theta C Theta^T +
// sigma^2 I)^{-1} s_bar; defined for singular C. An empty mask yields the
// prior mean (zero) with a flag rather than an error.
InterpolationResult interpolate_map(const Eigen::MatrixXd& covariance, const SelectionMask& mask,
                                    double noise_variance, const Eigen::MatrixXd& observed);

// Priors for the regularized interpolator, materialized as a precision Q.
struct PrecisionSpec;
struct WeightedPrecision;

// Q = V diag(1 / max(p_i, ridge)) V^T from the covariance eigendecomposition;
// ridge = 0 selects the default 1e-6 * max(p), so rank-deficient covariance
// estimates stay invertible.
struct PrecisionFromCovariance {
  Eigen::MatrixXd covariance;
  double ridge = 0.0;
};
struct PrecisionFromPsd {
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd psd;
  double ridge = 0.0;
};
// Q is the quadratic form itself: a Hodge Laplacian, a squared Dirac, ...
struct PrecisionSmoothness {
  Eigen::MatrixXd quadratic;
};
// Structural-equation prior Q = (I - alpha T)^T (I - alpha T).
struct PrecisionSem {
  double alpha = 0.0;
  Eigen::MatrixXd op;
};
// Nonnegative combination sum_j w_j Q_j.
struct PrecisionMixed {
  std::vector<WeightedPrecision> terms;
};

struct PrecisionSpec {
  std::variant<PrecisionFromCovariance, PrecisionFromPsd, PrecisionSmoothness, PrecisionSem,
               PrecisionMixed>
      spec;
};

struct WeightedPrecision {
  double weight = 1.0;
  PrecisionSpec spec;
};

Eigen::MatrixXd materialize_precision(const PrecisionSpec& spec);

// s^T Q s smoothness quadratic: the operator itself for a Hodge Laplacian,
// its square for the Dirac operator (whose quadratic form is indefinite).
Eigen::MatrixXd smoothness_quadratic(const TopologicalOperator& op);
Eigen::MatrixXd smoothness_quadratic(const SpectralBasis& basis);

// Solves (Theta^T Theta + sigma^2 Q) s_hat = Theta^T s_bar with one
// factorization shared by all columns. A singular system is solved in the
// least-norm sense and flagged instead of failing.
InterpolationResult interpolate_regularized(const PrecisionSpec& prior, const SelectionMask& mask,
                                            double noise_variance,
                                            const Eigen::MatrixXd& observed);

// Interpolation restricted to span of the given orthonormal columns, with
// per-column prior variances subspace_psd (> 0).
InterpolationResult interpolate_subspace(const Eigen::MatrixXd& subspace_basis,
                                         const Eigen::VectorXd& subspace_psd,
                                         const SelectionMask& mask, double noise_variance,
                                         const Eigen::MatrixXd& observed);

}  // namespace topostat
