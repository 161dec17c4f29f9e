#include "topostat/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topostat/common.hpp"
#include "topostat/rng.hpp"

namespace topostat {
namespace {

void check_noise_variance(double noise_variance) {
  if (!(noise_variance > 0.0))
    fail(ErrorCode::InvalidArgument,
         "NonpositiveNoiseVariance: noise variance must be > 0, got " +
             std::to_string(noise_variance));
}

void check_observed_shape(const SelectionMask& mask, const Eigen::MatrixXd& observed) {
  if (observed.rows() != mask.observed_count())
    fail(ErrorCode::Dimension, "DimensionMismatch: mask keeps " +
                                   std::to_string(mask.observed_count()) +
                                   " rows but observations have " +
                                   std::to_string(observed.rows()));
}

InterpolationResult empty_mask_result(int size, int cols) {
  InterpolationResult result;
  result.signals = Eigen::MatrixXd::Zero(size, cols);
  result.flagged = true;
  result.flag = "empty_mask";
  return result;
}

// Shared solver for the regularized normal equations: factors once, detects
// rank loss from the LDLT pivots or the residual, and falls back to a
// least-norm solve.
InterpolationResult solve_regularized(const Eigen::MatrixXd& system, const Eigen::MatrixXd& rhs) {
  InterpolationResult result;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  bool singular = ldlt.info() != Eigen::Success;
  if (!singular) {
    const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
    if (pivots.size() > 0 && pivots.minCoeff() <= 1e-12 * pivots.maxCoeff()) singular = true;
  }
  if (!singular) {
    result.signals = ldlt.solve(rhs);
    const double residual = (system * result.signals - rhs).norm();
    if (!std::isfinite(residual) || residual > 1e-8 * (1.0 + rhs.norm())) singular = true;
  }
  if (singular) {
    result.signals = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(system).solve(rhs);
    result.flagged = true;
    result.flag = "singular_system";
  }
  return result;
}

}  // namespace

Eigen::MatrixXd SelectionMask::dense() const {
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(observed_count(), size);
  for (int r = 0; r < observed_count(); ++r) theta(r, observed[r]) = 1.0;
  return theta;
}

Eigen::MatrixXd SelectionMask::select(const Eigen::MatrixXd& full) const {
  if (full.rows() != size)
    fail(ErrorCode::Dimension, "DimensionMismatch: mask is over " + std::to_string(size) +
                                   " rows, signal has " + std::to_string(full.rows()));
  Eigen::MatrixXd picked(observed_count(), full.cols());
  for (int r = 0; r < observed_count(); ++r) picked.row(r) = full.row(observed[r]);
  return picked;
}

Eigen::MatrixXd SelectionMask::embed(const Eigen::MatrixXd& observed_rows) const {
  if (observed_rows.rows() != observed_count())
    fail(ErrorCode::Dimension, "DimensionMismatch: mask keeps " +
                                   std::to_string(observed_count()) + " rows, got " +
                                   std::to_string(observed_rows.rows()));
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(size, observed_rows.cols());
  for (int r = 0; r < observed_count(); ++r) full.row(observed[r]) = observed_rows.row(r);
  return full;
}

SelectionMask make_mask(int size, std::vector<int> observed) {
  if (size < 0) fail(ErrorCode::InvalidArgument, "InvalidMask: negative signal length");
  int previous = -1;
  for (int idx : observed) {
    if (idx < 0 || idx >= size)
      fail(ErrorCode::InvalidArgument,
           "InvalidMask: index " + std::to_string(idx) + " outside [0, " + std::to_string(size) +
               ")");
    if (idx <= previous)
      fail(ErrorCode::InvalidArgument,
           "InvalidMask: indices must be strictly ascending near " + std::to_string(idx));
    previous = idx;
  }
  SelectionMask mask;
  mask.size = size;
  mask.observed = std::move(observed);
  return mask;
}

SelectionMask random_mask(int size, int observed_count, std::uint64_t seed) {
  if (observed_count < 0 || observed_count > size)
    fail(ErrorCode::InvalidArgument, "InvalidMask: cannot keep " +
                                         std::to_string(observed_count) + " of " +
                                         std::to_string(size) + " rows");
  std::vector<int> pool(size);
  std::iota(pool.begin(), pool.end(), 0);
  SplitMix64 rng(seed);
  for (int i = 0; i < observed_count; ++i) {
    const int j = i + static_cast<int>(rng.next() % static_cast<std::uint64_t>(size - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> kept(pool.begin(), pool.begin() + observed_count);
  std::sort(kept.begin(), kept.end());
  SelectionMask mask;
  mask.size = size;
  mask.observed = std::move(kept);
  return mask;
}

SignalEnsemble wiener_denoise(const SpectralBasis& basis, const Psd& psd, double noise_variance,
                              const SignalEnsemble& noisy, WienerPath path) {
  check_noise_variance(noise_variance);
  if (psd.values.size() != basis.size() || noisy.rows() != basis.size())
    fail(ErrorCode::Dimension, "DimensionMismatch: psd, basis and signals must share one size");
  if (psd.values.size() > 0 && psd.values.minCoeff() < 0.0)
    fail(ErrorCode::InvalidArgument, "NonpositivePsd: wiener weights need psd >= 0");

  SignalEnsemble out = noisy;
  if (path == WienerPath::Spectral) {
    const Eigen::VectorXd gain =
        psd.values.array() / (psd.values.array() + noise_variance);
    out.data = basis.eigenvectors *
               (gain.asDiagonal() * (basis.eigenvectors.transpose() * noisy.data));
  } else {
    const Eigen::MatrixXd cov =
        basis.eigenvectors * psd.values.asDiagonal() * basis.eigenvectors.transpose();
    Eigen::MatrixXd regularized = cov;
    regularized.diagonal().array() += noise_variance;
    out.data = cov * Eigen::LDLT<Eigen::MatrixXd>(regularized).solve(noisy.data);
  }
  return out;
}

InterpolationResult interpolate_map(const Eigen::MatrixXd& covariance, const SelectionMask& mask,
                                    double noise_variance, const Eigen::MatrixXd& observed) {
  check_noise_variance(noise_variance);
  if (covariance.rows() != mask.size || covariance.cols() != mask.size)
    fail(ErrorCode::Dimension, "DimensionMismatch: covariance is " +
                                   std::to_string(covariance.rows()) + "x" +
                                   std::to_string(covariance.cols()) + ", mask is over " +
                                   std::to_string(mask.size) + " rows");
  check_observed_shape(mask, observed);
  const int kept = mask.observed_count();
  if (kept == 0) return empty_mask_result(mask.size, static_cast<int>(observed.cols()));

  Eigen::MatrixXd cross(mask.size, kept);  // C Theta^T
  for (int c = 0; c < kept; ++c) cross.col(c) = covariance.col(mask.observed[c]);
  Eigen::MatrixXd gram = mask.select(cross);  // Theta C Theta^T
  const double trace = gram.trace();
  gram.diagonal().array() += noise_variance;

  Eigen::MatrixXd weights = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(observed);
  double residual = (gram * weights - observed).norm();
  if (!std::isfinite(residual) || residual > 1e-8 * (1.0 + observed.norm())) {
    gram.diagonal().array() += 1e-10 * trace / kept;
    weights = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(observed);
  }

  InterpolationResult result;
  result.signals = cross * weights;
  return result;
}

Eigen::MatrixXd materialize_precision(const PrecisionSpec& spec) {
  struct Visitor {
    Eigen::MatrixXd operator()(const PrecisionFromCovariance& from) const {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(from.covariance);
      if (solver.info() != Eigen::Success)
        fail(ErrorCode::Numeric, "ConvergenceFailure: covariance eigendecomposition failed");
      return inverse_from(solver.eigenvectors(), solver.eigenvalues(), from.ridge);
    }
    Eigen::MatrixXd operator()(const PrecisionFromPsd& from) const {
      if (from.eigenvectors.cols() != from.psd.size())
        fail(ErrorCode::Dimension, "DimensionMismatch: psd does not match eigenvector count");
      return inverse_from(from.eigenvectors, from.psd, from.ridge);
    }
    Eigen::MatrixXd operator()(const PrecisionSmoothness& smooth) const {
      if (smooth.quadratic.rows() != smooth.quadratic.cols())
        fail(ErrorCode::Dimension, "DimensionMismatch: smoothness quadratic must be square");
      return smooth.quadratic;
    }
    Eigen::MatrixXd operator()(const PrecisionSem& sem) const {
      if (sem.op.rows() != sem.op.cols())
        fail(ErrorCode::Dimension, "DimensionMismatch: SEM operator must be square");
      const Eigen::MatrixXd shifted =
          Eigen::MatrixXd::Identity(sem.op.rows(), sem.op.cols()) - sem.alpha * sem.op;
      return shifted.transpose() * shifted;
    }
    Eigen::MatrixXd operator()(const PrecisionMixed& mixed) const {
      if (mixed.terms.empty())
        fail(ErrorCode::InvalidArgument,
             "EmptyMixedPrecision: a mixed prior needs at least one term");
      Eigen::MatrixXd total;
      for (const auto& term : mixed.terms) {
        if (term.weight < 0.0)
          fail(ErrorCode::InvalidArgument,
               "NegativeWeight: mixed prior weights must be >= 0, got " +
                   std::to_string(term.weight));
        const Eigen::MatrixXd q = materialize_precision(term.spec);
        if (total.size() == 0)
          total = term.weight * q;
        else if (total.rows() != q.rows())
          fail(ErrorCode::Dimension, "DimensionMismatch: mixed prior terms differ in size");
        else
          total += term.weight * q;
      }
      return total;
    }

    static Eigen::MatrixXd inverse_from(const Eigen::MatrixXd& vectors,
                                        const Eigen::VectorXd& variances, double ridge) {
      const double top = variances.size() > 0 ? variances.maxCoeff() : 0.0;
      if (ridge <= 0.0 && top <= 0.0)
        fail(ErrorCode::Numeric,
             "DegenerateCovariance: nothing to invert (all variances <= 0)");
      const double floor = ridge > 0.0 ? ridge : 1e-6 * top;
      const Eigen::VectorXd inverted = variances.cwiseMax(floor).cwiseInverse();
      Eigen::MatrixXd q = vectors * inverted.asDiagonal() * vectors.transpose();
      return 0.5 * (q + q.transpose());
    }
  };
  return std::visit(Visitor{}, spec.spec);
}

Eigen::MatrixXd smoothness_quadratic(const TopologicalOperator& op) {
  if (op.kind == OperatorKind::Hodge) return op.matrix;
  return op.matrix * op.matrix;
}

Eigen::MatrixXd smoothness_quadratic(const SpectralBasis& basis) {
  const Eigen::VectorXd weights = basis.operator_kind == OperatorKind::Hodge
                                      ? basis.eigenvalues
                                      : basis.eigenvalues.cwiseAbs2();
  Eigen::MatrixXd q = basis.eigenvectors * weights.asDiagonal() * basis.eigenvectors.transpose();
  return 0.5 * (q + q.transpose());
}

InterpolationResult interpolate_regularized(const PrecisionSpec& prior, const SelectionMask& mask,
                                            double noise_variance,
                                            const Eigen::MatrixXd& observed) {
  check_noise_variance(noise_variance);
  const Eigen::MatrixXd precision = materialize_precision(prior);
  if (precision.rows() != mask.size)
    fail(ErrorCode::Dimension, "DimensionMismatch: precision is " +
                                   std::to_string(precision.rows()) + "x" +
                                   std::to_string(precision.cols()) + ", mask is over " +
                                   std::to_string(mask.size) + " rows");
  check_observed_shape(mask, observed);

  Eigen::MatrixXd system = noise_variance * precision;
  for (int idx : mask.observed) system(idx, idx) += 1.0;
  return solve_regularized(system, mask.embed(observed));
}

InterpolationResult interpolate_subspace(const Eigen::MatrixXd& subspace_basis,
                                         const Eigen::VectorXd& subspace_psd,
                                         const SelectionMask& mask, double noise_variance,
                                         const Eigen::MatrixXd& observed) {
  check_noise_variance(noise_variance);
  const int dim = static_cast<int>(subspace_basis.cols());
  if (subspace_basis.rows() != mask.size)
    fail(ErrorCode::Dimension, "DimensionMismatch: subspace basis has " +
                                   std::to_string(subspace_basis.rows()) +
                                   " rows, mask is over " + std::to_string(mask.size));
  if (subspace_psd.size() != dim)
    fail(ErrorCode::Dimension, "DimensionMismatch: subspace psd does not match column count");
  if (dim > 0) {
    const Eigen::MatrixXd gram = subspace_basis.transpose() * subspace_basis;
    if ((gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-8)
      fail(ErrorCode::InvalidArgument,
           "NonOrthonormalSubspace: columns are not orthonormal within 1e-8");
  }
  if (dim > 0 && subspace_psd.minCoeff() <= 0.0)
    fail(ErrorCode::InvalidArgument,
         "NonpositivePsd: subspace interpolation needs strictly positive prior variances");
  check_observed_shape(mask, observed);
  if (mask.observed_count() == 0)
    return empty_mask_result(mask.size, static_cast<int>(observed.cols()));

  const Eigen::MatrixXd selected = mask.select(subspace_basis);  // Theta U_S
  Eigen::MatrixXd system = selected.transpose() * selected;
  system += (noise_variance * subspace_psd.cwiseInverse()).asDiagonal();
  const Eigen::MatrixXd rhs = selected.transpose() * observed;

  InterpolationResult result;
  result.signals = subspace_basis * Eigen::LDLT<Eigen::MatrixXd>(system).solve(rhs);
  return result;
}

}  // namespace topostat
