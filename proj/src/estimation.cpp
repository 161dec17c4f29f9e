#include "topostat/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "topostat/common.hpp"

namespace topostat {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lambda_scale_of(const Eigen::VectorXd& lambdas) {
  if (lambdas.size() == 0) return 1.0;
  const double s = lambdas.cwiseAbs().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

// Columns are mu^first_power .. mu^last_power.
Eigen::MatrixXd vander(const Eigen::VectorXd& mu, int first_power, int last_power) {
  const int n = static_cast<int>(mu.size());
  const int cols = last_power - first_power + 1;
  Eigen::MatrixXd v(n, cols);
  for (int i = 0; i < n; ++i) {
    double base = first_power == 0 ? 1.0 : std::pow(mu[i], first_power);
    for (int c = 0; c < cols; ++c) {
      v(i, c) = base;
      base *= mu[i];
    }
  }
  return v;
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                    bool* rank_deficient) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  if (rank_deficient) *rank_deficient = cod.rank() < design.cols();
  return cod.solve(target);
}

// Coefficient of mu^(first_power + r) becomes coefficient of lambda^(first_power + r).
Eigen::VectorXd denormalize(const Eigen::VectorXd& coeffs, int first_power, double scale) {
  Eigen::VectorXd raw(coeffs.size());
  double denom = std::pow(scale, first_power);
  for (int r = 0; r < coeffs.size(); ++r) {
    raw[r] = coeffs[r] / denom;
    denom *= scale;
  }
  return raw;
}

Eigen::VectorXd diag_in_basis(const SpectralBasis& basis, const Eigen::MatrixXd& cov) {
  if (cov.rows() != basis.size() || cov.cols() != basis.size())
    fail(ErrorCode::Dimension, "DimensionMismatch: covariance is " + std::to_string(cov.rows()) +
                                   "x" + std::to_string(cov.cols()) + ", basis has " +
                                   std::to_string(basis.size()) + " columns");
  const Eigen::MatrixXd right = cov * basis.eigenvectors;
  Eigen::VectorXd d(basis.size());
  for (int i = 0; i < basis.size(); ++i) d[i] = basis.eigenvectors.col(i).dot(right.col(i));
  return d;
}

CovarianceEstimate from_psd_vector(const SpectralBasis& basis, const Eigen::VectorXd& psd,
                                   CovMethod method) {
  CovarianceEstimate est;
  est.method = method;
  est.psd = psd;
  est.negative_psd = psd.size() > 0 && psd.minCoeff() < 0.0;
  Eigen::MatrixXd m = basis.eigenvectors * psd.asDiagonal() * basis.eigenvectors.transpose();
  est.matrix = 0.5 * (m + m.transpose());
  return est;
}

void check_psd_input(const SpectralBasis& basis, const Eigen::VectorXd& psd_hat) {
  if (psd_hat.size() != basis.size())
    fail(ErrorCode::Dimension, "DimensionMismatch: psd has " + std::to_string(psd_hat.size()) +
                                   " entries, basis has " + std::to_string(basis.size()));
}

void check_order(int order) {
  if (order < 1) fail(ErrorCode::InvalidArgument, "InvalidOrder: filter order must be >= 1");
}

PolyFit finish_ma_fit(const SpectralBasis& basis, const Eigen::VectorXd& target, int order,
                      CovMethod method) {
  const double scale = lambda_scale_of(basis.eigenvalues);
  const Eigen::MatrixXd psi = vander(basis.eigenvalues / scale, 0, 2 * (order - 1));
  PolyFit fit;
  fit.lambda_scale = scale;
  bool rank_deficient = false;
  fit.coeffs_normalized = solve_least_squares(psi, target, &rank_deficient);
  fit.coeffs = denormalize(fit.coeffs_normalized, 0, scale);
  fit.estimate = from_psd_vector(basis, psi * fit.coeffs_normalized, method);
  fit.estimate.rank_deficient = rank_deficient;
  fit.estimate.params = fit.coeffs;
  fit.estimate.params_normalized = fit.coeffs_normalized;
  fit.estimate.lambda_scale = scale;
  return fit;
}

PolyFit finish_ar_fit(const SpectralBasis& basis, const Eigen::MatrixXd& powers,
                      const Eigen::VectorXd& eta_normalized, double scale, bool rank_deficient,
                      CovMethod method) {
  PolyFit fit;
  fit.lambda_scale = scale;
  fit.coeffs_normalized = eta_normalized;
  fit.coeffs = denormalize(eta_normalized, 1, scale);

  const Eigen::VectorXd response =
      Eigen::VectorXd::Ones(basis.size()) - powers * eta_normalized;
  CovarianceEstimate est;
  est.method = method;
  est.params = fit.coeffs;
  est.params_normalized = eta_normalized;
  est.lambda_scale = scale;
  est.rank_deficient = rank_deficient;
  if (basis.size() > 0 && response.cwiseAbs().minCoeff() <= 1e-12) {
    // Fitted precision polynomial vanishes at some frequency; the implied
    // covariance does not exist. Coefficients are still reported.
    est.singular_reconstruction = true;
  } else {
    est.psd = response.cwiseInverse();
    est.negative_psd = est.psd.size() > 0 && est.psd.minCoeff() < 0.0;
    Eigen::MatrixXd m =
        basis.eigenvectors * est.psd.asDiagonal() * basis.eigenvectors.transpose();
    est.matrix = 0.5 * (m + m.transpose());
  }
  fit.estimate = std::move(est);
  return fit;
}

// Deterministic Nelder-Mead over a box-constrained objective (which returns
// +inf outside its domain). Two passes with a shrinking initial simplex help
// along curved valleys.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                            Eigen::VectorXd start, Eigen::VectorXd step, int max_iter) {
  const int n = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> xs(n + 1, start);
  std::vector<double> fs(n + 1);
  for (int i = 0; i < n; ++i) xs[i + 1][i] += step[i];
  for (int i = 0; i <= n; ++i) fs[i] = objective(xs[i]);

  auto order_simplex = [&] {
    std::vector<int> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> xs2(n + 1);
    std::vector<double> fs2(n + 1);
    for (int i = 0; i <= n; ++i) {
      xs2[i] = xs[idx[i]];
      fs2[i] = fs[idx[i]];
    }
    xs = std::move(xs2);
    fs = std::move(fs2);
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    order_simplex();
    if (std::isfinite(fs[n]) && fs[n] - fs[0] <= 1e-15 * (1.0 + std::abs(fs[0]))) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[i];
    centroid /= n;

    const Eigen::VectorXd reflected = centroid + (centroid - xs[n]);
    const double f_reflected = objective(reflected);
    if (f_reflected < fs[0]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[n]);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        xs[n] = expanded;
        fs[n] = f_expanded;
      } else {
        xs[n] = reflected;
        fs[n] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fs[n - 1]) {
      xs[n] = reflected;
      fs[n] = f_reflected;
      continue;
    }
    const double direction = f_reflected < fs[n] ? 0.5 : -0.5;
    const Eigen::VectorXd contracted = centroid + direction * (centroid - xs[n]);
    const double f_contracted = objective(contracted);
    if (f_contracted < std::min(f_reflected, fs[n])) {
      xs[n] = contracted;
      fs[n] = f_contracted;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
      fs[i] = objective(xs[i]);
    }
  }
  order_simplex();
  return xs[0];
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  constexpr double kRatio = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kRatio * (b - a);
  double x2 = a + kRatio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int iter = 0; iter < 300 && b - a > tol; ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kRatio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kRatio * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

const char* to_string(CovMethod method) {
  switch (method) {
    case CovMethod::Sample: return "sample";
    case CovMethod::Correlogram: return "correlogram";
    case CovMethod::Periodogram: return "periodogram";
    case CovMethod::MaSpatial: return "ma-spatial";
    case CovMethod::MaSpectral: return "ma-spectral";
    case CovMethod::ArSpatial: return "ar-spatial";
    case CovMethod::ArSpectral: return "ar-spectral";
    case CovMethod::Wirtinger: return "wirtinger";
    case CovMethod::Kernel: return "kernel";
    case CovMethod::Ar1Mle: return "ar1-mle";
  }
  return "unknown";
}

std::string CovarianceEstimate::flags() const {
  std::string out;
  auto add = [&out](const char* name) {
    if (!out.empty()) out += ',';
    out += name;
  };
  if (rank_deficient) add("rank_deficient");
  if (negative_psd) add("negative_psd");
  if (singular_reconstruction) add("singular_reconstruction");
  if (!converged) add("not_converged");
  return out;
}

CovarianceEstimate sample_covariance(const SignalEnsemble& signals) {
  if (signals.cols() < 1)
    fail(ErrorCode::InvalidArgument, "EmptyEnsemble: sample covariance needs at least one signal");
  const int n = signals.rows();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(signals.data, 1.0 / signals.cols());
  CovarianceEstimate est;
  est.method = CovMethod::Sample;
  est.matrix = cov.selfadjointView<Eigen::Lower>();
  return est;
}

Psd periodogram(const SpectralBasis& basis, const SignalEnsemble& signals) {
  if (signals.rows() != basis.size())
    fail(ErrorCode::Dimension, "DimensionMismatch: signals have " +
                                   std::to_string(signals.rows()) + " rows, basis has " +
                                   std::to_string(basis.size()));
  if (signals.cols() < 1)
    fail(ErrorCode::InvalidArgument, "EmptyEnsemble: periodogram needs at least one signal");
  const Eigen::MatrixXd coeffs = basis.eigenvectors.transpose() * signals.data;
  Psd psd;
  psd.values = coeffs.array().square().rowwise().mean();
  return psd;
}

Psd correlogram(const SpectralBasis& basis, const Eigen::MatrixXd& cov) {
  Psd psd;
  psd.values = diag_in_basis(basis, cov).cwiseMax(0.0);
  return psd;
}

CovarianceEstimate psd_to_cov(const SpectralBasis& basis, const Psd& psd, CovMethod method) {
  check_psd_input(basis, psd.values);
  return from_psd_vector(basis, psd.values, method);
}

Psd periodogram_subspace(const SpectralBasis& basis, const std::vector<int>& support,
                         const SignalEnsemble& signals) {
  if (support.empty())
    fail(ErrorCode::InvalidArgument, "NonOrthonormalSubspace: empty index set");
  std::set<int> seen;
  for (int idx : support) {
    if (idx < 0 || idx >= basis.size())
      fail(ErrorCode::InvalidArgument,
           "NonOrthonormalSubspace: index " + std::to_string(idx) + " outside basis of size " +
               std::to_string(basis.size()));
    if (!seen.insert(idx).second)
      fail(ErrorCode::InvalidArgument,
           "NonOrthonormalSubspace: repeated index " + std::to_string(idx));
  }
  const auto full = periodogram(basis, signals);
  Psd psd;
  psd.values = Eigen::VectorXd::Zero(basis.size());
  for (int idx : seen) psd.values[idx] = full.values[idx];
  psd.support = std::vector<int>(seen.begin(), seen.end());
  return psd;
}

PolyFit fit_ma_gamma_spatial(const SpectralBasis& basis, const Eigen::MatrixXd& sample_cov,
                             int order) {
  check_order(order);
  // The off-diagonal part of U^T C U does not depend on gamma, so the
  // Frobenius objective reduces to least squares on the diagonal.
  return finish_ma_fit(basis, diag_in_basis(basis, sample_cov), order, CovMethod::MaSpatial);
}

PolyFit fit_ma_gamma_spectral(const SpectralBasis& basis, const Eigen::VectorXd& psd_hat,
                              int order) {
  check_order(order);
  check_psd_input(basis, psd_hat);
  return finish_ma_fit(basis, psd_hat, order, CovMethod::MaSpectral);
}

PolyFit fit_ar_eta_spatial(const SpectralBasis& basis, const Eigen::MatrixXd& sample_cov,
                           int order) {
  check_order(order);
  const double scale = lambda_scale_of(basis.eigenvalues);
  const Eigen::MatrixXd powers = vander(basis.eigenvalues / scale, 1, 2 * order);

  // Normal equations of min || C (I - sum_r eta_r T^r) - I ||_F in the
  // eigenbasis: with A = U^T C U, the design inner products collapse to
  // column norms of A against eigenvalue powers.
  const Eigen::MatrixXd a = basis.eigenvectors.transpose() * sample_cov * basis.eigenvectors;
  if (a.rows() != basis.size())
    fail(ErrorCode::Dimension, "DimensionMismatch: covariance does not match basis");
  const Eigen::VectorXd col_norms = a.colwise().squaredNorm();
  const Eigen::MatrixXd gram = powers.transpose() * col_norms.asDiagonal() * powers;
  const Eigen::VectorXd rhs = powers.transpose() * (col_norms - a.diagonal());

  bool rank_deficient = false;
  const Eigen::VectorXd eta = solve_least_squares(gram, rhs, &rank_deficient);
  return finish_ar_fit(basis, powers, eta, scale, rank_deficient, CovMethod::ArSpatial);
}

PolyFit fit_ar_eta_spectral(const SpectralBasis& basis, const Eigen::VectorXd& psd_hat,
                            int order) {
  check_order(order);
  check_psd_input(basis, psd_hat);
  const double scale = lambda_scale_of(basis.eigenvalues);
  const Eigen::MatrixXd powers = vander(basis.eigenvalues / scale, 1, 2 * order);
  const Eigen::MatrixXd design = psd_hat.asDiagonal() * powers;
  const Eigen::VectorXd target = psd_hat.array() - 1.0;
  bool rank_deficient = false;
  const Eigen::VectorXd eta = solve_least_squares(design, target, &rank_deficient);
  return finish_ar_fit(basis, powers, eta, scale, rank_deficient, CovMethod::ArSpectral);
}

WirtingerFit fit_ma_beta_wirtinger(const SpectralBasis& basis, const Eigen::VectorXd& psd_hat,
                                   int order, const WirtingerOptions& options) {
  check_order(order);
  check_psd_input(basis, psd_hat);
  const double scale = lambda_scale_of(basis.eigenvalues);
  const Eigen::MatrixXd psi = vander(basis.eigenvalues / scale, 0, order - 1);

  // Initialize from the convex gamma fit: project the square-rooted psd
  // envelope back onto the response polynomial.
  const PolyFit ma = fit_ma_gamma_spectral(basis, psd_hat, order);
  const Eigen::VectorXd envelope =
      (vander(basis.eigenvalues / scale, 0, 2 * (order - 1)) * ma.coeffs_normalized)
          .cwiseMax(0.0)
          .cwiseSqrt();
  Eigen::VectorXd beta = solve_least_squares(psi, envelope, nullptr);

  auto loss_of = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd response = psi * b;
    return (psd_hat - response.cwiseProduct(response)).squaredNorm();
  };

  WirtingerFit fit;
  fit.lambda_scale = scale;
  double loss = loss_of(beta);
  fit.loss_history.push_back(loss);
  double step = options.step;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const Eigen::VectorXd response = psi * beta;
    const Eigen::VectorXd mismatch = response.cwiseProduct(response) - psd_hat;
    const Eigen::VectorXd grad = 4.0 * (psi.transpose() * mismatch.cwiseProduct(response));
    const double grad_sq = grad.squaredNorm();
    if (std::sqrt(grad_sq) <= options.tol) {
      fit.converged = true;
      break;
    }
    bool accepted = false;
    double t = step;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      const Eigen::VectorXd candidate = beta - t * grad;
      const double candidate_loss = loss_of(candidate);
      if (candidate_loss <= loss - 1e-4 * t * grad_sq) {
        beta = candidate;
        loss = candidate_loss;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No descent direction representable at this precision.
      fit.converged = true;
      break;
    }
    step = 2.0 * t;
    fit.loss_history.push_back(loss);
  }

  fit.beta_normalized = beta;
  fit.beta = denormalize(beta, 0, scale);
  fit.residual = std::sqrt(loss);
  const Eigen::VectorXd response = psi * beta;
  fit.estimate = from_psd_vector(basis, response.cwiseProduct(response), CovMethod::Wirtinger);
  fit.estimate.params = fit.beta;
  fit.estimate.params_normalized = beta;
  fit.estimate.lambda_scale = scale;
  fit.estimate.converged = fit.converged;
  return fit;
}

SpectralFitResult fit_spectral_params(const SpectralBasis& basis, const Eigen::VectorXd& psd_hat,
                                      SpectralModel model) {
  check_psd_input(basis, psd_hat);
  if (model == SpectralModel::LowPassRational)
    fail(ErrorCode::InvalidArgument,
         "UnsupportedModel: the rational low-pass model is generator-only");
  const double scale = lambda_scale_of(basis.eigenvalues);

  auto objective = [&](const Eigen::VectorXd& theta) -> double {
    for (int i = 0; i < theta.size(); ++i)
      if (!std::isfinite(theta[i])) return kInf;
    if (model != SpectralModel::Sigmoid && theta[0] < 0.0) return kInf;
    try {
      const Eigen::VectorXd response =
          frequency_response(SpectralResponseFilter{model, theta}, basis.eigenvalues);
      return (psd_hat - response.cwiseProduct(response)).squaredNorm();
    } catch (const Error&) {
      return kInf;
    }
  };

  // Coarse scan over a model-specific parameter box, then simplex descent.
  std::vector<Eigen::VectorXd> grid;
  auto linear = [](double lo, double hi, int count, int i) {
    return lo + (hi - lo) * i / (count - 1);
  };
  Eigen::VectorXd step;
  switch (model) {
    case SpectralModel::Exponential: {
      for (int i = 0; i < 60; ++i)
        grid.push_back(Eigen::VectorXd::Constant(1, linear(0.0, 20.0 / scale, 60, i)));
      step = Eigen::VectorXd::Constant(1, 20.0 / scale / 59.0);
      break;
    }
    case SpectralModel::GaussianKernel: {
      const double hi = 40.0 / (scale * scale);
      for (int i = 0; i < 60; ++i) grid.push_back(Eigen::VectorXd::Constant(1, linear(0.0, hi, 60, i)));
      step = Eigen::VectorXd::Constant(1, hi / 59.0);
      break;
    }
    case SpectralModel::Sigmoid: {
      for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 25; ++j) {
          Eigen::VectorXd theta(2);
          theta << linear(-20.0 / scale, 20.0 / scale, 25, i), linear(-10.0, 10.0, 25, j);
          grid.push_back(theta);
        }
      step = Eigen::VectorXd(2);
      step << 40.0 / scale / 24.0, 20.0 / 24.0;
      break;
    }
    case SpectralModel::LaplacianKernel: {
      for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 25; ++j) {
          Eigen::VectorXd theta(2);
          theta << linear(0.0, 20.0 / scale, 25, i), linear(0.0, 16.0, 25, j);
          grid.push_back(theta);
        }
      step = Eigen::VectorXd(2);
      step << 20.0 / scale / 24.0, 16.0 / 24.0;
      break;
    }
    case SpectralModel::LowPassRational: break;  // rejected above
  }

  Eigen::VectorXd best = grid.front();
  double best_value = objective(best);
  for (const auto& theta : grid) {
    const double value = objective(theta);
    if (value < best_value) {
      best_value = value;
      best = theta;
    }
  }

  Eigen::VectorXd theta = nelder_mead(objective, best, step, 400);
  theta = nelder_mead(objective, theta, 0.05 * step, 400);

  SpectralFitResult result;
  result.model = model;
  result.theta = theta;
  result.residual = objective(theta);
  const Eigen::VectorXd response =
      frequency_response(SpectralResponseFilter{model, theta}, basis.eigenvalues);
  result.estimate = from_psd_vector(basis, response.cwiseProduct(response), CovMethod::Kernel);
  result.estimate.params = theta;
  result.estimate.params_normalized = theta;
  return result;
}

Ar1MleResult fit_ar1_gaussian_mle(const SpectralBasis& basis, const Eigen::MatrixXd& sample_cov) {
  if (basis.size() == 0 || basis.eigenvalues.maxCoeff() <= 0.0)
    fail(ErrorCode::Numeric,
         "DegenerateSpectrum: first-order likelihood needs a positive largest eigenvalue");
  const Eigen::VectorXd d = diag_in_basis(basis, sample_cov);
  const Eigen::VectorXd& lambdas = basis.eigenvalues;

  auto objective = [&](double alpha) {
    double value = 0.0;
    for (int i = 0; i < lambdas.size(); ++i) {
      const double h = 1.0 - alpha * lambdas[i];
      value += -2.0 * std::log(std::abs(h)) + d[i] * h * h;
    }
    return value;
  };

  const double hi = (1.0 - 1e-6) / lambdas.maxCoeff();
  int best = 0;
  double best_value = objective(0.0);
  constexpr int kGrid = 100;
  for (int i = 1; i < kGrid; ++i) {
    const double value = objective(hi * i / (kGrid - 1));
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  const double lo_bracket = hi * std::max(best - 1, 0) / (kGrid - 1);
  const double hi_bracket = hi * std::min(best + 1, kGrid - 1) / (kGrid - 1);
  const double alpha =
      golden_section(objective, lo_bracket, hi_bracket, 1e-13 * std::max(hi, 1.0));

  Ar1MleResult result;
  result.alpha = alpha;
  Eigen::VectorXd psd(lambdas.size());
  for (int i = 0; i < lambdas.size(); ++i) {
    const double h = 1.0 - alpha * lambdas[i];
    psd[i] = 1.0 / (h * h);
  }
  result.estimate = from_psd_vector(basis, psd, CovMethod::Ar1Mle);
  result.estimate.params = Eigen::VectorXd::Constant(1, alpha);
  result.estimate.params_normalized = result.estimate.params;
  return result;
}

double rel_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& reference) {
  if (estimate.rows() != reference.rows() || estimate.cols() != reference.cols())
    fail(ErrorCode::Dimension, "DimensionMismatch: estimate is " +
                                   std::to_string(estimate.rows()) + "x" +
                                   std::to_string(estimate.cols()) + ", reference is " +
                                   std::to_string(reference.rows()) + "x" +
                                   std::to_string(reference.cols()));
  const double ref_sq = reference.squaredNorm();
  if (ref_sq == 0.0)
    fail(ErrorCode::InvalidArgument, "ZeroReference: relative error needs a nonzero reference");
  return (estimate - reference).squaredNorm() / ref_sq;
}

CovarianceEstimate estimate_covariance(const SpectralBasis& basis, const SignalEnsemble& signals,
                                       const std::string& method, int fit_order) {
  if (method == "sample") return sample_covariance(signals);
  if (method == "correlogram")
    return psd_to_cov(basis, correlogram(basis, sample_covariance(signals).matrix),
                      CovMethod::Correlogram);
  if (method == "periodogram")
    return psd_to_cov(basis, periodogram(basis, signals), CovMethod::Periodogram);
  if (method == "ma-spatial")
    return fit_ma_gamma_spatial(basis, sample_covariance(signals).matrix, fit_order).estimate;
  if (method == "ma-spectral")
    return fit_ma_gamma_spectral(basis, periodogram(basis, signals).values, fit_order).estimate;
  if (method == "ar-spatial")
    return fit_ar_eta_spatial(basis, sample_covariance(signals).matrix, fit_order).estimate;
  if (method == "ar-spectral")
    return fit_ar_eta_spectral(basis, periodogram(basis, signals).values, fit_order).estimate;
  if (method == "wirtinger")
    return fit_ma_beta_wirtinger(basis, periodogram(basis, signals).values, fit_order).estimate;
  if (method == "ar1-mle")
    return fit_ar1_gaussian_mle(basis, sample_covariance(signals).matrix).estimate;
  if (method.rfind("kernel:", 0) == 0) {
    const SpectralModel model = spectral_model_from_string(method.substr(7));
    return fit_spectral_params(basis, periodogram(basis, signals).values, model).estimate;
  }
  fail(ErrorCode::InvalidArgument, "UnknownMethod: no covariance estimator named '" + method + "'");
}

}  // namespace topostat
