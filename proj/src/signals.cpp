#include "topostat/signals.hpp"

#include <cmath>

#include "topostat/rng.hpp"

namespace topostat {

const char* to_string(SpectralModel model) {
  switch (model) {
    case SpectralModel::LowPassRational: return "lowpass";
    case SpectralModel::Exponential: return "exponential";
    case SpectralModel::Sigmoid: return "sigmoid";
    case SpectralModel::GaussianKernel: return "gaussian";
    case SpectralModel::LaplacianKernel: return "laplacian";
  }
  return "?";
}

SpectralModel spectral_model_from_string(const std::string& name) {
  if (name == "lowpass") return SpectralModel::LowPassRational;
  if (name == "exponential") return SpectralModel::Exponential;
  if (name == "sigmoid") return SpectralModel::Sigmoid;
  if (name == "gaussian") return SpectralModel::GaussianKernel;
  if (name == "laplacian") return SpectralModel::LaplacianKernel;
  fail(ErrorCode::InvalidArgument, "InvalidArgument: unknown spectral model '" + name + "'");
}

namespace {

void require_params(const SpectralResponseFilter& f, int count) {
  if (f.params.size() != count)
    fail(ErrorCode::InvalidArgument,
         "InvalidArgument: model " + std::string(to_string(f.model)) + " takes " +
             std::to_string(count) + " parameter(s)");
}

Eigen::VectorXd response_of(const SpectralResponseFilter& f, const Eigen::VectorXd& l) {
  Eigen::VectorXd g(l.size());
  switch (f.model) {
    case SpectralModel::LowPassRational: {
      require_params(f, 1);
      const double eps = f.params[0];
      if (eps <= 0)
        fail(ErrorCode::InvalidArgument, "InvalidArgument: lowpass offset must be positive");
      for (int i = 0; i < l.size(); ++i) g[i] = 1.0 / (l[i] * l[i] + eps);
      return g;
    }
    case SpectralModel::Exponential: {
      require_params(f, 1);
      for (int i = 0; i < l.size(); ++i) g[i] = std::exp(-f.params[0] * l[i]);
      return g;
    }
    case SpectralModel::Sigmoid: {
      require_params(f, 2);
      for (int i = 0; i < l.size(); ++i)
        g[i] = 1.0 / (1.0 + std::exp(-(f.params[0] * l[i] + f.params[1])));
      return g;
    }
    case SpectralModel::GaussianKernel: {
      require_params(f, 1);
      if (f.params[0] < 0)
        fail(ErrorCode::InvalidArgument, "InvalidArgument: gaussian kernel width must be >= 0");
      for (int i = 0; i < l.size(); ++i) g[i] = std::exp(-0.5 * f.params[0] * l[i] * l[i]);
      return g;
    }
    case SpectralModel::LaplacianKernel: {
      require_params(f, 2);
      if (f.params[0] < 0)
        fail(ErrorCode::InvalidArgument, "InvalidArgument: laplacian kernel scale must be >= 0");
      for (int i = 0; i < l.size(); ++i) {
        const double base = 1.0 + f.params[0] * l[i];
        if (base <= 0)
          fail(ErrorCode::Numeric,
               "NumericError: laplacian kernel undefined at lambda = " + std::to_string(l[i]));
        g[i] = std::pow(base, -0.5 * f.params[1]);
      }
      return g;
    }
  }
  fail(ErrorCode::InvalidArgument, "InvalidArgument: unknown spectral model");
}

}  // namespace

Eigen::VectorXd frequency_response(const FilterSpec& filter, const Eigen::VectorXd& lambdas) {
  if (const auto* poly = std::get_if<PolynomialFilter>(&filter)) {
    if (poly->coeffs.size() == 0)
      fail(ErrorCode::InvalidArgument, "InvalidArgument: polynomial filter needs coefficients");
    Eigen::VectorXd g(lambdas.size());
    for (int i = 0; i < lambdas.size(); ++i) {
      double acc = 0.0;
      for (int r = static_cast<int>(poly->coeffs.size()) - 1; r >= 0; --r)
        acc = acc * lambdas[i] + poly->coeffs[r];
      g[i] = acc;
    }
    return g;
  }
  if (const auto* ar = std::get_if<AutoRegressiveFilter>(&filter)) {
    if (ar->coeffs.size() == 0)
      fail(ErrorCode::InvalidArgument, "InvalidArgument: autoregressive filter needs coefficients");
    Eigen::VectorXd g(lambdas.size());
    for (int i = 0; i < lambdas.size(); ++i) {
      double h = 0.0;
      for (int r = static_cast<int>(ar->coeffs.size()) - 1; r >= 0; --r)
        h = (h + ar->coeffs[r]) * lambdas[i];
      h = 1.0 - h;
      if (std::abs(h) <= 1e-12)
        fail(ErrorCode::Numeric, "SingularARResponse: response pole at lambda = " +
                                     std::to_string(lambdas[i]) + " (index " +
                                     std::to_string(i) + ")");
      g[i] = 1.0 / h;
    }
    return g;
  }
  return response_of(std::get<SpectralResponseFilter>(filter), lambdas);
}

SignalEnsemble white_noise(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1)
    fail(ErrorCode::InvalidArgument, "InvalidArgument: white noise needs n >= 1 and m >= 1");
  SignalEnsemble out;
  out.data.resize(n, m);
  for (int j = 0; j < m; ++j) {
    SplitMix64 g(mix_seed(seed, static_cast<std::uint64_t>(j)));
    int i = 0;
    while (i + 1 < n) {
      const auto [a, b] = g.next_normal_pair();
      out.data(i, j) = a;
      out.data(i + 1, j) = b;
      i += 2;
    }
    if (i < n) out.data(i, j) = g.next_normal_pair().first;
  }
  return out;
}

SignalEnsemble apply_filter(const SpectralBasis& basis, const FilterSpec& filter,
                            const SignalEnsemble& input) {
  if (input.rows() != basis.size())
    fail(ErrorCode::Dimension,
         "DimensionMismatch: ensemble has " + std::to_string(input.rows()) +
             " rows, basis has " + std::to_string(basis.size()));
  const Eigen::VectorXd g = frequency_response(filter, basis.eigenvalues);
  SignalEnsemble out;
  out.operator_kind = basis.operator_kind;
  out.hodge_k = basis.hodge_k;
  out.offsets = basis.offsets;
  out.data = basis.eigenvectors *
             (g.asDiagonal() * (basis.eigenvectors.transpose() * input.data));
  return out;
}

SignalEnsemble generate(const SpectralBasis& basis, const FilterSpec& filter, int m,
                        std::uint64_t seed) {
  return apply_filter(basis, filter, white_noise(basis.size(), m, seed));
}

TrueCovPsd true_cov_psd(const SpectralBasis& basis, const FilterSpec& filter) {
  const Eigen::VectorXd g = frequency_response(filter, basis.eigenvalues);
  TrueCovPsd out;
  out.psd = g.cwiseProduct(g);
  out.covariance =
      basis.eigenvectors * out.psd.asDiagonal() * basis.eigenvectors.transpose();
  return out;
}

SignalEnsemble tft(const SpectralBasis& basis, const SignalEnsemble& signals) {
  SignalEnsemble out = signals;
  out.data = tft(basis, signals.data);
  return out;
}

SignalEnsemble itft(const SpectralBasis& basis, const SignalEnsemble& coefficients) {
  SignalEnsemble out = coefficients;
  out.data = itft(basis, coefficients.data);
  return out;
}

}  // namespace topostat
