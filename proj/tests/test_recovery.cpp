#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "test_util.hpp"
#include "topostat/complex.hpp"
#include "topostat/estimation.hpp"
#include "topostat/recovery.hpp"
#include "topostat/rng.hpp"
#include "topostat/signals.hpp"
#include "topostat/spectral.hpp"

using topostat::AutoRegressiveFilter;
using topostat::ErrorCode;
using topostat::PolynomialFilter;
using topostat::PrecisionSpec;
using topostat::Psd;
using topostat::SelectionMask;
using topostat::SimplicialComplex;
using topostat::SpectralBasis;
using topostat::WienerPath;
using test_util::expect_error;

namespace {

SpectralBasis dirac_basis(std::uint64_t seed, int n0 = 7) {
  const auto c = SimplicialComplex::random(n0, 0.5, 0.5, seed);
  return topostat::eigendecompose(topostat::dirac(c));
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  return topostat::white_noise(rows, cols, seed).data;
}

Psd positive_psd(const SpectralBasis& basis, std::uint64_t seed) {
  Psd p;
  p.values = (gaussian_matrix(basis.size(), 1, seed).cwiseAbs().col(0).array() + 0.2).matrix();
  return p;
}

}  // namespace

TEST_CASE("selection mask validates and applies") {
  const auto mask = topostat::make_mask(5, {1, 3});
  Eigen::MatrixXd expected(2, 5);
  expected << 0, 1, 0, 0, 0, 0, 0, 0, 1, 0;
  CHECK((mask.dense() - expected).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd full(5, 2);
  full << 0, 10, 1, 11, 2, 12, 3, 13, 4, 14;
  const Eigen::MatrixXd picked = mask.select(full);
  CHECK(picked(0, 0) == 1.0);
  CHECK(picked(1, 1) == 13.0);
  CHECK((mask.dense() * full - picked).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd back = mask.embed(picked);
  CHECK(back(1, 0) == 1.0);
  CHECK(back(3, 1) == 13.0);
  CHECK(back(0, 0) == 0.0);
  CHECK(back.rows() == 5);

  expect_error([&] { topostat::make_mask(5, {3, 1}); }, ErrorCode::InvalidArgument, "InvalidMask");
  expect_error([&] { topostat::make_mask(5, {1, 1}); }, ErrorCode::InvalidArgument, "InvalidMask");
  expect_error([&] { topostat::make_mask(5, {5}); }, ErrorCode::InvalidArgument, "InvalidMask");
  expect_error([&] { topostat::make_mask(5, {-1}); }, ErrorCode::InvalidArgument, "InvalidMask");
}

TEST_CASE("random masks are deterministic, sorted, and bounded") {
  const auto a = topostat::random_mask(20, 7, 5);
  const auto b = topostat::random_mask(20, 7, 5);
  CHECK(a.observed == b.observed);
  CHECK(a.observed_count() == 7);
  for (size_t i = 1; i < a.observed.size(); ++i) CHECK(a.observed[i] > a.observed[i - 1]);
  CHECK(a.observed.front() >= 0);
  CHECK(a.observed.back() < 20);

  const auto c = topostat::random_mask(20, 7, 6);
  CHECK(a.observed != c.observed);

  CHECK(topostat::random_mask(4, 0, 1).observed.empty());
  CHECK(topostat::random_mask(4, 4, 1).observed == std::vector<int>{0, 1, 2, 3});
  expect_error([&] { topostat::random_mask(4, 5, 1); }, ErrorCode::InvalidArgument,
               "InvalidMask");
}

TEST_CASE("wiener filter halves the input when the psd equals the noise floor") {
  const auto basis = dirac_basis(200, 6);
  Psd p;
  p.values = Eigen::VectorXd::Constant(basis.size(), 0.7);
  const auto y = topostat::white_noise(basis.size(), 4, 9);
  for (auto path : {WienerPath::Spectral, WienerPath::Spatial}) {
    const auto out = topostat::wiener_denoise(basis, p, 0.7, y, path);
    CHECK((out.data - 0.5 * y.data).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("wiener filter annihilates a zero-psd prior") {
  const auto basis = dirac_basis(201, 6);
  Psd p;
  p.values = Eigen::VectorXd::Zero(basis.size());
  const auto y = topostat::white_noise(basis.size(), 3, 10);
  const auto out = topostat::wiener_denoise(basis, p, 0.5, y);
  CHECK(out.data.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("wiener spectral and spatial paths agree") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto basis = dirac_basis(210 + seed, 6 + static_cast<int>(seed % 3));
    const auto p = positive_psd(basis, 50 + seed);
    const auto y = topostat::white_noise(basis.size(), 5, 60 + seed);
    const auto spectral = topostat::wiener_denoise(basis, p, 0.3, y, WienerPath::Spectral);
    const auto spatial = topostat::wiener_denoise(basis, p, 0.3, y, WienerPath::Spatial);
    CHECK((spectral.data - spatial.data).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("wiener response is a monotone shrinkage per frequency") {
  const auto basis = dirac_basis(220, 6);
  const int n = basis.size();
  auto p = positive_psd(basis, 77);
  const double sigma2 = 0.4;

  topostat::SignalEnsemble probe;
  probe.data = basis.eigenvectors;  // column i is the i-th basis vector
  const auto out = topostat::wiener_denoise(basis, p, sigma2, probe);
  for (int i = 0; i < n; ++i) {
    const double gain = basis.eigenvectors.col(i).dot(out.data.col(i));
    CHECK(gain >= 0.0);
    CHECK(gain <= 1.0);
    CHECK(gain == doctest::Approx(p.values[i] / (p.values[i] + sigma2)).epsilon(1e-10));
  }

  Psd boosted = p;
  boosted.values[2] += 1.0;
  const auto out2 = topostat::wiener_denoise(basis, boosted, sigma2, probe);
  const double gain_before = basis.eigenvectors.col(2).dot(out.data.col(2));
  const double gain_after = basis.eigenvectors.col(2).dot(out2.data.col(2));
  CHECK(gain_after > gain_before);
}

TEST_CASE("wiener denoising beats the noisy baseline across SNRs") {
  const auto basis = dirac_basis(230, 7);
  const int n = basis.size();
  std::vector<topostat::FilterSpec> models;
  Eigen::VectorXd beta(3);
  beta << 0.1, 0.1, 0.1;
  models.push_back(PolynomialFilter{beta});
  models.push_back(AutoRegressiveFilter{Eigen::VectorXd::Constant(1, 0.1)});

  int model_index = 0;
  for (const auto& model : models) {
    const auto truth = topostat::true_cov_psd(basis, model);
    const auto s = topostat::generate(basis, model, 50, 300 + model_index);
    const double mean_power = truth.covariance.trace() / n;
    for (double snr_db : {1.0, 5.0, 10.0, 20.0, 30.0}) {
      const double sigma2 = mean_power / std::pow(10.0, snr_db / 10.0);
      auto noisy = s;
      noisy.data += std::sqrt(sigma2) *
                    topostat::white_noise(n, s.cols(), 400 + model_index).data;
      Psd p;
      p.values = truth.psd;
      const auto cleaned = topostat::wiener_denoise(basis, p, sigma2, noisy);
      CHECK(topostat::rel_error(cleaned.data, s.data) <=
            topostat::rel_error(noisy.data, s.data));
    }
    ++model_index;
  }
}

TEST_CASE("map interpolation with a full mask and vanishing noise is the identity") {
  const int n = 8;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const auto mask = topostat::make_mask(n, all);
  const Eigen::MatrixXd s = gaussian_matrix(n, 3, 501);
  const auto result =
      topostat::interpolate_map(Eigen::MatrixXd::Identity(n, n), mask, 1e-12, s);
  CHECK_FALSE(result.flagged);
  CHECK((result.signals - s).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("map interpolation with a full mask reduces to wiener denoising") {
  const auto basis = dirac_basis(240, 6);
  const int n = basis.size();
  const auto p = positive_psd(basis, 88);
  const auto cov = topostat::psd_to_cov(basis, p).matrix;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const auto mask = topostat::make_mask(n, all);
  const auto y = topostat::white_noise(n, 5, 19);

  const auto map = topostat::interpolate_map(cov, mask, 0.3, y.data);
  const auto wiener = topostat::wiener_denoise(basis, p, 0.3, y);
  CHECK((map.signals - wiener.data).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("white-prior interpolation shrinks the zero-filled observations") {
  const auto mask = topostat::make_mask(7, {0, 2, 5});
  const Eigen::MatrixXd observed = gaussian_matrix(3, 2, 502);
  const auto result =
      topostat::interpolate_map(Eigen::MatrixXd::Identity(7, 7), mask, 0.5, observed);
  CHECK((result.signals - mask.embed(observed) / 1.5).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("empty mask returns the zero prior mean with a flag") {
  const auto mask = topostat::make_mask(6, {});
  const Eigen::MatrixXd observed(0, 3);
  const auto result =
      topostat::interpolate_map(Eigen::MatrixXd::Identity(6, 6), mask, 0.1, observed);
  CHECK(result.flagged);
  CHECK(result.flag == "empty_mask");
  CHECK(result.signals.rows() == 6);
  CHECK(result.signals.cols() == 3);
  CHECK(result.signals.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("regularized interpolation matches map for an invertible prior") {
  const auto basis = dirac_basis(250, 7);
  const int n = basis.size();
  Psd p;
  p.values = 0.5 * Eigen::VectorXd::Ones(n) +
             1.5 * gaussian_matrix(n, 1, 71).cwiseAbs2().col(0).cwiseMin(1.0);
  const auto cov = topostat::psd_to_cov(basis, p).matrix;
  const auto mask = topostat::random_mask(n, (6 * n) / 10, 72);
  const Eigen::MatrixXd observed = gaussian_matrix(mask.observed_count(), 4, 73);
  const double sigma2 = 0.05;

  const auto map = topostat::interpolate_map(cov, mask, sigma2, observed);

  PrecisionSpec from_cov{topostat::PrecisionFromCovariance{cov, 0.0}};
  const auto reg_cov = topostat::interpolate_regularized(from_cov, mask, sigma2, observed);
  CHECK_FALSE(reg_cov.flagged);
  CHECK((map.signals - reg_cov.signals).cwiseAbs().maxCoeff() <= 1e-6);

  PrecisionSpec from_psd{topostat::PrecisionFromPsd{basis.eigenvectors, p.values, 0.0}};
  const auto reg_psd = topostat::interpolate_regularized(from_psd, mask, sigma2, observed);
  CHECK((map.signals - reg_psd.signals).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("sem prior with the generating coefficient reproduces map interpolation") {
  const auto complex = SimplicialComplex::random(7, 0.5, 0.5, 260);
  const auto op = topostat::dirac(complex);
  const auto basis = topostat::eigendecompose(op);
  const int n = basis.size();
  const double alpha = 0.3 / basis.eigenvalues.cwiseAbs().maxCoeff();

  const auto truth =
      topostat::true_cov_psd(basis, AutoRegressiveFilter{Eigen::VectorXd::Constant(1, alpha)});
  const auto mask = topostat::random_mask(n, n / 2, 261);
  const Eigen::MatrixXd observed = gaussian_matrix(mask.observed_count(), 3, 262);
  const double sigma2 = 0.1;

  const auto map = topostat::interpolate_map(truth.covariance, mask, sigma2, observed);
  PrecisionSpec sem{topostat::PrecisionSem{alpha, op.matrix}};
  const auto reg = topostat::interpolate_regularized(sem, mask, sigma2, observed);
  CHECK((map.signals - reg.signals).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("dirac smoothness keeps harmonic signals intact") {
  // Two components: a filled triangle and an isolated edge plus vertex.
  const SimplicialComplex complex(
      2, {{{0}, {1}, {2}, {3}, {4}, {5}},
          {{0, 1}, {0, 2}, {1, 2}, {3, 4}},
          {{0, 1, 2}}});
  const auto op = topostat::dirac(complex);
  const int n = op.size();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  s.head(6) << 1, 1, 1, 2, 2, 7;  // constant per connected component

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const auto mask = topostat::make_mask(n, all);
  PrecisionSpec smooth{topostat::PrecisionSmoothness{topostat::smoothness_quadratic(op)}};
  const auto result = topostat::interpolate_regularized(smooth, mask, 0.01, s);
  CHECK((result.signals.col(0) - s).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("regularized solutions are exact stationary points") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto basis = dirac_basis(270 + seed, 6);
    const int n = basis.size();
    const Eigen::MatrixXd q = topostat::smoothness_quadratic(basis);
    const auto mask = topostat::random_mask(n, n / 2, 280 + seed);
    const Eigen::MatrixXd observed = gaussian_matrix(mask.observed_count(), 2, 290 + seed);
    const double sigma2 = 0.2;

    PrecisionSpec smooth{topostat::PrecisionSmoothness{q}};
    const auto result = topostat::interpolate_regularized(smooth, mask, sigma2, observed);

    Eigen::MatrixXd system = sigma2 * q;
    for (int idx : mask.observed) system(idx, idx) += 1.0;
    const Eigen::MatrixXd rhs = mask.embed(observed);
    const double grad = (system * result.signals - rhs).cwiseAbs().maxCoeff();
    CHECK(grad <= 1e-8 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("singular regularized systems fall back to the least-norm solution") {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(4, 4);
  q(0, 0) = q(1, 1) = q(2, 2) = 1.0;  // coordinate 3 is unconstrained and unobserved
  const auto mask = topostat::make_mask(4, {0, 1});
  Eigen::MatrixXd observed(2, 1);
  observed << 1.0, 2.0;

  PrecisionSpec smooth{topostat::PrecisionSmoothness{q}};
  const auto result = topostat::interpolate_regularized(smooth, mask, 0.5, observed);
  CHECK(result.flagged);
  CHECK(result.flag == "singular_system");
  Eigen::VectorXd expected(4);
  expected << 1.0 / 1.5, 2.0 / 1.5, 0.0, 0.0;
  CHECK((result.signals.col(0) - expected).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("subspace interpolation over the full basis matches map") {
  const auto basis = dirac_basis(300, 6);
  const int n = basis.size();
  const auto p = positive_psd(basis, 101);
  const auto mask = topostat::random_mask(n, (2 * n) / 3, 102);
  const Eigen::MatrixXd observed = gaussian_matrix(mask.observed_count(), 3, 103);
  const double sigma2 = 0.1;

  const auto sub = topostat::interpolate_subspace(basis.eigenvectors, p.values, mask, sigma2,
                                                  observed);
  const auto map =
      topostat::interpolate_map(topostat::psd_to_cov(basis, p).matrix, mask, sigma2, observed);
  CHECK((sub.signals - map.signals).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("subspace interpolation recovers in-span signals under full observation") {
  const auto basis = dirac_basis(301, 6);
  const int n = basis.size();
  const Eigen::MatrixXd u_s = basis.eigenvectors.leftCols(3);
  const Eigen::VectorXd coeffs = gaussian_matrix(3, 1, 104).col(0);
  const Eigen::MatrixXd signal = u_s * coeffs;

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const auto mask = topostat::make_mask(n, all);
  const auto result = topostat::interpolate_subspace(u_s, Eigen::VectorXd::Ones(3), mask, 1e-10,
                                                     signal);
  CHECK((result.signals - signal).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("subspace interpolation validates its inputs") {
  const auto basis = dirac_basis(302, 6);
  const int n = basis.size();
  const auto mask = topostat::random_mask(n, n / 2, 105);
  const Eigen::MatrixXd observed = gaussian_matrix(mask.observed_count(), 1, 106);

  expect_error(
      [&] {
        topostat::interpolate_subspace(2.0 * basis.eigenvectors.leftCols(2),
                                       Eigen::VectorXd::Ones(2), mask, 0.1, observed);
      },
      ErrorCode::InvalidArgument, "NonOrthonormalSubspace");
  expect_error(
      [&] {
        Eigen::VectorXd p(2);
        p << 1.0, 0.0;
        topostat::interpolate_subspace(basis.eigenvectors.leftCols(2), p, mask, 0.1, observed);
      },
      ErrorCode::InvalidArgument, "NonpositivePsd");
  expect_error(
      [&] {
        topostat::interpolate_subspace(basis.eigenvectors.leftCols(2), Eigen::VectorXd::Ones(2),
                                       mask, 0.0, observed);
      },
      ErrorCode::InvalidArgument, "NonpositiveNoiseVariance");
}

TEST_CASE("an unobserved order is recoverable from its neighbors") {
  SimplicialComplex complex = SimplicialComplex::random(7, 0.6, 0.6, 303);
  REQUIRE(complex.count(2) >= 1);
  const auto basis = topostat::eigendecompose(topostat::dirac(complex));
  const int n = basis.size();
  const auto offsets = complex.order_offsets();
  const int edges_begin = offsets[1];
  const int edges_end = offsets[2];

  // The response must have odd lambda terms: even responses are functions of
  // the block-diagonal squared Dirac and carry no cross-order information.
  const PolynomialFilter model{Eigen::VectorXd::Constant(3, 0.3)};
  const auto truth = topostat::true_cov_psd(basis, model);
  const auto s = topostat::generate(basis, model, 30, 304);

  std::vector<int> kept;
  for (int i = 0; i < n; ++i)
    if (i < edges_begin || i >= edges_end) kept.push_back(i);
  const auto mask = topostat::make_mask(n, kept);

  const auto result =
      topostat::interpolate_map(truth.covariance, mask, 0.01, mask.select(s.data));
  const int rows = edges_end - edges_begin;
  const double err_map =
      (result.signals.middleRows(edges_begin, rows) - s.data.middleRows(edges_begin, rows))
          .squaredNorm();
  const double err_zero = s.data.middleRows(edges_begin, rows).squaredNorm();
  CHECK(err_map < err_zero);
}

TEST_CASE("precision materialization inverts, clamps, and combines") {
  const auto basis = dirac_basis(310, 6);
  const int n = basis.size();
  Psd p;
  p.values = (gaussian_matrix(n, 1, 107).cwiseAbs().col(0).array() + 0.5).matrix();
  const auto cov = topostat::psd_to_cov(basis, p).matrix;

  const Eigen::MatrixXd q_cov =
      topostat::materialize_precision(PrecisionSpec{topostat::PrecisionFromCovariance{cov, 0.0}});
  CHECK((q_cov * cov - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);

  Eigen::VectorXd clipped(2);
  clipped << 1.0, 0.0;
  const Eigen::MatrixXd q_clip = topostat::materialize_precision(
      PrecisionSpec{topostat::PrecisionFromPsd{Eigen::MatrixXd::Identity(2, 2), clipped, 0.0}});
  CHECK(q_clip(0, 0) == doctest::Approx(1.0));
  CHECK(q_clip(1, 1) == doctest::Approx(1e6));

  const Eigen::MatrixXd q_smooth = topostat::smoothness_quadratic(basis);
  topostat::PrecisionMixed mixed;
  mixed.terms.push_back({1.0, PrecisionSpec{topostat::PrecisionFromCovariance{cov, 0.0}}});
  mixed.terms.push_back({2.0, PrecisionSpec{topostat::PrecisionSmoothness{q_smooth}}});
  const Eigen::MatrixXd q_mixed = topostat::materialize_precision(PrecisionSpec{mixed});
  CHECK((q_mixed - (q_cov + 2.0 * q_smooth)).cwiseAbs().maxCoeff() <= 1e-10);

  topostat::PrecisionMixed negative;
  negative.terms.push_back({-1.0, PrecisionSpec{topostat::PrecisionSmoothness{q_smooth}}});
  expect_error([&] { topostat::materialize_precision(PrecisionSpec{negative}); },
               ErrorCode::InvalidArgument, "NegativeWeight");
  expect_error(
      [&] { topostat::materialize_precision(PrecisionSpec{topostat::PrecisionMixed{}}); },
      ErrorCode::InvalidArgument, "EmptyMixedPrecision");
}

TEST_CASE("smoothness quadratics match between operator and basis forms") {
  const auto complex = SimplicialComplex::random(6, 0.6, 0.5, 311);
  const auto op_dirac = topostat::dirac(complex);
  const auto basis_dirac = topostat::eigendecompose(op_dirac);
  CHECK((topostat::smoothness_quadratic(op_dirac) - topostat::smoothness_quadratic(basis_dirac))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);

  const auto op_hodge = topostat::hodge_laplacian(complex, 1);
  const auto basis_hodge = topostat::eigendecompose(op_hodge);
  CHECK((topostat::smoothness_quadratic(op_hodge) - topostat::smoothness_quadratic(basis_hodge))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
}

TEST_CASE("recovery rejects nonpositive noise variances") {
  const auto basis = dirac_basis(320, 6);
  const int n = basis.size();
  const auto p = positive_psd(basis, 108);
  const auto y = topostat::white_noise(n, 2, 109);
  const auto mask = topostat::random_mask(n, n / 2, 110);

  expect_error([&] { topostat::wiener_denoise(basis, p, 0.0, y); }, ErrorCode::InvalidArgument,
               "NonpositiveNoiseVariance");
  expect_error(
      [&] {
        topostat::interpolate_map(Eigen::MatrixXd::Identity(n, n), mask, -1.0,
                                  mask.select(y.data));
      },
      ErrorCode::InvalidArgument, "NonpositiveNoiseVariance");
  expect_error(
      [&] {
        PrecisionSpec smooth{topostat::PrecisionSmoothness{topostat::smoothness_quadratic(basis)}};
        topostat::interpolate_regularized(smooth, mask, 0.0, mask.select(y.data));
      },
      ErrorCode::InvalidArgument, "NonpositiveNoiseVariance");

  Psd negative = p;
  negative.values[0] = -0.1;
  expect_error([&] { topostat::wiener_denoise(basis, negative, 0.1, y); },
               ErrorCode::InvalidArgument, "NonpositivePsd");
}
