#include <cstring>

#include <Eigen/Dense>

#include "doctest.h"
#include "test_util.hpp"
#include "topostat/complex.hpp"
#include "topostat/rng.hpp"
#include "topostat/spectral.hpp"

using topostat::ErrorCode;
using topostat::OperatorKind;
using topostat::SimplicialComplex;
using topostat::SpectralBasis;
using topostat::SubspaceLabel;
using test_util::expect_error;
using test_util::integer_rank;

namespace {

SimplicialComplex filled_triangle() {
  return SimplicialComplex(2, {{{0}, {1}, {2}}, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}}});
}

SimplicialComplex single_edge() {
  return SimplicialComplex(1, {{{0}, {1}}, {{0, 1}}});
}

int count_label(const SpectralBasis& basis, SubspaceLabel label) {
  return static_cast<int>(basis.indices_with(label).size());
}

}  // namespace

TEST_CASE("hodge laplacians of the filled triangle match hand computation") {
  const auto c = filled_triangle();

  const auto l0 = topostat::hodge_laplacian(c, 0);
  Eigen::MatrixXd expected_l0(3, 3);
  expected_l0 << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK((l0.matrix - expected_l0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(l0.lower.cwiseAbs().maxCoeff() == 0.0);  // no B_0 term

  const auto l1 = topostat::hodge_laplacian(c, 1);
  Eigen::MatrixXd expected_lower(3, 3), expected_upper(3, 3);
  expected_lower << 2, 1, -1, 1, 2, 1, -1, 1, 2;
  expected_upper << 1, -1, 1, -1, 1, -1, 1, -1, 1;
  CHECK((l1.lower - expected_lower).cwiseAbs().maxCoeff() == 0.0);
  CHECK((l1.upper - expected_upper).cwiseAbs().maxCoeff() == 0.0);
  CHECK((l1.matrix - 3.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

  const auto l2 = topostat::hodge_laplacian(c, 2);
  CHECK(l2.matrix.rows() == 1);
  CHECK(l2.matrix(0, 0) == 3.0);
  CHECK(l2.upper.cwiseAbs().maxCoeff() == 0.0);  // k = K has no upper term

  expect_error([&] { topostat::hodge_laplacian(c, 3); }, ErrorCode::InvalidArgument,
               "OrderOutOfRange");
}

TEST_CASE("dirac operator of a single edge") {
  const auto c = single_edge();
  const auto d = topostat::dirac(c);
  Eigen::MatrixXd expected(3, 3);
  expected << 0, 0, -1, 0, 0, 1, -1, 1, 0;
  CHECK((d.matrix - expected).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(d.offsets.size() == 2);
  CHECK(d.offsets[0] == 0);
  CHECK(d.offsets[1] == 2);
}

TEST_CASE("dirac squares to the block diagonal of hodge laplacians") {
  for (std::uint64_t seed : {2ull, 11ull, 23ull}) {
    const auto c = SimplicialComplex::random(8, 0.5, 0.6, seed);
    const auto d = topostat::dirac(c);
    Eigen::MatrixXd d2 = d.matrix * d.matrix;
    const auto off = c.order_offsets();
    for (int k = 0; k <= c.order(); ++k) {
      const int nk = c.count(k);
      if (nk == 0) continue;
      const auto lk = topostat::hodge_laplacian(c, k);
      CHECK((d2.block(off[k], off[k], nk, nk) - lk.matrix).cwiseAbs().maxCoeff() <= 1e-12);
      d2.block(off[k], off[k], nk, nk).setZero();
    }
    CHECK(d2.cwiseAbs().maxCoeff() <= 1e-12);  // off-diagonal blocks vanish
  }
}

TEST_CASE("eigendecompose produces an orthonormal reconstruction basis") {
  const auto c = SimplicialComplex::random(9, 0.5, 0.5, 4);
  for (int k = 0; k <= 2; ++k) {
    const auto op = topostat::hodge_laplacian(c, k);
    if (op.size() == 0) continue;
    const auto basis = topostat::eigendecompose(op);
    const int n = basis.size();
    REQUIRE(n == op.size());
    const Eigen::MatrixXd gram =
        basis.eigenvectors.transpose() * basis.eigenvectors - Eigen::MatrixXd::Identity(n, n);
    CHECK(gram.cwiseAbs().maxCoeff() <= 1e-10);
    const Eigen::MatrixXd recon = basis.eigenvectors *
                                  basis.eigenvalues.asDiagonal() *
                                  basis.eigenvectors.transpose();
    CHECK((recon - op.matrix).cwiseAbs().maxCoeff() <= 1e-8);
    for (int i = 1; i < n; ++i) CHECK(basis.eigenvalues[i] >= basis.eigenvalues[i - 1]);
  }
}

TEST_CASE("eigendecompose is bit-deterministic and sign-fixed") {
  const auto c = SimplicialComplex::random(10, 0.5, 0.5, 9);
  const auto op = topostat::dirac(c);
  const auto a = topostat::eigendecompose(op);
  const auto b = topostat::eigendecompose(op);
  CHECK(std::memcmp(a.eigenvectors.data(), b.eigenvectors.data(),
                    sizeof(double) * a.eigenvectors.size()) == 0);
  CHECK(std::memcmp(a.eigenvalues.data(), b.eigenvalues.data(),
                    sizeof(double) * a.eigenvalues.size()) == 0);

  for (int j = 0; j < a.size(); ++j) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < a.size(); ++i)
      if (std::abs(a.eigenvectors(i, j)) > best) {
        best = std::abs(a.eigenvectors(i, j));
        arg = i;
      }
    CHECK(a.eigenvectors(arg, j) > 0.0);
  }
}

TEST_CASE("triangle edge laplacian labels split a degenerate cluster") {
  // L_1 = 3I: one three-fold eigenvalue mixing both subspaces; the split must
  // recover two gradient columns and one curl column parallel to (1,-1,1).
  const auto basis = topostat::eigendecompose(topostat::hodge_laplacian(filled_triangle(), 1));
  REQUIRE(basis.size() == 3);
  CHECK(count_label(basis, SubspaceLabel::Gradient) == 2);
  CHECK(count_label(basis, SubspaceLabel::Curl) == 1);
  CHECK(count_label(basis, SubspaceLabel::Harmonic) == 0);

  const int curl_idx = basis.indices_with(SubspaceLabel::Curl)[0];
  Eigen::Vector3d curl_dir(1.0, -1.0, 1.0);
  curl_dir /= std::sqrt(3.0);
  const double align = std::abs(curl_dir.dot(basis.eigenvectors.col(curl_idx)));
  CHECK(align == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("node laplacian labels: harmonic constants, curl elsewhere") {
  const auto basis = topostat::eigendecompose(topostat::hodge_laplacian(filled_triangle(), 0));
  CHECK(count_label(basis, SubspaceLabel::Gradient) == 0);
  CHECK(count_label(basis, SubspaceLabel::Curl) == 2);
  CHECK(count_label(basis, SubspaceLabel::Harmonic) == 1);
  const int h = basis.indices_with(SubspaceLabel::Harmonic)[0];
  CHECK(basis.eigenvalues[h] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("label counts match integer matrix ranks") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int n0 = 4 + static_cast<int>(seed % 8);
    const auto c = SimplicialComplex::random(n0, 0.5, 0.5, 1000 + seed);
    for (int k = 0; k <= 2; ++k) {
      if (c.count(k) == 0) continue;
      const auto basis = topostat::eigendecompose(topostat::hodge_laplacian(c, k));
      const int rank_lower = k >= 1 ? integer_rank(topostat::build_incidence(c, k).entries) : 0;
      const int rank_upper =
          k < 2 ? integer_rank(topostat::build_incidence(c, k + 1).entries) : 0;
      CHECK(count_label(basis, SubspaceLabel::Gradient) == rank_lower);
      CHECK(count_label(basis, SubspaceLabel::Curl) == rank_upper);
      CHECK(count_label(basis, SubspaceLabel::Harmonic) == c.count(k) - rank_lower - rank_upper);
    }
  }
}

TEST_CASE("labeled columns carry energy in exactly one subspace") {
  const auto c = SimplicialComplex::random(10, 0.45, 0.5, 31);
  for (int k = 0; k <= 2; ++k) {
    if (c.count(k) == 0) continue;
    const auto op = topostat::hodge_laplacian(c, k);
    const auto basis = topostat::eigendecompose(op);
    for (int j = 0; j < basis.size(); ++j) {
      const Eigen::VectorXd u = basis.eigenvectors.col(j);
      const double eg = u.dot(op.lower * u);
      const double ec = u.dot(op.upper * u);
      switch (basis.labels[j]) {
        case SubspaceLabel::Gradient:
          CHECK(eg > 1e-8);
          CHECK(ec <= 1e-8);
          break;
        case SubspaceLabel::Curl:
          CHECK(ec > 1e-8);
          CHECK(eg <= 1e-8);
          break;
        case SubspaceLabel::Harmonic:
          CHECK(eg <= 1e-8);
          CHECK(ec <= 1e-8);
          break;
      }
    }
  }
}

TEST_CASE("tft and itft invert each other and preserve energy") {
  const auto c = SimplicialComplex::random(9, 0.5, 0.5, 12);
  const auto basis = topostat::eigendecompose(topostat::dirac(c));
  const int n = basis.size();
  Eigen::MatrixXd s(n, 4);
  topostat::SplitMix64 g(99);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < n; ++i) s(i, j) = g.next_normal_pair().first;

  const Eigen::MatrixXd coeff = topostat::tft(basis, s);
  const Eigen::MatrixXd back = topostat::itft(basis, coeff);
  CHECK((back - s).cwiseAbs().maxCoeff() <= 1e-10);
  for (int j = 0; j < 4; ++j)
    CHECK(coeff.col(j).squaredNorm() ==
          doctest::Approx(s.col(j).squaredNorm()).epsilon(1e-10));

  expect_error([&] { topostat::tft(basis, Eigen::MatrixXd::Zero(n + 1, 2)); },
               ErrorCode::Dimension, "DimensionMismatch");
}

TEST_CASE("subspace energies of pure edge signals on the triangle") {
  const auto basis = topostat::eigendecompose(topostat::hodge_laplacian(filled_triangle(), 1));

  Eigen::Vector3d curl(1.0, -1.0, 1.0);
  auto e = topostat::subspace_energies(basis, curl);
  CHECK(e.curl == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(e.gradient == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(e.harmonic == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(topostat::detect_subspace(basis, curl) == SubspaceLabel::Curl);

  // A gradient flow induced from node values x: s = B_1^T x.
  Eigen::Vector3d grad(-1.0, 1.0, 2.0);  // B_1^T (1, 0, 2)
  CHECK(topostat::detect_subspace(basis, grad) == SubspaceLabel::Gradient);

  // Ties resolve in order Gradient, Curl, Harmonic.
  CHECK(topostat::detect_subspace(basis, Eigen::Vector3d::Zero()) == SubspaceLabel::Gradient);
}

TEST_CASE("subspace operations require a labeled basis") {
  const auto basis = topostat::eigendecompose(topostat::dirac(single_edge()));
  expect_error([&] { topostat::subspace_energies(basis, Eigen::Vector3d::Zero()); },
               ErrorCode::InvalidArgument, "UnlabeledBasis");
  expect_error([&] { topostat::hodge_project(basis, Eigen::MatrixXd::Zero(3, 1)); },
               ErrorCode::InvalidArgument, "UnlabeledBasis");
}

TEST_CASE("hodge projection of a basis edge flow on the triangle") {
  const auto basis = topostat::eigendecompose(topostat::hodge_laplacian(filled_triangle(), 1));
  Eigen::MatrixXd s(3, 1);
  s << 1, 0, 0;
  const auto parts = topostat::hodge_project(basis, s);
  Eigen::Vector3d expected_curl(1.0 / 3, -1.0 / 3, 1.0 / 3);
  CHECK((parts.curl.col(0) - expected_curl).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((parts.gradient.col(0) - (s.col(0) - expected_curl)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(parts.harmonic.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("hodge components are orthogonal and reconstruct the signal") {
  topostat::SplitMix64 g(7);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = SimplicialComplex::random(8, 0.5, 0.5, 300 + seed);
    for (int k = 0; k <= 2; ++k) {
      if (c.count(k) == 0) continue;
      const auto basis = topostat::eigendecompose(topostat::hodge_laplacian(c, k));
      Eigen::VectorXd s(c.count(k));
      for (int i = 0; i < s.size(); ++i) s[i] = g.next_normal_pair().first;
      const auto parts = topostat::hodge_project(basis, s);
      const double scale = s.squaredNorm();
      CHECK(std::abs(parts.gradient.col(0).dot(parts.curl.col(0))) <= 1e-8 * scale);
      CHECK(std::abs(parts.gradient.col(0).dot(parts.harmonic.col(0))) <= 1e-8 * scale);
      CHECK(std::abs(parts.curl.col(0).dot(parts.harmonic.col(0))) <= 1e-8 * scale);
      const Eigen::VectorXd recon = parts.gradient + parts.curl + parts.harmonic;
      CHECK((recon - s).norm() <= 1e-10 * std::max(1.0, s.norm()));
    }
  }
}

TEST_CASE("dirac basis keeps per-order offsets") {
  const auto c = SimplicialComplex::random(7, 0.5, 0.5, 5);
  const auto basis = topostat::eigendecompose(topostat::dirac(c));
  CHECK(basis.operator_kind == OperatorKind::Dirac);
  CHECK(basis.offsets == c.order_offsets());
  CHECK_FALSE(basis.labeled());
}
