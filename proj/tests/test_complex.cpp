#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "doctest.h"
#include "test_util.hpp"
#include "topostat/complex.hpp"

using topostat::ErrorCode;
using topostat::IncidenceMatrix;
using topostat::Simplex;
using topostat::SimplicialComplex;
using test_util::expect_error;

namespace {

SimplicialComplex filled_triangle() {
  return SimplicialComplex(2, {{{0}, {1}, {2}}, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}}});
}

SimplicialComplex hollow_triangle() {
  return SimplicialComplex(1, {{{0}, {1}, {2}}, {{0, 1}, {0, 2}, {1, 2}}});
}

SimplicialComplex solid_tetrahedron() {
  return SimplicialComplex(
      3, {{{0}, {1}, {2}, {3}},
          {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}},
          {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}},
          {{0, 1, 2, 3}}});
}

Eigen::MatrixXi dense(const IncidenceMatrix& b) { return Eigen::MatrixXi(b.entries); }

}  // namespace

TEST_CASE("validate accepts well-formed complexes") {
  CHECK_NOTHROW(topostat::validate(filled_triangle()));
  CHECK_NOTHROW(topostat::validate(hollow_triangle()));
  CHECK_NOTHROW(topostat::validate(solid_tetrahedron()));
  // Trailing empty orders are allowed.
  CHECK_NOTHROW(topostat::validate(SimplicialComplex(2, {{{0}, {1}}, {{0, 1}}, {}})));
}

TEST_CASE("validate rejects structural violations") {
  expect_error([] { topostat::validate(SimplicialComplex(1, {{{0}, {1}}, {{1, 0}}})); },
               ErrorCode::Validation, "UnsortedSimplex");
  expect_error([] { topostat::validate(SimplicialComplex(1, {{{0}, {1}}, {{0, 0}}})); },
               ErrorCode::Validation, "UnsortedSimplex");
  expect_error(
      [] { topostat::validate(SimplicialComplex(1, {{{0}, {1}}, {{0, 1}, {0, 1}}})); },
      ErrorCode::Validation, "DuplicateSimplex");
  expect_error([] { topostat::validate(SimplicialComplex(1, {{{0}, {1}}, {{0, 5}}})); },
               ErrorCode::Validation, "VertexOutOfRange");
  // Vertex list must be exactly 0..N_0-1.
  expect_error([] { topostat::validate(SimplicialComplex(0, {{{0}, {2}}})); },
               ErrorCode::Validation, "VertexOutOfRange");
  // Triangle without one of its edges.
  expect_error(
      [] {
        topostat::validate(
            SimplicialComplex(2, {{{0}, {1}, {2}}, {{0, 1}, {0, 2}}, {{0, 1, 2}}}));
      },
      ErrorCode::Validation, "MissingFace");
  // Per-order list must be lexicographically sorted.
  expect_error(
      [] { topostat::validate(SimplicialComplex(1, {{{0}, {1}, {2}}, {{0, 2}, {0, 1}}})); },
      ErrorCode::Validation, "UnsortedSimplex");
}

TEST_CASE("incidence of the filled triangle matches hand computation") {
  const auto c = filled_triangle();

  const auto b1 = build_incidence(c, 1);
  Eigen::MatrixXi expected_b1(3, 3);
  // columns: {0,1}, {0,2}, {1,2}; removing vertex i contributes (-1)^i
  expected_b1 << -1, -1, 0, 1, 0, -1, 0, 1, 1;
  CHECK(dense(b1) == expected_b1);

  const auto b2 = build_incidence(c, 2);
  Eigen::MatrixXi expected_b2(3, 1);
  expected_b2 << 1, -1, 1;
  CHECK(dense(b2) == expected_b2);

  // Chain complex property, exact in integer arithmetic.
  Eigen::MatrixXi prod = (b1.entries * b2.entries).toDense();
  CHECK(prod.cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("incidence columns have exactly k+1 nonzeros") {
  const auto c = solid_tetrahedron();
  for (int k = 1; k <= 3; ++k) {
    const auto b = build_incidence(c, k);
    for (int col = 0; col < b.entries.outerSize(); ++col) {
      int nnz = 0;
      for (Eigen::SparseMatrix<int>::InnerIterator it(b.entries, col); it; ++it) {
        CHECK((it.value() == 1 || it.value() == -1));
        ++nnz;
      }
      CHECK(nnz == k + 1);
    }
  }
}

TEST_CASE("chain complex exactness on the tetrahedron") {
  const auto c = solid_tetrahedron();
  const auto b1 = build_incidence(c, 1);
  const auto b2 = build_incidence(c, 2);
  const auto b3 = build_incidence(c, 3);
  CHECK((b1.entries * b2.entries).toDense().cwiseAbs().maxCoeff() == 0);
  CHECK((b2.entries * b3.entries).toDense().cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("incidence with an empty order has zero columns") {
  const SimplicialComplex c(2, {{{0}, {1}, {2}}, {{0, 1}, {0, 2}, {1, 2}}, {}});
  const auto b2 = build_incidence(c, 2);
  CHECK(b2.entries.rows() == 3);
  CHECK(b2.entries.cols() == 0);
}

TEST_CASE("incidence order bounds") {
  const auto c = filled_triangle();
  expect_error([&] { build_incidence(c, 0); }, ErrorCode::InvalidArgument, "OrderOutOfRange");
  expect_error([&] { build_incidence(c, 3); }, ErrorCode::InvalidArgument, "OrderOutOfRange");
}

TEST_CASE("random complexes are deterministic in the seed") {
  const auto a = SimplicialComplex::random(12, 0.4, 0.5, 77);
  const auto b = SimplicialComplex::random(12, 0.4, 0.5, 77);
  REQUIRE(a.order() == b.order());
  for (int k = 0; k <= a.order(); ++k) CHECK(a.simplices(k) == b.simplices(k));

  const auto c = SimplicialComplex::random(12, 0.4, 0.5, 78);
  bool differs = false;
  for (int k = 0; k <= 2; ++k)
    if (a.simplices(k) != c.simplices(k)) differs = true;
  CHECK(differs);
}

TEST_CASE("random complex edge probabilities 0 and 1") {
  const auto full = SimplicialComplex::random(3, 1.0, 1.0, 5);
  CHECK(full.count(0) == 3);
  CHECK(full.count(1) == 3);
  CHECK(full.count(2) == 1);

  const auto empty = SimplicialComplex::random(10, 0.0, 1.0, 5);
  CHECK(empty.order() == 2);
  CHECK(empty.count(0) == 10);
  CHECK(empty.count(1) == 0);
  CHECK(empty.count(2) == 0);
}

TEST_CASE("random complexes validate over many draws") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n0 = 4 + static_cast<int>(seed % 9);
    const auto c = SimplicialComplex::random(n0, 0.5, 0.5, seed);
    CHECK_NOTHROW(topostat::validate(c));
    CHECK(c.total_size() == c.count(0) + c.count(1) + c.count(2));
  }
}

TEST_CASE("order offsets stack per-order blocks") {
  const auto c = filled_triangle();
  const auto off = c.order_offsets();
  REQUIRE(off.size() == 3);
  CHECK(off[0] == 0);
  CHECK(off[1] == 3);
  CHECK(off[2] == 6);
  CHECK(c.total_size() == 7);
}

TEST_CASE("scf round trip preserves the complex") {
  for (std::uint64_t seed : {1ull, 9ull, 42ull}) {
    const auto c = SimplicialComplex::random(9, 0.5, 0.6, seed);
    std::stringstream ss;
    topostat::write_scf(c, ss);
    const auto back = topostat::read_scf(ss);
    REQUIRE(back.order() == c.order());
    for (int k = 0; k <= c.order(); ++k) CHECK(back.simplices(k) == c.simplices(k));
  }
}

TEST_CASE("scf file round trip") {
  const auto c = SimplicialComplex::random(7, 0.6, 0.5, 3);
  const std::string path = "scf_roundtrip_tmp.scf";
  topostat::write_scf(c, path);
  const auto back = topostat::read_scf(path);
  for (int k = 0; k <= c.order(); ++k) CHECK(back.simplices(k) == c.simplices(k));
  std::remove(path.c_str());
}

TEST_CASE("scf parser reports malformed input with line numbers") {
  expect_error([] { std::stringstream ss("#NOT-SCF\n"); topostat::read_scf(ss); },
               ErrorCode::Parse, "ParseError");
  expect_error(
      [] {
        std::stringstream ss("#SCF v1\norder 1\nk 0 2\n0\n1\nk 1 2\n0 1\n");
        topostat::read_scf(ss);  // promised two edges, got one
      },
      ErrorCode::Parse, "ParseError");
  expect_error(
      [] {
        std::stringstream ss("#SCF v1\norder 0\nk 0 1\nzero\n");
        topostat::read_scf(ss);
      },
      ErrorCode::Parse, "ParseError");
  // Structurally broken content parses but fails validation.
  expect_error(
      [] {
        std::stringstream ss("#SCF v1\norder 1\nk 0 2\n0\n1\nk 1 1\n0 3\n");
        topostat::read_scf(ss);
      },
      ErrorCode::Validation, "VertexOutOfRange");
}

TEST_CASE("scf accepts comments and trailing empty orders") {
  std::stringstream ss(
      "#SCF v1\n"
      "# generated by hand\n"
      "order 2\n"
      "k 0 3\n0\n1\n2\n"
      "# edges\n"
      "k 1 3\n0 1\n0 2\n1 2\n"
      "k 2 0\n");
  const auto c = topostat::read_scf(ss);
  CHECK(c.order() == 2);
  CHECK(c.count(1) == 3);
  CHECK(c.count(2) == 0);
}

TEST_CASE("index_of finds simplices in sorted lists") {
  const auto c = solid_tetrahedron();
  CHECK(c.index_of(1, {0, 3}) == 2);
  CHECK(c.index_of(1, {2, 3}) == 5);
  CHECK(c.index_of(2, {0, 2, 3}) == 2);
  CHECK(c.index_of(1, {1, 4}) == -1);
}
