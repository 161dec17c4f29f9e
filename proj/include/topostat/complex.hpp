#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "topostat/common.hpp"

namespace topostat {

// A k-simplex is its strictly ascending vertex list (0-based vertex ids).
using Simplex = std::vector<int>;

// Abstract simplicial complex of order K: for each k in 0..K the list of
// k-simplices, each list sorted lexicographically. Vertices are 0..N_0-1.
class SimplicialComplex {
 public:
  SimplicialComplex(int order, std::vector<std::vector<Simplex>> simplices);

  // Erdos-Renyi 1-skeleton on n0 vertices (each pair an edge w.p. p_edge),
  // then every triangle whose three edges are all present is filled w.p.
  // p_tri. Result has order 2 and is deterministic in the seed.
  static SimplicialComplex random(int n0, double p_edge, double p_tri, std::uint64_t seed);

  int order() const { return order_; }
  int count(int k) const;
  int total_size() const;  // N = sum_k N_k
  const std::vector<Simplex>& simplices(int k) const;
  int index_of(int k, const Simplex& s) const;  // -1 when absent
  std::vector<int> order_offsets() const;       // start row of each order in stacked signals

 private:
  int order_;
  std::vector<std::vector<Simplex>> simplices_;
};

// Checks every structural invariant (sorted simplices, sorted deduplicated
// per-order lists, vertex range, inclusion of all faces). Throws Error with
// a message naming the violation: MissingFace, UnsortedSimplex,
// DuplicateSimplex, VertexOutOfRange.
void validate(const SimplicialComplex& complex);

// Signed incidence of (k-1)-simplices vs k-simplices: entry (n, m) is (-1)^i
// when the n-th (k-1)-simplex equals the m-th k-simplex with its i-th vertex
// removed, else 0. Integer-valued and sparse; column m has exactly k+1
// nonzeros.
struct IncidenceMatrix {
  int k = 0;
  Eigen::SparseMatrix<int> entries;  // N_{k-1} x N_k
};

IncidenceMatrix build_incidence(const SimplicialComplex& complex, int k);

// SCF v1 text format:
//   #SCF v1
//   order <K>
//   k <k> <count>   followed by <count> lines of ascending vertex ids
// Lines starting with '#' after the first are comments. read validates the
// complex before returning; parse failures carry the line number.
SimplicialComplex read_scf(std::istream& in);
SimplicialComplex read_scf(const std::string& path);
void write_scf(const SimplicialComplex& complex, std::ostream& out);
void write_scf(const SimplicialComplex& complex, const std::string& path);

}  // namespace topostat
