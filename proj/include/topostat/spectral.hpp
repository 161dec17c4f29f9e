#pragma once

#include <vector>

#include <Eigen/Dense>

#include "topostat/complex.hpp"

namespace topostat {

enum class OperatorKind { Hodge, Dirac };

// Symmetric operator acting on stacked simplicial signals. For Hodge(k) the
// lower/upper parts B_k^T B_k and B_{k+1} B_{k+1}^T are kept separately (the
// boundary terms vanish at k = 0 resp. k = K). For Dirac the matrix is the
// (K+1)x(K+1) block tridiagonal with B_{k+1} above the diagonal and B_k^T
// below, acting on all orders at once; offsets give each order's start row.
struct TopologicalOperator {
  OperatorKind kind = OperatorKind::Hodge;
  int hodge_k = -1;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd lower;  // Hodge only
  Eigen::MatrixXd upper;  // Hodge only
  std::vector<int> offsets;
  int size() const { return static_cast<int>(matrix.rows()); }
};

TopologicalOperator hodge_laplacian(const SimplicialComplex& complex, int k);
TopologicalOperator dirac(const SimplicialComplex& complex);

enum class SubspaceLabel : char { Gradient = 'G', Curl = 'C', Harmonic = 'H' };

// Orthonormal eigenbasis of a topological operator, eigenvalues ascending.
// Deterministic sign convention: each column's largest-magnitude entry is
// positive (first such entry on ties). For Hodge operators every column is
// labeled Gradient / Curl / Harmonic; Dirac bases are unlabeled.
struct SpectralBasis {
  OperatorKind operator_kind = OperatorKind::Hodge;
  int hodge_k = -1;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::vector<SubspaceLabel> labels;
  std::vector<int> offsets;
  int size() const { return static_cast<int>(eigenvalues.size()); }
  bool labeled() const { return !labels.empty(); }
  std::vector<int> indices_with(SubspaceLabel label) const;
};

// Eigenvalue clusters closer than tau0 = 1e-8 * max(lambda_max, 1) are
// re-diagonalized against the lower Laplacian part so each column lies in a
// single Hodge subspace; classification thresholds energies at tau_s = 1e-8.
SpectralBasis eigendecompose(const TopologicalOperator& op);

// Forward/inverse transform: coefficients = U^T s, signal = U c.
Eigen::MatrixXd tft(const SpectralBasis& basis, const Eigen::MatrixXd& signals);
Eigen::MatrixXd itft(const SpectralBasis& basis, const Eigen::MatrixXd& coefficients);

struct SubspaceEnergies {
  double gradient = 0.0;
  double curl = 0.0;
  double harmonic = 0.0;
};

// Squared norms of the signal's projection onto each labeled subspace.
// Requires a labeled (Hodge) basis.
SubspaceEnergies subspace_energies(const SpectralBasis& basis, const Eigen::VectorXd& signal);

// Label with the largest energy; ties resolved Gradient, Curl, Harmonic.
SubspaceLabel detect_subspace(const SpectralBasis& basis, const Eigen::VectorXd& signal);

struct HodgeComponents {
  Eigen::MatrixXd gradient;
  Eigen::MatrixXd curl;
  Eigen::MatrixXd harmonic;
};

// Columnwise orthogonal decomposition s = s_G + s_C + s_H.
HodgeComponents hodge_project(const SpectralBasis& basis, const Eigen::MatrixXd& signals);

}  // namespace topostat
