#include "topostat/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace topostat {

namespace {

Eigen::MatrixXd to_dense(const Eigen::SparseMatrix<int>& m) {
  return Eigen::MatrixXi(m).cast<double>();
}

// Make the largest-magnitude entry of each column positive; first occurrence
// wins on ties so the convention is deterministic.
void fix_signs(Eigen::MatrixXd& vectors) {
  for (int j = 0; j < vectors.cols(); ++j) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

}  // namespace

std::vector<int> SpectralBasis::indices_with(SubspaceLabel label) const {
  std::vector<int> out;
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(static_cast<int>(i));
  return out;
}

TopologicalOperator hodge_laplacian(const SimplicialComplex& complex, int k) {
  if (k < 0 || k > complex.order())
    fail(ErrorCode::InvalidArgument,
         "OrderOutOfRange: hodge laplacian defined for 0 <= k <= " +
             std::to_string(complex.order()));
  const int nk = complex.count(k);

  TopologicalOperator op;
  op.kind = OperatorKind::Hodge;
  op.hodge_k = k;
  op.offsets = {0};
  op.lower = Eigen::MatrixXd::Zero(nk, nk);
  op.upper = Eigen::MatrixXd::Zero(nk, nk);
  if (k >= 1) {
    const auto b = build_incidence(complex, k);
    const Eigen::SparseMatrix<int> bt = b.entries.transpose();
    op.lower = to_dense((bt * b.entries).eval());
  }
  if (k < complex.order() && complex.count(k + 1) > 0) {
    const auto b = build_incidence(complex, k + 1);
    const Eigen::SparseMatrix<int> bt = b.entries.transpose();
    op.upper = to_dense((b.entries * bt).eval());
  }
  op.matrix = op.lower + op.upper;
  return op;
}

TopologicalOperator dirac(const SimplicialComplex& complex) {
  const int n = complex.total_size();
  const auto off = complex.order_offsets();

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= complex.order(); ++k) {
    if (complex.count(k) == 0) continue;
    const Eigen::MatrixXd bk = to_dense(build_incidence(complex, k).entries);
    d.block(off[k - 1], off[k], bk.rows(), bk.cols()) = bk;
    d.block(off[k], off[k - 1], bk.cols(), bk.rows()) = bk.transpose();
  }

  TopologicalOperator op;
  op.kind = OperatorKind::Dirac;
  op.matrix = std::move(d);
  op.offsets = off;
  return op;
}

SpectralBasis eigendecompose(const TopologicalOperator& op) {
  SpectralBasis basis;
  basis.operator_kind = op.kind;
  basis.hodge_k = op.hodge_k;
  basis.offsets = op.offsets;

  const int n = op.size();
  if (n == 0) {
    basis.eigenvalues = Eigen::VectorXd(0);
    basis.eigenvectors = Eigen::MatrixXd(0, 0);
    return basis;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::Convergence, "ConvergenceFailure: eigensolver did not converge");
  basis.eigenvalues = es.eigenvalues();
  basis.eigenvectors = es.eigenvectors();

  if (op.kind == OperatorKind::Hodge) {
    const double lambda_max = basis.eigenvalues.cwiseAbs().maxCoeff();
    const double tau0 = 1e-8 * std::max(lambda_max, 1.0);
    const double tau_s = 1e-8;

    // Re-diagonalize each near-degenerate eigenvalue cluster against the
    // lower part so every column lands in a single Hodge subspace (within a
    // cluster the lower part acts as lambda on gradient directions and as 0
    // on curl/harmonic directions).
    int start = 0;
    while (start < n) {
      int end = start + 1;
      while (end < n && basis.eigenvalues[end] - basis.eigenvalues[end - 1] < tau0) ++end;
      const int c = end - start;
      if (c > 1) {
        const Eigen::MatrixXd v = basis.eigenvectors.middleCols(start, c);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cluster(v.transpose() * op.lower * v);
        if (cluster.info() != Eigen::Success)
          fail(ErrorCode::Convergence, "ConvergenceFailure: cluster re-diagonalization failed");
        basis.eigenvectors.middleCols(start, c) = v * cluster.eigenvectors();
      }
      start = end;
    }

    fix_signs(basis.eigenvectors);

    basis.labels.resize(n);
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd u = basis.eigenvectors.col(j);
      const double eg = u.dot(op.lower * u);
      const double ec = u.dot(op.upper * u);
      if (eg > tau_s && ec <= tau_s)
        basis.labels[j] = SubspaceLabel::Gradient;
      else if (ec > tau_s && eg <= tau_s)
        basis.labels[j] = SubspaceLabel::Curl;
      else if (eg <= tau_s && ec <= tau_s)
        basis.labels[j] = SubspaceLabel::Harmonic;
      else
        basis.labels[j] = eg >= ec ? SubspaceLabel::Gradient : SubspaceLabel::Curl;
    }
  } else {
    fix_signs(basis.eigenvectors);
  }
  return basis;
}

Eigen::MatrixXd tft(const SpectralBasis& basis, const Eigen::MatrixXd& signals) {
  if (signals.rows() != basis.size())
    fail(ErrorCode::Dimension,
         "DimensionMismatch: signal has " + std::to_string(signals.rows()) +
             " rows, basis has " + std::to_string(basis.size()));
  return basis.eigenvectors.transpose() * signals;
}

Eigen::MatrixXd itft(const SpectralBasis& basis, const Eigen::MatrixXd& coefficients) {
  if (coefficients.rows() != basis.size())
    fail(ErrorCode::Dimension,
         "DimensionMismatch: coefficients have " + std::to_string(coefficients.rows()) +
             " rows, basis has " + std::to_string(basis.size()));
  return basis.eigenvectors * coefficients;
}

SubspaceEnergies subspace_energies(const SpectralBasis& basis, const Eigen::VectorXd& signal) {
  if (!basis.labeled())
    fail(ErrorCode::InvalidArgument,
         "UnlabeledBasis: subspace energies require a labeled Hodge basis");
  const Eigen::VectorXd coeff = tft(basis, signal);
  SubspaceEnergies e;
  for (int i = 0; i < coeff.size(); ++i) {
    const double q = coeff[i] * coeff[i];
    switch (basis.labels[i]) {
      case SubspaceLabel::Gradient: e.gradient += q; break;
      case SubspaceLabel::Curl: e.curl += q; break;
      case SubspaceLabel::Harmonic: e.harmonic += q; break;
    }
  }
  return e;
}

SubspaceLabel detect_subspace(const SpectralBasis& basis, const Eigen::VectorXd& signal) {
  const auto e = subspace_energies(basis, signal);
  if (e.gradient >= e.curl && e.gradient >= e.harmonic) return SubspaceLabel::Gradient;
  if (e.curl >= e.harmonic) return SubspaceLabel::Curl;
  return SubspaceLabel::Harmonic;
}

HodgeComponents hodge_project(const SpectralBasis& basis, const Eigen::MatrixXd& signals) {
  if (!basis.labeled())
    fail(ErrorCode::InvalidArgument,
         "UnlabeledBasis: hodge projection requires a labeled Hodge basis");
  const Eigen::MatrixXd coeff = tft(basis, signals);
  Eigen::MatrixXd cg = coeff, cc = coeff, ch = coeff;
  for (int i = 0; i < basis.size(); ++i) {
    if (basis.labels[i] != SubspaceLabel::Gradient) cg.row(i).setZero();
    if (basis.labels[i] != SubspaceLabel::Curl) cc.row(i).setZero();
    if (basis.labels[i] != SubspaceLabel::Harmonic) ch.row(i).setZero();
  }
  HodgeComponents parts;
  parts.gradient = itft(basis, cg);
  parts.curl = itft(basis, cc);
  parts.harmonic = itft(basis, ch);
  return parts;
}

}  // namespace topostat
