#pragma once

#include <Eigen/Eigenvalues>

#include "ivanov/core.hpp"

namespace ivanov {

/// Spectral factorisation K = A diag(d) A^T of a positive semi-definite
/// Gram matrix, with eigenvalues sorted non-increasing and clamped at zero.
/// `rank` counts the eigenvalues above rank_tolerance * d[0].
template <typename Scalar>
struct GramDecomposition {
  static_assert(std::is_floating_point_v<Scalar>);

  MatrixX<Scalar> orthogonal;   // columns are eigenvectors
  VectorX<Scalar> eigenvalues;  // non-increasing, >= 0
  Index rank = 0;
  Scalar rank_tolerance = Scalar(1e-10);

  Index size() const { return eigenvalues.size(); }
};

/// Deterministic symmetric eigendecomposition with PSD clamping.
///
/// Eigenvalues in [-1e-8 * d_max, 0) are treated as rounding noise and
/// clamped to zero; anything below that threshold raises
/// NotPositiveSemidefiniteError. Asymmetric input (beyond 1e-9 relative)
/// raises std::invalid_argument.
template <typename Scalar>
GramDecomposition<Scalar> eigh(const MatrixX<Scalar>& K, Scalar rank_tolerance = Scalar(1e-10)) {
  const Index n = K.rows();
  if (n < 1 || K.cols() != n) throw std::invalid_argument("eigh: matrix must be square and non-empty");
  if (!(rank_tolerance > Scalar(0))) throw std::invalid_argument("eigh: rank tolerance must be positive");

  const Scalar scale = std::max(Scalar(1), K.cwiseAbs().maxCoeff());
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-9) * scale)
    throw std::invalid_argument("eigh: matrix is not symmetric");

  // Symmetrise exactly so the solver sees one canonical input.
  MatrixX<Scalar> S = (K + K.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(S);
  if (solver.info() != Eigen::Success) throw NumericError("eigh: eigensolver failed to converge");

  GramDecomposition<Scalar> out;
  out.rank_tolerance = rank_tolerance;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.orthogonal = solver.eigenvectors().rowwise().reverse();

  const Scalar d_max = std::max(out.eigenvalues[0], Scalar(0));
  for (Index i = 0; i < n; ++i) {
    Scalar& d = out.eigenvalues[i];
    if (d < -Scalar(1e-8) * d_max)
      throw NotPositiveSemidefiniteError("eigh: eigenvalue below the positive semi-definite tolerance");
    if (d < Scalar(0)) d = Scalar(0);
  }

  Index m = 0;
  while (m < n && out.eigenvalues[m] > rank_tolerance * d_max) ++m;
  out.rank = m;
  return out;
}

template <typename Scalar>
Index rank_of(const GramDecomposition<Scalar>& decomposition) {
  return decomposition.rank;
}

}  // namespace ivanov
