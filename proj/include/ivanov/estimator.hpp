#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <optional>

#include "ivanov/eigendecomposition.hpp"
#include "ivanov/kernels.hpp"

namespace ivanov {

enum class BisectionStrategy {
  Diagonalised,  // work in the eigenbasis of the Gram matrix
  MatrixSolve,   // repeated SPD solves, no eigendecomposition
};

/// Options for the multiplier search.
///
/// `tolerance` is an absolute tolerance on the multiplier: the search
/// narrows its bracket to at most this width (or to floating-point
/// resolution) before returning. When `radius_tolerance` is set the search
/// instead stops as soon as the effective radius of the current iterate is
/// within that distance of the requested radius, which bounds the RKHS
/// distance between the returned estimator and the exact one by
/// (2 c max(r, s) + c^2)^{1/2}. The multiplier tolerance remains as a
/// fallback stopping rule; that matters for radii near zero, where the
/// radius criterion alone gives no termination guarantee.
template <typename Scalar>
struct BisectionOptions {
  static_assert(std::is_floating_point_v<Scalar>);

  Scalar tolerance = Scalar(1e-10);
  int max_iterations = 200;
  BisectionStrategy strategy = BisectionStrategy::Diagonalised;
  std::optional<Scalar> radius_tolerance;
};

/// A fitted norm-constrained least-squares estimator h(x) = sum_i a_i k(x_i, x).
template <typename Scalar>
struct IvanovFit {
  KernelSpec<Scalar> spec;
  MatrixX<Scalar> design;        // n x d training points
  VectorX<Scalar> coefficients;  // a
  Scalar radius = 0;             // r
  Scalar multiplier = 0;         // value used in place of mu(r)
  Scalar achieved_norm = 0;      // (a^T K a)^{1/2}
  Scalar empirical_sse = 0;      // sum of squared residuals at the design points
};

/// Pointwise projection onto [-c, c].
template <typename Scalar>
Scalar clip(Scalar t, Scalar c) {
  if (t < -c) return -c;
  if (t > c) return c;
  return t;
}

namespace detail {

// The constrained problem rotated into the eigenbasis. Building one of
// these costs a dense matrix-vector product; everything after that is
// linear in the rank, so a grid of radii can share a single instance.
template <typename Scalar>
struct SpectralProblem {
  VectorX<Scalar> eigenvalues;
  VectorX<Scalar> rotated;  // A^T y
  Index rank;
  Scalar n;

  static SpectralProblem make(const GramDecomposition<Scalar>& decomposition,
                              const VectorX<Scalar>& y) {
    if (y.size() != decomposition.size())
      throw std::invalid_argument("response length does not match the decomposition");
    return SpectralProblem{decomposition.eigenvalues, decomposition.orthogonal.transpose() * y,
                           decomposition.rank, Scalar(decomposition.size())};
  }

  // RKHS norm of the ridge solution with penalty level mu.
  Scalar norm_at(Scalar mu) const {
    Scalar sum = 0;
    for (Index i = 0; i < rank; ++i) {
      const Scalar d = eigenvalues[i];
      const Scalar q = d / (d + n * mu);
      sum += q * q / d * rotated[i] * rotated[i];
    }
    return std::sqrt(sum);
  }

  // Norm of the minimum-norm interpolant; the constraint is inactive for
  // radii at or above this value.
  Scalar threshold() const {
    Scalar sum = 0;
    for (Index i = 0; i < rank; ++i) sum += rotated[i] * rotated[i] / eigenvalues[i];
    return std::sqrt(sum);
  }

  // Upper end of the bisection bracket for radius r.
  Scalar bracket(Scalar r) const {
    Scalar weighted = 0;
    for (Index i = 0; i < rank; ++i) weighted += eigenvalues[i] * rotated[i] * rotated[i];
    return std::sqrt(weighted) / (n * r);
  }

  // Eigenbasis coefficients of the estimator with multiplier mu, truncated
  // to the numerically significant modes.
  VectorX<Scalar> weights(Scalar mu) const {
    VectorX<Scalar> w = VectorX<Scalar>::Zero(eigenvalues.size());
    for (Index i = 0; i < rank; ++i) w[i] = rotated[i] / (eigenvalues[i] + n * mu);
    return w;
  }
};

// Shared bisection loop. `norm_at` must be non-increasing in mu. Always
// narrows the bracket to `tolerance`; in the default mode it keeps halving
// beyond that until the effective radius matches r to about 1e-9 relative
// or the bracket reaches floating-point resolution, so the achieved norm
// tracks r as closely as conditioning allows.
template <typename Scalar, typename NormFn>
Scalar bisect_multiplier(NormFn&& norm_at, Scalar lo, Scalar hi, Scalar r,
                         const BisectionOptions<Scalar>& options) {
  const bool radius_mode = options.radius_tolerance.has_value();
  const Scalar radius_goal =
      radius_mode ? *options.radius_tolerance : Scalar(1e-9) * (Scalar(1) + r);

  for (int it = 0; it < options.max_iterations; ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (mid <= lo || mid >= hi) return mid;  // bracket at floating-point resolution
    const Scalar s = norm_at(mid);
    if (s == r) return mid;  // exact root
    const bool radius_ok = std::abs(s - r) <= radius_goal;
    if (radius_ok && (radius_mode || hi - lo <= options.tolerance)) return mid;
    if (s > r)
      lo = mid;
    else
      hi = mid;
  }
  if (hi - lo <= options.tolerance) return (lo + hi) / Scalar(2);
  throw ConvergenceError("bisection: iteration budget exhausted before reaching tolerance");
}

template <typename Scalar>
Scalar solve_mu_prepared(const SpectralProblem<Scalar>& problem, Scalar r,
                         const BisectionOptions<Scalar>& options) {
  if (!(r > Scalar(0))) throw std::invalid_argument("solve_mu: radius must be positive");
  if (r >= problem.threshold()) return Scalar(0);
  return bisect_multiplier([&problem](Scalar mu) { return problem.norm_at(mu); }, Scalar(0),
                           problem.bracket(r), r, options);
}

}  // namespace detail

/// The smallest radius at which the norm constraint becomes inactive,
/// (sum_{i<=m} d_i^{-1} (A^T y)_i^2)^{1/2}. Returns 0 for a zero Gram matrix.
template <typename Scalar>
Scalar mu_zero_threshold(const GramDecomposition<Scalar>& decomposition, const VectorX<Scalar>& y) {
  return detail::SpectralProblem<Scalar>::make(decomposition, y).threshold();
}

/// Multiplier search in the eigenbasis. Returns exactly 0 when the
/// interpolant already fits inside the radius-r ball; otherwise returns the
/// unique positive root of the norm equation, located by interval bisection
/// on [0, (sum_i d_i (A^T y)_i^2)^{1/2} / (n r)].
template <typename Scalar>
Scalar solve_mu(const GramDecomposition<Scalar>& decomposition, const VectorX<Scalar>& y, Scalar r,
                const BisectionOptions<Scalar>& options = {}) {
  return detail::solve_mu_prepared(detail::SpectralProblem<Scalar>::make(decomposition, y), r,
                                   options);
}

/// Multiplier search without diagonalising the Gram matrix. Each step solves
/// the SPD system (K + n mu I) v = y. Never returns a value below the
/// tolerance epsilon: when the constraint is inactive at mu = epsilon the
/// result is epsilon itself.
template <typename Scalar>
Scalar solve_mu_matrix(const MatrixX<Scalar>& K, const VectorX<Scalar>& y, Scalar r,
                       const BisectionOptions<Scalar>& options = {}) {
  const Index n = K.rows();
  if (n < 1 || K.cols() != n) throw std::invalid_argument("solve_mu_matrix: matrix must be square");
  if (y.size() != n) throw std::invalid_argument("solve_mu_matrix: response length mismatch");
  if (!(r > Scalar(0))) throw std::invalid_argument("solve_mu_matrix: radius must be positive");
  const Scalar eps = options.tolerance;
  if (!(eps > Scalar(0))) throw std::invalid_argument("solve_mu_matrix: tolerance must be positive");

  const auto norm_at = [&](Scalar mu) {
    MatrixX<Scalar> shifted = K;
    shifted.diagonal().array() += Scalar(n) * mu;
    Eigen::LDLT<MatrixX<Scalar>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("solve_mu_matrix: factorisation of the shifted Gram matrix failed");
    const VectorX<Scalar> v = ldlt.solve(y);
    return std::sqrt(std::max(Scalar(v.dot(K * v)), Scalar(0)));
  };

  if (r >= norm_at(eps)) return eps;
  const Scalar hi = std::sqrt(std::max(Scalar(y.dot(K * y)), Scalar(0))) / (Scalar(n) * r);
  if (!(hi > eps)) return eps;
  return detail::bisect_multiplier(norm_at, eps, hi, r, options);
}

/// Coefficients a = A w with w_i = (d_i + n mu)^{-1} (A^T y)_i on the
/// numerically significant modes and w_i = 0 beyond them. With mu = 0 this
/// is the minimum-norm interpolant of the projected data.
template <typename Scalar>
VectorX<Scalar> coefficients(const GramDecomposition<Scalar>& decomposition, const VectorX<Scalar>& y,
                             Scalar mu) {
  if (mu < Scalar(0)) throw std::invalid_argument("coefficients: multiplier must be non-negative");
  return decomposition.orthogonal *
         detail::SpectralProblem<Scalar>::make(decomposition, y).weights(mu);
}

/// The radius s with mu(s) = nu: the estimator built with multiplier nu is
/// exactly the norm-constrained estimator of radius s.
template <typename Scalar>
Scalar effective_radius(const GramDecomposition<Scalar>& decomposition, const VectorX<Scalar>& y,
                        Scalar nu) {
  if (!(nu > Scalar(0))) throw std::invalid_argument("effective_radius: multiplier must be positive");
  return detail::SpectralProblem<Scalar>::make(decomposition, y).norm_at(nu);
}

namespace detail {

// The achieved norm is passed in: callers with a spectral factorisation
// evaluate it in the eigenbasis, since the dense quadratic form a^T K a
// loses relative accuracy once the coefficients grow with the inverse of the
// small eigenvalues.
template <typename Scalar>
IvanovFit<Scalar> finish_fit(KernelSpec<Scalar> spec, MatrixX<Scalar> design,
                             const MatrixX<Scalar>& K, const VectorX<Scalar>& y, Scalar r, Scalar mu,
                             VectorX<Scalar> a, Scalar norm) {
  IvanovFit<Scalar> fit{std::move(spec), std::move(design), std::move(a), r, mu, norm, Scalar(0)};
  fit.empirical_sse = (K * fit.coefficients - y).squaredNorm();
  return fit;
}

}  // namespace detail

/// Fit reusing a precomputed Gram matrix and its decomposition. The
/// decomposition is read-only here, so many radii can be fitted from one
/// factorisation.
template <typename Scalar>
IvanovFit<Scalar> fit(const KernelSpec<Scalar>& spec, const MatrixX<Scalar>& points,
                      const MatrixX<Scalar>& K, const GramDecomposition<Scalar>& decomposition,
                      const VectorX<Scalar>& y, Scalar r, const BisectionOptions<Scalar>& options = {}) {
  if (points.rows() != y.size() || points.rows() < 1)
    throw std::invalid_argument("fit: need equally many points and responses, at least one");
  if (r < Scalar(0)) throw std::invalid_argument("fit: radius must be non-negative");
  if (r == Scalar(0))
    return detail::finish_fit(spec, points, K, y, r, Scalar(0),
                              VectorX<Scalar>(VectorX<Scalar>::Zero(y.size())), Scalar(0));
  const auto problem = detail::SpectralProblem<Scalar>::make(decomposition, y);
  const Scalar mu = detail::solve_mu_prepared(problem, r, options);
  return detail::finish_fit(spec, points, K, y, r, mu,
                            VectorX<Scalar>(decomposition.orthogonal * problem.weights(mu)),
                            problem.norm_at(mu));
}

/// Fit the norm-constrained least-squares estimator of radius r.
template <typename Scalar>
IvanovFit<Scalar> fit(const KernelSpec<Scalar>& spec, const MatrixX<Scalar>& points,
                      const VectorX<Scalar>& y, Scalar r, const BisectionOptions<Scalar>& options = {}) {
  if (points.rows() != y.size() || points.rows() < 1)
    throw std::invalid_argument("fit: need equally many points and responses, at least one");
  if (r < Scalar(0)) throw std::invalid_argument("fit: radius must be non-negative");

  const MatrixX<Scalar> K = gram_matrix(spec, points);
  if (r == Scalar(0))
    return detail::finish_fit(spec, points, K, y, r, Scalar(0),
                              VectorX<Scalar>(VectorX<Scalar>::Zero(y.size())), Scalar(0));

  if (options.strategy == BisectionStrategy::MatrixSolve) {
    const Index n = points.rows();
    const Scalar mu = solve_mu_matrix(K, y, r, options);
    MatrixX<Scalar> shifted = K;
    shifted.diagonal().array() += Scalar(n) * mu;
    const VectorX<Scalar> a = Eigen::LDLT<MatrixX<Scalar>>(shifted).solve(y);
    const Scalar norm = std::sqrt(std::max(Scalar(a.dot(K * a)), Scalar(0)));
    return detail::finish_fit(spec, points, K, y, r, mu, a, norm);
  }

  const GramDecomposition<Scalar> decomposition = eigh(K);
  return fit(spec, points, K, decomposition, y, r, options);
}

/// Evaluate the fitted estimator at a single point.
template <typename Scalar, typename Derived>
Scalar predict(const IvanovFit<Scalar>& fit, const Eigen::MatrixBase<Derived>& x) {
  detail::check_in_domain(fit.spec, x);
  Scalar sum = 0;
  for (Index i = 0; i < fit.design.rows(); ++i)
    sum += fit.coefficients[i] *
           detail::eval_unchecked(fit.spec, fit.design.row(i).transpose(), x);
  return sum;
}

/// Evaluate the fitted estimator at every row of `points`.
template <typename Scalar>
VectorX<Scalar> predict(const IvanovFit<Scalar>& fit, const MatrixX<Scalar>& points) {
  return kernel_matrix(fit.spec, points, fit.design) * fit.coefficients;
}

}  // namespace ivanov
