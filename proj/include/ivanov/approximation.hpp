#pragma once

#include <cmath>
#include <utility>

#include "ivanov/estimator.hpp"

namespace ivanov {

/// A finitely supported covariate distribution: points with non-negative
/// weights summing to one.
template <typename Scalar>
struct DiscreteDesign {
  MatrixX<Scalar> points;   // m x d
  VectorX<Scalar> weights;  // sums to 1 within 1e-12

  void validate() const {
    if (points.rows() < 1) throw std::invalid_argument("DiscreteDesign: need at least one point");
    if (weights.size() != points.rows())
      throw std::invalid_argument("DiscreteDesign: one weight per point required");
    if ((weights.array() < Scalar(0)).any())
      throw std::invalid_argument("DiscreteDesign: weights must be non-negative");
    if (std::abs(weights.sum() - Scalar(1)) > Scalar(1e-12))
      throw std::invalid_argument("DiscreteDesign: weights must sum to one");
  }

  static DiscreteDesign uniform(MatrixX<Scalar> pts) {
    const Index m = pts.rows();
    if (m < 1) throw std::invalid_argument("DiscreteDesign: need at least one point");
    return DiscreteDesign{std::move(pts), VectorX<Scalar>::Constant(m, Scalar(1) / Scalar(m))};
  }
};

/// Squared L^2(P) distance from a target function (given by its values on a
/// discrete design) to the radius-r ball of the RKHS.
///
/// The infimum over the whole space is attained on the span of the kernel
/// sections at the design points, because orthogonal projection onto that
/// span preserves values there. With the weighted Gram matrix
/// B = W^{1/2} K W^{1/2} and target W^{1/2} g, the problem is exactly the
/// norm-constrained least-squares problem solved by the estimator machinery,
/// so one spectral factorisation serves every radius.
template <typename Scalar>
class L2BallDistance {
  static_assert(std::is_floating_point_v<Scalar>);

 public:
  L2BallDistance(const KernelSpec<Scalar>& spec, const DiscreteDesign<Scalar>& design,
                 const VectorX<Scalar>& g_values) {
    design.validate();
    if (g_values.size() != design.points.rows())
      throw std::invalid_argument("L2BallDistance: one target value per design point required");

    const VectorX<Scalar> root_w = design.weights.cwiseSqrt();
    MatrixX<Scalar> weighted = gram_matrix(spec, design.points);
    weighted = root_w.asDiagonal() * weighted * root_w.asDiagonal();
    const VectorX<Scalar> target = root_w.cwiseProduct(g_values);

    value_at_zero_ = target.squaredNorm();
    decomposition_ = eigh(weighted);
    problem_ = detail::SpectralProblem<Scalar>::make(decomposition_, target);
    threshold_ = problem_.threshold();

    base_residual_ = 0;  // squared distance from the target to the whole span
    for (Index i = problem_.rank; i < problem_.rotated.size(); ++i)
      base_residual_ += problem_.rotated[i] * problem_.rotated[i];
  }

  /// Distance value at radius r (exact up to the multiplier search, which
  /// runs to floating-point resolution).
  Scalar operator()(Scalar r) const {
    if (r < Scalar(0)) throw std::invalid_argument("L2BallDistance: radius must be non-negative");
    if (r == Scalar(0)) return value_at_zero_;
    if (r >= threshold_) return base_residual_;

    BisectionOptions<Scalar> options;
    options.tolerance = Scalar(0);  // run the bracket down to floating-point resolution
    // Adjacent doubles are reached after at most ~(exponent range + mantissa)
    // halvings, so this budget guarantees the stall exit fires.
    options.max_iterations = 2400;
    const Scalar mu = detail::solve_mu_prepared(problem_, r, options);

    // Residual of the constrained fit, mode by mode.
    Scalar sum = base_residual_;
    for (Index i = 0; i < problem_.rank; ++i) {
      const Scalar d = problem_.eigenvalues[i];
      const Scalar miss = problem_.n * mu / (d + problem_.n * mu);
      sum += miss * miss * problem_.rotated[i] * problem_.rotated[i];
    }
    return sum;
  }

  /// Norm of the minimum-norm span element matching the target where it can
  /// be matched; the distance is flat beyond this radius.
  Scalar threshold_radius() const { return threshold_; }

  /// Squared weighted norm of the target (the distance at r = 0).
  Scalar value_at_zero() const { return value_at_zero_; }

 private:
  GramDecomposition<Scalar> decomposition_;
  detail::SpectralProblem<Scalar> problem_;
  Scalar threshold_ = 0;
  Scalar value_at_zero_ = 0;
  Scalar base_residual_ = 0;
};

/// One-shot form of L2BallDistance.
template <typename Scalar>
Scalar approx_error_l2(const KernelSpec<Scalar>& spec, const DiscreteDesign<Scalar>& design,
                       const VectorX<Scalar>& g_values, Scalar r) {
  return L2BallDistance<Scalar>(spec, design, g_values)(r);
}

namespace detail {

// Feasibility of interpolating g within a sup-norm tube of half-width tau
// using a function of RKHS norm at most r, decided through the dual of the
// minimum-norm tube interpolation problem. Coordinate descent ascends the
// dual; a dual value above r^2/2 certifies infeasibility, while a primal
// iterate inside both the tube and the ball certifies feasibility.
template <typename Scalar>
class TubeFeasibility {
 public:
  TubeFeasibility(const MatrixX<Scalar>& K, const VectorX<Scalar>& g)
      : K_(K), g_(g), beta_(VectorX<Scalar>::Zero(g.size())), fitted_(VectorX<Scalar>::Zero(g.size())) {}

  bool feasible(Scalar tau, Scalar r) {
    const Index m = g_.size();
    const Scalar r_sq = r * r;

    // Points whose kernel section vanishes cannot be moved at all.
    for (Index i = 0; i < m; ++i)
      if (K_(i, i) <= Scalar(0) && std::abs(g_[i]) > tau * (Scalar(1) + slack_) + tiny_) return false;

    beta_.setZero();
    fitted_.setZero();
    for (int sweep = 0; sweep < max_sweeps_; ++sweep) {
      Scalar largest_step = 0;
      for (Index i = 0; i < m; ++i) {
        const Scalar kii = K_(i, i);
        if (kii <= Scalar(0)) continue;
        const Scalar rest = fitted_[i] - kii * beta_[i];
        const Scalar raw = g_[i] - rest;
        Scalar updated = 0;
        if (raw > tau)
          updated = (raw - tau) / kii;
        else if (raw < -tau)
          updated = (raw + tau) / kii;
        const Scalar step = updated - beta_[i];
        if (step != Scalar(0)) {
          fitted_ += step * K_.col(i);
          beta_[i] = updated;
          largest_step = std::max(largest_step, std::abs(step));
        }
      }

      const Scalar norm_sq = beta_.dot(fitted_);
      const Scalar dual = beta_.dot(g_) - norm_sq / Scalar(2) - tau * beta_.template lpNorm<1>();
      if (dual > r_sq / Scalar(2) * (Scalar(1) + slack_) + tiny_) return false;

      bool in_tube = true;
      for (Index i = 0; i < m && in_tube; ++i)
        if (std::abs(fitted_[i] - g_[i]) > tau * (Scalar(1) + slack_) + tiny_) in_tube = false;
      if (in_tube && norm_sq <= r_sq * (Scalar(1) + slack_) + tiny_) return true;

      if (largest_step <= tiny_) break;  // converged without either certificate
    }
    return false;  // undecided counts as infeasible, keeping the outer estimate an upper bound
  }

 private:
  static constexpr Scalar slack_ = Scalar(1e-9);
  static constexpr Scalar tiny_ = Scalar(1e-13);
  static constexpr int max_sweeps_ = 4000;

  const MatrixX<Scalar>& K_;
  const VectorX<Scalar>& g_;
  VectorX<Scalar> beta_;
  VectorX<Scalar> fitted_;
};

}  // namespace detail

/// Squared sup-norm distance, over the design points, from the target values
/// to the radius-r ball of the RKHS.
///
/// Computed by bisecting the tube half-width with a feasibility check per
/// level; `levels` is the number of bisection levels. The result is an upper
/// estimate: the returned level is always certified feasible. Accuracy is
/// limited by the level bisection, about 1e-6 at the default depth, on top
/// of which the restriction to the design points makes this a lower bound
/// for the sup-norm distance over the whole covariate set.
template <typename Scalar>
Scalar approx_error_sup(const KernelSpec<Scalar>& spec, const DiscreteDesign<Scalar>& design,
                        const VectorX<Scalar>& g_values, Scalar r, int levels = 60) {
  design.validate();
  if (g_values.size() != design.points.rows())
    throw std::invalid_argument("approx_error_sup: one target value per design point required");
  if (r < Scalar(0)) throw std::invalid_argument("approx_error_sup: radius must be non-negative");
  if (levels < 1) throw std::invalid_argument("approx_error_sup: need at least one level");

  const MatrixX<Scalar> K = gram_matrix(spec, design.points);

  // Exact shortcut: a target realisable inside the ball has distance zero.
  if (r > Scalar(0)) {
    const GramDecomposition<Scalar> decomposition = eigh(K);
    const auto problem = detail::SpectralProblem<Scalar>::make(decomposition, g_values);
    Scalar outside = 0;
    for (Index i = problem.rank; i < problem.rotated.size(); ++i)
      outside += problem.rotated[i] * problem.rotated[i];
    if (outside <= Scalar(1e-18) * std::max(Scalar(1), g_values.squaredNorm()) &&
        problem.threshold() <= r)
      return Scalar(0);
  }

  detail::TubeFeasibility<Scalar> feasibility(K, g_values);
  Scalar hi = g_values.cwiseAbs().maxCoeff();  // the zero function is always in the ball
  if (hi == Scalar(0)) return Scalar(0);
  Scalar lo = 0;
  for (int level = 0; level < levels; ++level) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    if (feasibility.feasible(mid, r))
      hi = mid;
    else
      lo = mid;
  }
  return hi * hi;
}

/// Decay bound for the squared distance to the ball when the target lies in
/// an interpolation space of parameter beta with norm bound b:
/// b^{2/(1-beta)} r^{-2 beta/(1-beta)}.
template <typename Scalar>
Scalar interpolation_bound(Scalar b, Scalar beta, Scalar r) {
  if (!(beta > Scalar(0)) || !(beta < Scalar(1)))
    throw std::invalid_argument("interpolation_bound: beta must lie in (0, 1)");
  if (!(b > Scalar(0)) || !(r > Scalar(0)))
    throw std::invalid_argument("interpolation_bound: norm bound and radius must be positive");
  return std::pow(b, Scalar(2) / (Scalar(1) - beta)) *
         std::pow(r, -Scalar(2) * beta / (Scalar(1) - beta));
}

/// K-functional of the pair (L^2 of the design measure, RKHS):
/// min over r >= 0 of distance(r)^{1/2} + t r, found by golden-section
/// search (the objective is convex in r).
template <typename Scalar>
Scalar k_functional(const DiscreteDesign<Scalar>& design, const KernelSpec<Scalar>& spec,
                    const VectorX<Scalar>& g_values, Scalar t) {
  if (!(t > Scalar(0))) throw std::invalid_argument("k_functional: t must be positive");
  const L2BallDistance<Scalar> distance(spec, design, g_values);

  const auto objective = [&](Scalar r) { return std::sqrt(distance(r)) + t * r; };

  const Scalar r_max = std::sqrt(distance.value_at_zero()) / t + distance.threshold_radius();
  if (r_max == Scalar(0)) return objective(Scalar(0));

  const Scalar inv_golden = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar lo = 0, hi = r_max;
  Scalar x1 = hi - inv_golden * (hi - lo);
  Scalar x2 = lo + inv_golden * (hi - lo);
  Scalar f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > Scalar(1e-6) * std::max(Scalar(1), r_max) && x1 < x2) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_golden * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_golden * (hi - lo);
      f2 = objective(x2);
    }
  }
  return std::min({objective((lo + hi) / Scalar(2)), objective(Scalar(0)), objective(r_max)});
}

}  // namespace ivanov
