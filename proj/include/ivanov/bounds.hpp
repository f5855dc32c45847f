#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "ivanov/core.hpp"

namespace ivanov {

/// Constants feeding the closed-form error-bound evaluators.
template <typename Scalar>
struct BoundParams {
  static_assert(std::is_floating_point_v<Scalar>);

  Scalar kernel_sup = 1;      // sup_x k(x, x)^{1/2}
  Scalar sigma = 0;           // training noise scale
  Scalar sigma_tilde = 0;     // validation noise scale
  Scalar clip_bound = 1;      // C
  Scalar interp_norm = 1;     // B, interpolation-space norm bound
  Scalar beta = Scalar(0.5);  // interpolation parameter in (0, 1)
  Scalar n = 1;               // training sample size
  Scalar n_tilde = 1;         // validation sample size
  Scalar tail = 1;            // t, tail parameter of the high-probability bounds
  Scalar rho = 0;             // endpoint of the radius grid
};

/// Expected squared error bound for the unclipped estimator at radius r,
/// given the squared distance from the target to the radius-r ball:
/// 8 k sigma r / n^{1/2} + 64 k^2 r^2 / n^{1/2} + 10 approx.
template <typename Scalar>
Scalar bound_expectation_unclipped(const BoundParams<Scalar>& p, Scalar r, Scalar approx_l2) {
  const Scalar root_n = std::sqrt(p.n);
  return Scalar(8) * p.kernel_sup * p.sigma * r / root_n +
         Scalar(64) * p.kernel_sup * p.kernel_sup * r * r / root_n + Scalar(10) * approx_l2;
}

/// Expected squared error bound for the clipped estimator:
/// 8 k (16 C + sigma) r / n^{1/2} + 10 approx.
template <typename Scalar>
Scalar bound_expectation_clipped(const BoundParams<Scalar>& p, Scalar r, Scalar approx_l2) {
  return Scalar(8) * p.kernel_sup * (Scalar(16) * p.clip_bound + p.sigma) * r / std::sqrt(p.n) +
         Scalar(10) * approx_l2;
}

/// High-probability squared error bound for the clipped estimator, holding
/// with probability at least 1 - 3 e^{-t}.
template <typename Scalar>
Scalar bound_highprob_clipped(const BoundParams<Scalar>& p, Scalar r, Scalar approx_sup) {
  if (p.tail < Scalar(1))
    throw std::invalid_argument("bound_highprob_clipped: tail parameter must be at least 1");
  const Scalar c = p.clip_bound;
  const Scalar k = p.kernel_sup;
  const Scalar lead = Scalar(2) * c * c + Scalar(8) * std::sqrt(k) * std::pow(c, Scalar(1.5)) * std::sqrt(r) +
                      k * (Scalar(16) * c + Scalar(5) * p.sigma) * r;
  return Scalar(8) * lead * std::sqrt(p.tail) / std::sqrt(p.n) +
         Scalar(16) * c * c * p.tail / (Scalar(3) * p.n) + Scalar(10) * approx_sup;
}

namespace detail {

template <typename Scalar>
Scalar chaining_factor(const BoundParams<Scalar>& p) {
  const Scalar ratio = p.kernel_sup * p.kernel_sup * p.rho * p.rho / (p.clip_bound * p.clip_bound);
  return std::sqrt(Scalar(2) * std::log(Scalar(2) + ratio)) +
         std::sqrt(std::numbers::pi_v<Scalar>);
}

}  // namespace detail

/// Expected squared error bound for the hold-out-selected clipped estimator,
/// in terms of the expected squared error of any fixed reference radius.
template <typename Scalar>
Scalar bound_validation_expectation(const BoundParams<Scalar>& p, Scalar baseline_risk) {
  const Scalar c = p.clip_bound;
  return Scalar(32) * c * (Scalar(4) * c + p.sigma_tilde) / std::sqrt(p.n_tilde) *
             detail::chaining_factor(p) +
         Scalar(10) * baseline_risk;
}

/// High-probability analogue of the validation bound, holding with
/// probability at least 1 - 3 e^{-t}.
template <typename Scalar>
Scalar bound_validation_highprob(const BoundParams<Scalar>& p, Scalar baseline_risk) {
  if (p.tail < Scalar(1))
    throw std::invalid_argument("bound_validation_highprob: tail parameter must be at least 1");
  const Scalar c = p.clip_bound;
  const Scalar root_t = std::sqrt(p.tail);
  const Scalar root_nt = std::sqrt(p.n_tilde);
  return Scalar(4) * c * (Scalar(5) * c + Scalar(24) * p.sigma_tilde) * root_t / root_nt *
             (Scalar(1) + Scalar(32) * detail::chaining_factor(p)) +
         Scalar(48) * c * c * root_t / root_nt +
         Scalar(16) * c * c * p.tail / (Scalar(3) * p.n_tilde) + Scalar(10) * baseline_risk;
}

/// Radius minimising the dominant terms of the unclipped expectation bound:
/// (5 beta / (32 (1-beta)))^{(1-beta)/2} k^{-(1-beta)} B n^{(1-beta)/4}.
template <typename Scalar>
Scalar optimal_radius_unclipped(const BoundParams<Scalar>& p) {
  const Scalar one_minus = Scalar(1) - p.beta;
  return std::pow(Scalar(5) * p.beta / (Scalar(32) * one_minus), one_minus / Scalar(2)) *
         std::pow(p.kernel_sup, -one_minus) * p.interp_norm * std::pow(p.n, one_minus / Scalar(4));
}

/// Rate constants of the unclipped n^{-beta/2} bound at the radius above:
/// first the n^{-beta/2} coefficient, then the n^{-(1+beta)/4} one.
template <typename Scalar>
std::pair<Scalar, Scalar> rate_constants_unclipped(const BoundParams<Scalar>& p) {
  const Scalar one_minus = Scalar(1) - p.beta;
  const Scalar ratio = Scalar(5) * p.beta / (Scalar(32) * one_minus);
  const Scalar d2 = Scalar(64) * std::pow(ratio, one_minus) +
                    Scalar(10) * std::pow(Scalar(1) / ratio, p.beta);
  const Scalar d3 = Scalar(8) * std::pow(ratio, one_minus / Scalar(2));
  return {d2, d3};
}

/// Radius minimising the clipped expectation bound:
/// (5 beta / (2 (1-beta)))^{(1-beta)/(1+beta)} k^{-(1-beta)/(1+beta)}
/// B^{2/(1+beta)} (16 C + sigma)^{-(1-beta)/(1+beta)} n^{(1-beta)/(2(1+beta))}.
template <typename Scalar>
Scalar optimal_radius_clipped(const BoundParams<Scalar>& p) {
  const Scalar one_minus = Scalar(1) - p.beta;
  const Scalar one_plus = Scalar(1) + p.beta;
  return std::pow(Scalar(5) * p.beta / (Scalar(2) * one_minus), one_minus / one_plus) *
         std::pow(p.kernel_sup, -one_minus / one_plus) *
         std::pow(p.interp_norm, Scalar(2) / one_plus) *
         std::pow(Scalar(16) * p.clip_bound + p.sigma, -one_minus / one_plus) *
         std::pow(p.n, one_minus / (Scalar(2) * one_plus));
}

/// Coefficient of n^{-beta/(1+beta)} in the clipped rate bound at the radius
/// above, excluding the k, B and (16 C + sigma) factors.
template <typename Scalar>
Scalar rate_constant_clipped(const BoundParams<Scalar>& p) {
  const Scalar one_minus = Scalar(1) - p.beta;
  const Scalar one_plus = Scalar(1) + p.beta;
  return Scalar(2) * std::pow(Scalar(5), one_minus / one_plus) *
         std::pow(Scalar(4), Scalar(2) * p.beta / one_plus) *
         (std::pow(Scalar(2) * p.beta / one_minus, one_minus / one_plus) +
          std::pow(one_minus / (Scalar(2) * p.beta), Scalar(2) * p.beta / one_plus));
}

/// Radius minimising the dominant terms of the high-probability clipped
/// bound (tail parameter included).
template <typename Scalar>
Scalar optimal_radius_highprob(const BoundParams<Scalar>& p) {
  const Scalar one_minus = Scalar(1) - p.beta;
  const Scalar one_plus = Scalar(1) + p.beta;
  return std::pow(Scalar(5) * p.beta / (Scalar(2) * one_minus), one_minus / one_plus) *
         std::pow(p.kernel_sup, -one_minus / one_plus) *
         std::pow(p.interp_norm, Scalar(2) / one_plus) *
         std::pow(Scalar(16) * p.clip_bound + Scalar(5) * p.sigma, -one_minus / one_plus) *
         std::pow(p.tail, -one_minus / (Scalar(2) * one_plus)) *
         std::pow(p.n, one_minus / (Scalar(2) * one_plus));
}

/// Numeric minimiser of the full three-term unclipped bound with the
/// interpolation-space decay substituted for the approximation error. The
/// displayed radius ignores the first bound term; this one does not.
template <typename Scalar>
Scalar optimal_radius_unclipped_numeric(const BoundParams<Scalar>& p) {
  const Scalar one_minus = Scalar(1) - p.beta;
  const auto objective = [&](Scalar r) {
    const Scalar approx = std::pow(p.interp_norm, Scalar(2) / one_minus) *
                          std::pow(r, -Scalar(2) * p.beta / one_minus);
    return bound_expectation_unclipped(p, r, approx);
  };
  // The displayed radius is within a constant factor of the true minimiser;
  // bracket it generously and golden-section on log r.
  const Scalar centre = optimal_radius_unclipped(p);
  Scalar lo = std::log(centre / Scalar(100));
  Scalar hi = std::log(centre * Scalar(100));
  const Scalar inv_golden = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar x1 = hi - inv_golden * (hi - lo);
  Scalar x2 = lo + inv_golden * (hi - lo);
  Scalar f1 = objective(std::exp(x1));
  Scalar f2 = objective(std::exp(x2));
  while (hi - lo > Scalar(1e-10)) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_golden * (hi - lo);
      f1 = objective(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_golden * (hi - lo);
      f2 = objective(std::exp(x2));
    }
  }
  return std::exp((lo + hi) / Scalar(2));
}

/// Sup-norm covering number bound for the clipped estimator family indexed
/// by radii in [0, rho]: 1 + k^2 rho^2 / (2 eps^2).
template <typename Scalar>
Scalar covering_bound(Scalar kernel_sup, Scalar rho, Scalar eps) {
  if (!(eps > Scalar(0))) throw std::invalid_argument("covering_bound: eps must be positive");
  return Scalar(1) + kernel_sup * kernel_sup * rho * rho / (Scalar(2) * eps * eps);
}

/// Closed-form bound on the entropy integral
/// int_0^L (log(a N(eps)))^{1/2} d eps for the covering numbers above:
/// (log((1 + k^2 rho^2 / (2 L^2)) a))^{1/2} L + (pi/2)^{1/2} L.
template <typename Scalar>
Scalar entropy_integral(Scalar kernel_sup, Scalar rho, Scalar upper, Scalar a) {
  if (!(upper > Scalar(0))) throw std::invalid_argument("entropy_integral: upper limit must be positive");
  if (a < Scalar(1)) throw std::invalid_argument("entropy_integral: a must be at least 1");
  const Scalar inner =
      (Scalar(1) + kernel_sup * kernel_sup * rho * rho / (Scalar(2) * upper * upper)) * a;
  return std::sqrt(std::log(inner)) * upper + std::sqrt(std::numbers::pi_v<Scalar> / Scalar(2)) * upper;
}

/// The a = 1 entropy integral over the whole positive axis, which closes at
/// twice the clip bound: 2 (log(1 + k^2 rho^2 / (8 C^2)))^{1/2} C + (2 pi)^{1/2} C.
template <typename Scalar>
Scalar entropy_integral_unbounded(Scalar kernel_sup, Scalar rho, Scalar clip_bound) {
  if (!(clip_bound > Scalar(0)))
    throw std::invalid_argument("entropy_integral_unbounded: clip bound must be positive");
  const Scalar inner = Scalar(1) + kernel_sup * kernel_sup * rho * rho /
                                       (Scalar(8) * clip_bound * clip_bound);
  return Scalar(2) * std::sqrt(std::log(inner)) * clip_bound +
         std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>) * clip_bound;
}

namespace detail {

template <typename Scalar, typename Fn>
Scalar adaptive_simpson(Fn&& f, Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb, Scalar whole,
                        Scalar tol, int depth) {
  const Scalar m = (a + b) / Scalar(2);
  const Scalar lm = (a + m) / Scalar(2);
  const Scalar rm = (m + b) / Scalar(2);
  const Scalar flm = f(lm);
  const Scalar frm = f(rm);
  const Scalar left = (m - a) / Scalar(6) * (fa + Scalar(4) * flm + fm);
  const Scalar right = (b - m) / Scalar(6) * (fm + Scalar(4) * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= Scalar(15) * tol)
    return left + right + (left + right - whole) / Scalar(15);
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / Scalar(2), depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / Scalar(2), depth - 1);
}

}  // namespace detail

/// Numeric evaluation of the entropy integral by adaptive quadrature, for
/// cross-checking the closed form. The integrable singularity at zero is
/// covered by an analytic tail bound on a slice of relative width 1e-9.
template <typename Scalar>
Scalar entropy_integral_numeric(Scalar kernel_sup, Scalar rho, Scalar upper, Scalar a) {
  if (!(upper > Scalar(0)))
    throw std::invalid_argument("entropy_integral_numeric: upper limit must be positive");
  if (a < Scalar(1)) throw std::invalid_argument("entropy_integral_numeric: a must be at least 1");
  if (kernel_sup * rho == Scalar(0)) return upper * std::sqrt(std::log(a));  // constant integrand

  const auto integrand = [&](Scalar eps) {
    return std::sqrt(std::log(a * covering_bound(kernel_sup, rho, eps)));
  };

  const Scalar cut = upper * Scalar(1e-9);
  // Tail: integrand(eps) <= sqrt(log(a (1 + c/(2 cut^2)))) + sqrt(2 log(cut/eps)).
  const Scalar head = std::sqrt(std::log(a * covering_bound(kernel_sup, rho, cut)));
  const Scalar tail = cut * (head + std::sqrt(Scalar(2)) * std::sqrt(std::numbers::pi_v<Scalar>) / Scalar(2));

  const Scalar fa = integrand(cut);
  const Scalar fb = integrand(upper);
  const Scalar fm = integrand((cut + upper) / Scalar(2));
  const Scalar whole = (upper - cut) / Scalar(6) * (fa + Scalar(4) * fm + fb);
  return tail + detail::adaptive_simpson(integrand, cut, upper, fa, fm, fb, whole, Scalar(1e-10), 40);
}

}  // namespace ivanov
