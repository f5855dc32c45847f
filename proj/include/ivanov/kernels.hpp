#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "ivanov/core.hpp"

namespace ivanov {

/// Axis-aligned box of covariates in R^d. All kernels are defined relative
/// to such a box so that their sup norms have closed forms.
template <typename Scalar>
struct Domain {
  static_assert(std::is_floating_point_v<Scalar>);

  VectorX<Scalar> lower;
  VectorX<Scalar> upper;

  Index dim() const { return lower.size(); }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != dim()) return false;
    for (Index i = 0; i < dim(); ++i)
      if (x(i) < lower[i] || x(i) > upper[i]) return false;
    return true;
  }

  static Domain box(VectorX<Scalar> lo, VectorX<Scalar> hi) {
    if (lo.size() != hi.size() || lo.size() == 0)
      throw std::invalid_argument("Domain: bound vectors must be non-empty and of equal length");
    if ((lo.array() > hi.array()).any())
      throw std::invalid_argument("Domain: lower bound exceeds upper bound");
    return Domain{std::move(lo), std::move(hi)};
  }

  /// Interval [lo, hi] in one dimension.
  static Domain interval(Scalar lo, Scalar hi) {
    VectorX<Scalar> l(1), u(1);
    l[0] = lo;
    u[0] = hi;
    return box(std::move(l), std::move(u));
  }
};

enum class KernelFamily { Gaussian, Laplacian, BrownianMotion, Linear };

/// A bounded, measurable kernel on an axis-aligned box, one of four families:
///
///   Gaussian        k(x, y) = exp(-|x - y|_2^2 / (2 l^2))
///   Laplacian       k(x, y) = exp(-|x - y|_1 / l)
///   BrownianMotion  k(x, y) = min(x, y)            (one-dimensional, box in [0, 1])
///   Linear          k(x, y) = <x, y> + offset      (box must fit in the declared norm ball)
///
/// Immutable after construction; all evaluations are pure.
template <typename Scalar>
class KernelSpec {
  static_assert(std::is_floating_point_v<Scalar>);

 public:
  static KernelSpec gaussian(Scalar lengthscale, Domain<Scalar> domain) {
    if (!(lengthscale > Scalar(0)))
      throw std::invalid_argument("KernelSpec: Gaussian lengthscale must be positive");
    return KernelSpec(KernelFamily::Gaussian, std::move(domain), lengthscale, Scalar(0), Scalar(0));
  }

  static KernelSpec laplacian(Scalar lengthscale, Domain<Scalar> domain) {
    if (!(lengthscale > Scalar(0)))
      throw std::invalid_argument("KernelSpec: Laplacian lengthscale must be positive");
    return KernelSpec(KernelFamily::Laplacian, std::move(domain), lengthscale, Scalar(0), Scalar(0));
  }

  static KernelSpec brownian_motion(Domain<Scalar> domain) {
    if (domain.dim() != 1)
      throw std::invalid_argument("KernelSpec: Brownian motion kernel is one-dimensional");
    if (domain.lower[0] < Scalar(0) || domain.upper[0] > Scalar(1))
      throw std::invalid_argument("KernelSpec: Brownian motion kernel lives on [0, 1]");
    return KernelSpec(KernelFamily::BrownianMotion, std::move(domain), Scalar(0), Scalar(0), Scalar(0));
  }

  static KernelSpec linear(Scalar offset, Scalar scale_bound, Domain<Scalar> domain) {
    if (offset < Scalar(0)) throw std::invalid_argument("KernelSpec: Linear offset must be non-negative");
    if (!(scale_bound > Scalar(0)))
      throw std::invalid_argument("KernelSpec: Linear scale bound must be positive");
    Scalar max_norm_sq = 0;
    for (Index i = 0; i < domain.dim(); ++i) {
      const Scalar m = std::max(std::abs(domain.lower[i]), std::abs(domain.upper[i]));
      max_norm_sq += m * m;
    }
    if (std::sqrt(max_norm_sq) > scale_bound * (Scalar(1) + Scalar(1e-12)))
      throw std::invalid_argument("KernelSpec: Linear domain exceeds the declared scale bound");
    return KernelSpec(KernelFamily::Linear, std::move(domain), Scalar(0), offset, scale_bound);
  }

  KernelFamily family() const { return family_; }
  const Domain<Scalar>& domain() const { return domain_; }
  Scalar lengthscale() const { return lengthscale_; }
  Scalar offset() const { return offset_; }
  Scalar scale_bound() const { return scale_bound_; }

 private:
  KernelSpec(KernelFamily family, Domain<Scalar> domain, Scalar lengthscale, Scalar offset,
             Scalar scale_bound)
      : family_(family),
        domain_(std::move(domain)),
        lengthscale_(lengthscale),
        offset_(offset),
        scale_bound_(scale_bound) {}

  KernelFamily family_;
  Domain<Scalar> domain_;
  Scalar lengthscale_;
  Scalar offset_;
  Scalar scale_bound_;
};

namespace detail {

template <typename Scalar, typename Derived>
void check_in_domain(const KernelSpec<Scalar>& spec, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != spec.domain().dim()) {
    std::ostringstream msg;
    msg << "eval_kernel: point has dimension " << x.size() << ", domain has dimension "
        << spec.domain().dim();
    throw std::invalid_argument(msg.str());
  }
  if (!spec.domain().contains(x)) throw std::domain_error("eval_kernel: point outside the kernel domain");
}

// Evaluation without domain checks, for inner loops over validated point sets.
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar eval_unchecked(const KernelSpec<Scalar>& spec, const Eigen::MatrixBase<DerivedA>& x1,
                      const Eigen::MatrixBase<DerivedB>& x2) {
  switch (spec.family()) {
    case KernelFamily::Gaussian: {
      const Scalar d2 = (x1.derived() - x2.derived()).squaredNorm();
      const Scalar l = spec.lengthscale();
      return std::exp(-d2 / (Scalar(2) * l * l));
    }
    case KernelFamily::Laplacian: {
      const Scalar d1 = (x1.derived() - x2.derived()).template lpNorm<1>();
      return std::exp(-d1 / spec.lengthscale());
    }
    case KernelFamily::BrownianMotion:
      return std::min(Scalar(x1(0)), Scalar(x2(0)));
    case KernelFamily::Linear:
      return x1.derived().dot(x2.derived()) + spec.offset();
  }
  throw std::logic_error("eval_kernel: unreachable");
}

}  // namespace detail

/// k(x1, x2) for any vector expressions. Symmetric in its arguments; throws
/// std::domain_error for points outside the spec's box and
/// std::invalid_argument on dimension mismatch.
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar eval_kernel(const KernelSpec<Scalar>& spec, const Eigen::MatrixBase<DerivedA>& x1,
                   const Eigen::MatrixBase<DerivedB>& x2) {
  detail::check_in_domain(spec, x1);
  detail::check_in_domain(spec, x2);
  return detail::eval_unchecked(spec, x1, x2);
}

/// sup_x k(x, x)^{1/2} over the spec's domain, in closed form per family.
template <typename Scalar>
Scalar sup_norm(const KernelSpec<Scalar>& spec) {
  switch (spec.family()) {
    case KernelFamily::Gaussian:
    case KernelFamily::Laplacian:
      return Scalar(1);
    case KernelFamily::BrownianMotion:
      return std::sqrt(spec.domain().upper[0]);
    case KernelFamily::Linear: {
      Scalar max_norm_sq = 0;
      for (Index i = 0; i < spec.domain().dim(); ++i) {
        const Scalar m = std::max(std::abs(spec.domain().lower[i]), std::abs(spec.domain().upper[i]));
        max_norm_sq += m * m;
      }
      return std::sqrt(max_norm_sq + spec.offset());
    }
  }
  throw std::logic_error("sup_norm: unreachable");
}

/// n x n matrix of pairwise kernel values at the given points (rows of
/// `points`). Filled from the upper triangle so the result is symmetric to
/// the bit.
template <typename Scalar>
MatrixX<Scalar> gram_matrix(const KernelSpec<Scalar>& spec, const MatrixX<Scalar>& points) {
  const Index n = points.rows();
  if (n < 1) throw std::invalid_argument("gram_matrix: need at least one point");
  for (Index i = 0; i < n; ++i) detail::check_in_domain(spec, points.row(i).transpose());
  MatrixX<Scalar> K(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const Scalar v =
          detail::eval_unchecked(spec, points.row(i).transpose(), points.row(j).transpose());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

/// Rectangular kernel matrix between two point sets: entry (i, j) equals
/// k(a_i, b_j). Used for out-of-sample prediction.
template <typename Scalar>
MatrixX<Scalar> kernel_matrix(const KernelSpec<Scalar>& spec, const MatrixX<Scalar>& a,
                              const MatrixX<Scalar>& b) {
  if (a.rows() < 1 || b.rows() < 1) throw std::invalid_argument("kernel_matrix: need at least one point");
  for (Index i = 0; i < a.rows(); ++i) detail::check_in_domain(spec, a.row(i).transpose());
  for (Index j = 0; j < b.rows(); ++j) detail::check_in_domain(spec, b.row(j).transpose());
  MatrixX<Scalar> K(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j)
      K(i, j) = detail::eval_unchecked(spec, a.row(i).transpose(), b.row(j).transpose());
  return K;
}

}  // namespace ivanov
