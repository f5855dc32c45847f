#pragma once

#include <ivanov/estimator.hpp>
#include <ivanov/rng.hpp>

namespace test_util {

using ivanov::Index;
using MatrixXd = ivanov::MatrixX<double>;
using VectorXd = ivanov::VectorX<double>;

// A random kernel from each of the four families, with parameters in ranges
// that keep the Gram matrices well scaled.
inline ivanov::KernelSpec<double> random_spec(ivanov::StreamRng& rng) {
  const int family = static_cast<int>(rng.next_word() % 4);
  switch (family) {
    case 0: {
      const Index d = 1 + static_cast<Index>(rng.next_word() % 3);
      auto domain = ivanov::Domain<double>::box(VectorXd::Constant(d, -1.0), VectorXd::Constant(d, 1.0));
      return ivanov::KernelSpec<double>::gaussian(rng.uniform(0.3, 2.0), domain);
    }
    case 1: {
      const Index d = 1 + static_cast<Index>(rng.next_word() % 3);
      auto domain = ivanov::Domain<double>::box(VectorXd::Constant(d, -1.0), VectorXd::Constant(d, 1.0));
      return ivanov::KernelSpec<double>::laplacian(rng.uniform(0.3, 2.0), domain);
    }
    case 2:
      return ivanov::KernelSpec<double>::brownian_motion(ivanov::Domain<double>::interval(0.0, 1.0));
    default: {
      const Index d = 1 + static_cast<Index>(rng.next_word() % 3);
      auto domain = ivanov::Domain<double>::box(VectorXd::Constant(d, -1.0), VectorXd::Constant(d, 1.0));
      return ivanov::KernelSpec<double>::linear(rng.uniform(0.0, 1.0), std::sqrt(double(d)) * 1.5,
                                                domain);
    }
  }
}

// Kernels whose Gram matrices stay numerically full rank for moderate n, for
// the properties that compare against dense linear solves.
inline ivanov::KernelSpec<double> random_full_rank_spec(ivanov::StreamRng& rng) {
  if (rng.next_word() % 2 == 0)
    return ivanov::KernelSpec<double>::brownian_motion(ivanov::Domain<double>::interval(0.0, 1.0));
  auto domain = ivanov::Domain<double>::box(VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0));
  return ivanov::KernelSpec<double>::laplacian(rng.uniform(0.2, 0.8), domain);
}

inline MatrixXd random_points(const ivanov::KernelSpec<double>& spec, Index n,
                              ivanov::StreamRng& rng) {
  const auto& domain = spec.domain();
  MatrixXd points(n, domain.dim());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < domain.dim(); ++j)
      points(i, j) = rng.uniform(domain.lower[j], domain.upper[j]);
  return points;
}

// Points with a minimum pairwise separation in one dimension, which keeps
// Brownian and Laplacian Gram matrices comfortably invertible.
inline MatrixXd separated_points(const ivanov::KernelSpec<double>& spec, Index n,
                                 ivanov::StreamRng& rng) {
  const auto& domain = spec.domain();
  const double lo = domain.lower[0];
  const double hi = domain.upper[0];
  MatrixXd points(n, 1);
  const double step = (hi - lo) / static_cast<double>(n);
  for (Index i = 0; i < n; ++i)
    points(i, 0) = lo + (static_cast<double>(i) + 0.2 + 0.6 * rng.uniform01()) * step;
  return points;
}

inline VectorXd random_gaussian_vector(Index n, double scale, ivanov::StreamRng& rng) {
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) y[i] = scale * rng.gaussian();
  return y;
}

}  // namespace test_util
