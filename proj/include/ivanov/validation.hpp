#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ivanov/estimator.hpp"

namespace ivanov {

/// Finite radius grid {b i : 0 <= i <= I-1} together with the endpoint
/// a n^{1/2}, sorted and deduplicated.
template <typename Scalar>
struct ValidationGrid {
  Scalar endpoint_coefficient;  // a
  Scalar spacing;               // b
  Index sample_count;           // n
  Scalar rho;                   // a n^{1/2}
  std::vector<Scalar> radii;    // strictly increasing, starts at 0, ends at rho
};

template <typename Scalar>
ValidationGrid<Scalar> build_grid(Scalar endpoint_coefficient, Scalar spacing, Index sample_count) {
  if (!(endpoint_coefficient > Scalar(0)) || !(spacing > Scalar(0)))
    throw std::invalid_argument("build_grid: grid parameters must be positive");
  if (sample_count < 1) throw std::invalid_argument("build_grid: sample count must be positive");

  ValidationGrid<Scalar> grid;
  grid.endpoint_coefficient = endpoint_coefficient;
  grid.spacing = spacing;
  grid.sample_count = sample_count;
  grid.rho = endpoint_coefficient * std::sqrt(Scalar(sample_count));

  const Index count = static_cast<Index>(std::ceil(grid.rho / spacing));
  grid.radii.reserve(static_cast<std::size_t>(count) + 1);
  for (Index i = 0; i < count; ++i) grid.radii.push_back(spacing * Scalar(i));
  grid.radii.push_back(grid.rho);
  std::sort(grid.radii.begin(), grid.radii.end());
  grid.radii.erase(std::unique(grid.radii.begin(), grid.radii.end()), grid.radii.end());
  return grid;
}

/// Hold-out risk of the clipped estimator: the mean over the validation set
/// of (clip(h(x), c) - y)^2. Responses are not clipped.
template <typename Scalar>
Scalar validation_risk(const IvanovFit<Scalar>& fit, Scalar clip_bound,
                       const MatrixX<Scalar>& val_points, const VectorX<Scalar>& val_y) {
  if (val_points.rows() < 1) throw std::invalid_argument("validation_risk: empty validation set");
  if (val_points.rows() != val_y.size())
    throw std::invalid_argument("validation_risk: points and responses differ in length");
  if (!(clip_bound > Scalar(0))) throw std::invalid_argument("validation_risk: clip bound must be positive");

  const VectorX<Scalar> predictions = predict(fit, val_points);
  Scalar sum = 0;
  for (Index i = 0; i < val_y.size(); ++i) {
    const Scalar diff = clip(predictions[i], clip_bound) - val_y[i];
    sum += diff * diff;
  }
  return sum / Scalar(val_y.size());
}

/// Result of the hold-out radius selection.
template <typename Scalar>
struct AdaptiveFit {
  Scalar selected_radius;  // smallest minimiser of the validation risk
  IvanovFit<Scalar> fit;   // estimator at the selected radius
  Scalar clip_bound;
  std::vector<std::pair<Scalar, Scalar>> validation_risks;  // (radius, risk), ascending radius
};

/// Fit every radius of the grid from a single eigendecomposition of the
/// training Gram matrix, score each clipped fit on the validation set, and
/// return the smallest radius attaining the minimum risk.
template <typename Scalar>
AdaptiveFit<Scalar> select_radius(const KernelSpec<Scalar>& spec, const MatrixX<Scalar>& train_points,
                                  const VectorX<Scalar>& train_y, const MatrixX<Scalar>& val_points,
                                  const VectorX<Scalar>& val_y, const ValidationGrid<Scalar>& grid,
                                  Scalar clip_bound, const BisectionOptions<Scalar>& options = {}) {
  if (train_points.rows() < 1 || train_points.rows() != train_y.size())
    throw std::invalid_argument("select_radius: invalid training set");
  if (val_points.rows() < 1 || val_points.rows() != val_y.size())
    throw std::invalid_argument("select_radius: invalid validation set");
  if (!(clip_bound > Scalar(0))) throw std::invalid_argument("select_radius: clip bound must be positive");
  if (grid.radii.empty()) throw std::invalid_argument("select_radius: empty radius grid");

  const Index n = train_points.rows();
  const MatrixX<Scalar> K = gram_matrix(spec, train_points);
  const GramDecomposition<Scalar> decomposition = eigh(K);
  const auto problem = detail::SpectralProblem<Scalar>::make(decomposition, train_y);
  const MatrixX<Scalar> cross = kernel_matrix(spec, val_points, train_points);

  std::vector<std::pair<Scalar, Scalar>> risks;
  risks.reserve(grid.radii.size());

  Scalar best_radius = grid.radii.front();
  Scalar best_risk = 0;
  Scalar best_mu = 0;
  Scalar best_norm = 0;
  VectorX<Scalar> best_a;
  bool have_best = false;

  for (const Scalar r : grid.radii) {
    Scalar mu = 0;
    Scalar norm = 0;
    VectorX<Scalar> a;
    if (r > Scalar(0)) {
      mu = detail::solve_mu_prepared(problem, r, options);
      norm = problem.norm_at(mu);
      a = decomposition.orthogonal * problem.weights(mu);
    } else {
      a = VectorX<Scalar>::Zero(n);
    }

    const VectorX<Scalar> predictions = cross * a;
    Scalar sum = 0;
    for (Index i = 0; i < val_y.size(); ++i) {
      const Scalar diff = clip(predictions[i], clip_bound) - val_y[i];
      sum += diff * diff;
    }
    const Scalar risk = sum / Scalar(val_y.size());
    risks.emplace_back(r, risk);

    if (!have_best || risk < best_risk) {  // strict comparison: ties go to the smaller radius
      have_best = true;
      best_risk = risk;
      best_mu = mu;
      best_norm = norm;
      best_a = std::move(a);
      best_radius = r;
    }
  }

  return AdaptiveFit<Scalar>{best_radius,
                             detail::finish_fit(spec, train_points, K, train_y, best_radius,
                                                best_mu, std::move(best_a), best_norm),
                             clip_bound, std::move(risks)};
}

}  // namespace ivanov
