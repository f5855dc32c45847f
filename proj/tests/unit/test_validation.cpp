#include <doctest.h>

#include <ivanov/validation.hpp>

#include "test_util.hpp"

using namespace ivanov;
using test_util::MatrixXd;
using test_util::VectorXd;

namespace {

MatrixXd points1(std::initializer_list<double> values) {
  MatrixXd p(static_cast<Index>(values.size()), 1);
  Index i = 0;
  for (const double value : values) p(i++, 0) = value;
  return p;
}

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (const double value : values) v[i++] = value;
  return v;
}

ValidationGrid<double> manual_grid(std::initializer_list<double> radii) {
  ValidationGrid<double> grid{1.0, 1.0, 1, 0.0, std::vector<double>(radii)};
  grid.rho = grid.radii.back();
  return grid;
}

}  // namespace

TEST_CASE("grid construction matches the worked examples") {
  const auto g1 = build_grid(1.0, 1.0, 4);
  CHECK(g1.radii == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(g1.rho == 2.0);

  const auto g2 = build_grid(1.0, 0.5, 1);
  CHECK(g2.radii == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(g2.rho == 1.0);

  const auto g3 = build_grid(2.0, 3.0, 1);
  CHECK(g3.radii == std::vector<double>{0.0, 2.0});

  CHECK_THROWS_AS(build_grid(0.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1.0, -1.0, 4), std::invalid_argument);
}

TEST_CASE("grids start at zero and end at the endpoint radius") {
  StreamRng rng(5, 20);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(0.2, 3.0);
    const double b = rng.uniform(0.05, 2.0);
    const Index n = 1 + static_cast<Index>(rng.next_word() % 4096);
    const auto grid = build_grid(a, b, n);
    CHECK(grid.radii.front() == 0.0);
    CHECK(grid.radii.back() == grid.rho);
    for (std::size_t i = 1; i < grid.radii.size(); ++i) CHECK(grid.radii[i - 1] < grid.radii[i]);
    const Index count = static_cast<Index>(std::ceil(grid.rho / b));
    CHECK((static_cast<Index>(grid.radii.size()) == count ||
           static_cast<Index>(grid.radii.size()) == count + 1));
  }
}

TEST_CASE("validation risk of the worked examples") {
  const auto spec = KernelSpec<double>::gaussian(1.0, Domain<double>::interval(-1.0, 1.0));

  const auto zero_fit = fit(spec, points1({0.0}), vec({2.0}), 0.0);
  CHECK(validation_risk(zero_fit, 1.0, points1({0.2, -0.2}), vec({1.0, -1.0})) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // A perfect in-range predictor has zero hold-out risk.
  const auto interpolant = fit(spec, points1({0.0}), vec({0.5}), 2.0);
  CHECK(validation_risk(interpolant, 1.0, points1({0.0}), vec({0.5})) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const auto unit_fit = fit(spec, points1({0.0}), vec({2.0}), 1.0);
  CHECK(validation_risk(unit_fit, 1.0, points1({0.0}), vec({0.0})) ==
        doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(validation_risk(unit_fit, 1.0, MatrixXd(0, 1), VectorXd(0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(validation_risk(unit_fit, 0.0, points1({0.0}), vec({0.0})),
                  std::invalid_argument);
}

TEST_CASE("radius selection on the enumerable instance") {
  // Train on one point (0, 2) with the Gaussian kernel; risks on the
  // validation pair (0, 2) with clip bound 2 enumerate to 4, 1, 0 for the
  // radii 0, 1, 2, so the selected radius is 2.
  const auto spec = KernelSpec<double>::gaussian(1.0, Domain<double>::interval(-1.0, 1.0));
  const auto grid = build_grid(2.0, 1.0, 1);
  REQUIRE(grid.radii == std::vector<double>{0.0, 1.0, 2.0});

  const auto adaptive = select_radius(spec, points1({0.0}), vec({2.0}), points1({0.0}), vec({2.0}),
                                      grid, 2.0);
  CHECK(adaptive.selected_radius == 2.0);
  REQUIRE(adaptive.validation_risks.size() == 3);
  CHECK(adaptive.validation_risks[0].second == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(adaptive.validation_risks[1].second == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(adaptive.validation_risks[2].second == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("singleton grids select their only radius") {
  const auto spec = KernelSpec<double>::gaussian(1.0, Domain<double>::interval(-1.0, 1.0));
  const auto adaptive = select_radius(spec, points1({0.0}), vec({2.0}), points1({0.3}), vec({-1.0}),
                                      manual_grid({1.0}), 1.0);
  CHECK(adaptive.selected_radius == 1.0);
}

TEST_CASE("ties break towards the smaller radius") {
  // Both radii exceed the threshold 2, so the estimators coincide and the
  // risks tie exactly.
  const auto spec = KernelSpec<double>::gaussian(1.0, Domain<double>::interval(-1.0, 1.0));
  const auto adaptive = select_radius(spec, points1({0.0}), vec({2.0}), points1({0.1}), vec({1.0}),
                                      manual_grid({3.0, 5.0}), 3.0);
  CHECK(adaptive.selected_radius == 3.0);

  // Appending another saturated radius never changes the selection.
  const auto extended = select_radius(spec, points1({0.0}), vec({2.0}), points1({0.1}), vec({1.0}),
                                      manual_grid({3.0, 5.0, 7.0}), 3.0);
  CHECK(extended.selected_radius == adaptive.selected_radius);
}

TEST_CASE("selection minimises the hold-out risk exhaustively") {
  StreamRng rng(202, 21);
  for (int trial = 0; trial < 12; ++trial) {
    const auto spec = test_util::random_full_rank_spec(rng);
    const Index n = 4 + static_cast<Index>(rng.next_word() % 24);
    const MatrixXd train_x = test_util::random_points(spec, n, rng);
    const VectorXd train_y = test_util::random_gaussian_vector(n, 1.0, rng);
    const MatrixXd val_x = test_util::random_points(spec, n, rng);
    const VectorXd val_y = test_util::random_gaussian_vector(n, 1.0, rng);
    const auto grid = build_grid(1.0, 0.25, n);
    const double clip_bound = 1.5;

    const auto adaptive = select_radius(spec, train_x, train_y, val_x, val_y, grid, clip_bound);

    double best = adaptive.validation_risks.front().second;
    double best_radius = adaptive.validation_risks.front().first;
    for (const auto& [radius, risk] : adaptive.validation_risks) {
      if (risk < best) {
        best = risk;
        best_radius = radius;
      }
      // Every grid radius must do no better than the selected one.
      const auto fitted = fit(spec, train_x, train_y, radius);
      const double direct = validation_risk(fitted, clip_bound, val_x, val_y);
      CHECK(direct == doctest::Approx(risk).epsilon(1e-9));
    }
    const double selected_risk = validation_risk(adaptive.fit, clip_bound, val_x, val_y);
    CHECK(selected_risk <= best + 1e-12);
    CHECK(adaptive.selected_radius == best_radius);
  }
}

TEST_CASE("clipping never hurts when the responses are within the clip bound") {
  StreamRng rng(303, 22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = test_util::random_full_rank_spec(rng);
    const Index n = 3 + static_cast<Index>(rng.next_word() % 16);
    const MatrixXd train_x = test_util::random_points(spec, n, rng);
    const VectorXd train_y = test_util::random_gaussian_vector(n, 1.5, rng);
    const MatrixXd val_x = test_util::random_points(spec, n, rng);
    const double clip_bound = 1.0;
    VectorXd val_y(n);
    for (Index i = 0; i < n; ++i) val_y[i] = rng.uniform(-clip_bound, clip_bound);

    const auto fitted = fit(spec, train_x, train_y, 2.0);
    const VectorXd predictions = predict(fitted, val_x);
    double clipped = 0, unclipped = 0;
    for (Index i = 0; i < n; ++i) {
      const double dc = clip(predictions[i], clip_bound) - val_y[i];
      const double du = predictions[i] - val_y[i];
      clipped += dc * dc;
      unclipped += du * du;
    }
    CHECK(clipped / double(n) <= unclipped / double(n) + 1e-12);
    CHECK(validation_risk(fitted, clip_bound, val_x, val_y) ==
          doctest::Approx(clipped / double(n)).epsilon(1e-12));
  }
}

TEST_CASE("refining the grid never increases the minimum risk") {
  StreamRng rng(404, 23);
  const auto spec = KernelSpec<double>::brownian_motion(Domain<double>::interval(0.0, 1.0));
  const Index n = 16;
  const MatrixXd train_x = test_util::separated_points(spec, n, rng);
  const VectorXd train_y = test_util::random_gaussian_vector(n, 1.0, rng);
  const MatrixXd val_x = test_util::random_points(spec, n, rng);
  const VectorXd val_y = test_util::random_gaussian_vector(n, 1.0, rng);

  const auto coarse = build_grid(1.0, 0.5, n);
  auto fine_radii = coarse.radii;
  fine_radii.insert(fine_radii.end(), {0.25, 0.75, 1.25});
  std::sort(fine_radii.begin(), fine_radii.end());
  ValidationGrid<double> fine{1.0, 0.25, n, coarse.rho, fine_radii};

  const auto coarse_fit = select_radius(spec, train_x, train_y, val_x, val_y, coarse, 1.0);
  const auto fine_fit = select_radius(spec, train_x, train_y, val_x, val_y, fine, 1.0);

  const auto min_risk = [](const AdaptiveFit<double>& adaptive) {
    double best = adaptive.validation_risks.front().second;
    for (const auto& [radius, risk] : adaptive.validation_risks) best = std::min(best, risk);
    return best;
  };
  CHECK(min_risk(fine_fit) <= min_risk(coarse_fit) + 1e-15);
}
