#include "ivanov/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace ivanov {

TruthFunction TruthFunction::in_span(KernelSpec<double> spec, MatrixXd anchors, VectorXd weights) {
  if (anchors.rows() != weights.size() || anchors.rows() < 1)
    throw ConfigError("truth: need one weight per anchor point, at least one anchor");
  const MatrixXd anchor_gram = gram_matrix(spec, anchors);
  TruthFunction truth;
  truth.rkhs_norm_ = std::sqrt(std::max(0.0, weights.dot(anchor_gram * weights)));
  truth.fn_ = [spec = std::move(spec), anchors = std::move(anchors),
               weights = std::move(weights)](const Eigen::Ref<const VectorXd>& x) {
    double sum = 0;
    for (Index j = 0; j < anchors.rows(); ++j)
      sum += weights[j] * detail::eval_unchecked<double>(spec, anchors.row(j).transpose(), x);
    return sum;
  };
  return truth;
}

TruthFunction TruthFunction::named(const std::string& name, const Domain<double>& domain) {
  TruthFunction truth;
  if (name == "zero") {
    truth.fn_ = [](const Eigen::Ref<const VectorXd>&) { return 0.0; };
  } else if (name == "step") {
    const double mid = (domain.lower[0] + domain.upper[0]) / 2;
    truth.fn_ = [mid](const Eigen::Ref<const VectorXd>& x) { return x[0] < mid ? -0.5 : 0.5; };
  } else if (name == "sine") {
    const double lo = domain.lower[0];
    const double width = domain.upper[0] - domain.lower[0];
    truth.fn_ = [lo, width](const Eigen::Ref<const VectorXd>& x) {
      return std::sin(2 * std::numbers::pi * (x[0] - lo) / width);
    };
  } else {
    throw ConfigError("truth: unknown registry name '" + name + "'");
  }
  return truth;
}

double TruthFunction::operator()(const Eigen::Ref<const VectorXd>& x) const {
  return fn_ ? fn_(x) : 0.0;
}

VectorXd TruthFunction::values(const MatrixXd& points) const {
  VectorXd values(points.rows());
  for (Index i = 0; i < points.rows(); ++i) values[i] = (*this)(points.row(i).transpose());
  return values;
}

MatrixXd sample_covariates(const ScenarioConfig& config, Index count, StreamRng& rng) {
  if (config.covariate_law == CovariateLaw::Discrete) {
    if (!config.discrete) throw ConfigError("scenario: discrete covariate law needs a design");
    const auto& design = *config.discrete;
    design.validate();
    MatrixXd points(count, design.points.cols());
    for (Index i = 0; i < count; ++i) {
      const double u = rng.uniform01();
      double cumulative = 0;
      Index pick = design.points.rows() - 1;
      for (Index j = 0; j < design.points.rows(); ++j) {
        cumulative += design.weights[j];
        if (u < cumulative) {
          pick = j;
          break;
        }
      }
      points.row(i) = design.points.row(pick);
    }
    return points;
  }

  const auto& domain = config.kernel.domain();
  MatrixXd points(count, domain.dim());
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < domain.dim(); ++j) points(i, j) = rng.uniform(domain.lower[j], domain.upper[j]);
  return points;
}

namespace {

double draw_noise(const ScenarioConfig& config, StreamRng& rng) {
  switch (config.noise) {
    case NoiseLaw::Gaussian:
      return config.sigma * rng.gaussian();
    case NoiseLaw::BoundedUniform: {
      const double width = config.sigma * std::sqrt(3.0);  // variance sigma^2
      return rng.uniform(-width, width);
    }
  }
  return 0;
}

VectorXd noisy_responses(const ScenarioConfig& config, const TruthFunction& truth,
                         const MatrixXd& points, StreamRng& rng) {
  VectorXd y(points.rows());
  for (Index i = 0; i < points.rows(); ++i)
    y[i] = truth(points.row(i).transpose()) + draw_noise(config, rng);
  return y;
}

}  // namespace

GeneratedData generate(const ScenarioConfig& config, std::uint64_t replication) {
  if (config.sigma < 0) throw ConfigError("scenario: noise scale must be non-negative");
  const Index n = config.n_train;
  const Index n_val = std::max<Index>(1, static_cast<Index>(std::llround(config.val_ratio * n)));
  if (n < 1) throw ConfigError("scenario: training size must be positive");

  StreamRng train_points_rng = substream(config.seed, replication, StreamPurpose::TrainPoints);
  StreamRng train_noise_rng = substream(config.seed, replication, StreamPurpose::TrainNoise);
  StreamRng val_points_rng = substream(config.seed, replication, StreamPurpose::ValidationPoints);
  StreamRng val_noise_rng = substream(config.seed, replication, StreamPurpose::ValidationNoise);

  GeneratedData data;
  data.train_x = sample_covariates(config, n, train_points_rng);
  data.train_y = noisy_responses(config, config.truth, data.train_x, train_noise_rng);
  data.val_x = sample_covariates(config, n_val, val_points_rng);
  data.val_y = noisy_responses(config, config.truth, data.val_x, val_noise_rng);
  return data;
}

std::pair<double, double> mc_sq_error(const std::function<VectorXd(const MatrixXd&)>& predictor,
                                      const TruthFunction& truth, const ScenarioConfig& config,
                                      Index mc_points, StreamRng& rng) {
  if (mc_points < 2) throw std::invalid_argument("mc_sq_error: need at least two draws");
  const MatrixXd points = sample_covariates(config, mc_points, rng);
  const VectorXd predicted = predictor(points);
  const VectorXd target = truth.values(points);

  double mean = 0;
  for (Index i = 0; i < mc_points; ++i) {
    const double diff = predicted[i] - target[i];
    mean += diff * diff;
  }
  mean /= static_cast<double>(mc_points);

  double var = 0;
  for (Index i = 0; i < mc_points; ++i) {
    const double diff = predicted[i] - target[i];
    const double dev = diff * diff - mean;
    var += dev * dev;
  }
  var /= static_cast<double>(mc_points - 1);
  return {mean, std::sqrt(var / static_cast<double>(mc_points))};
}

std::pair<double, double> fit_loglog(const std::vector<RateRow>& rows) {
  std::vector<RateRow> used = rows;
  if (used.size() >= 3 && used.front().std_error > 0.25 * used.front().mean_sq_error)
    used.erase(used.begin());
  if (used.size() < 2) throw std::invalid_argument("fit_loglog: need at least two usable rows");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& row : used) {
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.mean_sq_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double count = static_cast<double>(used.size());
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return {slope, (sy - slope * sx) / count};
}

namespace {

// Evenly spaced cell midpoints of the covariate box, axis by axis. For the
// one-dimensional scenarios this gives exactly `total` points.
MatrixXd oracle_lattice(const Domain<double>& domain, Index total) {
  const Index d = domain.dim();
  const Index per_dim = std::max<Index>(
      1, static_cast<Index>(std::llround(std::ceil(std::pow(static_cast<double>(total), 1.0 / d)))));
  Index count = 1;
  for (Index j = 0; j < d; ++j) count *= per_dim;

  MatrixXd points(count, d);
  for (Index i = 0; i < count; ++i) {
    Index rest = i;
    for (Index j = 0; j < d; ++j) {
      const Index cell = rest % per_dim;
      rest /= per_dim;
      const double frac = (static_cast<double>(cell) + 0.5) / static_cast<double>(per_dim);
      points(i, j) = domain.lower[j] + frac * (domain.upper[j] - domain.lower[j]);
    }
  }
  return points;
}

struct ReplicationTask {
  const ScenarioConfig* config;
  const L2BallDistance<double>* oracle;
  BoundParams<double> bound_params;
};

ReplicationRecord run_replication(const ReplicationTask& task, int replication) {
  const ScenarioConfig& config = *task.config;
  const GeneratedData data = generate(config, static_cast<std::uint64_t>(replication));

  const ValidationGrid<double> grid = build_grid(config.grid_a, config.grid_b, config.n_train);
  const AdaptiveFit<double> adaptive =
      select_radius(config.kernel, data.train_x, data.train_y, data.val_x, data.val_y, grid,
                    config.clip_bound, config.bisection);

  const double clip_bound = config.clip_bound;
  const auto predictor = [&adaptive, clip_bound](const MatrixXd& points) {
    VectorXd values = predict(adaptive.fit, points);
    for (Index i = 0; i < values.size(); ++i) values[i] = clip(values[i], clip_bound);
    return values;
  };

  StreamRng mc_rng = substream(config.seed, static_cast<std::uint64_t>(replication),
                               StreamPurpose::MonteCarlo);
  const auto [mc_mean, mc_se] = mc_sq_error(predictor, config.truth, config, config.mc_points, mc_rng);

  const double r_hat = adaptive.selected_radius;
  const double approx = (*task.oracle)(r_hat);
  const double bound = bound_expectation_clipped(task.bound_params, r_hat, approx);

  return ReplicationRecord{config.n_train, replication, r_hat, mc_mean, mc_se, bound, config.seed};
}

}  // namespace

RateReport run_rate_experiment(const ScenarioConfig& config, const std::vector<Index>& n_values) {
  if (n_values.size() < 3) throw std::invalid_argument("run_rate_experiment: need at least three sample sizes");
  if (!std::is_sorted(n_values.begin(), n_values.end()))
    throw std::invalid_argument("run_rate_experiment: sample sizes must be ascending");
  if (config.replications < 1) throw ConfigError("scenario: need at least one replication");

  // One approximation oracle serves the whole experiment: the design and the
  // truth do not depend on n.
  const MatrixXd oracle_points = oracle_lattice(config.kernel.domain(), config.oracle_points);
  const DiscreteDesign<double> oracle_design = DiscreteDesign<double>::uniform(oracle_points);
  const L2BallDistance<double> oracle(config.kernel, oracle_design, config.truth.values(oracle_points));

  BoundParams<double> bound_params;
  bound_params.kernel_sup = sup_norm(config.kernel);
  bound_params.sigma = config.sigma;
  bound_params.clip_bound = config.clip_bound;

  int thread_count = config.threads;
  if (thread_count == 0)
    thread_count = std::max(1u, std::thread::hardware_concurrency());
  thread_count = std::max(1, thread_count);

  RateReport report;
  report.target_exponent = config.target_exponent;

  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    const Index n = n_values[ni];
    ScenarioConfig local = config;
    local.n_train = n;
    local.seed = splitmix64(splitmix64(config.seed) ^ splitmix64(static_cast<std::uint64_t>(n)));

    ReplicationTask task{&local, &oracle, bound_params};
    task.bound_params.n = static_cast<double>(n);
    task.bound_params.n_tilde =
        static_cast<double>(std::max<Index>(1, static_cast<Index>(std::llround(config.val_ratio * n))));
    task.bound_params.rho = config.grid_a * std::sqrt(static_cast<double>(n));

    std::vector<ReplicationRecord> slots(static_cast<std::size_t>(config.replications));
    if (thread_count == 1 || config.replications == 1) {
      for (int rep = 0; rep < config.replications; ++rep)
        slots[static_cast<std::size_t>(rep)] = run_replication(task, rep);
    } else {
      std::atomic<int> next{0};
      auto worker = [&]() {
        for (;;) {
          const int rep = next.fetch_add(1);
          if (rep >= config.replications) return;
          slots[static_cast<std::size_t>(rep)] = run_replication(task, rep);
        }
      };
      std::vector<std::thread> pool;
      const int workers = std::min(thread_count, config.replications);
      pool.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    RateRow row;
    row.n = n;
    double sum = 0, bound_sum = 0;
    for (const auto& record : slots) {
      sum += record.mc_error;
      bound_sum += record.bound_value;
    }
    row.mean_sq_error = sum / static_cast<double>(config.replications);
    row.mean_bound = bound_sum / static_cast<double>(config.replications);
    if (config.replications > 1) {
      double var = 0;
      for (const auto& record : slots) {
        const double dev = record.mc_error - row.mean_sq_error;
        var += dev * dev;
      }
      var /= static_cast<double>(config.replications - 1);
      row.std_error = std::sqrt(var / static_cast<double>(config.replications));
    }

    report.rows.push_back(row);
    report.records.insert(report.records.end(), slots.begin(), slots.end());
  }

  const auto [slope, intercept] = fit_loglog(report.rows);
  report.fitted_slope = slope;
  report.fitted_intercept = intercept;
  return report;
}

}  // namespace ivanov
