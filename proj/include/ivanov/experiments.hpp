#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ivanov/approximation.hpp"
#include "ivanov/bounds.hpp"
#include "ivanov/kernels.hpp"
#include "ivanov/rng.hpp"
#include "ivanov/validation.hpp"

namespace ivanov {

using MatrixXd = MatrixX<double>;
using VectorXd = VectorX<double>;

enum class CovariateLaw { UniformBox, Discrete };
enum class NoiseLaw { Gaussian, BoundedUniform };

/// The regression function of a scenario: either an explicit element of the
/// RKHS (a combination of kernel sections at anchor points) or a function
/// from a small registry of named targets.
class TruthFunction {
 public:
  TruthFunction() = default;  // identically zero

  static TruthFunction in_span(KernelSpec<double> spec, MatrixXd anchors, VectorXd weights);

  /// Registry names: "zero", "step" (a centred jump of height 1),
  /// "sine" (one full period over the first coordinate's box).
  /// Unknown names raise ConfigError.
  static TruthFunction named(const std::string& name, const Domain<double>& domain);

  double operator()(const Eigen::Ref<const VectorXd>& x) const;
  VectorXd values(const MatrixXd& points) const;

  /// RKHS norm for in-span truths; empty otherwise.
  std::optional<double> rkhs_norm() const { return rkhs_norm_; }

 private:
  std::function<double(const Eigen::Ref<const VectorXd>&)> fn_;
  std::optional<double> rkhs_norm_;
};

/// Full description of a synthetic-data experiment.
struct ScenarioConfig {
  KernelSpec<double> kernel;
  CovariateLaw covariate_law = CovariateLaw::UniformBox;
  std::optional<DiscreteDesign<double>> discrete;  // required for CovariateLaw::Discrete
  TruthFunction truth;
  NoiseLaw noise = NoiseLaw::Gaussian;
  double sigma = 0;
  double clip_bound = 1;
  double grid_a = 1;
  double grid_b = 0.25;
  Index n_train = 32;
  double val_ratio = 1;  // validation size as a multiple of n_train
  int replications = 1;
  Index mc_points = 1000;
  std::uint64_t seed = 0;
  int threads = 1;  // 0 chooses the hardware concurrency
  Index oracle_points = 512;
  double target_exponent = -0.5;
  BisectionOptions<double> bisection{};
};

struct GeneratedData {
  MatrixXd train_x;
  VectorXd train_y;
  MatrixXd val_x;
  VectorXd val_y;
};

/// Draw `count` covariates from the scenario's covariate law.
MatrixXd sample_covariates(const ScenarioConfig& config, Index count, StreamRng& rng);

/// Training and validation sets for one replication, deterministic in
/// (config.seed, replication).
GeneratedData generate(const ScenarioConfig& config, std::uint64_t replication);

/// Mean and standard error of the squared error of `predictor` against the
/// truth over `mc_points` fresh covariates.
std::pair<double, double> mc_sq_error(const std::function<VectorXd(const MatrixXd&)>& predictor,
                                      const TruthFunction& truth, const ScenarioConfig& config,
                                      Index mc_points, StreamRng& rng);

struct RateRow {
  Index n = 0;
  double mean_sq_error = 0;
  double std_error = 0;
  double mean_bound = 0;
};

struct ReplicationRecord {
  Index n = 0;
  int replication = 0;
  double r_hat = 0;
  double mc_error = 0;
  double mc_se = 0;
  double bound_value = 0;
  std::uint64_t seed = 0;
};

struct RateReport {
  std::vector<RateRow> rows;                 // one per sample size, ascending n
  std::vector<ReplicationRecord> records;    // one per (n, replication)
  double fitted_slope = 0;
  double fitted_intercept = 0;
  double target_exponent = 0;
};

/// Least-squares fit of log(error) against log(n). The first point is
/// dropped when its standard error exceeds a quarter of its mean, since the
/// transient regime would pollute the slope.
std::pair<double, double> fit_loglog(const std::vector<RateRow>& rows);

/// Run the full pipeline (generate, hold-out selection, Monte-Carlo error,
/// bound evaluation) for every n in `n_values`, with the validation size
/// tied to n through config.val_ratio. Deterministic in config.seed,
/// independent of the thread count.
RateReport run_rate_experiment(const ScenarioConfig& config, const std::vector<Index>& n_values);

}  // namespace ivanov
