#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ivanov/experiments.hpp"

namespace ivanov {

/// Parsed configuration file: ordered sections of ordered key/value pairs.
/// Every key must be consumed by exactly one reader; finish() rejects
/// leftovers, which is what makes the format strict.
class ConfigDoc {
 public:
  static ConfigDoc parse_text(const std::string& text);
  static ConfigDoc parse_file(const std::string& path);

  /// Apply a "section.key=value" override, replacing or inserting the key.
  void apply_override(const std::string& assignment);

  bool has(const std::string& section, const std::string& key) const;
  std::string require(const std::string& section, const std::string& key);
  std::optional<std::string> get(const std::string& section, const std::string& key);

  /// Throws ConfigError if any key was never consumed.
  void finish() const;

  /// Sections and key/value pairs in file order, for echoing into outputs.
  const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>&
  sections() const {
    return sections_;
  }

 private:
  struct Entry {
    std::string value;
    bool consumed = false;
  };
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
  std::map<std::string, std::map<std::string, Entry>> lookup_;
};

double parse_double(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);
std::uint64_t parse_unsigned(const std::string& text, const std::string& what);
std::vector<double> parse_double_list(const std::string& text, const std::string& what);
MatrixX<double> parse_point_rows(const std::string& text, const std::string& what);
Domain<double> parse_domain(const std::string& text);

/// Load "x1,...,xd,y" rows from a headerless CSV file.
std::pair<MatrixX<double>, VectorX<double>> load_xy_csv(const std::string& path);

struct FitJob {
  KernelSpec<double> kernel;
  MatrixX<double> x;
  VectorX<double> y;
  double radius;
  BisectionOptions<double> options;
};

struct ValidateJob {
  KernelSpec<double> kernel;
  MatrixX<double> train_x;
  VectorX<double> train_y;
  MatrixX<double> val_x;
  VectorX<double> val_y;
  double grid_a;
  double grid_b;
  double clip_bound;
  BisectionOptions<double> options;
};

struct BoundsJob {
  BoundParams<double> params;
  double radius = 1;
  double approx_l2 = 0;
  double approx_sup = 0;
  double baseline_risk = 0;
  double covering_eps = 1;
  double entropy_upper = 1;
  double entropy_a = 1;
};

enum class RatesMode { Simulate, SelfTest };

struct RatesJob {
  ScenarioConfig scenario;
  std::vector<Index> n_values;
  RatesMode mode = RatesMode::Simulate;
};

KernelSpec<double> load_kernel(ConfigDoc& doc);
BisectionOptions<double> load_bisection(ConfigDoc& doc);
FitJob load_fit_job(ConfigDoc& doc);
ValidateJob load_validate_job(ConfigDoc& doc);
BoundsJob load_bounds_job(ConfigDoc& doc);
RatesJob load_rates_job(ConfigDoc& doc);

/// Minimal ordered JSON document. Numbers are emitted with 17 significant
/// digits so that every double round-trips exactly.
class JsonValue {
 public:
  static JsonValue object();
  static JsonValue array();
  static JsonValue number(double value);
  static JsonValue integer(long long value);
  static JsonValue unsigned_integer(std::uint64_t value);
  static JsonValue string(std::string value);
  static JsonValue boolean(bool value);

  JsonValue& set(const std::string& key, JsonValue value);  // object members, insertion order
  JsonValue& push(JsonValue value);                         // array elements

  std::string dump(int indent = 2) const;

 private:
  using Object = std::vector<std::pair<std::string, JsonValue>>;
  using Array = std::vector<JsonValue>;
  std::variant<std::nullptr_t, bool, double, long long, std::uint64_t, std::string, Object, Array>
      value_ = nullptr;

  void write(std::string& out, int indent, int depth) const;
};

std::string format_double17(double value);

/// The resolved configuration as a JSON object, section by section.
JsonValue config_echo(const ConfigDoc& doc);

/// CSV with the per-replication records: header row, LF line endings,
/// 17-significant-digit numbers.
std::string rate_report_csv(const RateReport& report);

JsonValue rate_report_summary(const RateReport& report);

/// Synthetic report for the fitter self-test mode: pushes the sequence
/// e(n) = n^{-1/2} through the same fitting and reporting path.
RateReport self_test_report(const std::vector<Index>& n_values, double target_exponent);

}  // namespace ivanov
