#include "ivanov/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ivanov {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::vector<std::string> split(const std::string& text, char separator) {
  std::vector<std::string> parts;
  std::string current;
  for (const char c : text) {
    if (c == separator) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

}  // namespace

ConfigDoc ConfigDoc::parse_text(const std::string& text) {
  ConfigDoc doc;
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw ConfigError("config line " + std::to_string(line_number) + ": malformed section header");
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_number) + ": empty section name");
      if (doc.lookup_.count(section))
        throw ConfigError("config line " + std::to_string(line_number) + ": duplicate section [" +
                          section + "]");
      doc.lookup_[section];
      doc.sections_.emplace_back(section, std::vector<std::pair<std::string, std::string>>{});
      continue;
    }
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_number) + ": key outside any section");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_number) + ": empty key");
    auto& entries = doc.lookup_[section];
    if (entries.count(key))
      throw ConfigError("config line " + std::to_string(line_number) + ": duplicate key '" + key +
                        "' in [" + section + "]");
    entries[key] = Entry{value, false};
    doc.sections_.back().second.emplace_back(key, value);
  }
  return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_text(buffer.str());
}

void ConfigDoc::apply_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: " + assignment);
  const std::string dotted = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const std::size_t dot = dotted.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
    throw ConfigError("override must look like section.key=value: " + assignment);
  const std::string section = dotted.substr(0, dot);
  const std::string key = dotted.substr(dot + 1);

  lookup_[section][key] = Entry{value, false};
  for (auto& [name, pairs] : sections_) {
    if (name != section) continue;
    for (auto& [k, v] : pairs) {
      if (k == key) {
        v = value;
        return;
      }
    }
    pairs.emplace_back(key, value);
    return;
  }
  sections_.emplace_back(section,
                         std::vector<std::pair<std::string, std::string>>{{key, value}});
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  const auto sit = lookup_.find(section);
  return sit != lookup_.end() && sit->second.count(key) > 0;
}

std::string ConfigDoc::require(const std::string& section, const std::string& key) {
  auto value = get(section, key);
  if (!value) throw ConfigError("missing required config key " + section + "." + key);
  return *value;
}

std::optional<std::string> ConfigDoc::get(const std::string& section, const std::string& key) {
  const auto sit = lookup_.find(section);
  if (sit == lookup_.end()) return std::nullopt;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return std::nullopt;
  kit->second.consumed = true;
  return kit->second.value;
}

void ConfigDoc::finish() const {
  for (const auto& [section, entries] : lookup_)
    for (const auto& [key, entry] : entries)
      if (!entry.consumed)
        throw ConfigError("unrecognised config key " + section + "." + key);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string stripped = trim(text);
  if (stripped.empty()) throw ConfigError(what + ": empty number");
  char* end = nullptr;
  const double value = std::strtod(stripped.c_str(), &end);
  if (end != stripped.c_str() + stripped.size()) throw ConfigError(what + ": bad number '" + text + "'");
  return value;
}

long long parse_integer(const std::string& text, const std::string& what) {
  const std::string stripped = trim(text);
  if (stripped.empty()) throw ConfigError(what + ": empty integer");
  char* end = nullptr;
  const long long value = std::strtoll(stripped.c_str(), &end, 10);
  if (end != stripped.c_str() + stripped.size())
    throw ConfigError(what + ": bad integer '" + text + "'");
  return value;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  const std::string stripped = trim(text);
  if (stripped.empty()) throw ConfigError(what + ": empty integer");
  char* end = nullptr;
  const unsigned long long value = std::strtoull(stripped.c_str(), &end, 10);
  if (end != stripped.c_str() + stripped.size() || stripped[0] == '-')
    throw ConfigError(what + ": bad unsigned integer '" + text + "'");
  return value;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_double(part, what));
  return values;
}

MatrixX<double> parse_point_rows(const std::string& text, const std::string& what) {
  const auto rows = split(text, ';');
  std::vector<std::vector<double>> parsed;
  for (const auto& row : rows) {
    if (trim(row).empty()) continue;
    parsed.push_back(parse_double_list(row, what));
    if (parsed.back().size() != parsed.front().size())
      throw ConfigError(what + ": rows have inconsistent dimensions");
  }
  if (parsed.empty()) throw ConfigError(what + ": no points given");
  MatrixX<double> points(static_cast<Index>(parsed.size()), static_cast<Index>(parsed.front().size()));
  for (std::size_t i = 0; i < parsed.size(); ++i)
    for (std::size_t j = 0; j < parsed[i].size(); ++j)
      points(static_cast<Index>(i), static_cast<Index>(j)) = parsed[i][j];
  return points;
}

Domain<double> parse_domain(const std::string& text) {
  const auto dims = split(text, ',');
  VectorX<double> lo(static_cast<Index>(dims.size()));
  VectorX<double> hi(static_cast<Index>(dims.size()));
  for (std::size_t j = 0; j < dims.size(); ++j) {
    const auto bounds = split(dims[j], ':');
    if (bounds.size() != 2) throw ConfigError("domain: expected lo:hi per dimension");
    lo[static_cast<Index>(j)] = parse_double(bounds[0], "domain");
    hi[static_cast<Index>(j)] = parse_double(bounds[1], "domain");
  }
  return Domain<double>::box(std::move(lo), std::move(hi));
}

std::pair<MatrixX<double>, VectorX<double>> load_xy_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open data file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(file, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    rows.push_back(parse_double_list(stripped, "data file " + path));
    if (rows.back().size() != rows.front().size())
      throw ConfigError("data file " + path + ": inconsistent column counts");
  }
  if (rows.empty() || rows.front().size() < 2)
    throw ConfigError("data file " + path + ": need at least one row of x...,y");
  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(rows.front().size()) - 1;
  MatrixX<double> x(n, d);
  VectorX<double> y(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    y[i] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  }
  return {std::move(x), std::move(y)};
}

KernelSpec<double> load_kernel(ConfigDoc& doc) {
  const std::string family = doc.require("kernel", "family");
  Domain<double> domain = parse_domain(doc.require("kernel", "domain"));
  if (family == "gaussian")
    return KernelSpec<double>::gaussian(parse_double(doc.require("kernel", "lengthscale"), "lengthscale"),
                                        std::move(domain));
  if (family == "laplacian")
    return KernelSpec<double>::laplacian(parse_double(doc.require("kernel", "lengthscale"), "lengthscale"),
                                         std::move(domain));
  if (family == "brownian") return KernelSpec<double>::brownian_motion(std::move(domain));
  if (family == "linear")
    return KernelSpec<double>::linear(parse_double(doc.require("kernel", "offset"), "offset"),
                                      parse_double(doc.require("kernel", "scale_bound"), "scale_bound"),
                                      std::move(domain));
  throw ConfigError("kernel.family must be gaussian, laplacian, brownian or linear");
}

BisectionOptions<double> load_bisection(ConfigDoc& doc) {
  BisectionOptions<double> options;
  if (const auto v = doc.get("bisection", "tolerance"))
    options.tolerance = parse_double(*v, "bisection.tolerance");
  if (const auto v = doc.get("bisection", "max_iterations"))
    options.max_iterations = static_cast<int>(parse_integer(*v, "bisection.max_iterations"));
  if (const auto v = doc.get("bisection", "strategy")) {
    if (*v == "diagonalised")
      options.strategy = BisectionStrategy::Diagonalised;
    else if (*v == "matrix_solve")
      options.strategy = BisectionStrategy::MatrixSolve;
    else
      throw ConfigError("bisection.strategy must be diagonalised or matrix_solve");
  }
  if (const auto v = doc.get("bisection", "radius_tolerance"))
    if (!trim(*v).empty()) options.radius_tolerance = parse_double(*v, "bisection.radius_tolerance");
  return options;
}

namespace {

std::pair<MatrixX<double>, VectorX<double>> load_inline_or_csv(ConfigDoc& doc,
                                                               const std::string& x_key,
                                                               const std::string& y_key,
                                                               const std::string& csv_key) {
  const bool has_inline = doc.has("data", x_key) || doc.has("data", y_key);
  const bool has_csv = doc.has("data", csv_key);
  if (has_inline == has_csv)
    throw ConfigError("data: give either " + x_key + "/" + y_key + " or " + csv_key);
  if (has_csv) return load_xy_csv(doc.require("data", csv_key));

  MatrixX<double> x = parse_point_rows(doc.require("data", x_key), "data." + x_key);
  const std::vector<double> y_values = parse_double_list(doc.require("data", y_key), "data." + y_key);
  if (static_cast<Index>(y_values.size()) != x.rows())
    throw ConfigError("data: " + x_key + " and " + y_key + " disagree in length");
  VectorX<double> y(x.rows());
  for (Index i = 0; i < y.size(); ++i) y[i] = y_values[static_cast<std::size_t>(i)];
  return {std::move(x), std::move(y)};
}

}  // namespace

FitJob load_fit_job(ConfigDoc& doc) {
  KernelSpec<double> kernel = load_kernel(doc);
  auto [x, y] = load_inline_or_csv(doc, "x", "y", "train_csv");
  const double radius = parse_double(doc.require("fit", "radius"), "fit.radius");
  if (radius < 0) throw ConfigError("fit.radius must be non-negative");
  BisectionOptions<double> options = load_bisection(doc);
  doc.finish();
  return FitJob{std::move(kernel), std::move(x), std::move(y), radius, options};
}

ValidateJob load_validate_job(ConfigDoc& doc) {
  KernelSpec<double> kernel = load_kernel(doc);
  auto [train_x, train_y] = load_inline_or_csv(doc, "x", "y", "train_csv");
  auto [val_x, val_y] = load_inline_or_csv(doc, "x_val", "y_val", "val_csv");
  const double a = parse_double(doc.require("validate", "a"), "validate.a");
  const double b = parse_double(doc.require("validate", "b"), "validate.b");
  const double clip_bound = parse_double(doc.require("validate", "clip_bound"), "validate.clip_bound");
  BisectionOptions<double> options = load_bisection(doc);
  doc.finish();
  return ValidateJob{std::move(kernel), std::move(train_x), std::move(train_y), std::move(val_x),
                     std::move(val_y),  a,                  b,                  clip_bound,
                     options};
}

BoundsJob load_bounds_job(ConfigDoc& doc) {
  BoundsJob job;
  job.params.kernel_sup = parse_double(doc.require("bounds", "k_inf"), "bounds.k_inf");
  job.params.sigma = parse_double(doc.require("bounds", "sigma"), "bounds.sigma");
  job.params.clip_bound = parse_double(doc.require("bounds", "clip_bound"), "bounds.clip_bound");
  job.params.n = parse_double(doc.require("bounds", "n"), "bounds.n");
  if (const auto v = doc.get("bounds", "sigma_tilde"))
    job.params.sigma_tilde = parse_double(*v, "bounds.sigma_tilde");
  if (const auto v = doc.get("bounds", "interp_norm"))
    job.params.interp_norm = parse_double(*v, "bounds.interp_norm");
  if (const auto v = doc.get("bounds", "beta")) job.params.beta = parse_double(*v, "bounds.beta");
  if (const auto v = doc.get("bounds", "n_tilde"))
    job.params.n_tilde = parse_double(*v, "bounds.n_tilde");
  if (const auto v = doc.get("bounds", "t")) job.params.tail = parse_double(*v, "bounds.t");
  if (const auto v = doc.get("bounds", "rho")) job.params.rho = parse_double(*v, "bounds.rho");
  if (const auto v = doc.get("bounds", "radius")) job.radius = parse_double(*v, "bounds.radius");
  if (const auto v = doc.get("bounds", "i2")) job.approx_l2 = parse_double(*v, "bounds.i2");
  if (const auto v = doc.get("bounds", "iinf")) job.approx_sup = parse_double(*v, "bounds.iinf");
  if (const auto v = doc.get("bounds", "baseline_risk"))
    job.baseline_risk = parse_double(*v, "bounds.baseline_risk");
  if (const auto v = doc.get("bounds", "covering_eps"))
    job.covering_eps = parse_double(*v, "bounds.covering_eps");
  if (const auto v = doc.get("bounds", "entropy_upper"))
    job.entropy_upper = parse_double(*v, "bounds.entropy_upper");
  if (const auto v = doc.get("bounds", "entropy_a"))
    job.entropy_a = parse_double(*v, "bounds.entropy_a");
  doc.finish();
  return job;
}

RatesJob load_rates_job(ConfigDoc& doc) {
  KernelSpec<double> kernel = load_kernel(doc);

  TruthFunction truth;
  const std::string truth_name = doc.require("experiment", "truth");
  if (truth_name == "inspan") {
    MatrixX<double> anchors =
        parse_point_rows(doc.require("experiment", "anchors"), "experiment.anchors");
    const std::vector<double> w =
        parse_double_list(doc.require("experiment", "anchor_weights"), "experiment.anchor_weights");
    VectorX<double> weights(static_cast<Index>(w.size()));
    for (Index i = 0; i < weights.size(); ++i) weights[i] = w[static_cast<std::size_t>(i)];
    truth = TruthFunction::in_span(kernel, std::move(anchors), std::move(weights));
  } else {
    truth = TruthFunction::named(truth_name, kernel.domain());
  }

  ScenarioConfig scenario{std::move(kernel)};
  scenario.truth = std::move(truth);

  if (const auto v = doc.get("experiment", "covariates")) {
    if (*v == "uniform")
      scenario.covariate_law = CovariateLaw::UniformBox;
    else if (*v == "discrete")
      scenario.covariate_law = CovariateLaw::Discrete;
    else
      throw ConfigError("experiment.covariates must be uniform or discrete");
  }
  if (scenario.covariate_law == CovariateLaw::Discrete) {
    MatrixX<double> points =
        parse_point_rows(doc.require("experiment", "design_points"), "experiment.design_points");
    const std::vector<double> w = parse_double_list(doc.require("experiment", "design_weights"),
                                                    "experiment.design_weights");
    VectorX<double> weights(static_cast<Index>(w.size()));
    for (Index i = 0; i < weights.size(); ++i) weights[i] = w[static_cast<std::size_t>(i)];
    scenario.discrete = DiscreteDesign<double>{std::move(points), std::move(weights)};
    scenario.discrete->validate();
  }

  if (const auto v = doc.get("experiment", "noise")) {
    if (*v == "gaussian")
      scenario.noise = NoiseLaw::Gaussian;
    else if (*v == "bounded_uniform")
      scenario.noise = NoiseLaw::BoundedUniform;
    else
      throw ConfigError("experiment.noise must be gaussian or bounded_uniform");
  }
  if (const auto v = doc.get("experiment", "sigma")) scenario.sigma = parse_double(*v, "experiment.sigma");
  if (const auto v = doc.get("experiment", "clip_bound"))
    scenario.clip_bound = parse_double(*v, "experiment.clip_bound");
  if (const auto v = doc.get("experiment", "grid_a")) scenario.grid_a = parse_double(*v, "experiment.grid_a");
  if (const auto v = doc.get("experiment", "grid_b")) scenario.grid_b = parse_double(*v, "experiment.grid_b");
  if (const auto v = doc.get("experiment", "val_ratio"))
    scenario.val_ratio = parse_double(*v, "experiment.val_ratio");
  if (const auto v = doc.get("experiment", "replications"))
    scenario.replications = static_cast<int>(parse_integer(*v, "experiment.replications"));
  if (const auto v = doc.get("experiment", "mc_points"))
    scenario.mc_points = static_cast<Index>(parse_integer(*v, "experiment.mc_points"));
  if (const auto v = doc.get("experiment", "seed")) scenario.seed = parse_unsigned(*v, "experiment.seed");
  if (const auto v = doc.get("experiment", "threads"))
    scenario.threads = static_cast<int>(parse_integer(*v, "experiment.threads"));
  if (const auto v = doc.get("experiment", "oracle_points"))
    scenario.oracle_points = static_cast<Index>(parse_integer(*v, "experiment.oracle_points"));
  if (const auto v = doc.get("experiment", "target_exponent"))
    scenario.target_exponent = parse_double(*v, "experiment.target_exponent");
  scenario.bisection = load_bisection(doc);

  RatesJob job{std::move(scenario), {}, RatesMode::Simulate};
  for (const auto& part :
       parse_double_list(doc.require("experiment", "n_values"), "experiment.n_values")) {
    if (part < 1 || part != std::floor(part))
      throw ConfigError("experiment.n_values must be positive integers");
    job.n_values.push_back(static_cast<Index>(part));
  }
  if (const auto v = doc.get("experiment", "mode")) {
    if (*v == "simulate")
      job.mode = RatesMode::Simulate;
    else if (*v == "selftest")
      job.mode = RatesMode::SelfTest;
    else
      throw ConfigError("experiment.mode must be simulate or selftest");
  }
  doc.finish();
  return job;
}

// ---------------------------------------------------------------------------
// JSON output

JsonValue JsonValue::object() {
  JsonValue v;
  v.value_ = Object{};
  return v;
}

JsonValue JsonValue::array() {
  JsonValue v;
  v.value_ = Array{};
  return v;
}

JsonValue JsonValue::number(double value) {
  JsonValue v;
  v.value_ = value;
  return v;
}

JsonValue JsonValue::integer(long long value) {
  JsonValue v;
  v.value_ = value;
  return v;
}

JsonValue JsonValue::unsigned_integer(std::uint64_t value) {
  JsonValue v;
  v.value_ = value;
  return v;
}

JsonValue JsonValue::string(std::string value) {
  JsonValue v;
  v.value_ = std::move(value);
  return v;
}

JsonValue JsonValue::boolean(bool value) {
  JsonValue v;
  v.value_ = value;
  return v;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue value) {
  std::get<Object>(value_).emplace_back(key, std::move(value));
  return *this;
}

JsonValue& JsonValue::push(JsonValue value) {
  std::get<Array>(value_).push_back(std::move(value));
  return *this;
}

std::string format_double17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

void write_escaped(std::string& out, const std::string& text) {
  out.push_back('"');
  for (const char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buffer[8];
          std::snprintf(buffer, sizeof(buffer), "\\u%04x", c);
          out += buffer;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

}  // namespace

void JsonValue::write(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth), ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth + 1), ' ');
  if (std::holds_alternative<std::nullptr_t>(value_)) {
    out += "null";
  } else if (const auto* b = std::get_if<bool>(&value_)) {
    out += *b ? "true" : "false";
  } else if (const auto* d = std::get_if<double>(&value_)) {
    out += format_double17(*d);
  } else if (const auto* i = std::get_if<long long>(&value_)) {
    out += std::to_string(*i);
  } else if (const auto* u = std::get_if<std::uint64_t>(&value_)) {
    out += std::to_string(*u);
  } else if (const auto* s = std::get_if<std::string>(&value_)) {
    write_escaped(out, *s);
  } else if (const auto* obj = std::get_if<Object>(&value_)) {
    if (obj->empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    for (std::size_t i = 0; i < obj->size(); ++i) {
      out += pad_in;
      write_escaped(out, (*obj)[i].first);
      out += ": ";
      (*obj)[i].second.write(out, indent, depth + 1);
      if (i + 1 < obj->size()) out += ",";
      out += "\n";
    }
    out += pad + "}";
  } else if (const auto* arr = std::get_if<Array>(&value_)) {
    if (arr->empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < arr->size(); ++i) {
      out += pad_in;
      (*arr)[i].write(out, indent, depth + 1);
      if (i + 1 < arr->size()) out += ",";
      out += "\n";
    }
    out += pad + "]";
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += "\n";
  return out;
}

JsonValue config_echo(const ConfigDoc& doc) {
  JsonValue echo = JsonValue::object();
  for (const auto& [section, pairs] : doc.sections()) {
    JsonValue obj = JsonValue::object();
    for (const auto& [key, value] : pairs) obj.set(key, JsonValue::string(value));
    echo.set(section, std::move(obj));
  }
  return echo;
}

std::string rate_report_csv(const RateReport& report) {
  std::string out = "n,replication,r_hat,mc_error,mc_se,bound_value,seed\n";
  for (const auto& record : report.records) {
    out += std::to_string(record.n);
    out += ',';
    out += std::to_string(record.replication);
    out += ',';
    out += format_double17(record.r_hat);
    out += ',';
    out += format_double17(record.mc_error);
    out += ',';
    out += format_double17(record.mc_se);
    out += ',';
    out += format_double17(record.bound_value);
    out += ',';
    out += std::to_string(record.seed);
    out += '\n';
  }
  return out;
}

JsonValue rate_report_summary(const RateReport& report) {
  JsonValue rows = JsonValue::array();
  for (const auto& row : report.rows) {
    JsonValue entry = JsonValue::object();
    entry.set("n", JsonValue::integer(row.n));
    entry.set("mean_sq_error", JsonValue::number(row.mean_sq_error));
    entry.set("std_error", JsonValue::number(row.std_error));
    entry.set("mean_bound", JsonValue::number(row.mean_bound));
    rows.push(std::move(entry));
  }
  JsonValue summary = JsonValue::object();
  summary.set("fitted_slope", JsonValue::number(report.fitted_slope));
  summary.set("fitted_intercept", JsonValue::number(report.fitted_intercept));
  summary.set("target_exponent", JsonValue::number(report.target_exponent));
  summary.set("rows", std::move(rows));
  return summary;
}

RateReport self_test_report(const std::vector<Index>& n_values, double target_exponent) {
  if (n_values.size() < 3)
    throw std::invalid_argument("self_test_report: need at least three sample sizes");
  RateReport report;
  report.target_exponent = target_exponent;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const Index n = n_values[i];
    const double error = std::pow(static_cast<double>(n), -0.5);
    report.rows.push_back(RateRow{n, error, 0, 0});
    report.records.push_back(ReplicationRecord{n, 0, 0, error, 0, 0, 0});
  }
  const auto [slope, intercept] = fit_loglog(report.rows);
  report.fitted_slope = slope;
  report.fitted_intercept = intercept;
  return report;
}

}  // namespace ivanov
