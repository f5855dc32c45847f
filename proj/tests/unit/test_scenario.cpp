#include <doctest.h>

#include <cstdlib>
#include <ivanov/scenario.hpp>

using namespace ivanov;

namespace {

const char* kFitConfig = R"(# single-point instance
[kernel]
family = gaussian
lengthscale = 1.0
domain = -1:1

[data]
x = 0.0
y = 2.0

[fit]
radius = 1.0
)";

const char* kRatesConfig = R"([kernel]
family = brownian
domain = 0:1

[experiment]
truth = inspan
anchors = 0.5
anchor_weights = 1.0
noise = gaussian
sigma = 0.1
clip_bound = 1.0
n_values = 8,16,32
replications = 2
mc_points = 100
seed = 7
)";

}  // namespace

TEST_CASE("fit configs parse into typed jobs") {
  ConfigDoc doc = ConfigDoc::parse_text(kFitConfig);
  const FitJob job = load_fit_job(doc);
  CHECK(job.radius == 1.0);
  CHECK(job.x(0, 0) == 0.0);
  CHECK(job.y[0] == 2.0);
  CHECK(job.kernel.family() == KernelFamily::Gaussian);
}

TEST_CASE("unknown keys and sections are rejected") {
  ConfigDoc doc = ConfigDoc::parse_text(std::string(kFitConfig) + "\nwiggle = 3\n");
  CHECK_THROWS_AS(load_fit_job(doc), ConfigError);

  ConfigDoc with_section = ConfigDoc::parse_text(std::string(kFitConfig) + "\n[extra]\nkey = 1\n");
  CHECK_THROWS_AS(load_fit_job(with_section), ConfigError);

  CHECK_THROWS_AS(ConfigDoc::parse_text("key_without_section = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::parse_text("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::parse_text("[a]\nno equals sign\n"), ConfigError);
}

TEST_CASE("overrides replace values and must name known keys") {
  ConfigDoc doc = ConfigDoc::parse_text(kFitConfig);
  doc.apply_override("fit.radius=2.5");
  const FitJob job = load_fit_job(doc);
  CHECK(job.radius == 2.5);

  ConfigDoc bogus = ConfigDoc::parse_text(kFitConfig);
  bogus.apply_override("fit.unknown=1");
  CHECK_THROWS_AS(load_fit_job(bogus), ConfigError);

  ConfigDoc malformed = ConfigDoc::parse_text(kFitConfig);
  CHECK_THROWS_AS(malformed.apply_override("no_dot=1"), ConfigError);
}

TEST_CASE("rates configs parse the full scenario") {
  ConfigDoc doc = ConfigDoc::parse_text(kRatesConfig);
  const RatesJob job = load_rates_job(doc);
  CHECK(job.n_values == std::vector<Index>{8, 16, 32});
  CHECK(job.scenario.sigma == 0.1);
  CHECK(job.scenario.replications == 2);
  CHECK(job.scenario.seed == 7);
  CHECK(job.mode == RatesMode::Simulate);
  REQUIRE(job.scenario.truth.rkhs_norm().has_value());
  CHECK(*job.scenario.truth.rkhs_norm() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("numbers survive the 17-digit round trip") {
  for (const double value : {0.1, 1.0 / 3.0, 2.0e-300, 6.02214076e23, -0.0, 123456.789012345}) {
    const std::string text = format_double17(value);
    CHECK(std::strtod(text.c_str(), nullptr) == value);
  }
}

TEST_CASE("json output is ordered and escaped") {
  JsonValue obj = JsonValue::object();
  obj.set("b_first", JsonValue::number(0.5));
  obj.set("a_second", JsonValue::string("line\nbreak \"quoted\""));
  JsonValue arr = JsonValue::array();
  arr.push(JsonValue::integer(3));
  arr.push(JsonValue::boolean(true));
  obj.set("list", std::move(arr));
  const std::string text = obj.dump();

  CHECK(text.find("\"b_first\"") < text.find("\"a_second\""));
  CHECK(text.find("\\n") != std::string::npos);
  CHECK(text.find("\\\"quoted\\\"") != std::string::npos);
  CHECK(text.find("true") != std::string::npos);
}

TEST_CASE("rate report csv has the pinned header and unix line endings") {
  RateReport report;
  report.records.push_back(ReplicationRecord{32, 0, 1.5, 0.25, 0.01, 2.0, 7});
  const std::string csv = rate_report_csv(report);
  CHECK(csv.rfind("n,replication,r_hat,mc_error,mc_se,bound_value,seed\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.find("32,0,1.5,0.25,0.01") != std::string::npos);
  CHECK(csv.back() == '\n');
}

TEST_CASE("the self-test report pushes an exact power law through the fitter") {
  const auto report = self_test_report({32, 128, 512, 2048}, -0.5);
  CHECK(report.fitted_slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(report.rows.size() == 4);
  CHECK(report.records.size() == 4);
}

TEST_CASE("csv data files load x columns plus a response") {
  const std::string path = "/tmp/ivanov_test_data.csv";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("0.1,0.2,1.5\n0.3,0.4,-0.5\n", f);
    std::fclose(f);
  }
  const auto [x, y] = load_xy_csv(path);
  CHECK(x.rows() == 2);
  CHECK(x.cols() == 2);
  CHECK(x(1, 1) == 0.4);
  CHECK(y[1] == -0.5);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_xy_csv("/nonexistent/definitely_missing.csv"), ConfigError);
}
