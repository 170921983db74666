#include <algorithm>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "belldice/error.hpp"
#include "belldice/sweep.hpp"

using namespace belldice;

namespace {

template <typename Fn>
ErrorKind thrown_kind(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a belldice::Error");
  return ErrorKind::kInvalidParameter;
}

SweepConfig three_point_config() {
  SweepConfig cfg;
  cfg.eta_start = 0.90;
  cfg.eta_stop = 0.91;
  cfg.eta_step = 0.005;
  cfg.restarts = 24;
  cfg.workers = 1;
  return cfg;
}

}  // namespace

TEST_CASE("sweep config validation") {
  SweepConfig cfg;
  cfg.eta_step = 0.0;
  CHECK(thrown_kind([&] { cfg.validate(); }) == ErrorKind::kInvalidParameter);
  cfg = SweepConfig{};
  cfg.eta_start = 0.95;
  cfg.eta_stop = 0.9;
  CHECK(thrown_kind([&] { cfg.validate(); }) == ErrorKind::kInvalidParameter);
  cfg = SweepConfig{};
  cfg.eta_stop = 1.1;
  CHECK(thrown_kind([&] { cfg.validate(); }) == ErrorKind::kInvalidEfficiency);
  cfg = SweepConfig{};
  cfg.restarts = 0;
  CHECK(thrown_kind([&] { cfg.validate(); }) == ErrorKind::kInvalidParameter);
}

TEST_CASE("default grid covers the threshold decade inclusively") {
  const std::vector<double> grid = SweepConfig{}.grid();
  REQUIRE(grid.size() == 41);
  CHECK(grid.front() == doctest::Approx(0.80).epsilon(1e-15));
  CHECK(grid.back() == doctest::Approx(1.00).epsilon(1e-12));
}

TEST_CASE("three-point sweep lands on frozen optima") {
  const std::vector<SweepRecord> recs = run_sweep(three_point_config());
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].eta == doctest::Approx(0.900).epsilon(1e-15));
  CHECK(recs[0].s_opt == doctest::Approx(2.2676268760114908).epsilon(1e-9));
  CHECK(recs[0].h_min == doctest::Approx(0.11617467962219097).epsilon(1e-7));
  CHECK(recs[1].s_opt == doctest::Approx(2.2884914092719555).epsilon(1e-9));
  CHECK(recs[2].s_opt == doctest::Approx(2.3093771897256374).epsilon(1e-9));
  for (const SweepRecord& r : recs) {
    CHECK(r.converged);
    CHECK(r.t_opt == doctest::Approx(0.5).epsilon(0.01));
    CHECK(r.rate_pump > 0.0);
    CHECK(r.rate_detection == r.h_min);
  }
  CHECK(recs[0].s_opt < recs[1].s_opt);
  CHECK(recs[1].s_opt < recs[2].s_opt);
}

TEST_CASE("sweeps are reproducible run to run") {
  const SweepConfig cfg = three_point_config();
  const std::string a = sweep_csv(run_sweep(cfg));
  const std::string b = sweep_csv(run_sweep(cfg));
  CHECK(a == b);
}

TEST_CASE("disabling warm starts is also deterministic") {
  SweepConfig cfg = three_point_config();
  cfg.warm_start = false;
  const std::vector<SweepRecord> a = run_sweep(cfg);
  const std::vector<SweepRecord> b = run_sweep(cfg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].s_opt == b[i].s_opt);
    CHECK(a[i].g_opt == b[i].g_opt);
  }
}

TEST_CASE("below threshold the certified rate is zero") {
  SweepConfig cfg;
  cfg.eta_start = 0.80;
  cfg.eta_stop = 0.80;
  cfg.restarts = 8;
  cfg.workers = 1;
  const std::vector<SweepRecord> recs = run_sweep(cfg);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].s_opt < 2.0);
  CHECK(recs[0].h_min == 0.0);
  CHECK(recs[0].rate_pump == 0.0);
  CHECK(recs[0].rate_detection == 0.0);
}

TEST_CASE("csv schema is stable") {
  const std::vector<SweepRecord> recs = run_sweep(three_point_config());
  const std::string csv = sweep_csv(recs);
  const std::string header =
      "eta,s_opt,g_opt,t_opt,alpha1,alpha2,beta1,beta2,h_min,rate_pump,"
      "rate_detection,converged";
  CHECK(csv.rfind(header + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("2.2676268760114908") != std::string::npos);
  CHECK(csv.find("true") != std::string::npos);
  CHECK(csv.back() == '\n');
}

TEST_CASE("json mirrors the csv fields in order") {
  const std::vector<SweepRecord> recs = run_sweep(three_point_config());
  const std::string text = sweep_json(recs);
  const nlohmann::json parsed = nlohmann::json::parse(text);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0]["eta"].get<double>() == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(parsed[0]["s_opt"].get<double>() ==
        doctest::Approx(2.2676268760114908).epsilon(1e-9));
  CHECK(parsed[0]["converged"].get<bool>());
  const nlohmann::ordered_json ordered = nlohmann::ordered_json::parse(text);
  CHECK(ordered[0].begin().key() == "eta");
}
