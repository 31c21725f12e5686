#include "doctest.h"

#include "edgeemf/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace edgeemf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(std::string_view name)
{
  const fs::path dir = fs::temp_directory_path() / ("edgeemf_test_" + std::string(name));
  fs::remove_all(dir);
  return dir;
}

TradeoffPoint sample_point(double v, bool with_delay)
{
  TradeoffPoint p;
  p.v = v;
  p.realizations = 3;
  p.sum_rate_bps = {3.5e8, 1.25e6};
  p.max_pixel_emf_w_per_m2 = {0.0391, 1e-3};
  p.mean_device_power_w = {0.0231, 2e-4};
  p.max_device_power_w = {0.0333, 3e-4};
  p.meh_power_w = {45.7, 0.1};
  if (with_delay) {
    p.mean_delay_s = {0.044, 0.002};
    p.delay_samples = 3;
  }
  return p;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("tradeoff header is frozen")
{
  CHECK(kTradeoffCsvHeader ==
        "v,realizations,sum_rate_bps,sum_rate_bps_std,max_pixel_emf_w_per_m2,max_pixel_emf_w_per_m2_std,"
        "mean_device_power_w,mean_device_power_w_std,max_device_power_w,max_device_power_w_std,meh_power_w,"
        "meh_power_w_std,mean_delay_s,mean_delay_s_std");
  const std::string csv = tradeoff_csv({sample_point(1e5, true)});
  CHECK(csv.substr(0, csv.find('\n')) == kTradeoffCsvHeader);
  const std::string ts = timeseries_csv({});
  CHECK(ts.substr(0, ts.find('\n')) == kTimeseriesCsvHeader);
}

TEST_CASE("tradeoff csv round trip")
{
  const std::vector<TradeoffPoint> pts = {sample_point(1e4, true), sample_point(0.1 + 0.2, false)};
  const auto back = parse_tradeoff_csv(tradeoff_csv(pts));
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].v == pts[i].v);
    CHECK(back[i].realizations == pts[i].realizations);
    CHECK(back[i].sum_rate_bps.mean == pts[i].sum_rate_bps.mean);
    CHECK(back[i].sum_rate_bps.std == pts[i].sum_rate_bps.std);
    CHECK(back[i].max_pixel_emf_w_per_m2.mean == pts[i].max_pixel_emf_w_per_m2.mean);
    CHECK(back[i].meh_power_w.mean == pts[i].meh_power_w.mean);
    CHECK(back[i].delay_samples == pts[i].delay_samples);
    CHECK(back[i].mean_delay_s.mean == pts[i].mean_delay_s.mean);
  }
  CHECK(back[1].delay_samples == 0);
}

TEST_CASE("malformed csv is rejected")
{
  CHECK_THROWS(parse_tradeoff_csv("v,realizations\n1,2\n"));
  std::string csv = tradeoff_csv({sample_point(1e4, true)});
  csv.replace(csv.find("3.5e+08"), 7, "3.5e+0x");
  CHECK_THROWS(parse_tradeoff_csv(csv));
}

TEST_CASE("shortest round-trip double formatting")
{
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(100000.0) == "1e+05");
  for (double x : {1.0 / 3.0, 3.981071705534986e-21, 4.5e9, -0.0625})
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("config json round trip")
{
  SimConfig cfg = baseline_config();
  cfg.constraint_mode = ConstraintMode::constrained_no_meh;
  cfg.v_values = {1e3, 1e4};
  cfg.device.max_arrival_bits = 5e4;
  const SimConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
  CHECK(back.constraint_mode == ConstraintMode::constrained_no_meh);
  CHECK(*back.device.max_arrival_bits == 5e4);
}

TEST_CASE("config json accepts dBm and frequency levels")
{
  const auto doc = nlohmann::json::parse(R"({
    "scenario": {"noise_psd_dbm_per_hz": -174},
    "device": {"max_tx_power_dbm": 10},
    "meh": {"max_freq_hz": 3e9, "freq_levels": 4}
  })");
  const SimConfig cfg = config_from_json(doc);
  CHECK(cfg.noise_psd_w_per_hz == doctest::Approx(3.981071705534986e-21));
  CHECK(cfg.device.max_tx_power_w == doctest::Approx(0.01));
  CHECK(cfg.meh.freq_set_hz == std::vector<double>{0.0, 1e9, 2e9, 3e9});
}

TEST_CASE("config json rejects unknown and conflicting keys")
{
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"scenario": {"num_device": 3}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"extras": {}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"device": {"max_tx_power_w": 0.1, "max_tx_power_dbm": 20}})")),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"constraints": {"mode": "loose"}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"scenario": {"num_devices": "ten"}})")), ConfigError);
}

TEST_CASE("shipped configs load")
{
  for (const char* name : {"baseline.json", "unconstrained.json", "constrained_no_meh.json", "small.json"}) {
    INFO(name);
    const SimConfig cfg = load_config(fs::path(EDGEEMF_CONFIG_DIR) / name);
    CHECK(validate_config(cfg).empty());
  }
  const SimConfig base = load_config(fs::path(EDGEEMF_CONFIG_DIR) / "baseline.json");
  const SimConfig ref = baseline_config();
  CHECK(base.noise_psd_w_per_hz == doctest::Approx(ref.noise_psd_w_per_hz).epsilon(1e-14));
  CHECK(base.meh.freq_set_hz.size() == ref.meh.freq_set_hz.size());
}

TEST_CASE("write_results produces the bundle and is deterministic")
{
  OutputBundle b;
  b.tradeoff = {sample_point(1e4, true)};
  SlotRecord rec;
  rec.slot = 0;
  rec.admitted_bits = 1e5;
  b.timeseries = {{0, 0, 17, {rec}}};
  b.manifest = {"sweep", baseline_config(), {1e4}, {17}, 1.5};

  const fs::path d1 = scratch_dir("bundle1"), d2 = scratch_dir("bundle2");
  const auto files = write_results(b, d1);
  write_results(b, d2);
  REQUIRE(files.size() == 3);
  for (const auto& f : files) {
    CHECK(fs::exists(f));
    CHECK(slurp(f) == slurp(d2 / f.filename()));
  }
  CHECK(fs::exists(d1 / "tradeoff.csv"));
  CHECK(fs::exists(d1 / "timeseries_v0_r0.csv"));
  const auto manifest = nlohmann::json::parse(slurp(d1 / "manifest.json"));
  CHECK(manifest["tool"] == "edgeemf");
  CHECK(manifest["realization_seeds"][0] == 17);
  CHECK(manifest["wall_time_s"] == 1.5);
  CHECK(config_from_json(manifest["config"]).num_devices == 100);
  CHECK(read_tradeoff_csv(d1 / "tradeoff.csv").size() == 1);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("write_results cleans up after a failure")
{
  const fs::path base = scratch_dir("blocked");
  fs::create_directories(base);
  { std::ofstream(base / "file") << "x"; }
  OutputBundle b;
  b.manifest.config = baseline_config();
  CHECK_THROWS(write_results(b, base / "file" / "out"));
  // target occupied by a directory named like a result file
  const fs::path dir = base / "out";
  fs::create_directories(dir / "manifest.json");
  CHECK_THROWS(write_results(b, dir));
  CHECK_FALSE(fs::exists(dir / "tradeoff.csv"));
  fs::remove_all(base);
}

}
