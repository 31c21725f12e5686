#include "doctest.h"

#include "edgeemf/config.hpp"
#include "edgeemf/io.hpp"

#include <algorithm>
#include <cmath>

using namespace edgeemf;

namespace {

bool has_issue(const std::vector<ConfigIssue>& issues, std::string_view field, std::string_view fragment = "")
{
  return std::any_of(issues.begin(), issues.end(), [&](const ConfigIssue& i) {
    return i.field == field && i.message.find(fragment) != std::string::npos;
  });
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("baseline scenario validates")
{
  const SimConfig cfg = baseline_config();
  CHECK(validate_config(cfg).empty());
  CHECK(cfg.slot_duration_s == 5e-3);
  CHECK(cfg.num_devices == 100);
  CHECK(cfg.total_bandwidth_hz == 20e6);
  CHECK(cfg.area_side_m == 15.0);
  CHECK(cfg.num_pixels() == 225);
  CHECK(cfg.num_slots == 2000);
  CHECK(cfg.meh.freq_set_hz.size() == 11);
  CHECK(cfg.meh.freq_set_hz.back() == doctest::Approx(4.5e9));
  CHECK(cfg.device.max_tx_power_w == doctest::Approx(0.1));
}

TEST_CASE("non-integral pixel grid is rejected")
{
  SimConfig cfg = baseline_config();
  cfg.pixel_side_m = 2.0;
  CHECK(has_issue(validate_config(cfg), "pixel_side_m", "grid not integral"));
}

TEST_CASE("zero step size is rejected")
{
  SimConfig cfg = baseline_config();
  cfg.constraint_mode = ConstraintMode::constrained;
  cfg.step_z = 0.0;
  CHECK(has_issue(validate_config(cfg), "step_z"));
}

TEST_CASE("every violation is reported with its value")
{
  SimConfig cfg = baseline_config();
  cfg.slot_duration_s = -1.0;
  cfg.num_devices = 0;
  cfg.total_bandwidth_hz = 0.0;
  cfg.meh.kappa = 0.0;
  const auto issues = validate_config(cfg);
  CHECK(issues.size() == 4);
  CHECK(has_issue(issues, "slot_duration_s", "-1"));
  CHECK(has_issue(issues, "num_devices", "0"));
  CHECK(has_issue(issues, "total_bandwidth_hz"));
  CHECK(has_issue(issues, "meh.kappa"));
  CHECK_THROWS_AS(require_valid(cfg), ConfigError);
}

TEST_CASE("frequency set must be ascending and contain idle")
{
  SimConfig cfg = baseline_config();
  cfg.meh.freq_set_hz = {1e9, 2e9};
  CHECK(has_issue(validate_config(cfg), "meh.freq_set_hz", "contain 0"));
  cfg.meh.freq_set_hz = {0.0, 2e9, 1e9};
  CHECK(has_issue(validate_config(cfg), "meh.freq_set_hz", "ascending"));
  cfg.meh.freq_set_hz = {0.0, 1e9, 1e9};
  CHECK(has_issue(validate_config(cfg), "meh.freq_set_hz", "ascending"));
}

TEST_CASE("thresholds only need to be positive when their constraint is on")
{
  SimConfig cfg = baseline_config();
  cfg.meh_power_threshold_w = 0.0;
  cfg.constraint_mode = ConstraintMode::constrained;
  CHECK(has_issue(validate_config(cfg), "meh_power_threshold_w"));
  cfg.constraint_mode = ConstraintMode::constrained_no_meh;
  CHECK(validate_config(cfg).empty());
  cfg.emf_threshold_w_per_m2 = 0.0;
  CHECK(has_issue(validate_config(cfg), "emf_threshold_w_per_m2"));
  cfg.constraint_mode = ConstraintMode::unconstrained;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("per-pixel threshold map must cover the grid")
{
  SimConfig cfg = baseline_config();
  cfg.emf_threshold_map_w_per_m2.assign(10, 0.04);
  CHECK(has_issue(validate_config(cfg), "emf_threshold_map_w_per_m2", "225"));
  cfg.emf_threshold_map_w_per_m2.assign(225, 0.04);
  cfg.emf_threshold_map_w_per_m2[17] = 0.01;
  CHECK(validate_config(cfg).empty());
  CHECK(cfg.emf_threshold_at(17) == 0.01);
  CHECK(cfg.emf_threshold_at(18) == 0.04);
}

TEST_CASE("log-distance exponent below free space is rejected")
{
  SimConfig cfg = baseline_config();
  cfg.path_loss.variant = PathLossVariant::log_distance;
  cfg.path_loss.exponent = 1.5;
  CHECK(has_issue(validate_config(cfg), "path_loss.exponent"));
}

TEST_CASE("validation is idempotent")
{
  const SimConfig once = require_valid(baseline_config());
  const SimConfig twice = require_valid(once);
  CHECK(config_to_json(once) == config_to_json(twice));
}

TEST_CASE("unit conversions")
{
  CHECK(convert_units(20.0, UnitKind::dbm_to_w) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(convert_units(-174.0, UnitKind::dbm_per_hz_to_w_per_hz) == doctest::Approx(3.981071705534986e-21).epsilon(1e-12));
  CHECK(convert_units(3.0, UnitKind::db_to_linear) == doctest::Approx(1.9952623149688795));
  for (double x : {-50.0, 0.0, 20.0}) {
    const double back = w_to_dbm(dbm_to_w(x));
    CHECK(std::abs(back - x) <= 1e-12 * std::max(1.0, std::abs(x)));
  }
  CHECK(convert_units(convert_units(7.5, UnitKind::db_to_linear), UnitKind::linear_to_db) == doctest::Approx(7.5));
}

TEST_CASE("wavelength")
{
  CHECK(wavelength(3.5e9) == doctest::Approx(0.085654988).epsilon(1e-9));
  CHECK(wavelength(kSpeedOfLight) == 1.0);
  CHECK(wavelength(7e9) == doctest::Approx(wavelength(3.5e9) / 2.0));
  CHECK_THROWS_AS(wavelength(0.0), std::invalid_argument);
  CHECK_THROWS_AS(wavelength(-1.0), std::invalid_argument);
}

TEST_CASE("constraint mode spellings")
{
  CHECK(parse_constraint_mode("constrained-no-meh") == ConstraintMode::constrained_no_meh);
  CHECK(parse_constraint_mode("constrained_no_meh") == ConstraintMode::constrained_no_meh);
  CHECK(parse_constraint_mode("unconstrained") == ConstraintMode::unconstrained);
  CHECK_FALSE(parse_constraint_mode("sometimes").has_value());
}

}
