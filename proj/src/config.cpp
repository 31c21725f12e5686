#include "edgeemf/config.hpp"

#include <cmath>
#include <sstream>

namespace edgeemf {

std::string_view to_string(ConstraintMode mode)
{
  switch (mode) {
  case ConstraintMode::unconstrained: return "unconstrained";
  case ConstraintMode::constrained: return "constrained";
  case ConstraintMode::constrained_no_meh: return "constrained_no_meh";
  }
  return "unknown";
}

std::optional<ConstraintMode> parse_constraint_mode(std::string_view text)
{
  if (text == "unconstrained") return ConstraintMode::unconstrained;
  if (text == "constrained") return ConstraintMode::constrained;
  if (text == "constrained_no_meh" || text == "constrained-no-meh") return ConstraintMode::constrained_no_meh;
  return std::nullopt;
}

std::string_view to_string(PathLossVariant variant)
{
  switch (variant) {
  case PathLossVariant::factory_3gpp: return "factory_3gpp";
  case PathLossVariant::free_space: return "free_space";
  case PathLossVariant::log_distance: return "log_distance";
  }
  return "unknown";
}

std::optional<PathLossVariant> parse_path_loss_variant(std::string_view text)
{
  if (text == "factory_3gpp") return PathLossVariant::factory_3gpp;
  if (text == "free_space") return PathLossVariant::free_space;
  if (text == "log_distance") return PathLossVariant::log_distance;
  return std::nullopt;
}

int SimConfig::pixels_per_side() const
{
  return static_cast<int>(std::lround(area_side_m / pixel_side_m));
}

std::size_t SimConfig::num_pixels() const
{
  auto side = static_cast<std::size_t>(pixels_per_side());
  return side * side;
}

double SimConfig::emf_threshold_at(std::size_t index) const
{
  if (!emf_threshold_map_w_per_m2.empty()) return emf_threshold_map_w_per_m2.at(index);
  return emf_threshold_w_per_m2;
}

std::vector<double> uniform_freq_set(double max_freq_hz, int levels)
{
  std::vector<double> out;
  if (levels < 1) return out;
  if (levels == 1) return {0.0};
  out.reserve(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i)
    out.push_back(max_freq_hz * i / (levels - 1));
  return out;
}

SimConfig baseline_config()
{
  SimConfig cfg;
  cfg.slot_duration_s = 5e-3;
  cfg.num_devices = 100;
  cfg.carrier_freq_hz = 3.5e9;
  cfg.total_bandwidth_hz = 20e6;
  cfg.noise_psd_w_per_hz = convert_units(-174.0, UnitKind::dbm_per_hz_to_w_per_hz);
  cfg.area_side_m = 15.0;
  cfg.pixel_side_m = 1.0;
  cfg.device.max_tx_power_w = dbm_to_w(20.0);
  cfg.device.bits_per_cycle = 0.1;
  cfg.meh.freq_set_hz = uniform_freq_set(4.5e9, 11);
  cfg.meh.kappa = 1e-27;
  cfg.emf_threshold_w_per_m2 = 0.04;
  cfg.meh_power_threshold_w = 45.0;
  cfg.device_power_threshold_w = 0.05;
  // Virtual-queue steps scaled so that the queues can price power and
  // exposure against bit backlogs of order V within a 2000-slot horizon.
  cfg.step_y = 1e6;
  cfg.step_h = 1e3;
  cfg.step_z = 1e6;
  cfg.lyapunov_v = 1e5;
  cfg.num_slots = 2000;
  cfg.num_realizations = 100;
  return cfg;
}

namespace {

class IssueCollector {
public:
  template <typename T>
  void require(bool ok, std::string field, T value, std::string_view what)
  {
    if (ok) return;
    std::ostringstream msg;
    msg << what << " (got " << value << ")";
    issues_.push_back({std::move(field), msg.str()});
  }

  void add(std::string field, std::string message) { issues_.push_back({std::move(field), std::move(message)}); }

  std::vector<ConfigIssue> take() { return std::move(issues_); }

private:
  std::vector<ConfigIssue> issues_;
};

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace

std::vector<ConfigIssue> validate_config(const SimConfig& cfg)
{
  IssueCollector c;
  c.require(positive(cfg.slot_duration_s), "slot_duration_s", cfg.slot_duration_s, "must be > 0");
  c.require(cfg.num_devices >= 1, "num_devices", cfg.num_devices, "must be >= 1");
  c.require(positive(cfg.carrier_freq_hz), "carrier_freq_hz", cfg.carrier_freq_hz, "must be > 0");
  c.require(positive(cfg.total_bandwidth_hz), "total_bandwidth_hz", cfg.total_bandwidth_hz, "must be > 0");
  c.require(positive(cfg.noise_psd_w_per_hz), "noise_psd_w_per_hz", cfg.noise_psd_w_per_hz, "must be > 0");
  c.require(positive(cfg.area_side_m), "area_side_m", cfg.area_side_m, "must be > 0");
  c.require(positive(cfg.pixel_side_m), "pixel_side_m", cfg.pixel_side_m, "must be > 0");
  if (positive(cfg.area_side_m) && positive(cfg.pixel_side_m)) {
    double ratio = cfg.area_side_m / cfg.pixel_side_m;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
      std::ostringstream msg;
      msg << "grid not integral: area_side_m " << cfg.area_side_m << " is not a multiple of pixel_side_m "
          << cfg.pixel_side_m;
      c.add("pixel_side_m", msg.str());
    }
  }

  c.require(positive(cfg.device.max_tx_power_w), "device.max_tx_power_w", cfg.device.max_tx_power_w, "must be > 0");
  c.require(positive(cfg.device.bits_per_cycle), "device.bits_per_cycle", cfg.device.bits_per_cycle, "must be > 0");
  if (cfg.device.max_arrival_bits) {
    double a = *cfg.device.max_arrival_bits;
    c.require(std::isfinite(a) && a >= 0.0, "device.max_arrival_bits", a, "must be >= 0");
  }

  const auto& freqs = cfg.meh.freq_set_hz;
  if (freqs.empty()) {
    c.add("meh.freq_set_hz", "must not be empty");
  } else {
    bool has_zero = false;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      c.require(std::isfinite(freqs[i]) && freqs[i] >= 0.0, "meh.freq_set_hz", freqs[i], "entries must be >= 0");
      if (freqs[i] == 0.0) has_zero = true;
      if (i > 0 && !(freqs[i] > freqs[i - 1]))
        c.require(false, "meh.freq_set_hz", freqs[i], "must be strictly ascending without duplicates");
    }
    if (!has_zero) c.add("meh.freq_set_hz", "must contain 0 (idle)");
  }
  c.require(positive(cfg.meh.kappa), "meh.kappa", cfg.meh.kappa, "must be > 0");

  c.require(positive(cfg.path_loss.min_distance_m), "path_loss.min_distance_m", cfg.path_loss.min_distance_m,
            "must be > 0");
  if (cfg.path_loss.variant == PathLossVariant::log_distance) {
    c.require(std::isfinite(cfg.path_loss.exponent) && cfg.path_loss.exponent >= 2.0, "path_loss.exponent",
              cfg.path_loss.exponent, "must be >= 2");
    c.require(std::isfinite(cfg.path_loss.ref_loss_db), "path_loss.ref_loss_db", cfg.path_loss.ref_loss_db,
              "must be finite");
  }

  c.require(positive(cfg.step_y), "step_y", cfg.step_y, "must be > 0");
  c.require(positive(cfg.step_h), "step_h", cfg.step_h, "must be > 0");
  c.require(positive(cfg.step_z), "step_z", cfg.step_z, "must be > 0");

  if (cfg.virtual_queue_y_enabled())
    c.require(positive(cfg.device_power_threshold_w), "device_power_threshold_w", cfg.device_power_threshold_w,
              "must be > 0 when the device power constraint is enabled");
  if (cfg.virtual_queue_h_enabled())
    c.require(positive(cfg.meh_power_threshold_w), "meh_power_threshold_w", cfg.meh_power_threshold_w,
              "must be > 0 when the MEH power constraint is enabled");
  if (cfg.virtual_queue_z_enabled()) {
    if (cfg.emf_threshold_map_w_per_m2.empty()) {
      c.require(positive(cfg.emf_threshold_w_per_m2), "emf_threshold_w_per_m2", cfg.emf_threshold_w_per_m2,
                "must be > 0 when the EMF constraint is enabled");
    } else {
      for (double th : cfg.emf_threshold_map_w_per_m2)
        c.require(positive(th), "emf_threshold_map_w_per_m2", th, "entries must be > 0");
    }
  }
  if (!cfg.emf_threshold_map_w_per_m2.empty() && positive(cfg.area_side_m) && positive(cfg.pixel_side_m) &&
      cfg.emf_threshold_map_w_per_m2.size() != cfg.num_pixels())
    c.require(false, "emf_threshold_map_w_per_m2", cfg.emf_threshold_map_w_per_m2.size(),
              "size must equal the number of pixels " + std::to_string(cfg.num_pixels()));

  c.require(std::isfinite(cfg.lyapunov_v) && cfg.lyapunov_v >= 0.0, "lyapunov_v", cfg.lyapunov_v, "must be >= 0");
  for (double v : cfg.v_values)
    c.require(std::isfinite(v) && v >= 0.0, "v_values", v, "entries must be >= 0");
  c.require(cfg.num_slots >= 0, "num_slots", cfg.num_slots, "must be >= 0");
  c.require(cfg.num_realizations >= 1, "num_realizations", cfg.num_realizations, "must be >= 1");
  c.require(cfg.burn_in_slots >= 0 && cfg.burn_in_slots <= cfg.num_slots, "burn_in_slots", cfg.burn_in_slots,
            "must lie in [0, num_slots]");
  return c.take();
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues)
{
  std::string out = "invalid configuration:";
  for (const auto& issue : issues)
    out += "\n  " + issue.field + ": " + issue.message;
  return out;
}

} // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
  : std::runtime_error(join_issues(issues)), issues_(std::move(issues))
{
}

SimConfig require_valid(SimConfig cfg)
{
  auto issues = validate_config(cfg);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

double convert_units(double value, UnitKind kind)
{
  switch (kind) {
  case UnitKind::dbm_to_w:
  case UnitKind::dbm_per_hz_to_w_per_hz: return std::pow(10.0, (value - 30.0) / 10.0);
  case UnitKind::w_to_dbm: return 10.0 * std::log10(value) + 30.0;
  case UnitKind::db_to_linear: return std::pow(10.0, value / 10.0);
  case UnitKind::linear_to_db: return 10.0 * std::log10(value);
  }
  return value;
}

double wavelength(double carrier_freq_hz)
{
  if (!(carrier_freq_hz > 0.0)) throw std::invalid_argument("wavelength: carrier frequency must be > 0");
  return kSpeedOfLight / carrier_freq_hz;
}

} // namespace edgeemf
