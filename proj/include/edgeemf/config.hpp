#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgeemf {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

enum class ConstraintMode { unconstrained, constrained, constrained_no_meh };

std::string_view to_string(ConstraintMode mode);
/// Accepts both `constrained_no_meh` and the CLI spelling `constrained-no-meh`.
std::optional<ConstraintMode> parse_constraint_mode(std::string_view text);

enum class PathLossVariant { factory_3gpp, free_space, log_distance };

std::string_view to_string(PathLossVariant variant);
std::optional<PathLossVariant> parse_path_loss_variant(std::string_view text);

struct PathLossModel {
  PathLossVariant variant = PathLossVariant::factory_3gpp;
  double exponent = 2.0;     // log_distance only
  double ref_loss_db = 40.0; // log_distance only, loss at 1 m
  double min_distance_m = 0.5;
};

/// Parameters shared by every device in the scenario. Positions are drawn
/// per realization, so they live in `Device` (see engine.hpp).
struct DeviceConfig {
  double max_tx_power_w = 0.1;
  double bits_per_cycle = 0.1;
  /// Per-slot admission cap. Absent means derived from the Shannon rate at
  /// max power over the path-loss-only channel.
  std::optional<double> max_arrival_bits;
};

struct MehConfig {
  std::vector<double> freq_set_hz; // ascending, contains 0
  double kappa = 1e-27;            // W / Hz^3
};

struct FadingConfig {
  bool uplink = true;
  bool pixel = false;
};

struct SimConfig {
  // scenario
  double slot_duration_s = 5e-3;
  int num_devices = 100;
  double carrier_freq_hz = 3.5e9;
  double total_bandwidth_hz = 20e6;
  double noise_psd_w_per_hz = 3.981071705534986e-21;
  double area_side_m = 15.0;
  double pixel_side_m = 1.0;

  DeviceConfig device;
  MehConfig meh;
  PathLossModel path_loss;
  FadingConfig fading;

  // constraints
  ConstraintMode constraint_mode = ConstraintMode::constrained;
  double emf_threshold_w_per_m2 = 0.04;
  /// Optional per-pixel thresholds, row-major over the pixel grid. Overrides
  /// the scalar when non-empty.
  std::vector<double> emf_threshold_map_w_per_m2;
  double meh_power_threshold_w = 45.0;
  double device_power_threshold_w = 0.05;

  // algorithm
  double lyapunov_v = 1e5;
  double step_y = 1.0;
  double step_h = 1.0;
  double step_z = 1.0;
  bool cap_power_to_backlog = false;
  std::vector<double> v_values;

  // run control
  int num_slots = 2000;
  int num_realizations = 100;
  int burn_in_slots = 0;
  std::uint64_t rng_seed = 1;

  bool virtual_queue_y_enabled() const { return constraint_mode != ConstraintMode::unconstrained; }
  bool virtual_queue_z_enabled() const { return constraint_mode != ConstraintMode::unconstrained; }
  bool virtual_queue_h_enabled() const { return constraint_mode == ConstraintMode::constrained; }

  int pixels_per_side() const;
  std::size_t num_pixels() const;
  double per_device_bandwidth_hz() const { return total_bandwidth_hz / num_devices; }
  /// Threshold for pixel `index`, honoring the per-pixel map when present.
  double emf_threshold_at(std::size_t index) const;
};

/// Scenario used for the published trade-off study: 100 sensors in a 15 m
/// square, 3.5 GHz, 20 MHz shared equally, 1 m pixels, 2000 slots.
SimConfig baseline_config();

/// `F = {0, 0.1, ..., 1} * f_max`, i.e. `levels` evenly spaced points.
std::vector<double> uniform_freq_set(double max_freq_hz, int levels);

struct ConfigIssue {
  std::string field;
  std::string message;
};

std::vector<ConfigIssue> validate_config(const SimConfig& cfg);

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
  std::vector<ConfigIssue> issues_;
};

/// Returns `cfg` unchanged when valid, otherwise throws ConfigError carrying
/// every violation.
SimConfig require_valid(SimConfig cfg);

enum class UnitKind { dbm_to_w, w_to_dbm, dbm_per_hz_to_w_per_hz, db_to_linear, linear_to_db };

double convert_units(double value, UnitKind kind);

inline double dbm_to_w(double dbm) { return convert_units(dbm, UnitKind::dbm_to_w); }
inline double w_to_dbm(double w) { return convert_units(w, UnitKind::w_to_dbm); }
inline double db_to_linear(double db) { return convert_units(db, UnitKind::db_to_linear); }

/// lambda = c / f0. Throws std::invalid_argument for f0 <= 0.
double wavelength(double carrier_freq_hz);

} // namespace edgeemf
