#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace edgeemf {

/// Physical and virtual backlogs at the start of a slot. Physical queues are
/// in bits; virtual queues carry the units of their constraint (W or W/m^2)
/// scaled by the step size.
struct QueueState {
  std::vector<double> uplink_bits;     // Q^u
  std::vector<double> comp_bits;       // Q^m
  std::vector<double> vq_device_power; // Y
  double vq_meh_power = 0.0;           // H
  std::vector<double> vq_pixel_emf;    // Z

  static QueueState zeros(std::size_t num_devices, std::size_t num_pixels);

  std::size_t num_devices() const { return uplink_bits.size(); }
  std::size_t num_pixels() const { return vq_pixel_emf.size(); }
  /// Every entry finite and >= 0, with consistent dimensions.
  bool is_valid() const;

  friend bool operator==(const QueueState&, const QueueState&) = default;
};

struct UplinkUpdate {
  double next_bits;
  double served_bits; // min(tau R, Q^u), forwarded to the computation queue
};

/// Q^u <- max(0, Q^u - tau R) + A.
UplinkUpdate update_uplink_queue(double q_bits, double rate_bps, double arrivals_bits, double slot_s);

/// Q^m <- max(0, Q^m - tau f J) + served uplink bits.
double update_comp_queue(double q_bits, double cpu_hz, double bits_per_cycle, double served_uplink_bits,
                         double slot_s);

/// Bits actually processed this slot, min(Q^m, tau f J).
double computed_bits(double q_bits, double cpu_hz, double bits_per_cycle, double slot_s);

/// G <- max(0, G + step (actual - threshold)).
double update_virtual_queue(double g, double step, double actual, double threshold);

/// Half the sum of squares of every physical and virtual queue.
double lyapunov_value(const QueueState& state);

/// Little's-law delay tau (mean Q^u + mean Q^m) / mean arrivals. Empty when
/// the device admitted nothing.
std::optional<double> avg_e2e_delay(double mean_uplink_bits, double mean_comp_bits, double mean_arrival_bits,
                                    double slot_s);

} // namespace edgeemf
