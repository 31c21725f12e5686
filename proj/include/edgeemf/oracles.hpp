#pragma once

// Brute-force references for the per-slot solvers. Nothing here calls into
// the closed forms in solvers.hpp; each oracle minimizes the subproblem
// objective by enumeration.

#include "edgeemf/solvers.hpp"

#include <span>
#include <vector>

namespace edgeemf {

/// One device's slice of the uplink power subproblem.
struct UplinkDeviceProblem {
  double uplink_bits = 0.0;
  double comp_bits = 0.0;
  double gain = 1.0;
  double bandwidth_hz = 1.0;
  double noise_psd_w_per_hz = 1.0;
  double max_power_w = 1.0;
  double slot_s = 1.0;
  double step_y = 1.0;
  double vq_device_power = 0.0;
  /// eps_z * (4 pi / lambda^2) * sum_i Z_i h_k^i, evaluated from the pixel
  /// terms of the objective.
  double exposure_weight = 0.0;
};

/// Builds device k's subproblem straight from the queue/channel state.
UplinkDeviceProblem uplink_device_problem(const QueueState& state, const ChannelState& channel,
                                          const SlotContext& ctx, std::size_t device);

/// -(Q^u - Q^m) tau B log2(1 + h p / (N0 B)) + eps_z sum_i Z_i (4 pi/lambda^2) p h^i + eps_y Y p
double uplink_device_objective(const UplinkDeviceProblem& problem, double power_w);

/// Scans p = 0, r, 2r, ..., p_max (plus p_max itself) and returns the
/// minimizer. Ties resolve to the lowest power.
double oracle_uplink_grid(const UplinkDeviceProblem& problem, double resolution_w);

std::vector<double> oracle_uplink_grid(const QueueState& state, const ChannelState& channel, const SlotContext& ctx,
                                       double resolution_w);

/// True when the objective sampled on the grid decreases then increases
/// (plateaus allowed).
bool uplink_scan_is_unimodal(const UplinkDeviceProblem& problem, double resolution_w);

inline constexpr std::size_t kCpuOracleMaxDevices = 4;
inline constexpr std::size_t kCpuOracleMaxFreqs = 5;

/// For each candidate clock, enumerates every vertex of the per-device
/// allocation polytope (each device at 0, at its cap, or taking the leftover
/// budget) and keeps the global best. Throws std::invalid_argument beyond
/// 4 devices or 5 candidate clocks.
CpuSchedule oracle_cpu_exhaustive(std::span<const double> comp_bits, double vq_meh_power,
                                  std::span<const double> freq_set_hz, std::span<const double> bits_per_cycle,
                                  double step_h, double slot_s, double kappa);

struct SlotGridSpec {
  int power_steps = 40;   // grid points per device are power_steps + 1
  int arrival_levels = 3; // evenly spaced in [0, A^max]
};

struct SlotGridResult {
  SlotDecision decision;
  double objective = 0.0;
};

/// Minimizes dpp_slot_objective over the Cartesian product of per-device
/// arrival levels, per-device power grids, candidate clocks and CPU vertex
/// allocations. Intended for K <= 3 and a handful of pixels.
SlotGridResult oracle_slot_grid(const QueueState& state, const ChannelState& channel, const SlotContext& ctx,
                                const SlotGridSpec& spec);

} // namespace edgeemf
