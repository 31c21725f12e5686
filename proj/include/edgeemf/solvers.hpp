#pragma once

#include "edgeemf/channel.hpp"
#include "edgeemf/config.hpp"
#include "edgeemf/queues.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edgeemf {

/// Everything the per-slot problem needs that does not change across slots of
/// one run: per-device radio/compute parameters, thresholds, step sizes.
struct SlotContext {
  double slot_s = 5e-3;
  double lyapunov_v = 0.0;
  double noise_psd_w_per_hz = 0.0;
  double wavelength_m = 1.0;

  std::vector<double> bandwidth_hz;
  std::vector<double> max_tx_power_w;
  std::vector<double> bits_per_cycle;
  std::vector<double> max_arrival_bits;
  std::vector<double> device_power_threshold_w;

  std::vector<double> emf_threshold_w_per_m2; // per pixel

  std::vector<double> freq_set_hz;
  double kappa = 0.0;
  double meh_power_threshold_w = 0.0;

  double step_y = 1.0;
  double step_h = 1.0;
  double step_z = 1.0;
  bool cap_power_to_backlog = false;
  ConstraintMode mode = ConstraintMode::constrained;

  std::size_t num_devices() const { return bandwidth_hz.size(); }
  std::size_t num_pixels() const { return emf_threshold_w_per_m2.size(); }
};

/// One slot's control vector: admitted bits, uplink power, MEH clock and the
/// per-device share of it.
struct SlotDecision {
  std::vector<double> arrivals_bits;
  std::vector<double> tx_power_w;
  double meh_freq_hz = 0.0;
  std::vector<double> device_freq_hz;
};

/// Empty when `decision` satisfies the box, set-membership and CPU budget
/// constraints; otherwise a description of the first violation.
std::optional<std::string> check_decision(const SlotDecision& decision, const SlotContext& ctx);

/// A_k = A_k^max when Q_k^u <= V, else 0.
std::vector<double> solve_flow_control(std::span<const double> uplink_bits, double lyapunov_v,
                                       std::span<const double> max_arrival_bits);

/// Linear price on device k's transmit power coming from its own power queue
/// and from every pixel queue it illuminates:
///   eps_y Y_k + (4 pi / lambda^2) eps_z sum_i Z_i h_k^i
std::vector<double> uplink_power_prices(const QueueState& state, const ChannelState& channel,
                                        const SlotContext& ctx);

/// Closed-form minimizer of
///   -(Q^u - Q^m) tau B log2(1 + h p / (N0 B)) + price * p   over [0, p_max].
/// Zero when Q^u <= Q^m; p_max when the price is zero; otherwise the
/// water-filling level sigma - N0 B / h clipped to [0, p_max] with
///   sigma = tau (Q^u - Q^m) B / (ln2 * price).
double uplink_power_closed_form(double uplink_bits, double comp_bits, double price, double gain,
                                double bandwidth_hz, double noise_psd_w_per_hz, double max_power_w, double slot_s);

std::vector<double> solve_uplink_power(const QueueState& state, const ChannelState& channel, const SlotContext& ctx);

struct CpuSchedule {
  double meh_freq_hz = 0.0;
  std::vector<double> device_freq_hz;
  double objective = 0.0; // eps_h H kappa f_s^3 - sum_k Q_k^m tau J_k f_k
};

/// Objective of the MEH scheduling subproblem for a given allocation.
double cpu_objective(std::span<const double> comp_bits, double vq_meh_power, double meh_freq_hz,
                     std::span<const double> device_freq_hz, std::span<const double> bits_per_cycle, double step_h,
                     double slot_s, double kappa);

/// For each candidate clock in `freq_set_hz`, fills devices greedily in
/// descending order of Q_k^m J_k (ties by index) up to the frequency that
/// empties their queue; returns the candidate with the lowest objective
/// (ties toward the lower clock).
CpuSchedule solve_cpu_scheduling(std::span<const double> comp_bits, double vq_meh_power,
                                 std::span<const double> freq_set_hz, std::span<const double> bits_per_cycle,
                                 double step_h, double slot_s, double kappa);

/// Composition of the three subproblem solvers for one slot.
SlotDecision solve_slot(const QueueState& state, const ChannelState& channel, const SlotContext& ctx);

/// Per-slot drift-plus-penalty bound (constant term dropped):
///   sum_k [Q^u (A - tau R) + Q^m (tau R - tau f J) + eps_y Y (p - p^th)]
///   + sum_i eps_z Z_i (P_d^i - P_d^th,i) + eps_h H (kappa f_s^3 - p_c^th) - V sum_k A
/// Throws std::invalid_argument when the decision is infeasible.
double dpp_slot_objective(const QueueState& state, const SlotDecision& decision, const ChannelState& channel,
                          const SlotContext& ctx);

} // namespace edgeemf
