#pragma once

#include "edgeemf/channel.hpp"
#include "edgeemf/config.hpp"
#include "edgeemf/queues.hpp"
#include "edgeemf/solvers.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace edgeemf {

/// Access point location: the center of the square area.
Point access_point(const SimConfig& cfg);

/// K positions uniform over the square, redrawn until each is at least
/// `path_loss.min_distance_m` away from the access point.
std::vector<Point> place_devices(Rng& rng, const SimConfig& cfg);

/// tau B log2(1 + h p_max / (N0 B)) with h the fading-free uplink gain.
double derive_max_arrival_bits(const SimConfig& cfg, double mean_uplink_gain);

/// One realization's static geometry and the solver context built from it.
struct Scenario {
  std::vector<Point> devices;
  PixelGrid pixels;
  LinkGains mean_gains;
  SlotContext ctx;
};

Scenario build_scenario(const SimConfig& cfg, std::vector<Point> devices);

struct SlotOutcome {
  SlotDecision decision;
  QueueState next;
  std::vector<double> rate_bps;       // achieved uplink rate per device
  std::vector<double> served_bits;    // moved from Q^u to Q^m
  std::vector<double> computed_bits;  // drained from Q^m
  std::vector<double> density_w_per_m2;
  double meh_power_w = 0.0;
};

/// Algorithm step for one slot: flow control and uplink power (S1), CPU
/// scheduling (S2), then every queue advanced from the slot-start values (S3).
/// Virtual queues disabled by the constraint mode stay untouched.
/// Throws std::logic_error if a solver returns an infeasible decision.
SlotOutcome run_slot(const QueueState& state, const ChannelState& channel, const SlotContext& ctx);

/// Running time averages of everything reported per run.
class MetricsAccumulator {
public:
  MetricsAccumulator(std::size_t num_devices, std::size_t num_pixels);

  /// Adds one slot. `state` is the slot-start queue state.
  void add(const QueueState& state, const SlotOutcome& outcome);

  std::size_t slots() const { return slots_; }
  std::size_t num_devices() const { return arrivals_.size(); }

  std::vector<double> mean_arrivals_bits() const { return mean(arrivals_); }
  std::vector<double> mean_tx_power_w() const { return mean(tx_power_); }
  std::vector<double> mean_rate_bps() const { return mean(rate_); }
  std::vector<double> mean_uplink_bits() const { return mean(uplink_); }
  std::vector<double> mean_comp_bits() const { return mean(comp_); }
  std::vector<double> mean_density_w_per_m2() const { return mean(density_); }
  double mean_meh_power_w() const { return slots_ ? meh_power_ / static_cast<double>(slots_) : 0.0; }

  /// Sum over devices of mean admitted bits per slot, divided by tau.
  double sum_rate_bps(double slot_s) const;
  double max_pixel_density_w_per_m2() const;
  std::vector<std::optional<double>> device_delays_s(double slot_s) const;
  /// Mean over devices that admitted traffic; empty if none did.
  std::optional<double> mean_delay_s(double slot_s) const;

private:
  std::vector<double> mean(const std::vector<double>& sums) const;

  std::size_t slots_ = 0;
  std::vector<double> arrivals_;
  std::vector<double> tx_power_;
  std::vector<double> rate_;
  std::vector<double> uplink_;
  std::vector<double> comp_;
  std::vector<double> density_;
  double meh_power_ = 0.0;
};

/// Per-device bit bookkeeping over a whole run.
struct ConservationAudit {
  std::vector<double> admitted_bits;
  std::vector<double> computed_bits;
  /// max_k |admitted - (Q^u_T + Q^m_T + computed)| / max(admitted, 1)
  double max_relative_error = 0.0;
};

struct SlotRecord {
  int slot = 0;
  double admitted_bits = 0.0;
  double uplink_rate_bps = 0.0;
  double mean_tx_power_w = 0.0;
  double meh_freq_hz = 0.0;
  double meh_power_w = 0.0;
  double max_density_w_per_m2 = 0.0;
  double mean_uplink_bits = 0.0;
  double mean_comp_bits = 0.0;
  double max_vq_device_power = 0.0;
  double vq_meh_power = 0.0;
  double max_vq_pixel_emf = 0.0;
  double lyapunov = 0.0;
};

struct RunSummary {
  double sum_rate_bps = 0.0;
  double max_pixel_emf_w_per_m2 = 0.0;
  double mean_device_power_w = 0.0;
  double max_device_power_w = 0.0;
  double meh_power_w = 0.0;
  std::optional<double> mean_delay_s;
};

struct RunResult {
  SimConfig config;
  std::uint64_t seed = 0;
  RunSummary summary;
  MetricsAccumulator metrics{0, 0};
  ConservationAudit audit;
  QueueState final_state;
  std::vector<SlotRecord> timeseries; // filled when requested
};

struct RunOptions {
  bool record_timeseries = false;
};

/// Places devices from `seed`, then runs cfg.num_slots slots with a fresh
/// channel draw per slot from the same stream.
RunResult run_simulation(const SimConfig& cfg, std::uint64_t seed, const RunOptions& options = {});

/// Seed of realization `index` derived from the base seed (splitmix64).
std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t index);

struct Stat {
  double mean = 0.0;
  double std = 0.0; // sample standard deviation, 0 for a single sample
};

Stat summarize(const std::vector<double>& samples);

struct TradeoffPoint {
  double v = 0.0;
  std::size_t realizations = 0;
  Stat sum_rate_bps;
  Stat max_pixel_emf_w_per_m2;
  Stat mean_device_power_w;
  Stat max_device_power_w;
  Stat meh_power_w;
  Stat mean_delay_s;             // over realizations with a defined delay
  std::size_t delay_samples = 0; // realizations contributing to mean_delay_s
};

struct SweepOptions {
  unsigned threads = 0; // 0: hardware concurrency
  bool keep_runs = false;
  bool record_timeseries = false;
};

struct SweepResult {
  std::vector<TradeoffPoint> points;
  std::vector<std::uint64_t> seeds;
  /// runs[v_index][realization], kept when SweepOptions::keep_runs is set.
  std::vector<std::vector<RunResult>> runs;
};

/// Every (V, realization) pair is an independent run; realization r uses the
/// same seed for every V. Results are reduced in (V, realization) order, so
/// the output does not depend on the thread count.
SweepResult run_sweep(const SimConfig& cfg, const std::vector<double>& v_values, std::size_t n_realizations,
                      const SweepOptions& options = {});

/// Logarithmic grid used when a config carries no explicit V list.
std::vector<double> default_v_values();

} // namespace edgeemf
