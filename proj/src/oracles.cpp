#include "edgeemf/oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace edgeemf {

UplinkDeviceProblem uplink_device_problem(const QueueState& state, const ChannelState& channel,
                                          const SlotContext& ctx, std::size_t device)
{
  UplinkDeviceProblem p;
  p.uplink_bits = state.uplink_bits[device];
  p.comp_bits = state.comp_bits[device];
  p.gain = channel.uplink_gain[device];
  p.bandwidth_hz = ctx.bandwidth_hz[device];
  p.noise_psd_w_per_hz = ctx.noise_psd_w_per_hz;
  p.max_power_w = ctx.max_tx_power_w[device];
  p.slot_s = ctx.slot_s;
  p.step_y = ctx.step_y;
  p.vq_device_power = state.vq_device_power[device];
  double exposure = 0.0;
  for (std::size_t i = 0; i < state.num_pixels(); ++i)
    exposure += ctx.step_z * state.vq_pixel_emf[i] * 4.0 * std::numbers::pi /
                (ctx.wavelength_m * ctx.wavelength_m) * (*channel.pixel_gain)(device, i);
  p.exposure_weight = exposure;
  return p;
}

double uplink_device_objective(const UplinkDeviceProblem& problem, double power_w)
{
  const double snr = problem.gain * power_w / (problem.noise_psd_w_per_hz * problem.bandwidth_hz);
  const double bits = problem.slot_s * problem.bandwidth_hz * std::log2(1.0 + snr);
  return -(problem.uplink_bits - problem.comp_bits) * bits + problem.exposure_weight * power_w +
         problem.step_y * problem.vq_device_power * power_w;
}

namespace {

template <typename Fn>
void for_each_grid_point(double max_power_w, double resolution_w, Fn&& fn)
{
  const auto steps = static_cast<long long>(std::floor(max_power_w / resolution_w));
  for (long long i = 0; i <= steps; ++i)
    fn(static_cast<double>(i) * resolution_w);
  if (static_cast<double>(steps) * resolution_w < max_power_w) fn(max_power_w);
}

} // namespace

double oracle_uplink_grid(const UplinkDeviceProblem& problem, double resolution_w)
{
  if (!(resolution_w > 0.0)) throw std::invalid_argument("oracle_uplink_grid: resolution must be > 0");
  double best_p = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for_each_grid_point(problem.max_power_w, resolution_w, [&](double p) {
    const double obj = uplink_device_objective(problem, p);
    if (obj < best) {
      best = obj;
      best_p = p;
    }
  });
  return best_p;
}

std::vector<double> oracle_uplink_grid(const QueueState& state, const ChannelState& channel, const SlotContext& ctx,
                                       double resolution_w)
{
  std::vector<double> out(ctx.num_devices());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = oracle_uplink_grid(uplink_device_problem(state, channel, ctx, k), resolution_w);
  return out;
}

bool uplink_scan_is_unimodal(const UplinkDeviceProblem& problem, double resolution_w)
{
  bool rising = false;
  double prev = std::numeric_limits<double>::quiet_NaN();
  bool unimodal = true;
  for_each_grid_point(problem.max_power_w, resolution_w, [&](double p) {
    const double obj = uplink_device_objective(problem, p);
    if (!std::isnan(prev)) {
      // allow round-off noise on plateaus
      const double tol = 1e-12 * std::max(std::abs(obj), std::abs(prev));
      if (obj > prev + tol) rising = true;
      else if (obj < prev - tol && rising) unimodal = false;
    }
    prev = obj;
  });
  return unimodal;
}

namespace {

/// All vertices of {0 <= f_k <= cap_k, sum f_k <= budget}.
std::vector<std::vector<double>> allocation_vertices(std::span<const double> caps, double budget)
{
  const std::size_t n = caps.size();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i)
    combos *= 3;

  std::vector<std::vector<double>> out;
  std::vector<int> choice(n);
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    int fractional = -1;
    bool valid = true;
    for (std::size_t k = 0; k < n; ++k) {
      choice[k] = static_cast<int>(c % 3); // 0: zero, 1: at cap, 2: takes leftover
      c /= 3;
      if (choice[k] == 2) {
        if (fractional >= 0) valid = false;
        fractional = static_cast<int>(k);
      }
    }
    if (!valid) continue;
    std::vector<double> alloc(n, 0.0);
    double used = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (choice[k] == 1) {
        alloc[k] = caps[k];
        used += caps[k];
      }
    }
    if (fractional >= 0) {
      const double leftover = budget - used;
      if (leftover < 0.0 || leftover > caps[static_cast<std::size_t>(fractional)]) continue;
      alloc[static_cast<std::size_t>(fractional)] = leftover;
      used += leftover;
    }
    if (used > budget * (1.0 + 1e-12)) continue;
    out.push_back(std::move(alloc));
  }
  return out;
}

std::vector<double> cpu_caps(std::span<const double> comp_bits, std::span<const double> bits_per_cycle,
                             double budget, double slot_s)
{
  std::vector<double> caps(comp_bits.size());
  for (std::size_t k = 0; k < caps.size(); ++k)
    caps[k] = std::min(budget, comp_bits[k] / (bits_per_cycle[k] * slot_s));
  return caps;
}

} // namespace

CpuSchedule oracle_cpu_exhaustive(std::span<const double> comp_bits, double vq_meh_power,
                                  std::span<const double> freq_set_hz, std::span<const double> bits_per_cycle,
                                  double step_h, double slot_s, double kappa)
{
  if (comp_bits.size() > kCpuOracleMaxDevices || freq_set_hz.size() > kCpuOracleMaxFreqs)
    throw std::invalid_argument("oracle_cpu_exhaustive: instance too large");

  CpuSchedule best;
  best.objective = std::numeric_limits<double>::infinity();
  for (double f_s : freq_set_hz) {
    const auto caps = cpu_caps(comp_bits, bits_per_cycle, f_s, slot_s);
    for (auto& alloc : allocation_vertices(caps, f_s)) {
      double obj = step_h * vq_meh_power * kappa * std::pow(f_s, 3);
      for (std::size_t k = 0; k < alloc.size(); ++k)
        obj -= comp_bits[k] * slot_s * bits_per_cycle[k] * alloc[k];
      if (obj < best.objective) {
        best.objective = obj;
        best.meh_freq_hz = f_s;
        best.device_freq_hz = std::move(alloc);
      }
    }
  }
  return best;
}

SlotGridResult oracle_slot_grid(const QueueState& state, const ChannelState& channel, const SlotContext& ctx,
                                const SlotGridSpec& spec)
{
  const std::size_t n = ctx.num_devices();
  const auto levels_a = static_cast<std::size_t>(std::max(spec.arrival_levels, 2));
  const auto levels_p = static_cast<std::size_t>(std::max(spec.power_steps, 1)) + 1;

  struct CpuCandidate {
    double f_s;
    std::vector<double> alloc;
  };
  std::vector<CpuCandidate> cpu;
  for (double f_s : ctx.freq_set_hz) {
    const auto caps = cpu_caps(state.comp_bits, ctx.bits_per_cycle, f_s, ctx.slot_s);
    for (auto& alloc : allocation_vertices(caps, f_s))
      cpu.push_back({f_s, std::move(alloc)});
  }

  std::size_t radio_combos = 1;
  for (std::size_t k = 0; k < n; ++k)
    radio_combos *= levels_a * levels_p;

  SlotGridResult best;
  best.objective = std::numeric_limits<double>::infinity();
  SlotDecision candidate;
  candidate.arrivals_bits.resize(n);
  candidate.tx_power_w.resize(n);
  for (std::size_t code = 0; code < radio_combos; ++code) {
    std::size_t c = code;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t ia = c % levels_a;
      c /= levels_a;
      const std::size_t ip = c % levels_p;
      c /= levels_p;
      candidate.arrivals_bits[k] = ctx.max_arrival_bits[k] * static_cast<double>(ia) / (levels_a - 1);
      candidate.tx_power_w[k] = ctx.max_tx_power_w[k] * static_cast<double>(ip) / (levels_p - 1);
    }
    for (const auto& cand : cpu) {
      candidate.meh_freq_hz = cand.f_s;
      candidate.device_freq_hz = cand.alloc;
      const double obj = dpp_slot_objective(state, candidate, channel, ctx);
      if (obj < best.objective) {
        best.objective = obj;
        best.decision = candidate;
      }
    }
  }
  return best;
}

} // namespace edgeemf
