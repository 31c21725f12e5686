#include "edgeemf/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace edgeemf {

namespace {

constexpr double kBudgetSlack = 1e-12;

std::string describe(std::string_view what, std::size_t index, double value)
{
  std::ostringstream msg;
  msg << what << " at device " << index << " (value " << value << ")";
  return msg.str();
}

} // namespace

std::optional<std::string> check_decision(const SlotDecision& decision, const SlotContext& ctx)
{
  const std::size_t k = ctx.num_devices();
  if (decision.arrivals_bits.size() != k || decision.tx_power_w.size() != k || decision.device_freq_hz.size() != k)
    return "decision vectors do not match the device count";
  double total_freq = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = decision.arrivals_bits[i];
    if (!(a >= 0.0 && a <= ctx.max_arrival_bits[i])) return describe("arrivals outside [0, A^max]", i, a);
    const double p = decision.tx_power_w[i];
    if (!(p >= 0.0 && p <= ctx.max_tx_power_w[i])) return describe("tx power outside [0, p^max]", i, p);
    const double f = decision.device_freq_hz[i];
    if (!(f >= 0.0 && std::isfinite(f))) return describe("negative device frequency", i, f);
    total_freq += f;
  }
  if (std::find(ctx.freq_set_hz.begin(), ctx.freq_set_hz.end(), decision.meh_freq_hz) == ctx.freq_set_hz.end())
    return "MEH frequency not in the admissible set";
  if (total_freq > decision.meh_freq_hz * (1.0 + kBudgetSlack)) return "device frequencies exceed the MEH clock";
  return std::nullopt;
}

std::vector<double> solve_flow_control(std::span<const double> uplink_bits, double lyapunov_v,
                                       std::span<const double> max_arrival_bits)
{
  std::vector<double> out(uplink_bits.size());
  for (std::size_t k = 0; k < uplink_bits.size(); ++k)
    out[k] = uplink_bits[k] <= lyapunov_v ? max_arrival_bits[k] : 0.0;
  return out;
}

std::vector<double> uplink_power_prices(const QueueState& state, const ChannelState& channel,
                                        const SlotContext& ctx)
{
  const std::size_t num_devices = ctx.num_devices();
  const double aperture = 4.0 * std::numbers::pi / (ctx.wavelength_m * ctx.wavelength_m);
  const bool any_pixel_pressure =
    std::any_of(state.vq_pixel_emf.begin(), state.vq_pixel_emf.end(), [](double z) { return z > 0.0; });

  std::vector<double> prices(num_devices);
  for (std::size_t k = 0; k < num_devices; ++k) {
    double exposure = 0.0;
    if (any_pixel_pressure) {
      auto gains = channel.pixel_gain->row(k);
      for (std::size_t i = 0; i < gains.size(); ++i)
        exposure += state.vq_pixel_emf[i] * gains[i];
    }
    prices[k] = ctx.step_y * state.vq_device_power[k] + aperture * ctx.step_z * exposure;
  }
  return prices;
}

double uplink_power_closed_form(double uplink_bits, double comp_bits, double price, double gain,
                                double bandwidth_hz, double noise_psd_w_per_hz, double max_power_w, double slot_s)
{
  const double backlog_diff = uplink_bits - comp_bits;
  if (backlog_diff <= 0.0) return 0.0;
  if (!(price > 0.0)) return max_power_w;
  const double sigma = slot_s * backlog_diff * bandwidth_hz / (std::numbers::ln2 * price);
  const double level = sigma - noise_psd_w_per_hz * bandwidth_hz / gain;
  return std::clamp(level, 0.0, max_power_w);
}

std::vector<double> solve_uplink_power(const QueueState& state, const ChannelState& channel, const SlotContext& ctx)
{
  const auto prices = uplink_power_prices(state, channel, ctx);
  std::vector<double> power(ctx.num_devices());
  for (std::size_t k = 0; k < power.size(); ++k) {
    power[k] = uplink_power_closed_form(state.uplink_bits[k], state.comp_bits[k], prices[k], channel.uplink_gain[k],
                                        ctx.bandwidth_hz[k], ctx.noise_psd_w_per_hz, ctx.max_tx_power_w[k],
                                        ctx.slot_s);
    if (ctx.cap_power_to_backlog && power[k] > 0.0) {
      const double drain = power_from_rate(state.uplink_bits[k] / ctx.slot_s, channel.uplink_gain[k],
                                           ctx.bandwidth_hz[k], ctx.noise_psd_w_per_hz);
      power[k] = std::min(power[k], drain);
    }
  }
  return power;
}

double cpu_objective(std::span<const double> comp_bits, double vq_meh_power, double meh_freq_hz,
                     std::span<const double> device_freq_hz, std::span<const double> bits_per_cycle, double step_h,
                     double slot_s, double kappa)
{
  double gain = 0.0;
  for (std::size_t k = 0; k < comp_bits.size(); ++k)
    gain += comp_bits[k] * slot_s * bits_per_cycle[k] * device_freq_hz[k];
  return step_h * vq_meh_power * kappa * meh_freq_hz * meh_freq_hz * meh_freq_hz - gain;
}

CpuSchedule solve_cpu_scheduling(std::span<const double> comp_bits, double vq_meh_power,
                                 std::span<const double> freq_set_hz, std::span<const double> bits_per_cycle,
                                 double step_h, double slot_s, double kappa)
{
  const std::size_t num_devices = comp_bits.size();
  std::vector<std::size_t> order(num_devices);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return comp_bits[a] * bits_per_cycle[a] > comp_bits[b] * bits_per_cycle[b];
  });

  CpuSchedule best;
  bool have_best = false;
  std::vector<double> alloc(num_devices);
  for (double f_s : freq_set_hz) {
    std::fill(alloc.begin(), alloc.end(), 0.0);
    double remaining = f_s;
    for (std::size_t k : order) {
      if (remaining <= 0.0) break;
      const double needed = comp_bits[k] / (bits_per_cycle[k] * slot_s);
      alloc[k] = std::min(remaining, needed);
      remaining -= alloc[k];
    }
    const double obj = cpu_objective(comp_bits, vq_meh_power, f_s, alloc, bits_per_cycle, step_h, slot_s, kappa);
    if (!have_best || obj < best.objective) {
      best.meh_freq_hz = f_s;
      best.device_freq_hz = alloc;
      best.objective = obj;
      have_best = true;
    }
  }
  return best;
}

SlotDecision solve_slot(const QueueState& state, const ChannelState& channel, const SlotContext& ctx)
{
  SlotDecision decision;
  decision.arrivals_bits = solve_flow_control(state.uplink_bits, ctx.lyapunov_v, ctx.max_arrival_bits);
  decision.tx_power_w = solve_uplink_power(state, channel, ctx);
  auto cpu = solve_cpu_scheduling(state.comp_bits, state.vq_meh_power, ctx.freq_set_hz, ctx.bits_per_cycle,
                                  ctx.step_h, ctx.slot_s, ctx.kappa);
  decision.meh_freq_hz = cpu.meh_freq_hz;
  decision.device_freq_hz = std::move(cpu.device_freq_hz);
  return decision;
}

double dpp_slot_objective(const QueueState& state, const SlotDecision& decision, const ChannelState& channel,
                          const SlotContext& ctx)
{
  if (auto err = check_decision(decision, ctx)) throw std::invalid_argument("dpp_slot_objective: " + *err);

  double total = 0.0;
  for (std::size_t k = 0; k < ctx.num_devices(); ++k) {
    const double served = ctx.slot_s * rate_from_power(decision.tx_power_w[k], channel.uplink_gain[k],
                                                       ctx.bandwidth_hz[k], ctx.noise_psd_w_per_hz);
    const double computed = ctx.slot_s * decision.device_freq_hz[k] * ctx.bits_per_cycle[k];
    total += state.uplink_bits[k] * (decision.arrivals_bits[k] - served);
    total += state.comp_bits[k] * (served - computed);
    total += ctx.step_y * state.vq_device_power[k] * (decision.tx_power_w[k] - ctx.device_power_threshold_w[k]);
    total -= ctx.lyapunov_v * decision.arrivals_bits[k];
  }
  const auto density = power_density(channel, decision.tx_power_w, ctx.wavelength_m);
  for (std::size_t i = 0; i < density.size(); ++i)
    total += ctx.step_z * state.vq_pixel_emf[i] * (density[i] - ctx.emf_threshold_w_per_m2[i]);
  const double f = decision.meh_freq_hz;
  total += ctx.step_h * state.vq_meh_power * (ctx.kappa * f * f * f - ctx.meh_power_threshold_w);
  return total;
}

} // namespace edgeemf
