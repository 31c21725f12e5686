#include "edgeemf/oracle_battery.hpp"

#include "edgeemf/oracles.hpp"
#include "edgeemf/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace edgeemf {

namespace {

double log_uniform(Rng& rng, double lo, double hi)
{
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

double uniform(Rng& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool coin(Rng& rng, double p)
{
  return std::bernoulli_distribution(p)(rng);
}

struct Instance {
  SlotContext ctx;
  QueueState state;
  ChannelState channel;
};

/// Random small instance with magnitudes comparable to the 100-device
/// baseline (200 kHz per device, backlogs up to ~2e5 bits, prices that put
/// the optimal power inside (0, p_max) most of the time).
Instance random_instance(Rng& rng, std::size_t devices, std::size_t pixels)
{
  Instance in;
  SlotContext& ctx = in.ctx;
  ctx.slot_s = 5e-3;
  ctx.lyapunov_v = uniform(rng, 0.0, 2e5);
  ctx.noise_psd_w_per_hz = 3.981071705534986e-21;
  ctx.wavelength_m = kSpeedOfLight / 3.5e9;
  ctx.bandwidth_hz.assign(devices, 2e5);
  ctx.max_tx_power_w.assign(devices, 0.1);
  ctx.bits_per_cycle.resize(devices);
  ctx.max_arrival_bits.resize(devices);
  ctx.device_power_threshold_w.assign(devices, 0.05);
  for (std::size_t k = 0; k < devices; ++k) {
    ctx.bits_per_cycle[k] = coin(rng, 0.5) ? 0.1 : uniform(rng, 0.05, 0.2);
    ctx.max_arrival_bits[k] = uniform(rng, 1e4, 3e4);
  }
  ctx.emf_threshold_w_per_m2.assign(pixels, 0.04);
  ctx.freq_set_hz = {0.0, 1.5e9, 3e9, 4.5e9};
  ctx.kappa = 1e-27;
  ctx.meh_power_threshold_w = 45.0;
  ctx.step_y = 1e6;
  ctx.step_h = 1e3;
  ctx.step_z = 1e6;

  QueueState& s = in.state;
  s = QueueState::zeros(devices, pixels);
  for (std::size_t k = 0; k < devices; ++k) {
    s.uplink_bits[k] = uniform(rng, 0.0, 2e5);
    s.comp_bits[k] = uniform(rng, 0.0, 2e5);
    s.vq_device_power[k] = coin(rng, 0.2) ? 0.0 : log_uniform(rng, 1e1, 1e4);
  }
  for (std::size_t i = 0; i < pixels; ++i)
    s.vq_pixel_emf[i] = coin(rng, 0.3) ? 0.0 : log_uniform(rng, 1e-1, 1e2);
  s.vq_meh_power = coin(rng, 0.2) ? 0.0 : log_uniform(rng, 1e4, 1e8);

  auto pixel = std::make_shared<GainMatrix>(devices, pixels);
  in.channel.uplink_gain.resize(devices);
  for (std::size_t k = 0; k < devices; ++k) {
    in.channel.uplink_gain[k] = log_uniform(rng, 1e-9, 1e-5);
    for (std::size_t i = 0; i < pixels; ++i)
      (*pixel)(k, i) = log_uniform(rng, 1e-7, 1e-4);
  }
  in.channel.pixel_gain = std::move(pixel);
  return in;
}

std::string summary(std::size_t failures, std::size_t instances, double worst, std::string_view unit)
{
  std::ostringstream out;
  out << failures << "/" << instances << " mismatches, worst deviation " << worst << " " << unit;
  return out.str();
}

BatteryCheck check_uplink(Rng& rng, const BatterySizes& sizes)
{
  BatteryCheck check;
  check.name = "uplink power vs grid scan";
  for (std::size_t n = 0; n < sizes.uplink_states; ++n) {
    Instance in = random_instance(rng, 2, 4);
    const auto closed = solve_uplink_power(in.state, in.channel, in.ctx);
    const auto grid = oracle_uplink_grid(in.state, in.channel, in.ctx, sizes.uplink_resolution_w);
    bool ok = true;
    for (std::size_t k = 0; k < closed.size(); ++k) {
      const double dev = std::abs(closed[k] - grid[k]);
      check.worst = std::max(check.worst, dev);
      // grid points are spaced by the resolution; allow round-off on top
      if (dev > sizes.uplink_resolution_w * (1.0 + 1e-6)) ok = false;
    }
    ++check.instances;
    if (!ok) ++check.failures;
  }
  check.passed = check.failures == 0 && check.instances >= sizes.uplink_states;
  check.detail = summary(check.failures, check.instances, check.worst, "W");
  return check;
}

BatteryCheck check_cpu(Rng& rng, const BatterySizes& sizes)
{
  BatteryCheck check;
  check.name = "cpu scheduling vs vertex enumeration";
  const std::vector<double> pool = {0.5e9, 1e9, 1.5e9, 2e9, 2.5e9, 3e9, 3.5e9, 4e9, 4.5e9};
  for (std::size_t n = 0; n < sizes.cpu_instances; ++n) {
    const auto devices = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 4)(rng));
    const auto freqs = static_cast<std::size_t>(std::uniform_int_distribution<int>(2, 5)(rng));
    std::vector<double> freq_set = {0.0};
    std::vector<double> candidates = pool;
    std::shuffle(candidates.begin(), candidates.end(), rng);
    freq_set.insert(freq_set.end(), candidates.begin(), candidates.begin() + static_cast<long>(freqs - 1));
    std::sort(freq_set.begin(), freq_set.end());

    std::vector<double> q(devices), j(devices);
    for (std::size_t k = 0; k < devices; ++k) {
      q[k] = coin(rng, 0.15) ? 0.0 : uniform(rng, 0.0, 2e6);
      if (k > 0 && coin(rng, 0.15)) q[k] = q[k - 1];
      j[k] = coin(rng, 0.5) ? 0.1 : uniform(rng, 0.05, 0.2);
    }
    const double h = coin(rng, 0.2) ? 0.0 : log_uniform(rng, 1e6, 1e11);
    const double step_h = 1.0, slot = 5e-3, kappa = 1e-27;

    const auto fast = solve_cpu_scheduling(q, h, freq_set, j, step_h, slot, kappa);
    const auto brute = oracle_cpu_exhaustive(q, h, freq_set, j, step_h, slot, kappa);
    const double scale = std::max({std::abs(fast.objective), std::abs(brute.objective), 1.0});
    const double dev = std::abs(fast.objective - brute.objective) / scale;
    check.worst = std::max(check.worst, dev);

    double used = 0.0;
    bool feasible = std::find(freq_set.begin(), freq_set.end(), fast.meh_freq_hz) != freq_set.end();
    for (std::size_t k = 0; k < devices; ++k) {
      used += fast.device_freq_hz[k];
      if (fast.device_freq_hz[k] < 0.0 || fast.device_freq_hz[k] > q[k] / (j[k] * slot) * (1.0 + 1e-12))
        feasible = false;
    }
    if (used > fast.meh_freq_hz * (1.0 + 1e-12)) feasible = false;

    ++check.instances;
    if (dev > 1e-12 || !feasible) ++check.failures;
  }
  check.passed = check.failures == 0 && check.instances >= sizes.cpu_instances;
  check.detail = summary(check.failures, check.instances, check.worst, "(relative objective)");
  return check;
}

BatteryCheck check_composed(Rng& rng, const BatterySizes& sizes)
{
  BatteryCheck check;
  check.name = "composed solvers vs joint DPP grid";
  std::size_t mismatched_objective = 0;
  for (std::size_t n = 0; n < sizes.slot_instances; ++n) {
    Instance in = random_instance(rng, 2, 3);
    const SlotDecision composed = solve_slot(in.state, in.channel, in.ctx);
    const double composed_obj = dpp_slot_objective(in.state, composed, in.channel, in.ctx);
    const auto grid = oracle_slot_grid(in.state, in.channel, in.ctx, {sizes.slot_power_steps, 3});

    const double resolution = 0.1 / sizes.slot_power_steps;
    bool ok = true;
    // The closed forms are continuous minimizers, so they can only beat the grid.
    const double scale = std::max(std::abs(grid.objective), 1.0);
    if (composed_obj > grid.objective + 1e-9 * scale) {
      ok = false;
      ++mismatched_objective;
    }
    for (std::size_t k = 0; k < in.ctx.num_devices(); ++k) {
      const double dp = std::abs(composed.tx_power_w[k] - grid.decision.tx_power_w[k]);
      check.worst = std::max(check.worst, dp);
      if (dp > resolution * (1.0 + 1e-9)) ok = false;
      if (composed.arrivals_bits[k] != grid.decision.arrivals_bits[k]) ok = false;
    }
    if (composed.meh_freq_hz != grid.decision.meh_freq_hz) ok = false;
    ++check.instances;
    if (!ok) ++check.failures;
  }
  check.passed = check.failures == 0 && check.instances >= sizes.slot_instances;
  std::ostringstream out;
  out << summary(check.failures, check.instances, check.worst, "W") << ", objective above grid in "
      << mismatched_objective;
  check.detail = out.str();
  return check;
}

} // namespace

std::vector<BatteryCheck> run_oracle_battery(std::uint64_t seed, const BatterySizes& sizes)
{
  Rng rng(seed);
  std::vector<BatteryCheck> out;
  out.push_back(check_uplink(rng, sizes));
  out.push_back(check_cpu(rng, sizes));
  out.push_back(check_composed(rng, sizes));
  return out;
}

} // namespace edgeemf
