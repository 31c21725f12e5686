#include "edgeemf/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace edgeemf {

Point access_point(const SimConfig& cfg)
{
  return {cfg.area_side_m / 2.0, cfg.area_side_m / 2.0};
}

std::vector<Point> place_devices(Rng& rng, const SimConfig& cfg)
{
  std::uniform_real_distribution<double> coord(0.0, cfg.area_side_m);
  const Point ap = access_point(cfg);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(cfg.num_devices));
  while (out.size() < static_cast<std::size_t>(cfg.num_devices)) {
    Point p{coord(rng), coord(rng)};
    if (distance(p, ap) >= cfg.path_loss.min_distance_m) out.push_back(p);
  }
  return out;
}

double derive_max_arrival_bits(const SimConfig& cfg, double mean_uplink_gain)
{
  return cfg.slot_duration_s * rate_from_power(cfg.device.max_tx_power_w, mean_uplink_gain,
                                               cfg.per_device_bandwidth_hz(), cfg.noise_psd_w_per_hz);
}

Scenario build_scenario(const SimConfig& cfg, std::vector<Point> devices)
{
  Scenario sc;
  sc.devices = std::move(devices);
  sc.pixels = make_pixel_grid(cfg);
  sc.mean_gains = compute_link_gains(sc.devices, access_point(cfg), sc.pixels, cfg.path_loss, cfg.carrier_freq_hz);

  const std::size_t k = sc.devices.size();
  SlotContext& ctx = sc.ctx;
  ctx.slot_s = cfg.slot_duration_s;
  ctx.lyapunov_v = cfg.lyapunov_v;
  ctx.noise_psd_w_per_hz = cfg.noise_psd_w_per_hz;
  ctx.wavelength_m = wavelength(cfg.carrier_freq_hz);
  ctx.bandwidth_hz.assign(k, cfg.per_device_bandwidth_hz());
  ctx.max_tx_power_w.assign(k, cfg.device.max_tx_power_w);
  ctx.bits_per_cycle.assign(k, cfg.device.bits_per_cycle);
  ctx.device_power_threshold_w.assign(k, cfg.device_power_threshold_w);
  ctx.max_arrival_bits.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    ctx.max_arrival_bits[i] = cfg.device.max_arrival_bits.value_or(derive_max_arrival_bits(cfg, sc.mean_gains.uplink[i]));
  ctx.emf_threshold_w_per_m2 = sc.pixels.threshold_w_per_m2;
  ctx.freq_set_hz = cfg.meh.freq_set_hz;
  ctx.kappa = cfg.meh.kappa;
  ctx.meh_power_threshold_w = cfg.meh_power_threshold_w;
  ctx.step_y = cfg.step_y;
  ctx.step_h = cfg.step_h;
  ctx.step_z = cfg.step_z;
  ctx.cap_power_to_backlog = cfg.cap_power_to_backlog;
  ctx.mode = cfg.constraint_mode;
  return sc;
}

SlotOutcome run_slot(const QueueState& state, const ChannelState& channel, const SlotContext& ctx)
{
  SlotOutcome out;
  out.decision = solve_slot(state, channel, ctx);
  if (auto err = check_decision(out.decision, ctx)) throw std::logic_error("run_slot: infeasible decision: " + *err);

  const std::size_t n = ctx.num_devices();
  const auto& d = out.decision;
  out.next = state;
  out.rate_bps.resize(n);
  out.served_bits.resize(n);
  out.computed_bits.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.rate_bps[k] = rate_from_power(d.tx_power_w[k], channel.uplink_gain[k], ctx.bandwidth_hz[k],
                                      ctx.noise_psd_w_per_hz);
    const auto up = update_uplink_queue(state.uplink_bits[k], out.rate_bps[k], d.arrivals_bits[k], ctx.slot_s);
    out.served_bits[k] = up.served_bits;
    out.computed_bits[k] = computed_bits(state.comp_bits[k], d.device_freq_hz[k], ctx.bits_per_cycle[k], ctx.slot_s);
    out.next.uplink_bits[k] = up.next_bits;
    out.next.comp_bits[k] =
      update_comp_queue(state.comp_bits[k], d.device_freq_hz[k], ctx.bits_per_cycle[k], up.served_bits, ctx.slot_s);
  }

  power_density_into(*channel.pixel_gain, d.tx_power_w, ctx.wavelength_m, out.density_w_per_m2);
  out.meh_power_w = ctx.kappa * d.meh_freq_hz * d.meh_freq_hz * d.meh_freq_hz;

  if (ctx.mode != ConstraintMode::unconstrained) {
    for (std::size_t k = 0; k < n; ++k)
      out.next.vq_device_power[k] = update_virtual_queue(state.vq_device_power[k], ctx.step_y, d.tx_power_w[k],
                                                         ctx.device_power_threshold_w[k]);
    for (std::size_t i = 0; i < out.density_w_per_m2.size(); ++i)
      out.next.vq_pixel_emf[i] = update_virtual_queue(state.vq_pixel_emf[i], ctx.step_z, out.density_w_per_m2[i],
                                                      ctx.emf_threshold_w_per_m2[i]);
  }
  if (ctx.mode == ConstraintMode::constrained)
    out.next.vq_meh_power =
      update_virtual_queue(state.vq_meh_power, ctx.step_h, out.meh_power_w, ctx.meh_power_threshold_w);
  return out;
}

MetricsAccumulator::MetricsAccumulator(std::size_t num_devices, std::size_t num_pixels)
  : arrivals_(num_devices, 0.0), tx_power_(num_devices, 0.0), rate_(num_devices, 0.0), uplink_(num_devices, 0.0),
    comp_(num_devices, 0.0), density_(num_pixels, 0.0)
{
}

void MetricsAccumulator::add(const QueueState& state, const SlotOutcome& outcome)
{
  ++slots_;
  for (std::size_t k = 0; k < arrivals_.size(); ++k) {
    arrivals_[k] += outcome.decision.arrivals_bits[k];
    tx_power_[k] += outcome.decision.tx_power_w[k];
    rate_[k] += outcome.rate_bps[k];
    uplink_[k] += state.uplink_bits[k];
    comp_[k] += state.comp_bits[k];
  }
  for (std::size_t i = 0; i < density_.size(); ++i)
    density_[i] += outcome.density_w_per_m2[i];
  meh_power_ += outcome.meh_power_w;
}

std::vector<double> MetricsAccumulator::mean(const std::vector<double>& sums) const
{
  std::vector<double> out(sums.size(), 0.0);
  if (slots_ == 0) return out;
  const double n = static_cast<double>(slots_);
  std::transform(sums.begin(), sums.end(), out.begin(), [n](double s) { return s / n; });
  return out;
}

double MetricsAccumulator::sum_rate_bps(double slot_s) const
{
  double total = 0.0;
  for (double a : mean_arrivals_bits())
    total += a;
  return total / slot_s;
}

double MetricsAccumulator::max_pixel_density_w_per_m2() const
{
  const auto m = mean_density_w_per_m2();
  return m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
}

std::vector<std::optional<double>> MetricsAccumulator::device_delays_s(double slot_s) const
{
  const auto a = mean_arrivals_bits();
  const auto qu = mean_uplink_bits();
  const auto qm = mean_comp_bits();
  std::vector<std::optional<double>> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    out[k] = avg_e2e_delay(qu[k], qm[k], a[k], slot_s);
  return out;
}

std::optional<double> MetricsAccumulator::mean_delay_s(double slot_s) const
{
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& d : device_delays_s(slot_s)) {
    if (!d) continue;
    total += *d;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return total / static_cast<double>(count);
}

namespace {

SlotRecord make_record(int slot, const QueueState& state, const SlotOutcome& outcome)
{
  SlotRecord r;
  r.slot = slot;
  const std::size_t n = state.num_devices();
  for (std::size_t k = 0; k < n; ++k) {
    r.admitted_bits += outcome.decision.arrivals_bits[k];
    r.uplink_rate_bps += outcome.rate_bps[k];
    r.mean_tx_power_w += outcome.decision.tx_power_w[k];
    r.mean_uplink_bits += state.uplink_bits[k];
    r.mean_comp_bits += state.comp_bits[k];
  }
  if (n > 0) {
    r.mean_tx_power_w /= static_cast<double>(n);
    r.mean_uplink_bits /= static_cast<double>(n);
    r.mean_comp_bits /= static_cast<double>(n);
  }
  r.meh_freq_hz = outcome.decision.meh_freq_hz;
  r.meh_power_w = outcome.meh_power_w;
  if (!outcome.density_w_per_m2.empty())
    r.max_density_w_per_m2 = *std::max_element(outcome.density_w_per_m2.begin(), outcome.density_w_per_m2.end());
  if (!state.vq_device_power.empty())
    r.max_vq_device_power = *std::max_element(state.vq_device_power.begin(), state.vq_device_power.end());
  r.vq_meh_power = state.vq_meh_power;
  if (!state.vq_pixel_emf.empty())
    r.max_vq_pixel_emf = *std::max_element(state.vq_pixel_emf.begin(), state.vq_pixel_emf.end());
  r.lyapunov = lyapunov_value(state);
  return r;
}

} // namespace

RunResult run_simulation(const SimConfig& cfg, std::uint64_t seed, const RunOptions& options)
{
  Rng rng(seed);
  auto devices = place_devices(rng, cfg);
  Scenario sc = build_scenario(cfg, std::move(devices));
  const std::size_t num_devices = sc.devices.size();
  const std::size_t num_pixels = sc.pixels.size();

  RunResult result;
  result.config = cfg;
  result.seed = seed;
  result.metrics = MetricsAccumulator(num_devices, num_pixels);
  result.audit.admitted_bits.assign(num_devices, 0.0);
  result.audit.computed_bits.assign(num_devices, 0.0);
  if (options.record_timeseries) result.timeseries.reserve(static_cast<std::size_t>(cfg.num_slots));

  QueueState state = QueueState::zeros(num_devices, num_pixels);
  for (int t = 0; t < cfg.num_slots; ++t) {
    const ChannelState channel = sample_channel_state(rng, sc.mean_gains, cfg.fading, t);
    SlotOutcome outcome = run_slot(state, channel, sc.ctx);
    for (std::size_t k = 0; k < num_devices; ++k) {
      result.audit.admitted_bits[k] += outcome.decision.arrivals_bits[k];
      result.audit.computed_bits[k] += outcome.computed_bits[k];
    }
    if (t >= cfg.burn_in_slots) result.metrics.add(state, outcome);
    if (options.record_timeseries) result.timeseries.push_back(make_record(t, state, outcome));
    state = std::move(outcome.next);
  }

  double worst = 0.0;
  for (std::size_t k = 0; k < num_devices; ++k) {
    const double admitted = result.audit.admitted_bits[k];
    const double accounted = state.uplink_bits[k] + state.comp_bits[k] + result.audit.computed_bits[k];
    worst = std::max(worst, std::abs(admitted - accounted) / std::max(admitted, 1.0));
  }
  result.audit.max_relative_error = worst;
  result.final_state = std::move(state);

  const auto& m = result.metrics;
  RunSummary& s = result.summary;
  s.sum_rate_bps = m.sum_rate_bps(cfg.slot_duration_s);
  s.max_pixel_emf_w_per_m2 = m.max_pixel_density_w_per_m2();
  const auto power = m.mean_tx_power_w();
  if (!power.empty()) {
    double total = 0.0;
    for (double p : power)
      total += p;
    s.mean_device_power_w = total / static_cast<double>(power.size());
    s.max_device_power_w = *std::max_element(power.begin(), power.end());
  }
  s.meh_power_w = m.mean_meh_power_w();
  s.mean_delay_s = m.mean_delay_s(cfg.slot_duration_s);
  return result;
}

std::uint64_t realization_seed(std::uint64_t base_seed, std::size_t index)
{
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Stat summarize(const std::vector<double>& samples)
{
  Stat s;
  if (samples.empty()) return s;
  double total = 0.0;
  for (double x : samples)
    total += x;
  s.mean = total / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples)
      ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  }
  return s;
}

std::vector<double> default_v_values()
{
  return {1e3, 3e3, 1e4, 3e4, 1e5, 3e5, 1e6};
}

SweepResult run_sweep(const SimConfig& cfg, const std::vector<double>& v_values, std::size_t n_realizations,
                      const SweepOptions& options)
{
  if (v_values.empty()) throw std::invalid_argument("run_sweep: v_values must not be empty");

  SweepResult result;
  for (std::size_t r = 0; r < n_realizations; ++r)
    result.seeds.push_back(realization_seed(cfg.rng_seed, r));

  const std::size_t total = v_values.size() * n_realizations;
  std::vector<std::vector<RunResult>> runs(v_values.size(), std::vector<RunResult>(n_realizations));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t vi = job / n_realizations;
      const std::size_t r = job % n_realizations;
      try {
        SimConfig run_cfg = cfg;
        run_cfg.lyapunov_v = v_values[vi];
        runs[vi][r] = run_simulation(run_cfg, result.seeds[r], {options.record_timeseries});
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i)
      pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t vi = 0; vi < v_values.size(); ++vi) {
    std::vector<double> rate, emf, dev_mean, dev_max, meh, delay;
    for (const auto& run : runs[vi]) {
      rate.push_back(run.summary.sum_rate_bps);
      emf.push_back(run.summary.max_pixel_emf_w_per_m2);
      dev_mean.push_back(run.summary.mean_device_power_w);
      dev_max.push_back(run.summary.max_device_power_w);
      meh.push_back(run.summary.meh_power_w);
      if (run.summary.mean_delay_s) delay.push_back(*run.summary.mean_delay_s);
    }
    TradeoffPoint p;
    p.v = v_values[vi];
    p.realizations = n_realizations;
    p.sum_rate_bps = summarize(rate);
    p.max_pixel_emf_w_per_m2 = summarize(emf);
    p.mean_device_power_w = summarize(dev_mean);
    p.max_device_power_w = summarize(dev_max);
    p.meh_power_w = summarize(meh);
    p.mean_delay_s = summarize(delay);
    p.delay_samples = delay.size();
    result.points.push_back(p);
  }
  if (options.keep_runs) result.runs = std::move(runs);
  return result;
}

} // namespace edgeemf
