#include "doctest.h"

#include "edgeemf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace edgeemf;

namespace {

SimConfig small_config(ConstraintMode mode)
{
  SimConfig cfg = baseline_config();
  cfg.num_devices = 10;
  cfg.total_bandwidth_hz = 2e6;
  cfg.num_slots = 300;
  cfg.constraint_mode = mode;
  return cfg;
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("device placement")
{
  const SimConfig cfg = baseline_config();
  Rng a(4), b(4);
  const auto p1 = place_devices(a, cfg);
  const auto p2 = place_devices(b, cfg);
  REQUIRE(p1.size() == 100);
  const Point ap = access_point(cfg);
  CHECK(ap.x == 7.5);
  CHECK(ap.y == 7.5);
  for (std::size_t k = 0; k < p1.size(); ++k) {
    CHECK(p1[k].x == p2[k].x);
    CHECK(p1[k].y == p2[k].y);
    CHECK(p1[k].x >= 0.0);
    CHECK(p1[k].x <= 15.0);
    CHECK(p1[k].y >= 0.0);
    CHECK(p1[k].y <= 15.0);
    CHECK(distance(p1[k], ap) >= cfg.path_loss.min_distance_m);
  }
}

TEST_CASE("device placement is uniform on average")
{
  SimConfig cfg = baseline_config();
  cfg.num_devices = 1;
  Rng rng(10);
  double sx = 0.0, sy = 0.0;
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const Point p = place_devices(rng, cfg)[0];
    sx += p.x;
    sy += p.y;
  }
  CHECK(std::abs(sx / n - 7.5) <= 0.02 * 7.5);
  CHECK(std::abs(sy / n - 7.5) <= 0.02 * 7.5);
}

TEST_CASE("derived arrival cap matches direct evaluation")
{
  const SimConfig cfg = baseline_config();
  const double h = path_loss_gain(cfg.path_loss, 4.0, cfg.carrier_freq_hz);
  const double b = cfg.per_device_bandwidth_hz();
  const double direct = cfg.slot_duration_s * b * std::log2(1.0 + h * 0.1 / (cfg.noise_psd_w_per_hz * b));
  CHECK(derive_max_arrival_bits(cfg, h) == doctest::Approx(direct).epsilon(1e-12));

  SimConfig fixed = cfg;
  fixed.device.max_arrival_bits = 1234.0;
  const Scenario sc = build_scenario(fixed, {{1.0, 1.0}, {3.0, 9.0}});
  CHECK(sc.ctx.max_arrival_bits == std::vector<double>{1234.0, 1234.0});
}

TEST_CASE("cold start admits and does not transmit")
{
  const SimConfig cfg = small_config(ConstraintMode::constrained);
  Rng rng(1);
  const Scenario sc = build_scenario(cfg, place_devices(rng, cfg));
  const ChannelState ch = sample_channel_state(rng, sc.mean_gains, cfg.fading, 0);
  const QueueState zero = QueueState::zeros(cfg.num_devices, cfg.num_pixels());
  const SlotOutcome out = run_slot(zero, ch, sc.ctx);
  for (std::size_t k = 0; k < out.decision.arrivals_bits.size(); ++k) {
    CHECK(out.decision.arrivals_bits[k] == sc.ctx.max_arrival_bits[k]);
    CHECK(out.decision.tx_power_w[k] == 0.0);
    CHECK(out.served_bits[k] == 0.0);
    CHECK(out.next.uplink_bits[k] == sc.ctx.max_arrival_bits[k]);
    CHECK(out.next.comp_bits[k] == 0.0);
  }
  CHECK(out.decision.meh_freq_hz == 0.0);
}

TEST_CASE("unconstrained mode leaves virtual queues at zero")
{
  const SimConfig cfg = small_config(ConstraintMode::unconstrained);
  const RunResult r = run_simulation(cfg, 5);
  for (double y : r.final_state.vq_device_power) CHECK(y == 0.0);
  for (double z : r.final_state.vq_pixel_emf) CHECK(z == 0.0);
  CHECK(r.final_state.vq_meh_power == 0.0);
}

TEST_CASE("no-MEH mode leaves the MEH queue at zero")
{
  SimConfig cfg = small_config(ConstraintMode::constrained_no_meh);
  cfg.meh_power_threshold_w = 1e-3;
  const RunResult r = run_simulation(cfg, 5);
  CHECK(r.final_state.vq_meh_power == 0.0);
}

TEST_CASE("slot decisions stay feasible on random states")
{
  const SimConfig cfg = small_config(ConstraintMode::constrained);
  Rng rng(2);
  const Scenario sc = build_scenario(cfg, place_devices(rng, cfg));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const ChannelState ch = sample_channel_state(rng, sc.mean_gains, cfg.fading, t);
    QueueState s = QueueState::zeros(cfg.num_devices, cfg.num_pixels());
    for (std::size_t k = 0; k < s.num_devices(); ++k) {
      s.uplink_bits[k] = 3e5 * u(rng);
      s.comp_bits[k] = 3e5 * u(rng);
      s.vq_device_power[k] = u(rng) < 0.3 ? 0.0 : 1e4 * u(rng);
    }
    for (double& z : s.vq_pixel_emf) z = u(rng) < 0.5 ? 0.0 : 100.0 * u(rng);
    s.vq_meh_power = 1e7 * u(rng);
    const SlotOutcome out = run_slot(s, ch, sc.ctx);
    REQUIRE_FALSE(check_decision(out.decision, sc.ctx).has_value());
    REQUIRE(out.next.is_valid());
  }
}

TEST_CASE("empty run has no delay")
{
  SimConfig cfg = small_config(ConstraintMode::constrained);
  cfg.num_slots = 0;
  const RunResult r = run_simulation(cfg, 1);
  CHECK(r.metrics.slots() == 0);
  CHECK_FALSE(r.summary.mean_delay_s.has_value());
  CHECK(r.summary.sum_rate_bps == 0.0);
}

TEST_CASE("bits are conserved over a run")
{
  SimConfig cfg = small_config(ConstraintMode::constrained);
  cfg.num_slots = 2000;
  const RunResult r = run_simulation(cfg, 3);
  CHECK(r.audit.max_relative_error <= 1e-6);
  for (std::size_t k = 0; k < cfg.num_devices; ++k) {
    const double held = r.final_state.uplink_bits[k] + r.final_state.comp_bits[k] + r.audit.computed_bits[k];
    CHECK(held == doctest::Approx(r.audit.admitted_bits[k]).epsilon(1e-9));
  }
}

TEST_CASE("sum rate equals admitted bits per second")
{
  const SimConfig cfg = small_config(ConstraintMode::constrained);
  const RunResult r = run_simulation(cfg, 6);
  double total = 0.0;
  for (double a : r.metrics.mean_arrivals_bits()) total += a;
  CHECK(r.summary.sum_rate_bps == doctest::Approx(total / cfg.slot_duration_s).epsilon(1e-12));
}

TEST_CASE("runs are reproducible and time series match summaries")
{
  const SimConfig cfg = small_config(ConstraintMode::constrained);
  const RunResult a = run_simulation(cfg, 99, {true});
  const RunResult b = run_simulation(cfg, 99, {true});
  CHECK(a.final_state == b.final_state);
  CHECK(a.summary.sum_rate_bps == b.summary.sum_rate_bps);
  REQUIRE(a.timeseries.size() == static_cast<std::size_t>(cfg.num_slots));
  double admitted = 0.0;
  for (const auto& rec : a.timeseries) admitted += rec.admitted_bits;
  CHECK(admitted / cfg.num_slots / cfg.slot_duration_s == doctest::Approx(a.summary.sum_rate_bps));

  const RunResult c = run_simulation(cfg, 100);
  CHECK_FALSE(a.final_state == c.final_state);
}

TEST_CASE("sweep: single point reduces to a run")
{
  const SimConfig cfg = small_config(ConstraintMode::constrained);
  const SweepResult s = run_sweep(cfg, {cfg.lyapunov_v}, 1);
  REQUIRE(s.points.size() == 1);
  SimConfig at_v = cfg;
  const RunResult r = run_simulation(at_v, s.seeds[0]);
  CHECK(s.points[0].sum_rate_bps.mean == r.summary.sum_rate_bps);
  CHECK(s.points[0].sum_rate_bps.std == 0.0);
  CHECK(s.points[0].meh_power_w.mean == r.summary.meh_power_w);
}

TEST_CASE("sweep output does not depend on thread count")
{
  SimConfig cfg = small_config(ConstraintMode::constrained);
  cfg.num_slots = 100;
  const std::vector<double> vs = {1e4, 1e5};
  const SweepResult one = run_sweep(cfg, vs, 3, {1, false, false});
  const SweepResult many = run_sweep(cfg, vs, 3, {4, false, false});
  REQUIRE(one.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(one.points[i].sum_rate_bps.mean == many.points[i].sum_rate_bps.mean);
    CHECK(one.points[i].sum_rate_bps.std == many.points[i].sum_rate_bps.std);
    CHECK(one.points[i].max_pixel_emf_w_per_m2.mean == many.points[i].max_pixel_emf_w_per_m2.mean);
  }
}

TEST_CASE("realizations are independent of their order")
{
  SimConfig cfg = small_config(ConstraintMode::constrained);
  cfg.num_slots = 100;
  const std::uint64_t s0 = realization_seed(cfg.rng_seed, 0), s1 = realization_seed(cfg.rng_seed, 1);
  CHECK(s0 != s1);
  const RunResult a0 = run_simulation(cfg, s0), a1 = run_simulation(cfg, s1);
  const RunResult b1 = run_simulation(cfg, s1), b0 = run_simulation(cfg, s0);
  CHECK(a0.final_state == b0.final_state);
  CHECK(a1.final_state == b1.final_state);
}

TEST_CASE("sample statistics")
{
  const Stat s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(summarize({7.0}).std == 0.0);
}

}
