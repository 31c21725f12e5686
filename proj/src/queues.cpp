#include "edgeemf/queues.hpp"

#include <algorithm>
#include <cmath>

namespace edgeemf {

QueueState QueueState::zeros(std::size_t num_devices, std::size_t num_pixels)
{
  QueueState s;
  s.uplink_bits.assign(num_devices, 0.0);
  s.comp_bits.assign(num_devices, 0.0);
  s.vq_device_power.assign(num_devices, 0.0);
  s.vq_pixel_emf.assign(num_pixels, 0.0);
  return s;
}

bool QueueState::is_valid() const
{
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  const std::size_t k = uplink_bits.size();
  if (comp_bits.size() != k || vq_device_power.size() != k) return false;
  return std::all_of(uplink_bits.begin(), uplink_bits.end(), ok) &&
         std::all_of(comp_bits.begin(), comp_bits.end(), ok) &&
         std::all_of(vq_device_power.begin(), vq_device_power.end(), ok) && ok(vq_meh_power) &&
         std::all_of(vq_pixel_emf.begin(), vq_pixel_emf.end(), ok);
}

UplinkUpdate update_uplink_queue(double q_bits, double rate_bps, double arrivals_bits, double slot_s)
{
  const double capacity = slot_s * rate_bps;
  const double served = std::min(capacity, q_bits);
  return {std::max(0.0, q_bits - capacity) + arrivals_bits, served};
}

double update_comp_queue(double q_bits, double cpu_hz, double bits_per_cycle, double served_uplink_bits,
                         double slot_s)
{
  return std::max(0.0, q_bits - slot_s * cpu_hz * bits_per_cycle) + served_uplink_bits;
}

double computed_bits(double q_bits, double cpu_hz, double bits_per_cycle, double slot_s)
{
  return std::min(q_bits, slot_s * cpu_hz * bits_per_cycle);
}

double update_virtual_queue(double g, double step, double actual, double threshold)
{
  return std::max(0.0, g + step * (actual - threshold));
}

double lyapunov_value(const QueueState& state)
{
  double sum = 0.0;
  for (std::size_t k = 0; k < state.num_devices(); ++k) {
    sum += state.uplink_bits[k] * state.uplink_bits[k];
    sum += state.comp_bits[k] * state.comp_bits[k];
    sum += state.vq_device_power[k] * state.vq_device_power[k];
  }
  sum += state.vq_meh_power * state.vq_meh_power;
  for (double z : state.vq_pixel_emf)
    sum += z * z;
  return 0.5 * sum;
}

std::optional<double> avg_e2e_delay(double mean_uplink_bits, double mean_comp_bits, double mean_arrival_bits,
                                    double slot_s)
{
  if (!(mean_arrival_bits > 0.0)) return std::nullopt;
  return slot_s * (mean_uplink_bits + mean_comp_bits) / mean_arrival_bits;
}

} // namespace edgeemf
