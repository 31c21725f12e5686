#include "edgeemf/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace edgeemf {

double distance(Point a, Point b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

PixelGrid make_pixel_grid(const SimConfig& cfg)
{
  PixelGrid grid;
  const int side = cfg.pixels_per_side();
  grid.centers.reserve(cfg.num_pixels());
  grid.threshold_w_per_m2.reserve(cfg.num_pixels());
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      grid.centers.push_back({(col + 0.5) * cfg.pixel_side_m, (row + 0.5) * cfg.pixel_side_m});
      grid.threshold_w_per_m2.push_back(cfg.emf_threshold_at(grid.centers.size() - 1));
    }
  }
  return grid;
}

double path_loss_db(const PathLossModel& model, double distance_m, double carrier_freq_hz)
{
  if (distance_m < 0.0 || std::isnan(distance_m)) throw std::invalid_argument("path_loss_db: negative distance");
  const double d = std::max(distance_m, model.min_distance_m);
  switch (model.variant) {
  case PathLossVariant::factory_3gpp:
    return 31.84 + 21.5 * std::log10(d) + 19.0 * std::log10(carrier_freq_hz / 1e9);
  case PathLossVariant::free_space:
    return 20.0 * std::log10(4.0 * std::numbers::pi * d / wavelength(carrier_freq_hz));
  case PathLossVariant::log_distance:
    return model.ref_loss_db + 10.0 * model.exponent * std::log10(d);
  }
  throw std::invalid_argument("path_loss_db: unknown variant");
}

double path_loss_gain(const PathLossModel& model, double distance_m, double carrier_freq_hz)
{
  return std::pow(10.0, -path_loss_db(model, distance_m, carrier_freq_hz) / 10.0);
}

LinkGains compute_link_gains(std::span<const Point> devices, Point access_point, const PixelGrid& pixels,
                             const PathLossModel& model, double carrier_freq_hz)
{
  LinkGains gains;
  gains.uplink.reserve(devices.size());
  auto pixel = std::make_shared<GainMatrix>(devices.size(), pixels.size());
  for (std::size_t k = 0; k < devices.size(); ++k) {
    gains.uplink.push_back(path_loss_gain(model, distance(devices[k], access_point), carrier_freq_hz));
    auto row = pixel->row(k);
    for (std::size_t i = 0; i < pixels.size(); ++i)
      row[i] = path_loss_gain(model, distance(devices[k], pixels.centers[i]), carrier_freq_hz);
  }
  gains.pixel = std::move(pixel);
  return gains;
}

ChannelState sample_channel_state(Rng& rng, const LinkGains& mean, const FadingConfig& fading, int slot_index)
{
  std::exponential_distribution<double> rayleigh_power(1.0);
  ChannelState state;
  state.slot_index = slot_index;
  state.uplink_gain = mean.uplink;
  if (fading.uplink) {
    for (double& h : state.uplink_gain)
      h *= rayleigh_power(rng);
  }
  if (fading.pixel && mean.pixel) {
    auto faded = std::make_shared<GainMatrix>(*mean.pixel);
    for (std::size_t k = 0; k < faded->rows(); ++k)
      for (double& h : faded->row(k))
        h *= rayleigh_power(rng);
    state.pixel_gain = std::move(faded);
  } else {
    state.pixel_gain = mean.pixel;
  }
  return state;
}

double rate_from_power(double power_w, double gain, double bandwidth_hz, double noise_psd_w_per_hz)
{
  return bandwidth_hz * std::log2(1.0 + gain * power_w / (noise_psd_w_per_hz * bandwidth_hz));
}

double power_from_rate(double rate_bps, double gain, double bandwidth_hz, double noise_psd_w_per_hz)
{
  return noise_psd_w_per_hz * bandwidth_hz / gain * std::expm1(rate_bps * std::numbers::ln2 / bandwidth_hz);
}

void power_density_into(const GainMatrix& pixel_gain, std::span<const double> tx_power_w, double wavelength_m,
                        std::vector<double>& out)
{
  if (tx_power_w.size() != pixel_gain.rows())
    throw std::invalid_argument("power_density: expected " + std::to_string(pixel_gain.rows()) +
                                " transmit powers, got " + std::to_string(tx_power_w.size()));
  const double aperture = 4.0 * std::numbers::pi / (wavelength_m * wavelength_m);
  out.assign(pixel_gain.cols(), 0.0);
  for (std::size_t k = 0; k < pixel_gain.rows(); ++k) {
    const double p = tx_power_w[k];
    if (p == 0.0) continue;
    auto row = pixel_gain.row(k);
    for (std::size_t i = 0; i < row.size(); ++i)
      out[i] += p * row[i];
  }
  for (double& v : out)
    v *= aperture;
}

std::vector<double> power_density(const ChannelState& channel, std::span<const double> tx_power_w,
                                  double wavelength_m)
{
  if (!channel.pixel_gain) throw std::invalid_argument("power_density: channel has no pixel gains");
  std::vector<double> out;
  power_density_into(*channel.pixel_gain, tx_power_w, wavelength_m, out);
  return out;
}

} // namespace edgeemf
