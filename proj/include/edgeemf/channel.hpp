#pragma once

#include "edgeemf/config.hpp"

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace edgeemf {

using Rng = std::mt19937_64;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

struct PixelGrid {
  std::vector<Point> centers;           // row-major
  std::vector<double> threshold_w_per_m2; // one per pixel
  std::size_t size() const { return centers.size(); }
};

PixelGrid make_pixel_grid(const SimConfig& cfg);

/// Dense device x pixel matrix, row-major.
class GainMatrix {
public:
  GainMatrix() = default;
  GainMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const GainMatrix&, const GainMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct ChannelState {
  int slot_index = 0;
  std::vector<double> uplink_gain; // h_k^u, one per device
  std::shared_ptr<const GainMatrix> pixel_gain; // h_k^i, devices x pixels

  std::size_t num_devices() const { return uplink_gain.size(); }
  std::size_t num_pixels() const { return pixel_gain ? pixel_gain->cols() : 0; }
};

/// Path loss in dB. Distances below `model.min_distance_m` are clamped;
/// negative distances throw std::invalid_argument.
///
///   factory_3gpp : 31.84 + 21.5 log10(d) + 19 log10(f_GHz)   (InF-LOS)
///   free_space   : 20 log10(4 pi d / lambda)
///   log_distance : ref_loss_db + 10 n log10(d / 1 m)
double path_loss_db(const PathLossModel& model, double distance_m, double carrier_freq_hz);

/// Linear power gain, 10^(-PL/10).
double path_loss_gain(const PathLossModel& model, double distance_m, double carrier_freq_hz);

/// Deterministic (fading-free) part of every link for one device placement.
struct LinkGains {
  std::vector<double> uplink; // device -> AP
  std::shared_ptr<const GainMatrix> pixel; // device -> pixel
};

LinkGains compute_link_gains(std::span<const Point> devices, Point access_point, const PixelGrid& pixels,
                             const PathLossModel& model, double carrier_freq_hz);

/// Draws one slot of channel gains: path loss times an independent unit-mean
/// exponential (Rayleigh power) factor on each enabled link. The pixel matrix
/// is shared with `mean` when pixel fading is off.
ChannelState sample_channel_state(Rng& rng, const LinkGains& mean, const FadingConfig& fading, int slot_index);

/// Shannon rate B log2(1 + h p / (N0 B)) in bits/s.
double rate_from_power(double power_w, double gain, double bandwidth_hz, double noise_psd_w_per_hz);

/// Inverse of rate_from_power: (N0 B / h) (exp(R ln2 / B) - 1) in W.
double power_from_rate(double rate_bps, double gain, double bandwidth_hz, double noise_psd_w_per_hz);

/// Incident power density per pixel, sum_k (4 pi / lambda^2) p_k h_k^i.
/// Throws std::invalid_argument when `tx_power_w` does not have one entry per
/// device.
std::vector<double> power_density(const ChannelState& channel, std::span<const double> tx_power_w,
                                  double wavelength_m);

/// Same as above, accumulating into `out` (resized to the pixel count).
void power_density_into(const GainMatrix& pixel_gain, std::span<const double> tx_power_w, double wavelength_m,
                        std::vector<double>& out);

} // namespace edgeemf
