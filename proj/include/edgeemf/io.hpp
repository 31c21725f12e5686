#pragma once

#include "edgeemf/config.hpp"
#include "edgeemf/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace edgeemf {

inline constexpr std::string_view kVersion = "0.1.0";
/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "EDGEEMF_OUT_DIR";

/// Column order of tradeoff.csv. SI units throughout.
inline constexpr std::string_view kTradeoffCsvHeader =
  "v,realizations,sum_rate_bps,sum_rate_bps_std,max_pixel_emf_w_per_m2,max_pixel_emf_w_per_m2_std,"
  "mean_device_power_w,mean_device_power_w_std,max_device_power_w,max_device_power_w_std,meh_power_w,"
  "meh_power_w_std,mean_delay_s,mean_delay_s_std";

inline constexpr std::string_view kTimeseriesCsvHeader =
  "slot,admitted_bits,uplink_rate_bps,mean_tx_power_w,meh_freq_hz,meh_power_w,max_density_w_per_m2,"
  "mean_uplink_bits,mean_comp_bits,max_vq_device_power,vq_meh_power,max_vq_pixel_emf,lyapunov";

/// Parses a nested config document on top of baseline_config().
/// Power and noise fields accept either a `_w`/`_w_per_hz` or a
/// `_dbm`/`_dbm_per_hz` key. Unknown keys are rejected. Throws ConfigError.
SimConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const SimConfig& cfg);
SimConfig load_config(const std::filesystem::path& path);

/// Shortest decimal form that reads back to the same double; locale-free.
std::string format_double(double value);

struct TimeseriesFile {
  std::size_t v_index = 0;
  std::size_t realization = 0;
  std::uint64_t seed = 0;
  std::vector<SlotRecord> records;
};

struct Manifest {
  std::string command;
  SimConfig config;
  std::vector<double> v_values;
  std::vector<std::uint64_t> seeds;
  double wall_time_s = 0.0;
};

struct OutputBundle {
  std::vector<TradeoffPoint> tradeoff;
  std::vector<TimeseriesFile> timeseries;
  Manifest manifest;
};

/// Writes tradeoff.csv, one timeseries CSV per entry and manifest.json into
/// `dir` (created if missing). On failure every file written so far is
/// removed and the error is rethrown with the offending path.
std::vector<std::filesystem::path> write_results(const OutputBundle& bundle, const std::filesystem::path& dir);

std::string tradeoff_csv(const std::vector<TradeoffPoint>& points);
std::vector<TradeoffPoint> parse_tradeoff_csv(std::string_view text);
std::vector<TradeoffPoint> read_tradeoff_csv(const std::filesystem::path& path);

std::string timeseries_csv(const std::vector<SlotRecord>& records);
std::string timeseries_file_name(const TimeseriesFile& file);

} // namespace edgeemf
