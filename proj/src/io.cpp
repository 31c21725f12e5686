#include "edgeemf/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace edgeemf {

using nlohmann::json;

namespace {

class SectionReader {
public:
  SectionReader(const json& doc, std::string name, std::vector<ConfigIssue>& issues)
    : name_(std::move(name)), issues_(issues)
  {
    if (!doc.contains(name_)) return;
    const json& sec = doc.at(name_);
    if (!sec.is_object()) {
      issues_.push_back({name_, "must be an object"});
      return;
    }
    section_ = &sec;
  }

  ~SectionReader()
  {
    if (!section_) return;
    for (const auto& item : section_->items())
      if (!seen_.count(item.key())) issues_.push_back({name_ + "." + item.key(), "unknown key"});
  }

  SectionReader(const SectionReader&) = delete;
  SectionReader& operator=(const SectionReader&) = delete;

  const json* find(const std::string& key)
  {
    seen_.insert(key);
    if (!section_ || !section_->contains(key)) return nullptr;
    return &section_->at(key);
  }

  template <typename T>
  void read(const std::string& key, T& out)
  {
    const json* v = find(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception& e) {
      issues_.push_back({name_ + "." + key, std::string("wrong type: ") + e.what()});
    }
  }

  /// Reads `<stem>_w` (or `<stem>_w_per_hz`) or its dBm twin; both is an error.
  void read_power(const std::string& linear_key, const std::string& dbm_key, double& out)
  {
    const json* lin = find(linear_key);
    const json* dbm = find(dbm_key);
    if (lin && dbm) {
      issues_.push_back({name_ + "." + linear_key, "given together with " + dbm_key});
      return;
    }
    if (lin) read(linear_key, out);
    if (dbm) {
      double value = 0.0;
      read(dbm_key, value);
      out = dbm_to_w(value);
    }
  }

  void issue(const std::string& key, std::string message) { issues_.push_back({name_ + "." + key, std::move(message)}); }

private:
  std::string name_;
  std::vector<ConfigIssue>& issues_;
  const json* section_ = nullptr;
  std::set<std::string> seen_;
};

const std::set<std::string> kSections = {"scenario", "device", "meh", "channel", "constraints", "algorithm", "run"};

} // namespace

SimConfig config_from_json(const json& doc)
{
  std::vector<ConfigIssue> issues;
  if (!doc.is_object()) throw ConfigError(std::vector<ConfigIssue>{{"<root>", "config must be an object"}});
  for (const auto& item : doc.items())
    if (!kSections.count(item.key())) issues.push_back({item.key(), "unknown section"});

  SimConfig cfg = baseline_config();
  {
    SectionReader s(doc, "scenario", issues);
    s.read("slot_duration_s", cfg.slot_duration_s);
    s.read("num_devices", cfg.num_devices);
    s.read("carrier_freq_hz", cfg.carrier_freq_hz);
    s.read("total_bandwidth_hz", cfg.total_bandwidth_hz);
    s.read_power("noise_psd_w_per_hz", "noise_psd_dbm_per_hz", cfg.noise_psd_w_per_hz);
    s.read("area_side_m", cfg.area_side_m);
    s.read("pixel_side_m", cfg.pixel_side_m);
  }
  {
    SectionReader s(doc, "device", issues);
    s.read_power("max_tx_power_w", "max_tx_power_dbm", cfg.device.max_tx_power_w);
    s.read("bits_per_cycle", cfg.device.bits_per_cycle);
    if (const json* v = s.find("max_arrival_bits")) {
      if (v->is_null()) cfg.device.max_arrival_bits.reset();
      else if (v->is_number()) cfg.device.max_arrival_bits = v->get<double>();
      else s.issue("max_arrival_bits", "must be a number or null");
    }
  }
  {
    SectionReader s(doc, "meh", issues);
    const json* set = s.find("freq_set_hz");
    const json* max = s.find("max_freq_hz");
    const json* levels = s.find("freq_levels");
    if (set && (max || levels)) {
      s.issue("freq_set_hz", "give either freq_set_hz or max_freq_hz/freq_levels");
    } else if (set) {
      s.read("freq_set_hz", cfg.meh.freq_set_hz);
    } else if (max || levels) {
      double max_hz = 4.5e9;
      int n = 11;
      s.read("max_freq_hz", max_hz);
      s.read("freq_levels", n);
      if (n < 1) s.issue("freq_levels", "must be >= 1");
      else cfg.meh.freq_set_hz = uniform_freq_set(max_hz, n);
    }
    s.read("kappa", cfg.meh.kappa);
  }
  {
    SectionReader s(doc, "channel", issues);
    if (const json* v = s.find("path_loss")) {
      auto variant = v->is_string() ? parse_path_loss_variant(v->get<std::string>()) : std::nullopt;
      if (variant) cfg.path_loss.variant = *variant;
      else s.issue("path_loss", "expected factory_3gpp, free_space or log_distance");
    }
    s.read("exponent", cfg.path_loss.exponent);
    s.read("ref_loss_db", cfg.path_loss.ref_loss_db);
    s.read("min_distance_m", cfg.path_loss.min_distance_m);
    s.read("uplink_fading", cfg.fading.uplink);
    s.read("pixel_fading", cfg.fading.pixel);
  }
  {
    SectionReader s(doc, "constraints", issues);
    if (const json* v = s.find("mode")) {
      auto mode = v->is_string() ? parse_constraint_mode(v->get<std::string>()) : std::nullopt;
      if (mode) cfg.constraint_mode = *mode;
      else s.issue("mode", "expected unconstrained, constrained or constrained_no_meh");
    }
    s.read("emf_threshold_w_per_m2", cfg.emf_threshold_w_per_m2);
    s.read("emf_threshold_map_w_per_m2", cfg.emf_threshold_map_w_per_m2);
    s.read("meh_power_threshold_w", cfg.meh_power_threshold_w);
    s.read_power("device_power_threshold_w", "device_power_threshold_dbm", cfg.device_power_threshold_w);
  }
  {
    SectionReader s(doc, "algorithm", issues);
    s.read("lyapunov_v", cfg.lyapunov_v);
    s.read("step_y", cfg.step_y);
    s.read("step_h", cfg.step_h);
    s.read("step_z", cfg.step_z);
    s.read("cap_power_to_backlog", cfg.cap_power_to_backlog);
    s.read("v_values", cfg.v_values);
  }
  {
    SectionReader s(doc, "run", issues);
    s.read("num_slots", cfg.num_slots);
    s.read("num_realizations", cfg.num_realizations);
    s.read("burn_in_slots", cfg.burn_in_slots);
    s.read("rng_seed", cfg.rng_seed);
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

json config_to_json(const SimConfig& cfg)
{
  json doc;
  doc["scenario"] = {
    {"slot_duration_s", cfg.slot_duration_s},       {"num_devices", cfg.num_devices},
    {"carrier_freq_hz", cfg.carrier_freq_hz},       {"total_bandwidth_hz", cfg.total_bandwidth_hz},
    {"noise_psd_w_per_hz", cfg.noise_psd_w_per_hz}, {"area_side_m", cfg.area_side_m},
    {"pixel_side_m", cfg.pixel_side_m},
  };
  doc["device"] = {
    {"max_tx_power_w", cfg.device.max_tx_power_w},
    {"bits_per_cycle", cfg.device.bits_per_cycle},
    {"max_arrival_bits", cfg.device.max_arrival_bits ? json(*cfg.device.max_arrival_bits) : json(nullptr)},
  };
  doc["meh"] = {{"freq_set_hz", cfg.meh.freq_set_hz}, {"kappa", cfg.meh.kappa}};
  doc["channel"] = {
    {"path_loss", std::string(to_string(cfg.path_loss.variant))},
    {"exponent", cfg.path_loss.exponent},
    {"ref_loss_db", cfg.path_loss.ref_loss_db},
    {"min_distance_m", cfg.path_loss.min_distance_m},
    {"uplink_fading", cfg.fading.uplink},
    {"pixel_fading", cfg.fading.pixel},
  };
  doc["constraints"] = {
    {"mode", std::string(to_string(cfg.constraint_mode))},
    {"emf_threshold_w_per_m2", cfg.emf_threshold_w_per_m2},
    {"emf_threshold_map_w_per_m2", cfg.emf_threshold_map_w_per_m2},
    {"meh_power_threshold_w", cfg.meh_power_threshold_w},
    {"device_power_threshold_w", cfg.device_power_threshold_w},
  };
  doc["algorithm"] = {
    {"lyapunov_v", cfg.lyapunov_v}, {"step_y", cfg.step_y}, {"step_h", cfg.step_h},
    {"step_z", cfg.step_z},         {"cap_power_to_backlog", cfg.cap_power_to_backlog},
    {"v_values", cfg.v_values},
  };
  doc["run"] = {
    {"num_slots", cfg.num_slots},
    {"num_realizations", cfg.num_realizations},
    {"burn_in_slots", cfg.burn_in_slots},
    {"rng_seed", cfg.rng_seed},
  };
  return doc;
}

SimConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse config file " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

std::string format_double(double value)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

double parse_double(std::string_view text, std::string_view column)
{
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error("tradeoff csv: bad number '" + std::string(text) + "' in column " + std::string(column));
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void append_stat(std::string& row, const Stat& s)
{
  row += ',';
  row += format_double(s.mean);
  row += ',';
  row += format_double(s.std);
}

} // namespace

std::string tradeoff_csv(const std::vector<TradeoffPoint>& points)
{
  std::string out(kTradeoffCsvHeader);
  out += '\n';
  for (const auto& p : points) {
    std::string row = format_double(p.v) + ',' + std::to_string(p.realizations);
    append_stat(row, p.sum_rate_bps);
    append_stat(row, p.max_pixel_emf_w_per_m2);
    append_stat(row, p.mean_device_power_w);
    append_stat(row, p.max_device_power_w);
    append_stat(row, p.meh_power_w);
    if (p.delay_samples > 0) append_stat(row, p.mean_delay_s);
    else row += ",,"; // no device admitted traffic
    out += row;
    out += '\n';
  }
  return out;
}

std::vector<TradeoffPoint> parse_tradeoff_csv(std::string_view text)
{
  std::vector<TradeoffPoint> out;
  auto lines = split(text, '\n');
  if (lines.empty() || lines.front() != kTradeoffCsvHeader)
    throw std::runtime_error("tradeoff csv: unexpected header");
  const auto columns = split(kTradeoffCsvHeader, ',');
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    auto cells = split(lines[li], ',');
    if (cells.size() != columns.size())
      throw std::runtime_error("tradeoff csv: line " + std::to_string(li + 1) + " has " +
                               std::to_string(cells.size()) + " cells");
    auto num = [&](std::size_t i) { return parse_double(cells[i], columns[i]); };
    TradeoffPoint p;
    p.v = num(0);
    p.realizations = static_cast<std::size_t>(num(1));
    p.sum_rate_bps = {num(2), num(3)};
    p.max_pixel_emf_w_per_m2 = {num(4), num(5)};
    p.mean_device_power_w = {num(6), num(7)};
    p.max_device_power_w = {num(8), num(9)};
    p.meh_power_w = {num(10), num(11)};
    if (!cells[12].empty()) {
      p.mean_delay_s = {num(12), num(13)};
      p.delay_samples = p.realizations;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<TradeoffPoint> read_tradeoff_csv(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_tradeoff_csv(buf.str());
}

std::string timeseries_csv(const std::vector<SlotRecord>& records)
{
  std::string out(kTimeseriesCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.slot);
    for (double v : {r.admitted_bits, r.uplink_rate_bps, r.mean_tx_power_w, r.meh_freq_hz, r.meh_power_w,
                     r.max_density_w_per_m2, r.mean_uplink_bits, r.mean_comp_bits, r.max_vq_device_power,
                     r.vq_meh_power, r.max_vq_pixel_emf, r.lyapunov}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string timeseries_file_name(const TimeseriesFile& file)
{
  return "timeseries_v" + std::to_string(file.v_index) + "_r" + std::to_string(file.realization) + ".csv";
}

namespace {

void write_file(const std::filesystem::path& path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

} // namespace

std::vector<std::filesystem::path> write_results(const OutputBundle& bundle, const std::filesystem::path& dir)
{
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  bool created_dir = false;
  try {
    std::error_code ec;
    if (!fs::exists(dir)) {
      fs::create_directories(dir, ec);
      if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
      created_dir = true;
    }

    const fs::path tradeoff = dir / "tradeoff.csv";
    write_file(tradeoff, tradeoff_csv(bundle.tradeoff));
    written.push_back(tradeoff);

    json series = json::array();
    for (const auto& ts : bundle.timeseries) {
      const fs::path p = dir / timeseries_file_name(ts);
      write_file(p, timeseries_csv(ts.records));
      written.push_back(p);
      series.push_back({{"file", p.filename().string()},
                        {"v", bundle.manifest.v_values.at(ts.v_index)},
                        {"realization", ts.realization},
                        {"seed", ts.seed}});
    }

    const Manifest& m = bundle.manifest;
    json manifest;
    manifest["tool"] = "edgeemf";
    manifest["version"] = std::string(kVersion);
    manifest["command"] = m.command;
    manifest["mode"] = std::string(to_string(m.config.constraint_mode));
    manifest["v_values"] = m.v_values;
    manifest["realization_seeds"] = m.seeds;
    manifest["files"] = {{"tradeoff", tradeoff.filename().string()}, {"timeseries", series}};
    manifest["config"] = config_to_json(m.config);
    manifest["wall_time_s"] = m.wall_time_s;
    const fs::path manifest_path = dir / "manifest.json";
    write_file(manifest_path, manifest.dump(2) + "\n");
    written.push_back(manifest_path);
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written)
      fs::remove(p, ec);
    if (created_dir) fs::remove(dir, ec); // only succeeds if empty
    throw;
  }
  return written;
}

} // namespace edgeemf
