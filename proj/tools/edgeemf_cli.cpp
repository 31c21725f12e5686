// edgeemf: command-line front end for the EMF-aware offloading simulator.
//
//   edgeemf validate --config configs/baseline.json
//   edgeemf run      --config configs/baseline.json --seed 7 --out results/
//   edgeemf sweep    --config configs/baseline.json --mode constrained --v-list 1e4,1e5
//   edgeemf oracle

#include "edgeemf/config.hpp"
#include "edgeemf/engine.hpp"
#include "edgeemf/io.hpp"
#include "edgeemf/oracle_battery.hpp"

#include <chrono>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

namespace {

using namespace edgeemf;

struct Options {
  std::string config_path;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string v_list;
  std::optional<int> realizations;
  std::optional<int> slots;
  bool timeseries = false;
  unsigned threads = 0;
};

std::vector<double> parse_v_list(const std::string& text)
{
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw std::invalid_argument("--v-list: not a number: '" + item + "'");
    out.push_back(value);
    start = end + 1;
  }
  return out;
}

SimConfig resolve_config(const Options& opt)
{
  SimConfig cfg = opt.config_path.empty() ? baseline_config() : load_config(opt.config_path);
  if (!opt.mode.empty()) {
    auto mode = parse_constraint_mode(opt.mode);
    if (!mode) throw std::invalid_argument("--mode: expected unconstrained, constrained or constrained-no-meh");
    cfg.constraint_mode = *mode;
  }
  if (opt.seed) cfg.rng_seed = *opt.seed;
  if (opt.realizations) cfg.num_realizations = *opt.realizations;
  if (opt.slots) cfg.num_slots = *opt.slots;
  if (!opt.v_list.empty()) cfg.v_values = parse_v_list(opt.v_list);
  return require_valid(std::move(cfg));
}

std::string output_dir(const Options& opt)
{
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv(kOutDirEnv)) return env;
  return "edgeemf-out";
}

void print_points(const std::vector<TradeoffPoint>& points)
{
  for (const auto& p : points) {
    std::cout << "V=" << p.v << "  sum-rate=" << p.sum_rate_bps.mean / 1e6 << " Mb/s"
              << "  max-pixel EMF=" << p.max_pixel_emf_w_per_m2.mean * 1e3 << " mW/m^2"
              << "  device power=" << p.mean_device_power_w.mean * 1e3 << " mW"
              << "  MEH power=" << p.meh_power_w.mean << " W";
    if (p.delay_samples) std::cout << "  delay=" << p.mean_delay_s.mean * 1e3 << " ms";
    std::cout << "\n";
  }
}

int simulate(const Options& opt, bool sweep)
{
  const SimConfig cfg = resolve_config(opt);
  std::vector<double> v_values;
  std::size_t realizations = 1;
  if (sweep) {
    v_values = cfg.v_values.empty() ? default_v_values() : cfg.v_values;
    realizations = static_cast<std::size_t>(cfg.num_realizations);
  } else {
    if (cfg.v_values.size() > 1) throw std::invalid_argument("run takes a single V; use sweep for a list");
    v_values = {cfg.v_values.empty() ? cfg.lyapunov_v : cfg.v_values.front()};
  }

  const auto start = std::chrono::steady_clock::now();
  SweepOptions sweep_opt;
  sweep_opt.threads = opt.threads;
  sweep_opt.keep_runs = opt.timeseries;
  sweep_opt.record_timeseries = opt.timeseries;
  SweepResult result = run_sweep(cfg, v_values, realizations, sweep_opt);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  OutputBundle bundle;
  bundle.tradeoff = result.points;
  bundle.manifest = {sweep ? "sweep" : "run", cfg, v_values, result.seeds, wall};
  for (std::size_t vi = 0; vi < result.runs.size(); ++vi)
    for (std::size_t r = 0; r < result.runs[vi].size(); ++r)
      bundle.timeseries.push_back({vi, r, result.seeds[r], std::move(result.runs[vi][r].timeseries)});

  const auto files = write_results(bundle, output_dir(opt));
  print_points(result.points);
  for (const auto& f : files)
    std::cout << "wrote " << f.string() << "\n";
  return 0;
}

int validate(const Options& opt)
{
  SimConfig cfg = opt.config_path.empty() ? baseline_config() : load_config(opt.config_path);
  if (!opt.mode.empty()) {
    auto mode = parse_constraint_mode(opt.mode);
    if (!mode) throw std::invalid_argument("--mode: expected unconstrained, constrained or constrained-no-meh");
    cfg.constraint_mode = *mode;
  }
  const auto issues = validate_config(cfg);
  if (issues.empty()) {
    std::cout << "config OK (" << cfg.num_devices << " devices, " << cfg.num_pixels() << " pixels, mode "
              << to_string(cfg.constraint_mode) << ")\n";
    return 0;
  }
  for (const auto& issue : issues)
    std::cerr << issue.field << ": " << issue.message << "\n";
  return 1;
}

int oracle(const Options& opt)
{
  const auto checks = run_oracle_battery(opt.seed.value_or(20240601));
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    all = all && c.passed;
  }
  return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"EMF-exposure-aware computation offloading simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "JSON config file (defaults to the baseline scenario)");
    cmd->add_option("--mode", opt.mode, "unconstrained | constrained | constrained-no-meh");
  };
  auto add_sim = [&](CLI::App* cmd) {
    add_common(cmd);
    cmd->add_option("--seed", opt.seed, "base RNG seed");
    cmd->add_option("--out", opt.out_dir, std::string("output directory (default $") + kOutDirEnv + " or ./edgeemf-out)");
    cmd->add_option("--v-list", opt.v_list, "comma-separated Lyapunov V values");
    cmd->add_option("--realizations", opt.realizations, "device placements per V")->check(CLI::PositiveNumber);
    cmd->add_option("--slots", opt.slots, "slots per run")->check(CLI::NonNegativeNumber);
    cmd->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--timeseries", opt.timeseries, "write per-slot CSV for every run");
  };

  auto* run_cmd = app.add_subcommand("run", "single simulation at one V");
  add_sim(run_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "V sweep averaged over device placements");
  add_sim(sweep_cmd);
  auto* validate_cmd = app.add_subcommand("validate", "check a config file");
  add_common(validate_cmd);
  auto* oracle_cmd = app.add_subcommand("oracle", "compare every solver with its brute-force oracle");
  oracle_cmd->add_option("--seed", opt.seed, "instance generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run_cmd) return simulate(opt, false);
    if (*sweep_cmd) return simulate(opt, true);
    if (*validate_cmd) return validate(opt);
    if (*oracle_cmd) return oracle(opt);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
