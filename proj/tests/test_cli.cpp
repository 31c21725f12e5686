#include "doctest.h"

#include "edgeemf/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using namespace edgeemf;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string output;
};

Result run_cli(const std::string& args)
{
  const std::string cmd = std::string(EDGEEMF_CLI_PATH) + " " + args + " 2>&1";
  Result r{-1, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string config(const char* name)
{
  return (fs::path(EDGEEMF_CONFIG_DIR) / name).string();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("validate accepts the baseline")
{
  const auto r = run_cli("validate --config " + config("baseline.json"));
  CHECK(r.status == 0);
  CHECK(r.output.find("config OK") != std::string::npos);
}

TEST_CASE("unknown flag exits with usage")
{
  const auto r = run_cli("run --frobnicate");
  CHECK(r.status == 2);
  CHECK(r.output.find("Usage") != std::string::npos);
}

TEST_CASE("invalid config exits 1 and names the field")
{
  const fs::path dir = fs::temp_directory_path() / "edgeemf_cli_bad";
  fs::create_directories(dir);
  const fs::path bad = dir / "bad.json";
  { std::FILE* f = std::fopen(bad.c_str(), "w"); std::fputs(R"({"scenario": {"pixel_side_m": 2}})", f); std::fclose(f); }
  const auto r = run_cli("validate --config " + bad.string());
  CHECK(r.status == 1);
  CHECK(r.output.find("pixel_side_m") != std::string::npos);
  CHECK(run_cli("run --config " + bad.string() + " --out " + (dir / "o").string()).status == 1);
  CHECK(run_cli("validate --config " + (dir / "missing.json").string()).status == 1);
  fs::remove_all(dir);
}

TEST_CASE("constrained sweep respects the exposure limit")
{
  const fs::path out = fs::temp_directory_path() / "edgeemf_cli_sweep";
  fs::remove_all(out);
  const auto r = run_cli("sweep --config " + config("small.json") + " --mode constrained --out " + out.string());
  REQUIRE(r.status == 0);
  const auto rows = read_tradeoff_csv(out / "tradeoff.csv");
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) CHECK(row.max_pixel_emf_w_per_m2.mean <= 0.042);
  CHECK(fs::exists(out / "manifest.json"));
  fs::remove_all(out);
}

TEST_CASE("output directory falls back to the environment")
{
  const fs::path out = fs::temp_directory_path() / "edgeemf_cli_env";
  fs::remove_all(out);
  setenv(kOutDirEnv, out.c_str(), 1);
  const auto r2 = run_cli("run --config " + config("small.json") + " --slots 20 --v-list 1e5 --timeseries");
  unsetenv(kOutDirEnv);
  REQUIRE(r2.status == 0);
  CHECK(fs::exists(out / "tradeoff.csv"));
  CHECK(fs::exists(out / "timeseries_v0_r0.csv"));
  fs::remove_all(out);
}

}
