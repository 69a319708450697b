#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"

using namespace bdisim;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream os(p, std::ios::trunc);
  os << content;
  return p;
}

const char* kGoodYaml = R"(
scenario:
  followers: 4
  comm_range_m: 5.0
execution:
  granularity: acli
  frequency_hz: 2.0
  drift: 0.5
  duration_s: 120
  seed: 7
sweep:
  granularities: [ama, aclp]
  frequencies_hz: [1.0]
  drifts: [0.0, 0.7]
  repetitions: 3
  base_seed: 100
output:
  path: out.csv
)";

}  // namespace

TEST_CASE("yaml config round-trips every section") {
  fs::path p = write_temp("cli_good.yaml", kGoodYaml);
  cli::ToolConfig cfg = cli::load_config(p.string());
  CHECK(cfg.scenario.n_followers == 4);
  CHECK(cfg.scenario.granularity == sim::Granularity::ACLI);
  CHECK(cfg.scenario.frequency == doctest::Approx(2.0));
  CHECK(cfg.scenario.drift == doctest::Approx(0.5));
  CHECK(cfg.scenario.duration == doctest::Approx(120));
  CHECK(cfg.seed == 7);
  REQUIRE(cfg.sweep.granularities.size() == 2);
  CHECK(cfg.sweep.granularities[1] == sim::Granularity::ACLP);
  CHECK(cfg.sweep.drifts == std::vector<double>{0.0, 0.7});
  CHECK(cfg.sweep.repetitions == 3);
  CHECK(cfg.sweep.base_seed == 100);
  CHECK(cfg.output_path == "out.csv");
}

TEST_CASE("unknown keys are rejected with the key name") {
  fs::path p = write_temp("cli_unknown.yaml",
                          "scenario:\n  followes: 4\n");
  try {
    cli::load_config(p.string());
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(std::string(e.what()).find("followes") != std::string::npos);
  }
}

TEST_CASE("bad granularity tokens are rejected") {
  fs::path p = write_temp("cli_badgran.yaml",
                          "execution:\n  granularity: turbo\n");
  CHECK_THROWS_AS(cli::load_config(p.string()), cli::ConfigError);
}

TEST_CASE("invalid scenario values are rejected at load time") {
  fs::path p = write_temp("cli_badval.yaml",
                          "execution:\n  frequency_hz: -2\n");
  CHECK_THROWS_AS(cli::load_config(p.string()), cli::ConfigError);
}

TEST_CASE("run csv has the stable schema and round-trips") {
  cli::Cell cell{sim::Granularity::ACLP, 2.0, 0.5};
  std::vector<uav::ErrorSample> samples{{0, 1.5}, {1, 2.25}};
  std::ostringstream os;
  cli::write_run_csv(os, cell, 42, samples);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "granularity,f_hz,tau,seed,t_s,sq_error_m2");
  std::string row;
  std::getline(is, row);
  CHECK(row == "aclp,2,0.5,42,0,1.5");

  fs::path p = write_temp("cli_roundtrip.csv", os.str());
  auto back = cli::read_run_csv(p.string());
  REQUIRE(back.size() == 2);
  CHECK(back[1].t == doctest::Approx(1.0));
  CHECK(back[1].value == doctest::Approx(2.25));
}

TEST_CASE("aggregate csv header is stable") {
  std::ostringstream os;
  cli::write_aggregate_csv(
      os, {{{sim::Granularity::AMA, 1.0, 0.0}, {3.0, 10.0, 2.0}}});
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "granularity,f_hz,tau,t_s,mean_sq_error_m2,std_sq_error_m2");
  CHECK(row == "ama,1,0,3,10,2");
}

TEST_CASE("live csv carries a trailing 10 s rolling mean") {
  std::vector<uav::ErrorSample> samples;
  for (int t = 0; t <= 20; ++t) {
    samples.push_back({static_cast<double>(t), static_cast<double>(t)});
  }
  std::ostringstream os;
  cli::write_live_csv(os, samples, 10.0);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t_s,sq_error_m2,rolling_mean_10s_m2");
  std::vector<double> rolling;
  while (std::getline(is, line)) {
    auto last = line.rfind(',');
    rolling.push_back(std::stod(line.substr(last + 1)));
  }
  REQUIRE(rolling.size() == 21);
  CHECK(rolling[0] == doctest::Approx(0.0));
  // At t=20 the window covers t in [10, 20]: mean 15.
  CHECK(rolling[20] == doctest::Approx(15.0));
}

TEST_CASE("cmd_run reports bad configs with exit code 2") {
  fs::path p = write_temp("cli_broken.yaml", "nonsense: 1\n");
  cli::RunOptions opt;
  opt.config_path = p.string();
  opt.out_path = (fs::temp_directory_path() / "never.csv").string();
  CHECK(cli::cmd_run(opt) == cli::kExitBadConfig);
  cli::RunOptions missing;
  missing.config_path = (fs::temp_directory_path() / "no_such.yaml").string();
  CHECK(cli::cmd_run(missing) == cli::kExitBadConfig);
}

TEST_CASE("cmd_run writes deterministic csv output") {
  fs::path cfg = write_temp("cli_run.yaml", R"(
scenario:
  followers: 3
execution:
  granularity: ama
  duration_s: 30
  seed: 5
)");
  fs::path out1 = fs::temp_directory_path() / "run1.csv";
  fs::path out2 = fs::temp_directory_path() / "run2.csv";
  cli::RunOptions opt;
  opt.config_path = cfg.string();
  opt.out_path = out1.string();
  REQUIRE(cli::cmd_run(opt) == cli::kExitOk);
  opt.out_path = out2.string();
  REQUIRE(cli::cmd_run(opt) == cli::kExitOk);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("granularity,f_hz,tau,seed,t_s,sq_error_m2\n", 0) == 0);
}

TEST_CASE("cmd_sweep executes the grid with checkpointing") {
  fs::path cfg = write_temp("cli_sweep.yaml", R"(
scenario:
  followers: 2
execution:
  duration_s: 20
sweep:
  granularities: [ama, aclp]
  frequencies_hz: [1.0]
  drifts: [0.0]
  repetitions: 2
  base_seed: 1
)");
  fs::path dir = fs::temp_directory_path() / "sweep_out";
  fs::remove_all(dir);
  cli::SweepOptions opt;
  opt.config_path = cfg.string();
  opt.out_dir = dir.string();
  opt.max_runs = 3;
  REQUIRE(cli::cmd_sweep(opt) == cli::kExitOk);
  std::size_t raw = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename().string().rfind("raw_", 0) == 0) ++raw;
  }
  CHECK(raw == 3);
  CHECK_FALSE(fs::exists(dir / "aggregate.csv"));  // incomplete: no aggregate

  // Second invocation: skips the finished three, runs the last, aggregates.
  opt.max_runs.reset();
  REQUIRE(cli::cmd_sweep(opt) == cli::kExitOk);
  raw = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename().string().rfind("raw_", 0) == 0) ++raw;
  }
  CHECK(raw == 4);
  REQUIRE(fs::exists(dir / "aggregate.csv"));
  std::ifstream agg(dir / "aggregate.csv");
  std::string header;
  std::getline(agg, header);
  CHECK(header == "granularity,f_hz,tau,t_s,mean_sq_error_m2,std_sq_error_m2");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(agg, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 2 * 21);  // 2 cells x 21 one-second buckets
}
