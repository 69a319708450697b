#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "bdisim/live.hpp"
#include "bdisim/uav.hpp"
#include "config.hpp"
#include "csv.hpp"

namespace bdisim::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_interrupted{false};

void on_sigint(int) { g_interrupted.store(true); }

/// Applies command-line overrides on top of the config file.
int load_with_overrides(const std::string& config_path,
                        const std::optional<std::string>& granularity,
                        const std::optional<double>& frequency,
                        const std::optional<double>& drift, ToolConfig& out) {
  try {
    out = load_config(config_path);
    if (granularity) {
      auto g = sim::granularity_from_name(*granularity);
      if (!g) {
        throw ConfigError("unknown granularity '" + *granularity +
                          "' (expected ama, acli, or aclp)");
      }
      out.scenario.granularity = *g;
    }
    if (frequency) out.scenario.frequency = *frequency;
    if (drift) out.scenario.drift = *drift;
    out.scenario.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitBadConfig;
  }
  return kExitOk;
}

std::string resolve_output(const std::string& flag, const ToolConfig& cfg,
                           const char* what) {
  if (!flag.empty()) return flag;
  if (!cfg.output_path.empty()) return cfg.output_path;
  std::fprintf(stderr, "config error: no %s given (--out or output.path)\n", what);
  return {};
}

int worker_count() {
  if (const char* env = std::getenv("BDISIM_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 2;
}

std::string run_file_name(const Cell& cell, std::uint64_t seed) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "raw_%s_f%g_tau%g_seed%llu.csv",
                sim::granularity_name(cell.granularity), cell.f_hz, cell.tau,
                static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace

int cmd_run(const RunOptions& opt) {
  ToolConfig cfg;
  int rc = load_with_overrides(opt.config_path, opt.granularity, opt.frequency,
                               opt.drift, cfg);
  if (rc != kExitOk) return rc;
  std::uint64_t seed = opt.seed.value_or(cfg.seed);
  std::string out_path = resolve_output(opt.out_path, cfg, "output file");
  if (out_path.empty()) return kExitBadConfig;

  try {
    auto t0 = std::chrono::steady_clock::now();
    uav::RunResult result = uav::run_simulation(cfg.scenario, seed);
    double wall = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();

    std::ofstream os(out_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    Cell cell{cfg.scenario.granularity, cfg.scenario.frequency,
              cfg.scenario.drift};
    write_run_csv(os, cell, seed, result.samples);

    double steady = uav::mean_error(result.samples,
                                    cfg.scenario.duration * 2.0 / 3.0,
                                    cfg.scenario.duration);
    std::printf(
        "granularity=%s f=%g Hz tau=%g seed=%llu\n"
        "samples=%zu events=%llu wall=%.2f s\n"
        "steady-state mean squared error (last third): %.4f m^2\n",
        sim::granularity_name(cell.granularity), cell.f_hz, cell.tau,
        static_cast<unsigned long long>(seed), result.samples.size(),
        static_cast<unsigned long long>(result.events), wall, steady);
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return kExitRunFailure;
  }
}

int cmd_sweep(const SweepOptions& opt) {
  ToolConfig cfg;
  int rc = load_with_overrides(opt.config_path, std::nullopt, std::nullopt,
                               std::nullopt, cfg);
  if (rc != kExitOk) return rc;
  std::string out_dir = resolve_output(opt.out_dir, cfg, "output directory");
  if (out_dir.empty()) return kExitBadConfig;
  if (cfg.sweep.granularities.empty() || cfg.sweep.frequencies.empty() ||
      cfg.sweep.drifts.empty()) {
    std::fprintf(stderr,
                 "config error: sweep requires granularities, frequencies_hz, "
                 "and drifts lists\n");
    return kExitBadConfig;
  }

  struct Job {
    Cell cell;
    std::uint64_t seed;
    fs::path path;
  };
  std::vector<Job> jobs;
  std::uint64_t seq = 0;
  for (sim::Granularity g : cfg.sweep.granularities) {
    for (double f : cfg.sweep.frequencies) {
      for (double tau : cfg.sweep.drifts) {
        for (int rep = 0; rep < cfg.sweep.repetitions; ++rep) {
          Cell cell{g, f, tau};
          std::uint64_t seed = cfg.sweep.base_seed + seq++;
          jobs.push_back({cell, seed, fs::path(out_dir) / run_file_name(cell, seed)});
        }
      }
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "cannot create %s: %s\n", out_dir.c_str(),
                 ec.message().c_str());
    return kExitRunFailure;
  }

  // Checkpointed execution: completed runs are skipped, so an interrupted
  // sweep resumes where it left off.
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!fs::exists(jobs[i].path)) pending.push_back(i);
  }
  std::size_t budget = pending.size();
  if (opt.max_runs) {
    budget = std::min<std::size_t>(budget, std::max(0, *opt.max_runs));
  }
  std::printf("sweep: %zu runs total, %zu already done, executing %zu\n",
              jobs.size(), jobs.size() - pending.size(), budget);

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex io_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t slot = next.fetch_add(1);
      if (slot >= budget) return;
      const Job& job = jobs[pending[slot]];
      try {
        uav::ScenarioConfig sc = cfg.scenario;
        sc.granularity = job.cell.granularity;
        sc.frequency = job.cell.f_hz;
        sc.drift = job.cell.tau;
        uav::RunResult result = uav::run_simulation(sc, job.seed);
        fs::path tmp = job.path;
        tmp += ".tmp";
        {
          std::ofstream os(tmp, std::ios::trunc);
          if (!os) throw std::runtime_error("cannot write " + tmp.string());
          write_run_csv(os, job.cell, job.seed, result.samples);
        }
        fs::rename(tmp, job.path);
      } catch (const std::exception& e) {
        failures.fetch_add(1);
        std::lock_guard<std::mutex> lock(io_mu);
        std::fprintf(stderr, "run %s/f=%g/tau=%g/seed=%llu failed: %s\n",
                     sim::granularity_name(job.cell.granularity), job.cell.f_hz,
                     job.cell.tau, static_cast<unsigned long long>(job.seed),
                     e.what());
      }
    }
  };
  int workers = std::max(1, std::min<int>(worker_count(),
                                          static_cast<int>(budget)));
  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  if (failures.load() > 0) {
    std::fprintf(stderr, "sweep: %d run(s) failed\n", failures.load());
    return kExitRunFailure;
  }
  if (budget < pending.size()) {
    std::printf("sweep: stopped after %zu run(s) (--max-runs); %zu remain, "
                "aggregate not written\n",
                budget, pending.size() - budget);
    return kExitOk;
  }

  // All runs present: aggregate per (cell, time bucket) across seeds.
  try {
    std::vector<AggregateRow> rows;
    for (sim::Granularity g : cfg.sweep.granularities) {
      for (double f : cfg.sweep.frequencies) {
        for (double tau : cfg.sweep.drifts) {
          Cell cell{g, f, tau};
          std::vector<std::vector<uav::ErrorSample>> runs;
          for (const Job& job : jobs) {
            if (job.cell.granularity == g && job.cell.f_hz == f &&
                job.cell.tau == tau) {
              runs.push_back(read_run_csv(job.path.string()));
            }
          }
          std::size_t buckets = runs.empty() ? 0 : runs.front().size();
          for (std::size_t b = 0; b < buckets; ++b) {
            double sum = 0, sum_sq = 0;
            std::size_t n = 0;
            for (const auto& run : runs) {
              if (b >= run.size()) continue;
              sum += run[b].value;
              sum_sq += run[b].value * run[b].value;
              ++n;
            }
            uav::Aggregate agg;
            agg.t = runs.front()[b].t;
            agg.mean = sum / static_cast<double>(n);
            agg.stddev =
                n > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) /
                                                    static_cast<double>(n - 1)))
                      : 0.0;
            rows.push_back({cell, agg});
          }
        }
      }
    }
    fs::path agg_path = fs::path(out_dir) / "aggregate.csv";
    std::ofstream os(agg_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + agg_path.string());
    write_aggregate_csv(os, rows);
    std::printf("sweep complete: %zu runs, aggregate at %s\n", jobs.size(),
                agg_path.string().c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "aggregation failed: %s\n", e.what());
    return kExitRunFailure;
  }
}

int cmd_live(const LiveOptions& opt) {
  ToolConfig cfg;
  int rc = load_with_overrides(opt.config_path, std::nullopt, opt.frequency,
                               std::nullopt, cfg);
  if (rc != kExitOk) return rc;
  std::string out_path = resolve_output(opt.out_path, cfg, "output file");
  if (out_path.empty()) return kExitBadConfig;

  live::LiveConfig lc;
  lc.duration = opt.duration.value_or(60.0);
  if (opt.frequency) lc.cycle_frequency = *opt.frequency;
  lc.abort = &g_interrupted;
  if (!(lc.duration > 0)) {
    std::fprintf(stderr, "config error: duration must be positive\n");
    return kExitBadConfig;
  }

  g_interrupted.store(false);
  auto prev = std::signal(SIGINT, on_sigint);
  int code = kExitOk;
  try {
    uav::UavSpecs specs = uav::build_specs(cfg.scenario);
    live::LiveResult result =
        live::run_live(specs, cfg.scenario, lc, cfg.seed);
    std::ofstream os(out_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    write_live_csv(os, result.samples);
    std::uint64_t total_cycles = 0;
    for (const auto& [name, c] : result.cycles) total_cycles += c;
    std::printf("live run: %.1f s elapsed, %zu samples, %llu cycles total\n",
                result.elapsed, result.samples.size(),
                static_cast<unsigned long long>(total_cycles));
    if (g_interrupted.load()) {
      std::printf("interrupted; partial results written to %s\n",
                  out_path.c_str());
      code = kExitInterrupted;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "live run failed: %s\n", e.what());
    code = kExitRunFailure;
  }
  std::signal(SIGINT, prev);
  return code;
}

}  // namespace bdisim::cli
