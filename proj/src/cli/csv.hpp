#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bdisim/sim.hpp"
#include "bdisim/uav.hpp"

namespace bdisim::cli {

inline constexpr const char* kRunCsvHeader =
    "granularity,f_hz,tau,seed,t_s,sq_error_m2";
inline constexpr const char* kAggregateCsvHeader =
    "granularity,f_hz,tau,t_s,mean_sq_error_m2,std_sq_error_m2";
inline constexpr const char* kLiveCsvHeader =
    "t_s,sq_error_m2,rolling_mean_10s_m2";

/// One (granularity, frequency, drift) sweep cell.
struct Cell {
  sim::Granularity granularity;
  double f_hz = 0;
  double tau = 0;
};

struct AggregateRow {
  Cell cell;
  uav::Aggregate agg;
};

void write_run_csv(std::ostream& os, const Cell& cell, std::uint64_t seed,
                   const std::vector<uav::ErrorSample>& samples);

/// Parses a file produced by write_run_csv; throws std::runtime_error on a
/// malformed header or row.
std::vector<uav::ErrorSample> read_run_csv(const std::string& path);

void write_aggregate_csv(std::ostream& os,
                         const std::vector<AggregateRow>& rows);

/// Raw live samples plus a trailing rolling mean over `window` seconds.
void write_live_csv(std::ostream& os,
                    const std::vector<uav::ErrorSample>& samples,
                    double window = 10.0);

}  // namespace bdisim::cli
