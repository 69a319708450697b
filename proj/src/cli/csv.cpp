#include "csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bdisim::cli {

namespace {

/// Fixed-format double: locale-independent and reproducible across runs.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void write_run_csv(std::ostream& os, const Cell& cell, std::uint64_t seed,
                   const std::vector<uav::ErrorSample>& samples) {
  os << kRunCsvHeader << '\n';
  const char* g = sim::granularity_name(cell.granularity);
  for (const uav::ErrorSample& s : samples) {
    os << g << ',' << fmt(cell.f_hz) << ',' << fmt(cell.tau) << ',' << seed
       << ',' << fmt(s.t) << ',' << fmt(s.value) << '\n';
  }
}

std::vector<uav::ErrorSample> read_run_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kRunCsvHeader) {
    throw std::runtime_error("bad header in " + path);
  }
  std::vector<uav::ErrorSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw std::runtime_error("bad row in " + path);
    out.push_back({std::stod(fields[4]), std::stod(fields[5])});
  }
  return out;
}

void write_aggregate_csv(std::ostream& os,
                         const std::vector<AggregateRow>& rows) {
  os << kAggregateCsvHeader << '\n';
  for (const AggregateRow& r : rows) {
    os << sim::granularity_name(r.cell.granularity) << ',' << fmt(r.cell.f_hz)
       << ',' << fmt(r.cell.tau) << ',' << fmt(r.agg.t) << ','
       << fmt(r.agg.mean) << ',' << fmt(r.agg.stddev) << '\n';
  }
}

void write_live_csv(std::ostream& os,
                    const std::vector<uav::ErrorSample>& samples,
                    double window) {
  os << kLiveCsvHeader << '\n';
  std::size_t tail = 0;
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sum += samples[i].value;
    ++count;
    while (samples[tail].t < samples[i].t - window) {
      sum -= samples[tail].value;
      --count;
      ++tail;
    }
    os << fmt(samples[i].t) << ',' << fmt(samples[i].value) << ','
       << fmt(sum / static_cast<double>(count)) << '\n';
  }
}

}  // namespace bdisim::cli
