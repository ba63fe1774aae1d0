#ifndef MEC4C_METRICS_HPP_
#define MEC4C_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mec4c/costmodel.hpp"
#include "mec4c/decision.hpp"
#include "mec4c/errors.hpp"

namespace mec4c
{

// Bits carried per second over the radio, X2 and backhaul links.
inline double network_throughput(const Scenario & sc, const DecisionVector & dv, double window_s)
{
  if (!(window_s > 0.0)) {throw ParameterError("throughput window must be > 0");}
  check_shape(sc, dv);
  double bits = 0.0;
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
    const auto & td = dv.tasks[k];
    double hops = 1.0;
    for (std::size_t r = 1; r < td.y.size(); ++r) {hops += td.y[r];}
    bits += td.x * sc.tasks[k].data_bits * hops;
  }
  return bits / window_s;
}

struct MipsConversion
{
  double cpu_width_bits = 64.0;
  double word_bits = 8.0;

  double per_cycle() const {return cpu_width_bits / word_bits;}
};

// Executed cycles/s per station converted to MIPS.
inline std::vector<double> computation_throughput(
  const Scenario & sc, const DecisionVector & dv, const AllocationView & av, const MipsConversion & conv = {})
{
  if (!(conv.cpu_width_bits > 0.0 && conv.word_bits > 0.0)) {throw ParameterError("MIPS conversion widths must be > 0");}
  check_shape(sc, dv);
  std::vector<double> hz(sc.stations.size(), 0.0);
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
    const auto & td = dv.tasks[k];
    for (std::size_t r = 0; r + 1 < td.y.size(); ++r) {
      hz[route_station(sc, k, r)] += td.x * td.y[r] * av.p[k][r];
    }
  }
  for (std::size_t m = 0; m < hz.size(); ++m) {
    hz[m] = std::min(hz[m], sc.stations[m].compute_hz) * conv.per_cycle() / 1e6;
  }
  return hz;
}

inline double mips(double cycles_per_s, const MipsConversion & conv = {})
{
  return cycles_per_s * conv.per_cycle() / 1e6;
}

struct DelayStats
{
  double mean = 0.0;
  double median = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
  std::vector<std::pair<double, double>> cdf;  // (delay, fraction <= delay)
};

// Linear interpolation between closest ranks on sorted data.
inline double percentile(const std::vector<double> & sorted, double q)
{
  if (sorted.empty()) {throw ParameterError("percentile of empty data");}
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline DelayStats delay_distribution(std::vector<double> delays)
{
  if (delays.empty()) {throw ParameterError("delay distribution needs at least one sample");}
  std::sort(delays.begin(), delays.end());
  DelayStats s;
  double sum = 0.0;
  for (double d : delays) {sum += d;}
  const double n = static_cast<double>(delays.size());
  s.mean = sum / n;
  s.median = percentile(delays, 0.5);
  s.p5 = percentile(delays, 0.05);
  s.p95 = percentile(delays, 0.95);
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (i + 1 < delays.size() && delays[i + 1] == delays[i]) {continue;}
    s.cdf.emplace_back(delays[i], static_cast<double>(i + 1) / n);
  }
  return s;
}

// Model completion time of each task under a decision.
inline std::vector<double> realized_delays(const Scenario & sc, const DecisionVector & dv, const AllocationView & av)
{
  check_shape(sc, dv);
  std::vector<double> out(sc.tasks.size());
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {out[k] = task_delay(sc, dv, av, k);}
  return out;
}

struct RunMetrics
{
  double network_throughput_bps = 0.0;
  std::vector<double> network_throughput_per_epoch;
  std::vector<double> computation_throughput_mips;   // per station
  DelayStats delay;                  // every task
  DelayStats offload_delay;          // tasks that left the device
  std::size_t offloaded = 0;
  double hit_ratio = 0.0;
  double bandwidth_saving_bits = 0.0;
};

}  // namespace mec4c

#endif  // MEC4C_METRICS_HPP_
