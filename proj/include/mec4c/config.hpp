#ifndef MEC4C_CONFIG_HPP_
#define MEC4C_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "mec4c/errors.hpp"
#include "mec4c/metrics.hpp"
#include "mec4c/random.hpp"
#include "mec4c/rounding.hpp"
#include "mec4c/scenario.hpp"
#include "mec4c/solver.hpp"
#include "mec4c/topology.hpp"
#include "mec4c/units.hpp"

namespace mec4c
{

struct TopologyConfig
{
  std::string source = "synthetic";    // synthetic | csv
  std::string csv_path;                // resolved against the config file
  std::size_t stations = 12;
  double area_m = 2000.0;
  std::size_t r = 3;
  std::size_t okm_t_max = 50;
  double okm_epsilon = 1e-6;
  StationRanges ranges;
  StationDefaults defaults;
};

struct ScenarioConfig
{
  std::string name = "scenario";
  std::uint64_t seed = 1;
  TopologyConfig topology;
  WorkloadConfig workload;
  double zipf_a = 1.0;
  std::uint64_t total_requests = 2000;
  ModelConstants model;
  SolverParams solver;
  double theta = kDefaultTheta;
  double xi = kDefaultXi;
  std::optional<double> eta;           // empty: derived from the workload
  int epochs = 10;
  double window_s = 1.0;
  MipsConversion mips;

  void validate() const
  {
    if (topology.source != "synthetic" && topology.source != "csv") {
      throw ConfigError("topology.source must be 'synthetic' or 'csv'");
    }
    if (topology.source == "csv" && topology.csv_path.empty()) {throw ConfigError("topology.csv is required");}
    if (topology.source == "synthetic" && topology.stations == 0) {throw ConfigError("topology.stations must be >= 1");}
    if (!(topology.area_m > 0.0)) {throw ConfigError("topology.area must be > 0");}
    if (topology.r < 1) {throw ConfigError("topology.r must be >= 1");}
    if (topology.okm_t_max < 1) {throw ConfigError("topology.okm.t_max must be >= 1");}
    if (!(topology.okm_epsilon > 0.0)) {throw ConfigError("topology.okm.epsilon must be > 0");}
    if (!(zipf_a >= 0.0)) {throw ConfigError("demand.zipf_a must be >= 0");}
    if (!(theta > 0.0 && theta < 1.0)) {throw ConfigError("rounding.theta must lie in (0,1)");}
    if (!(xi >= 0.0)) {throw ConfigError("rounding.xi must be >= 0");}
    if (eta && !(*eta >= 0.0)) {throw ConfigError("eta must be >= 0");}
    if (epochs < 0) {throw ConfigError("simulation.epochs must be >= 0");}
    if (!(window_s > 0.0)) {throw ConfigError("simulation.window must be > 0");}
    try {
      topology.ranges.validate();
      workload.validate();
      model.validate();
      solver.validate();
    } catch (const ParameterError & e) {
      throw ConfigError(e.what());
    }
  }
};

namespace detail
{

inline void check_keys(const nlohmann::json & j, const std::string & where, std::initializer_list<const char *> keys)
{
  if (!j.is_object()) {throw ConfigError(where + " must be an object");}
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto & [k, v] : j.items()) {
    if (!allowed.count(k)) {throw ConfigError("unknown key '" + k + "' in " + where);}
  }
}

inline double quantity(const nlohmann::json & v, Dimension dim, const std::string & where)
{
  try {
    if (v.is_number()) {return v.get<double>();}
    if (v.is_string()) {return parse_quantity(v.get<std::string>(), dim);}
  } catch (const Error & e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": expected a number or a quantity string");
}

// A range is a single quantity or a two-element array.
inline Range range(const nlohmann::json & v, Dimension dim, const std::string & where)
{
  if (v.is_array()) {
    if (v.size() != 2) {throw ConfigError(where + ": range needs exactly two bounds");}
    Range r{quantity(v[0], dim, where), quantity(v[1], dim, where)};
    if (!(r.lo <= r.hi)) {throw ConfigError(where + ": lower bound exceeds upper bound");}
    return r;
  }
  return Range::point(quantity(v, dim, where));
}

template <class T>
T number(const nlohmann::json & v, const std::string & where)
{
  if (!v.is_number()) {throw ConfigError(where + " must be a number");}
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0)) {
      throw ConfigError(where + " must be a non-negative integer");
    }
  }
  return v.get<T>();
}

}  // namespace detail

inline ScenarioConfig parse_config(const nlohmann::json & j, const std::filesystem::path & base_dir = {})
{
  using detail::number;
  using detail::quantity;
  using detail::range;
  detail::check_keys(j, "config",
    {"name", "seed", "topology", "workload", "demand", "model", "solver", "rounding", "eta",
     "simulation", "metrics"});
  ScenarioConfig c;
  if (j.contains("name")) {c.name = j.at("name").get<std::string>();}
  if (j.contains("seed")) {c.seed = number<std::uint64_t>(j.at("seed"), "seed");}

  if (j.contains("topology")) {
    const auto & t = j.at("topology");
    detail::check_keys(t, "topology",
      {"source", "csv", "stations", "area", "r", "okm", "ranges", "defaults"});
    auto & tc = c.topology;
    if (t.contains("source")) {tc.source = t.at("source").get<std::string>();}
    if (t.contains("csv")) {
      std::filesystem::path p = t.at("csv").get<std::string>();
      tc.csv_path = (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
    }
    if (t.contains("stations")) {tc.stations = number<std::size_t>(t.at("stations"), "topology.stations");}
    if (t.contains("area")) {tc.area_m = quantity(t.at("area"), Dimension::distance, "topology.area");}
    if (t.contains("r")) {tc.r = number<std::size_t>(t.at("r"), "topology.r");}
    if (t.contains("okm")) {
      const auto & o = t.at("okm");
      detail::check_keys(o, "topology.okm", {"t_max", "epsilon"});
      if (o.contains("t_max")) {tc.okm_t_max = number<std::size_t>(o.at("t_max"), "topology.okm.t_max");}
      if (o.contains("epsilon")) {tc.okm_epsilon = number<double>(o.at("epsilon"), "topology.okm.epsilon");}
    }
    if (t.contains("ranges")) {
      const auto & r = t.at("ranges");
      detail::check_keys(r, "topology.ranges", {"bandwidth", "compute", "cache", "dc_capacity", "x2_capacity"});
      auto & rr = tc.ranges;
      if (r.contains("bandwidth")) {rr.bandwidth_hz = range(r.at("bandwidth"), Dimension::frequency, "topology.ranges.bandwidth");}
      if (r.contains("compute")) {rr.compute_hz = range(r.at("compute"), Dimension::frequency, "topology.ranges.compute");}
      if (r.contains("cache")) {rr.cache_bits = range(r.at("cache"), Dimension::data, "topology.ranges.cache");}
      if (r.contains("dc_capacity")) {rr.dc_capacity_bps = range(r.at("dc_capacity"), Dimension::rate, "topology.ranges.dc_capacity");}
      if (r.contains("x2_capacity")) {rr.x2_capacity_bps = range(r.at("x2_capacity"), Dimension::rate, "topology.ranges.x2_capacity");}
    }
    if (t.contains("defaults")) {
      const auto & d = t.at("defaults");
      detail::check_keys(d, "topology.defaults", {"bandwidth", "compute", "cache", "dc_capacity"});
      auto & dd = tc.defaults;
      if (d.contains("bandwidth")) {dd.bandwidth_hz = quantity(d.at("bandwidth"), Dimension::frequency, "topology.defaults.bandwidth");}
      if (d.contains("compute")) {dd.compute_hz = quantity(d.at("compute"), Dimension::frequency, "topology.defaults.compute");}
      if (d.contains("cache")) {dd.cache_bits = quantity(d.at("cache"), Dimension::data, "topology.defaults.cache");}
      if (d.contains("dc_capacity")) {dd.dc_capacity_bps = quantity(d.at("dc_capacity"), Dimension::rate, "topology.defaults.dc_capacity");}
    }
  }

  if (j.contains("workload")) {
    const auto & w = j.at("workload");
    detail::check_keys(w, "workload",
      {"users_per_bs", "contents", "data", "deadline", "workload_cpb", "user_compute",
       "energy_budget", "tx_power", "noise_power", "distance", "cache_only_fraction"});
    auto & wc = c.workload;
    if (w.contains("users_per_bs")) {wc.users_per_bs = number<std::size_t>(w.at("users_per_bs"), "workload.users_per_bs");}
    if (w.contains("contents")) {wc.n_contents = number<std::size_t>(w.at("contents"), "workload.contents");}
    if (w.contains("data")) {wc.data_bits = range(w.at("data"), Dimension::data, "workload.data");}
    if (w.contains("deadline")) {wc.deadline_s = range(w.at("deadline"), Dimension::time, "workload.deadline");}
    if (w.contains("workload_cpb")) {
      const auto & v = w.at("workload_cpb");
      if (v.is_array() && v.size() == 2) {
        wc.workload_cpb = Range{number<double>(v[0], "workload.workload_cpb"), number<double>(v[1], "workload.workload_cpb")};
      } else {
        wc.workload_cpb = Range::point(number<double>(v, "workload.workload_cpb"));
      }
    }
    if (w.contains("user_compute")) {wc.user_compute_hz = range(w.at("user_compute"), Dimension::frequency, "workload.user_compute");}
    if (w.contains("energy_budget")) {wc.energy_budget_j = range(w.at("energy_budget"), Dimension::energy, "workload.energy_budget");}
    if (w.contains("tx_power")) {wc.tx_power_w = range(w.at("tx_power"), Dimension::power, "workload.tx_power");}
    if (w.contains("noise_power")) {wc.noise_power_w = range(w.at("noise_power"), Dimension::power, "workload.noise_power");}
    if (w.contains("distance")) {wc.distance_m = range(w.at("distance"), Dimension::distance, "workload.distance");}
    if (w.contains("cache_only_fraction")) {
      wc.cache_only_fraction = number<double>(w.at("cache_only_fraction"), "workload.cache_only_fraction");
    }
  }

  if (j.contains("demand")) {
    const auto & d = j.at("demand");
    detail::check_keys(d, "demand", {"zipf_a", "total_requests"});
    if (d.contains("zipf_a")) {c.zipf_a = number<double>(d.at("zipf_a"), "demand.zipf_a");}
    if (d.contains("total_requests")) {c.total_requests = number<std::uint64_t>(d.at("total_requests"), "demand.total_requests");}
  }

  if (j.contains("model")) {
    const auto & m = j.at("model");
    detail::check_keys(m, "model",
      {"nu", "waiting_factor", "dc_compute", "path_loss_exponent", "reference_distance", "enforce_deadlines"});
    auto & mc = c.model;
    if (m.contains("nu")) {mc.nu = number<double>(m.at("nu"), "model.nu");}
    if (m.contains("waiting_factor")) {mc.waiting_factor = number<double>(m.at("waiting_factor"), "model.waiting_factor");}
    if (m.contains("dc_compute")) {mc.dc_compute_hz = quantity(m.at("dc_compute"), Dimension::frequency, "model.dc_compute");}
    if (m.contains("path_loss_exponent")) {mc.path_loss_exponent = number<double>(m.at("path_loss_exponent"), "model.path_loss_exponent");}
    if (m.contains("reference_distance")) {
      mc.reference_distance_m = quantity(m.at("reference_distance"), Dimension::distance, "model.reference_distance");
    }
    if (m.contains("enforce_deadlines")) {mc.enforce_deadlines = m.at("enforce_deadlines").get<bool>();}
  }

  if (j.contains("solver")) {
    const auto & s = j.at("solver");
    detail::check_keys(s, "solver", {"rho", "epsilon", "max_iters", "rule", "subproblem_iters", "subproblem_tol"});
    auto & sp = c.solver;
    if (s.contains("rho")) {sp.rho = number<double>(s.at("rho"), "solver.rho");}
    if (s.contains("epsilon")) {sp.epsilon = number<double>(s.at("epsilon"), "solver.epsilon");}
    if (s.contains("max_iters")) {sp.max_iters = number<int>(s.at("max_iters"), "solver.max_iters");}
    if (s.contains("rule")) {
      try {
        sp.rule = parse_rule(s.at("rule").get<std::string>());
      } catch (const ParameterError & e) {
        throw ConfigError(std::string("solver.rule: ") + e.what());
      }
    }
    if (s.contains("subproblem_iters")) {sp.subproblem_iters = number<int>(s.at("subproblem_iters"), "solver.subproblem_iters");}
    if (s.contains("subproblem_tol")) {sp.subproblem_tol = number<double>(s.at("subproblem_tol"), "solver.subproblem_tol");}
  }

  if (j.contains("rounding")) {
    const auto & r = j.at("rounding");
    detail::check_keys(r, "rounding", {"theta", "xi"});
    if (r.contains("theta")) {c.theta = number<double>(r.at("theta"), "rounding.theta");}
    if (r.contains("xi")) {c.xi = number<double>(r.at("xi"), "rounding.xi");}
  }

  if (j.contains("eta") && !j.at("eta").is_null()) {c.eta = number<double>(j.at("eta"), "eta");}

  if (j.contains("simulation")) {
    const auto & s = j.at("simulation");
    detail::check_keys(s, "simulation", {"epochs", "window"});
    if (s.contains("epochs")) {c.epochs = number<int>(s.at("epochs"), "simulation.epochs");}
    if (s.contains("window")) {c.window_s = quantity(s.at("window"), Dimension::time, "simulation.window");}
  }

  if (j.contains("metrics")) {
    const auto & m = j.at("metrics");
    detail::check_keys(m, "metrics", {"cpu_width_bits", "word_bits"});
    if (m.contains("cpu_width_bits")) {c.mips.cpu_width_bits = number<double>(m.at("cpu_width_bits"), "metrics.cpu_width_bits");}
    if (m.contains("word_bits")) {c.mips.word_bits = number<double>(m.at("word_bits"), "metrics.word_bits");}
  }

  c.validate();
  return c;
}

inline ScenarioConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {throw ConfigError("cannot open config " + path.string());}
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  try {
    return parse_config(j, path.parent_path());
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace mec4c

#endif  // MEC4C_CONFIG_HPP_
