#ifndef MEC4C_PIPELINE_HPP_
#define MEC4C_PIPELINE_HPP_

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mec4c/cachesim.hpp"
#include "mec4c/config.hpp"
#include "mec4c/costmodel.hpp"
#include "mec4c/metrics.hpp"
#include "mec4c/rounding.hpp"
#include "mec4c/scenario.hpp"
#include "mec4c/solver.hpp"
#include "mec4c/topology.hpp"

namespace mec4c
{

enum class RunStatus { ok = 0, non_converged = 2, infeasible = 3, config_error = 4 };

inline const char * to_string(RunStatus s)
{
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::non_converged: return "non_converged";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::config_error: return "config_error";
  }
  return "?";
}

// Weight that puts one average task's delay and saving on the same footing.
inline double default_eta(const Scenario & sc)
{
  if (sc.tasks.empty()) {return 0.0;}
  double s = 0.0;
  for (const auto & t : sc.tasks) {s += t.data_bits;}
  s /= static_cast<double>(sc.tasks.size());
  const double lambda = sc.demand.mean();
  return lambda > 0.0 ? 1.0 / (s * lambda) : 0.0;
}

struct BuiltScenario
{
  Scenario scenario;
  OkmResult okm;
};

inline BuiltScenario build_scenario(const ScenarioConfig & cfg, std::uint64_t seed)
{
  BuiltScenario out;
  std::vector<BaseStation> stations;
  if (cfg.topology.source == "csv") {
    stations = import_stations(cfg.topology.csv_path, cfg.topology.defaults);
  } else {
    stations = synthetic_stations(cfg.topology.stations, cfg.topology.area_m, cfg.topology.ranges, mix_seed(seed, 1));
  }
  if (cfg.topology.r > stations.size()) {
    throw ConfigError("topology.r exceeds the number of stations");
  }
  out.okm = run_okm_cs(stations, cfg.topology.r, cfg.topology.okm_t_max, cfg.topology.okm_epsilon, mix_seed(seed, 2));
  attach_x2_links(stations, out.okm.spaces, cfg.topology.ranges.x2_capacity_bps, mix_seed(seed, 3));

  Workload wl = generate_tasks(cfg.workload, stations, mix_seed(seed, 4));
  Scenario & sc = out.scenario;
  sc.stations = std::move(stations);
  sc.spaces = out.okm.spaces;
  sc.users = std::move(wl.users);
  sc.tasks = std::move(wl.tasks);
  sc.content_bits = std::move(wl.content_bits);
  sc.demand = generate_demands(
    zipf_popularity(cfg.zipf_a, sc.content_bits.size()), cfg.total_requests, sc.stations.size(),
    mix_seed(seed, 5), cfg.zipf_a);
  sc.model = cfg.model;
  sc.eta = cfg.eta ? *cfg.eta : default_eta(sc);
  sc.finalize();
  return out;
}

struct SolveReport
{
  SolveTrace trace;
  DecisionVector relaxed;
  DecisionVector rounded;      // after threshold rounding and repair
  DecisionVector decisions;    // after the penalized re-solve
  double relaxed_objective = 0.0;
  double rounded_objective = 0.0;
  double final_objective = 0.0;
  ViolationReport rounded_violations;
  ViolationReport violations;
  GapReport gap;
  bool infeasible = false;
  std::string infeasible_reason;
};

// BSUM, rounding and penalized re-solve on a prepared problem.
inline SolveReport solve(const Problem & pb, const SolverParams & params, double theta, double xi)
{
  SolveReport rep;
  const Scenario & sc = *pb.scenario;
  BsumResult br = run_bsum(pb, params);
  rep.trace = br.trace;
  rep.relaxed = br.iterate;
  rep.relaxed_objective = evaluate(pb, rep.relaxed);
  rep.rounded = threshold_round(rep.relaxed, theta, pb);
  rep.rounded_violations = violations(rep.rounded, pb.alloc, sc, xi);
  rep.rounded_objective = evaluate(pb, rep.rounded);
  rep.decisions = penalized_resolve(rep.rounded, pb, xi);
  rep.violations = violations(rep.decisions, pb.alloc, sc, xi);
  rep.final_objective = evaluate(pb, rep.decisions);
  rep.gap = integrality_gap(rep.relaxed_objective, rep.final_objective, rep.violations.penalty());
  rep.infeasible = rep.violations.delta_total() > 0.0;
  if (rep.infeasible) {rep.infeasible_reason = "capacity violations remain after the penalized re-solve";}
  return rep;
}

struct PipelineResult
{
  ScenarioConfig config;
  std::uint64_t seed = 0;
  Rule rule = Rule::cyclic;
  BuiltScenario built;
  std::optional<Problem> problem;
  SolveReport solve;
  SimResult sim;
  RunMetrics metrics;
  std::vector<double> task_delays;
  std::size_t deadline_misses = 0;    // admitted tasks past their deadline
  RunStatus status = RunStatus::ok;
  std::string stage;                  // stage that failed, if any
  double elapsed_s = 0.0;
};

struct RunOverrides
{
  std::optional<std::uint64_t> seed;
  std::optional<Rule> rule;
  std::optional<int> epochs;
};

inline std::size_t count_deadline_misses(const Problem & pb, const std::vector<double> & delays)
{
  const Scenario & sc = *pb.scenario;
  std::size_t n = 0;
  for (std::size_t k = 0; k < pb.size(); ++k) {
    const double dl = sc.tasks[k].deadline_s;
    if (pb.terms[k].admitted && dl > 0.0 && delays[k] > dl * (1.0 + 1e-12)) {++n;}
  }
  return n;
}

inline PipelineResult run_pipeline(const ScenarioConfig & cfg, const RunOverrides & ov = {})
{
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult res;
  res.config = cfg;
  if (ov.epochs) {res.config.epochs = *ov.epochs;}
  if (ov.rule) {res.config.solver.rule = *ov.rule;}
  res.seed = ov.seed ? *ov.seed : cfg.seed;
  res.config.solver.seed = mix_seed(res.seed, 6);
  res.rule = res.config.solver.rule;
  res.config.validate();

  res.stage = "scenario";
  res.built = build_scenario(res.config, res.seed);
  const Scenario & sc = res.built.scenario;
  res.problem.emplace(build_problem(sc));
  const Problem & pb = *res.problem;

  res.stage = "solver";
  try {
    res.solve = solve(pb, res.config.solver, res.config.theta, res.config.xi);
  } catch (const InfeasibleError & e) {
    res.status = RunStatus::infeasible;
    res.solve.infeasible = true;
    res.solve.infeasible_reason = e.what();
    res.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  res.stage = "cachesim";
  SimParams sp;
  sp.epochs = res.config.epochs;
  sp.seed = mix_seed(res.seed, 7);
  res.sim = simulate_caching(sc, res.solve.decisions, pb.alloc, sp);

  res.stage = "metrics";
  res.task_delays = realized_delays(sc, res.solve.decisions, pb.alloc);
  res.deadline_misses = count_deadline_misses(pb, res.task_delays);
  auto & m = res.metrics;
  m.network_throughput_bps = network_throughput(sc, res.solve.decisions, res.config.window_s);
  m.network_throughput_per_epoch.assign(static_cast<std::size_t>(res.config.epochs), m.network_throughput_bps);
  m.computation_throughput_mips = computation_throughput(sc, res.solve.decisions, pb.alloc, res.config.mips);
  if (!res.task_delays.empty()) {m.delay = delay_distribution(res.task_delays);}
  std::vector<double> off;
  for (std::size_t k = 0; k < res.task_delays.size(); ++k) {
    if (res.solve.decisions.tasks[k].x == 1.0) {off.push_back(res.task_delays[k]);}
  }
  m.offloaded = off.size();
  if (!off.empty()) {m.offload_delay = delay_distribution(off);}
  m.hit_ratio = hit_ratio(res.sim.total);
  m.bandwidth_saving_bits = res.sim.saving_bits;

  res.stage.clear();
  if (res.solve.infeasible) {
    res.status = RunStatus::infeasible;
  } else if (!res.solve.trace.converged) {
    res.status = RunStatus::non_converged;
  }
  res.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json violations_json(const ViolationReport & v)
{
  return {{"delta_a", v.delta_a}, {"delta_p", v.delta_p}, {"delta_m", v.delta_m},
    {"delta", v.delta_total()}, {"xi", v.xi}};
}

inline nlohmann::json decisions_json(const Scenario & sc, const DecisionVector & dv)
{
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t k = 0; k < dv.tasks.size(); ++k) {
    const auto & td = dv.tasks[k];
    nlohmann::json e{{"task", k}, {"home", sc.stations[sc.task_home[k]].id}, {"x", td.x}};
    std::string where = "local";
    nlohmann::json cached = nullptr;
    if (td.x == 1.0) {
      for (std::size_t r = 0; r < td.y.size(); ++r) {
        if (td.y[r] != 1.0) {continue;}
        const std::size_t st = route_station(sc, k, r);
        where = st == kDataCenter ? "dc" : std::to_string(sc.stations[st].id);
        if (r < td.w.size() && td.w[r] == 1.0) {cached = sc.stations[st].id;}
      }
    }
    e["executes_at"] = where;
    e["cached_at"] = cached;
    arr.push_back(std::move(e));
  }
  return arr;
}

inline nlohmann::json allocations_json(const Scenario & sc, const Problem & pb, const DecisionVector & dv)
{
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t k = 0; k < dv.tasks.size(); ++k) {
    const auto & td = dv.tasks[k];
    double p = 0.0;
    for (std::size_t r = 0; r < td.y.size(); ++r) {p += td.x * td.y[r] * pb.alloc.p[k][r];}
    const double gamma = spectrum_efficiency(sc.user_of(k), sc.model);
    const double rate = data_rate(td.x, pb.alloc.a[k], sc.stations[sc.task_home[k]].bandwidth_hz, gamma);
    double c = 0.0;
    for (std::size_t r = 0; r < td.w.size(); ++r) {c += td.x * td.y[r] * td.w[r] * pb.alloc.c[k];}
    arr.push_back({{"task", k}, {"a", pb.alloc.a[k]}, {"p_hz", p}, {"R_bps", rate}, {"c_bits", c}});
  }
  return arr;
}

inline nlohmann::json delay_json(const DelayStats & d)
{
  return {{"mean_s", d.mean}, {"median_s", d.median}, {"p5_s", d.p5}, {"p95_s", d.p95}};
}

inline std::string utc_timestamp()
{
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline nlohmann::json report_json(const PipelineResult & r)
{
  nlohmann::json j;
  j["config"] = r.config.name;
  j["seed"] = r.seed;
  j["rule"] = to_string(r.rule);
  j["status"] = to_string(r.status);
  const Scenario & sc = r.built.scenario;
  j["scenario"] = {
    {"stations", sc.stations.size()}, {"tasks", sc.tasks.size()},
    {"contents", sc.content_bits.size()}, {"eta", sc.eta},
    {"spaces", spaces_to_json(sc.spaces)}, {"okm_objective_trace", r.built.okm.objective_trace}};
  const SolveReport & s = r.solve;
  nlohmann::json solve{
    {"iterations", s.trace.iterations}, {"converged", s.trace.converged},
    {"relaxed_objective", s.relaxed_objective}, {"rounded_objective", s.rounded_objective},
    {"final_objective", s.final_objective},
    {"rounded_violations", violations_json(s.rounded_violations)},
    {"violations", violations_json(s.violations)},
    {"beta", s.gap.beta ? nlohmann::json(*s.gap.beta) : nlohmann::json(nullptr)},
    {"gap_raw", {{"relaxed", s.gap.relaxed}, {"rounded", s.gap.rounded}, {"penalty", s.gap.penalty}}}};
  if (s.infeasible) {solve["infeasible_reason"] = s.infeasible_reason;}
  j["solve"] = solve;
  if (r.problem && !s.decisions.tasks.empty()) {
    j["decisions"] = decisions_json(sc, s.decisions);
    j["allocations"] = allocations_json(sc, *r.problem, s.decisions);
  }
  const RunMetrics & m = r.metrics;
  j["metrics"] = {
    {"network_throughput_bps", m.network_throughput_bps},
    {"computation_throughput_mips", m.computation_throughput_mips},
    {"delay", delay_json(m.delay)},
    {"offload_delay", delay_json(m.offload_delay)},
    {"offloaded_tasks", m.offloaded},
    {"deadline_misses", r.deadline_misses},
    {"hit_ratio", m.hit_ratio}, {"hits", r.sim.total.hits}, {"misses", r.sim.total.misses},
    {"bandwidth_saving_bits", m.bandwidth_saving_bits}};
  j["meta"] = {{"timestamp", utc_timestamp()}, {"elapsed_s", r.elapsed_s}};
  return j;
}

inline std::string metrics_csv(const PipelineResult & r)
{
  std::ostringstream os;
  os.precision(12);
  os << "epoch,hits,misses,hit_ratio,saving_bits,network_throughput_bps\n";
  for (std::size_t e = 0; e < r.sim.per_epoch.size(); ++e) {
    const auto & c = r.sim.per_epoch[e];
    os << e << ',' << c.hits << ',' << c.misses << ',' << hit_ratio(c) << ','
       << r.sim.saving_per_epoch[e] << ',' << r.metrics.network_throughput_per_epoch[e] << '\n';
  }
  os << "all," << r.sim.total.hits << ',' << r.sim.total.misses << ',' << r.metrics.hit_ratio << ','
     << r.metrics.bandwidth_saving_bits << ',' << r.metrics.network_throughput_bps << '\n';
  return os.str();
}

inline std::string run_id(const PipelineResult & r)
{
  return r.config.name + "-" + to_string(r.rule) + "-s" + std::to_string(r.seed);
}

// Writes report.json, trace.csv, metrics.csv and hits.csv under out_dir/<run id>.
inline std::filesystem::path write_outputs(const PipelineResult & r, const std::filesystem::path & out_dir)
{
  const auto dir = out_dir / run_id(r);
  std::filesystem::create_directories(dir);
  auto put = [&](const char * name, const std::string & text) {
      std::ofstream f(dir / name);
      if (!f) {throw Error("cannot write " + (dir / name).string());}
      f << text;
    };
  put("report.json", report_json(r).dump(2) + "\n");
  put("trace.csv", trace_csv(r.solve.trace));
  put("metrics.csv", metrics_csv(r));
  put("hits.csv", hits_csv(r.built.scenario, r.sim.trace));
  return dir;
}

}  // namespace mec4c

#endif  // MEC4C_PIPELINE_HPP_
