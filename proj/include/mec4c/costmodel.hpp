#ifndef MEC4C_COSTMODEL_HPP_
#define MEC4C_COSTMODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "mec4c/decision.hpp"
#include "mec4c/errors.hpp"
#include "mec4c/scenario.hpp"

namespace mec4c
{

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kEqualityTol = 1e-6;

// ---------------------------------------------------------------------------
// Radio

inline double channel_gain(double distance_m, const ModelConstants & model)
{
  if (!(distance_m > 0.0)) {throw ParameterError("distance must be > 0");}
  return std::pow(distance_m / model.reference_distance_m, -model.path_loss_exponent);
}

// Bits/s/Hz for the user's uplink to its home station.
inline double spectrum_efficiency(const UserDevice & u, const ModelConstants & model)
{
  if (!(u.noise_power_w > 0.0)) {throw ParameterError("noise power must be > 0");}
  const double snr = u.tx_power_w * channel_gain(u.distance_m, model) / u.noise_power_w;
  return std::log2(1.0 + snr);
}

inline double data_rate(double x, double a, double bandwidth_hz, double gamma)
{
  return x * a * bandwidth_hz * gamma;
}

inline double tx_delay(double x, double data_bits, double rate_bps)
{
  if (x == 0.0) {return 0.0;}
  if (!(rate_bps > 0.0)) {throw InfeasibleRateError("offloaded task has zero uplink rate");}
  return x * data_bits / rate_bps;
}

// ---------------------------------------------------------------------------
// Local computation

inline double local_energy(const Task & t, const UserDevice & u, double nu)
{
  return t.data_bits * nu * t.workload_cpb * u.compute_hz * u.compute_hz;
}

inline double local_latency(const Task & t, const UserDevice & u)
{
  return t.data_bits * t.workload_cpb / u.compute_hz;
}

inline int device_status(const Task & t, const UserDevice & u, double nu, double energy_budget_j)
{
  if (t.workload_cpb > u.compute_hz) {return 0;}
  if (local_latency(t, u) > t.deadline_s) {return 0;}
  if (local_energy(t, u, nu) > energy_budget_j) {return 0;}
  return 1;
}

inline int device_status(const Task & t, const UserDevice & u, double nu)
{
  return device_status(t, u, nu, u.energy_budget_j);
}

inline double waiting_time(const Task & t, const ModelConstants & model)
{
  return model.waiting_factor * t.deadline_s;
}

// Local completion time for offloading decision x (x = 1 means nothing runs
// locally).
inline double local_time(const Task & t, const UserDevice & u, double x, const ModelConstants & model)
{
  if (x >= 1.0) {return 0.0;}
  const double l = local_latency(t, u);
  return device_status(t, u, model.nu) == 1 ? l : l + waiting_time(t, model);
}

// ---------------------------------------------------------------------------
// Edge computation

inline double compute_share(double capacity_hz, double z, double cohort_z_sum)
{
  if (z == 0.0) {return 0.0;}
  if (!(cohort_z_sum > 0.0)) {throw ParameterError("cohort workload sum must be > 0");}
  return capacity_hz * z / cohort_z_sum;
}

inline double compute_share(double capacity_hz, double z, const std::vector<double> & cohort_z)
{
  return compute_share(capacity_hz, z, std::accumulate(cohort_z.begin(), cohort_z.end(), 0.0));
}

// Execution latency on a server share; zero work takes no time, a missing
// share makes the route unusable.
inline double server_latency(double data_bits, double z, double share_hz)
{
  if (z == 0.0) {return 0.0;}
  if (!(share_hz > 0.0)) {return kInf;}
  return data_bits * z / share_hz;
}

// Per-task resource view used by the delay chain.
//   a[k]     spectrum fraction at the home station
//   p[k][r]  compute share on route r (home, neighbors, DC)
//   c[k]     cache footprint in bits
struct AllocationView
{
  std::vector<double> a;
  std::vector<std::vector<double>> p;
  std::vector<double> c;
};

// Spectrum proportional to data size among the station's users; compute
// proportional to workload within each cohort. A forwarded task joins the
// neighbor's own cohort. The DC pool is shared by every task.
inline AllocationView default_allocation(const Scenario & sc)
{
  const std::size_t n_tasks = sc.tasks.size();
  const std::size_t n_st = sc.stations.size();
  std::vector<double> home_s(n_st, 0.0), home_z(n_st, 0.0);
  double all_z = 0.0;
  for (std::size_t k = 0; k < n_tasks; ++k) {
    home_s[sc.task_home[k]] += sc.tasks[k].data_bits;
    home_z[sc.task_home[k]] += sc.tasks[k].workload_cpb;
    all_z += sc.tasks[k].workload_cpb;
  }
  const double dc_hz = sc.dc_compute_hz();
  AllocationView av;
  av.a.resize(n_tasks);
  av.p.resize(n_tasks);
  av.c.resize(n_tasks);
  for (std::size_t k = 0; k < n_tasks; ++k) {
    const Task & t = sc.tasks[k];
    const std::size_t home = sc.task_home[k];
    av.a[k] = t.data_bits / home_s[home];
    av.c[k] = t.data_bits;
    const std::size_t nr = route_count(sc, k);
    av.p[k].assign(nr, 0.0);
    if (t.workload_cpb == 0.0) {continue;}
    for (std::size_t r = 0; r < nr; ++r) {
      const std::size_t st = route_station(sc, k, r);
      if (st == kDataCenter) {
        av.p[k][r] = compute_share(dc_hz, t.workload_cpb, all_z);
      } else if (st == home) {
        av.p[k][r] = compute_share(sc.stations[st].compute_hz, t.workload_cpb, home_z[st]);
      } else {
        av.p[k][r] = compute_share(
          sc.stations[st].compute_hz, t.workload_cpb, home_z[st] + t.workload_cpb);
      }
    }
  }
  return av;
}

inline void check_allocation(const Scenario & sc, const AllocationView & av)
{
  const std::size_t n = sc.tasks.size();
  if (av.a.size() != n || av.p.size() != n || av.c.size() != n) {
    throw ParameterError("allocation view has wrong number of tasks");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(av.a[k] >= 0.0 && av.a[k] <= 1.0)) {throw ParameterError("spectrum fraction outside [0,1]");}
    if (av.p[k].size() != route_count(sc, k)) {throw ParameterError("compute share has wrong route count");}
  }
}

// ---------------------------------------------------------------------------
// Delay chain

// Uplink delay of a task that is offloaded (the decision cancels out of s/R).
inline double uplink_delay(const Scenario & sc, const AllocationView & av, std::size_t k)
{
  const UserDevice & u = sc.user_of(k);
  const double rate = data_rate(
    1.0, av.a[k], sc.stations[sc.task_home[k]].bandwidth_hz, spectrum_efficiency(u, sc.model));
  if (!(rate > 0.0)) {return kInf;}
  return sc.tasks[k].data_bits / rate;
}

inline double link_delay(double data_bits, double capacity_bps)
{
  if (!(capacity_bps > 0.0)) {return kInf;}
  return data_bits / capacity_bps;
}

// Completion time of task k on every route; kInf where a link or share is
// missing.
inline std::vector<double> route_delays(const Scenario & sc, const AllocationView & av, std::size_t k)
{
  const Task & t = sc.tasks[k];
  const std::size_t home = sc.task_home[k];
  const double up = uplink_delay(sc, av, k);
  const std::size_t nr = route_count(sc, k);
  std::vector<double> d(nr, kInf);
  for (std::size_t r = 0; r < nr; ++r) {
    const std::size_t st = route_station(sc, k, r);
    double hop = 0.0;
    if (st == kDataCenter) {
      hop = link_delay(t.data_bits, sc.stations[home].dc_capacity_bps);
    } else if (st != home) {
      hop = link_delay(t.data_bits, sc.x2_capacity(home, st));
    }
    d[r] = up + hop + server_latency(t.data_bits, t.workload_cpb, av.p[k][r]);
  }
  return d;
}

// Offloaded completion time: routes weighted by y.
inline double exec_time_chain(
  const Scenario & sc, const DecisionVector & dv, const AllocationView & av, std::size_t k)
{
  const auto d = route_delays(sc, av, k);
  const auto & y = dv.tasks.at(k).y;
  double total = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (y[r] == 0.0) {continue;}
    if (!std::isfinite(d[r])) {
      throw InfeasibleRateError("task " + std::to_string(k) + " routed over a link without capacity");
    }
    total += y[r] * d[r];
  }
  return total;
}

// Aggregate forwarding delay on the X2 link m -> n.
inline double x2_delay(const Scenario & sc, const DecisionVector & dv, std::size_t m, std::size_t n)
{
  double bits = 0.0;
  for (std::size_t k : sc.home_tasks.at(m)) {
    const auto & td = dv.tasks[k];
    for (std::size_t r = 1; r + 1 < td.y.size(); ++r) {
      if (route_station(sc, k, r) == n) {bits += td.x * td.y[r] * sc.tasks[k].data_bits;}
    }
  }
  if (bits == 0.0) {return 0.0;}
  const double cap = sc.x2_capacity(m, n);
  if (!(cap > 0.0)) {throw InfeasibleRateError("flow on an X2 link without capacity");}
  return bits / cap;
}

// Aggregate backhaul delay from station m to the DC.
inline double dc_delay(const Scenario & sc, const DecisionVector & dv, std::size_t m)
{
  double bits = 0.0;
  for (std::size_t k : sc.home_tasks.at(m)) {
    const auto & td = dv.tasks[k];
    bits += td.x * td.y_dc() * sc.tasks[k].data_bits;
  }
  if (bits == 0.0) {return 0.0;}
  const double cap = sc.stations[m].dc_capacity_bps;
  if (!(cap > 0.0)) {throw InfeasibleRateError("flow on a backhaul link without capacity");}
  return bits / cap;
}

// ---------------------------------------------------------------------------
// Objective

inline double task_delay(
  const Scenario & sc, const DecisionVector & dv, const AllocationView & av, std::size_t k)
{
  const auto & td = dv.tasks.at(k);
  double v = 0.0;
  if (td.x < 1.0) {
    v += (1.0 - td.x) * local_time(sc.tasks[k], sc.user_of(k), 0.0, sc.model);
  }
  if (td.x > 0.0) {v += td.x * exec_time_chain(sc, dv, av, k);}
  return v;
}

inline double total_delay(const Scenario & sc, const DecisionVector & dv, const AllocationView & av)
{
  check_shape(sc, dv);
  double v = 0.0;
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {v += task_delay(sc, dv, av, k);}
  return v;
}

inline double task_reward(const Scenario & sc, std::size_t k)
{
  return sc.tasks[k].data_bits * sc.demand.rate(sc.task_home[k], sc.tasks[k].content_id);
}

inline double bandwidth_saving(const Scenario & sc, const DecisionVector & dv)
{
  check_shape(sc, dv);
  double v = 0.0;
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
    const auto & td = dv.tasks[k];
    double served = 0.0;
    for (std::size_t r = 0; r < td.w.size(); ++r) {served += td.y[r] * td.w[r];}
    v += task_reward(sc, k) * td.x * served;
  }
  return v;
}

inline double objective(const Scenario & sc, const DecisionVector & dv, const AllocationView & av, double eta)
{
  return total_delay(sc, dv, av) - eta * bandwidth_saving(sc, dv);
}

inline double objective(const Scenario & sc, const DecisionVector & dv, const AllocationView & av)
{
  return objective(sc, dv, av, sc.eta);
}

// ---------------------------------------------------------------------------
// Constraints

// Signed residuals; <= 0 is satisfied, routing is an equality.
struct Residuals
{
  std::vector<double> spectrum;   // per station: sum x a - 1
  std::vector<double> compute;    // per station: sum x p y_local - P_m
  std::vector<double> cache;      // per station: routed cached bits - C_m
  std::vector<double> routing;    // per task
  std::vector<double> dominance;  // per task

  bool satisfied(double tol = kEqualityTol) const
  {
    auto le = [tol](double v) {return v <= tol;};
    return std::all_of(spectrum.begin(), spectrum.end(), le) &&
           std::all_of(compute.begin(), compute.end(), le) &&
           std::all_of(cache.begin(), cache.end(), le) &&
           std::all_of(routing.begin(), routing.end(), [tol](double v) {return std::abs(v) <= tol;}) &&
           std::all_of(dominance.begin(), dominance.end(), le);
  }
};

// Load above capacity, ignoring rounding noise in the load sums.
inline double capacity_excess(double load, double capacity)
{
  const double e = load - capacity;
  return e > 1e-9 * std::max(1.0, std::abs(capacity)) ? e : 0.0;
}

struct StationLoads
{
  std::vector<double> spectrum;
  std::vector<double> compute;
  std::vector<double> cache;
};

inline StationLoads station_loads(const Scenario & sc, const DecisionVector & dv, const AllocationView & av)
{
  const std::size_t n_st = sc.stations.size();
  StationLoads l{std::vector<double>(n_st, 0.0), std::vector<double>(n_st, 0.0),
    std::vector<double>(n_st, 0.0)};
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
    const auto & td = dv.tasks[k];
    const std::size_t home = sc.task_home[k];
    l.spectrum[home] += td.x * av.a[k];
    l.compute[home] += td.x * av.p[k][0] * td.y[0];
    for (std::size_t r = 0; r < td.w.size(); ++r) {
      l.cache[route_station(sc, k, r)] += td.x * td.y[r] * td.w[r] * av.c[k];
    }
  }
  return l;
}

inline double routing_residual(const TaskDecision & td)
{
  const double ysum = std::accumulate(td.y.begin(), td.y.end(), 0.0);
  return (1.0 - td.x) + td.x * ysum - 1.0;
}

inline Residuals constraint_residuals(const Scenario & sc, const DecisionVector & dv, const AllocationView & av)
{
  check_shape(sc, dv);
  check_allocation(sc, av);
  const auto loads = station_loads(sc, dv, av);
  Residuals res;
  for (std::size_t m = 0; m < sc.stations.size(); ++m) {
    res.spectrum.push_back(loads.spectrum[m] - 1.0);
    res.compute.push_back(loads.compute[m] - sc.stations[m].compute_hz);
    res.cache.push_back(loads.cache[m] - sc.stations[m].cache_bits);
  }
  for (const auto & td : dv.tasks) {
    const double ymax = *std::max_element(td.y.begin(), td.y.end());
    // Relaxed y is the route split conditional on offloading.
    const double lhs = dv.mode == DecisionMode::binary ? ymax : td.x * ymax;
    res.dominance.push_back(lhs - td.x);
    if (dv.mode == DecisionMode::relaxed && td.x > 0.0) {
      res.routing.push_back(std::accumulate(td.y.begin(), td.y.end(), 0.0) - 1.0);
    } else {
      res.routing.push_back(routing_residual(td));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Per-task terms for the solver and oracle

struct TaskTerms
{
  std::size_t home = 0;
  std::vector<std::size_t> route_bs;   // station per route, kDataCenter last
  std::vector<double> route_delay;
  std::vector<char> route_allowed;
  double local_cost = 0.0;             // local completion time when x = 0
  double reward = 0.0;                 // s * lambda at the home station
  double size_bits = 0.0;
  int alpha = 1;
  double x_lo = 0.0;
  double x_hi = 1.0;
  bool admitted = true;                // some option meets the deadline
  bool cache_only = false;

  std::size_t routes() const {return route_delay.size();}
  bool any_route() const
  {
    return std::any_of(route_allowed.begin(), route_allowed.end(), [](char c) {return c != 0;});
  }
};

// Objective data frozen for one scenario and allocation. Holds its own copy
// of the scenario.
struct Problem
{
  std::shared_ptr<const Scenario> scenario;
  AllocationView alloc;
  double eta = 0.0;
  std::vector<TaskTerms> terms;

  std::size_t size() const {return terms.size();}
};

inline Problem build_problem(const Scenario & sc, AllocationView av)
{
  check_allocation(sc, av);
  Problem pb;
  pb.scenario = std::make_shared<const Scenario>(sc);
  pb.eta = sc.eta;
  pb.terms.resize(sc.tasks.size());
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
    const Task & t = sc.tasks[k];
    const UserDevice & u = sc.user_of(k);
    TaskTerms & tt = pb.terms[k];
    tt.home = sc.task_home[k];
    tt.size_bits = t.data_bits;
    tt.cache_only = t.cache_only();
    tt.alpha = device_status(t, u, sc.model.nu);
    tt.local_cost = local_time(t, u, 0.0, sc.model);
    tt.reward = task_reward(sc, k);
    tt.route_delay = route_delays(sc, av, k);
    const std::size_t nr = tt.route_delay.size();
    tt.route_bs.resize(nr);
    tt.route_allowed.assign(nr, 0);
    for (std::size_t r = 0; r < nr; ++r) {
      tt.route_bs[r] = route_station(sc, k, r);
      const bool available = std::isfinite(tt.route_delay[r]);
      const bool on_time = !sc.model.enforce_deadlines || t.deadline_s == 0.0 ||
        tt.route_delay[r] <= t.deadline_s;
      tt.route_allowed[r] = available && on_time;
    }
    const bool local_ok = tt.alpha == 1 && !tt.cache_only;
    tt.admitted = local_ok || tt.any_route();
    if (!tt.admitted) {
      for (std::size_t r = 0; r < nr; ++r) {tt.route_allowed[r] = std::isfinite(tt.route_delay[r]);}
    }
    const bool can_offload = tt.any_route();
    tt.x_lo = (local_ok || !can_offload) ? 0.0 : 1.0;
    tt.x_hi = can_offload ? 1.0 : 0.0;
  }
  pb.alloc = std::move(av);
  return pb;
}

inline Problem build_problem(const Scenario & sc) {return build_problem(sc, default_allocation(sc));}

// Objective on the frozen terms; agrees with objective() wherever y is zero
// on disallowed routes.
inline double task_value(const TaskTerms & tt, double eta, const TaskDecision & td)
{
  double off = 0.0, served = 0.0;
  for (std::size_t r = 0; r < tt.routes(); ++r) {
    if (td.y[r] == 0.0) {continue;}
    off += td.y[r] * tt.route_delay[r];
    if (r < td.w.size()) {served += td.y[r] * td.w[r];}
  }
  double v = td.x * (off - eta * tt.reward * served);
  if (td.x < 1.0) {v += (1.0 - td.x) * tt.local_cost;}
  return v;
}

inline double evaluate(const Problem & pb, const DecisionVector & dv)
{
  double v = 0.0;
  for (std::size_t k = 0; k < pb.size(); ++k) {v += task_value(pb.terms[k], pb.eta, dv.tasks[k]);}
  return v;
}

// Partial derivatives of evaluate(), shaped like the decision vector. Entries
// on disallowed routes are zero.
inline DecisionVector gradient(const Problem & pb, const DecisionVector & dv)
{
  DecisionVector g = dv;
  for (std::size_t k = 0; k < pb.size(); ++k) {
    const TaskTerms & tt = pb.terms[k];
    const TaskDecision & td = dv.tasks[k];
    TaskDecision & gk = g.tasks[k];
    double off = 0.0, served = 0.0;
    for (std::size_t r = 0; r < tt.routes(); ++r) {
      gk.y[r] = 0.0;
      if (!tt.route_allowed[r]) {continue;}
      const double wr = r < td.w.size() ? td.w[r] : 0.0;
      off += td.y[r] * tt.route_delay[r];
      served += td.y[r] * wr;
      gk.y[r] = td.x * (tt.route_delay[r] - pb.eta * tt.reward * wr);
    }
    for (std::size_t r = 0; r < td.w.size(); ++r) {
      gk.w[r] = tt.route_allowed[r] ? -pb.eta * tt.reward * td.x * td.y[r] : 0.0;
    }
    gk.x = -tt.local_cost + off - pb.eta * tt.reward * served;
    gk.w_dc = 0.0;
  }
  return g;
}

}  // namespace mec4c

#endif  // MEC4C_COSTMODEL_HPP_
