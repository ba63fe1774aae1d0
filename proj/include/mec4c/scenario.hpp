#ifndef MEC4C_SCENARIO_HPP_
#define MEC4C_SCENARIO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mec4c/errors.hpp"
#include "mec4c/random.hpp"
#include "mec4c/topology.hpp"
#include "mec4c/units.hpp"

namespace mec4c
{

using ContentId = std::size_t;

struct UserDevice
{
  std::size_t id = 0;
  StationId home_bs = 0;
  double compute_hz = 0.0;       // P_k
  double energy_budget_j = 0.0;  // available energy
  double tx_power_w = 0.0;       // rho_k
  double noise_power_w = 0.0;    // sigma_k^2
  double distance_m = 0.0;       // to the home station
};

// One task per user: input size, deadline, and workload intensity, plus the
// content the task's data becomes once cached.
struct Task
{
  std::size_t user = 0;
  double data_bits = 0.0;
  double deadline_s = 0.0;
  double workload_cpb = 0.0;  // cycles per bit
  ContentId content_id = 0;

  // Deadline and workload both zero: the user only wants the data cached.
  bool cache_only() const {return deadline_s == 0.0 && workload_cpb == 0.0;}
};

inline void validate_user(const UserDevice & u)
{
  const std::string who = "user " + std::to_string(u.id);
  if (!(u.compute_hz > 0.0)) {throw ParameterError(who + ": compute must be > 0");}
  if (!(u.tx_power_w > 0.0)) {throw ParameterError(who + ": tx power must be > 0");}
  if (!(u.noise_power_w > 0.0)) {throw ParameterError(who + ": noise power must be > 0");}
  if (!(u.distance_m > 0.0)) {throw ParameterError(who + ": distance must be > 0");}
  if (!(u.energy_budget_j >= 0.0)) {throw ParameterError(who + ": energy budget must be >= 0");}
}

inline void validate_task(const Task & t)
{
  const std::string who = "task of user " + std::to_string(t.user);
  if (!(t.data_bits > 0.0)) {throw ParameterError(who + ": data size must be > 0");}
  if (!(t.deadline_s >= 0.0)) {throw ParameterError(who + ": deadline must be >= 0");}
  if (!(t.workload_cpb >= 0.0)) {throw ParameterError(who + ": workload must be >= 0");}
  if ((t.deadline_s == 0.0) != (t.workload_cpb == 0.0)) {
    throw ParameterError(who + ": deadline and workload must be zero together");
  }
}

// Requests per epoch for every (station, content) pair. Rows follow the
// scenario's station order.
struct DemandMatrix
{
  std::size_t n_stations = 0;
  std::size_t n_contents = 0;
  std::vector<double> rates;  // row-major [station][content]
  double zipf_a = 0.0;

  DemandMatrix() = default;
  DemandMatrix(std::size_t stations, std::size_t contents, double a)
  : n_stations(stations), n_contents(contents), rates(stations * contents, 0.0), zipf_a(a) {}

  double rate(std::size_t station, ContentId c) const {return rates.at(station * n_contents + c);}
  double & rate(std::size_t station, ContentId c) {return rates.at(station * n_contents + c);}

  double total() const {return std::accumulate(rates.begin(), rates.end(), 0.0);}

  double content_total(ContentId c) const
  {
    double s = 0.0;
    for (std::size_t m = 0; m < n_stations; ++m) {s += rate(m, c);}
    return s;
  }

  double mean() const {return rates.empty() ? 0.0 : total() / static_cast<double>(rates.size());}
};

// Rank-i probability proportional to i^-a, ranks starting at 1 (content id 0).
inline std::vector<double> zipf_popularity(double a, std::size_t n_contents)
{
  if (n_contents == 0) {throw ParameterError("zipf_popularity: n_contents must be >= 1");}
  if (!(a >= 0.0)) {throw ParameterError("zipf_popularity: exponent must be >= 0");}
  std::vector<double> p(n_contents);
  for (std::size_t i = 0; i < n_contents; ++i) {
    p[i] = std::pow(static_cast<double>(i + 1), -a);
  }
  // Sum smallest-first for accuracy.
  double sum = 0.0;
  for (std::size_t i = n_contents; i-- > 0; ) {sum += p[i];}
  for (auto & v : p) {v /= sum;}
  return p;
}

// Multinomial draw of `total_requests` over (station, content) cells, stations
// weighted uniformly and contents by `pop`.
inline DemandMatrix generate_demands(
  std::span<const double> pop, std::uint64_t total_requests,
  std::size_t n_stations, std::uint64_t seed, double zipf_a = 0.0)
{
  if (pop.empty()) {throw ParameterError("generate_demands: empty popularity vector");}
  if (n_stations == 0) {throw ParameterError("generate_demands: no stations");}
  DemandMatrix d(n_stations, pop.size(), zipf_a);
  Rng rng(seed);
  // Conditional binomial decomposition of the multinomial.
  std::uint64_t remaining = total_requests;
  double mass_left = 1.0;
  const double station_w = 1.0 / static_cast<double>(n_stations);
  const std::size_t cells = n_stations * pop.size();
  for (std::size_t cell = 0; cell < cells && remaining > 0; ++cell) {
    const double p = station_w * pop[cell % pop.size()];
    std::uint64_t n = remaining;
    if (cell + 1 < cells) {
      const double q = mass_left > 0.0 ? std::min(1.0, p / mass_left) : 1.0;
      std::binomial_distribution<std::uint64_t> bin(remaining, q);
      n = bin(rng);
    }
    d.rates[cell] = static_cast<double>(n);
    remaining -= n;
    mass_left -= p;
  }
  return d;
}

struct WorkloadConfig
{
  std::size_t users_per_bs = 50;
  std::size_t n_contents = 50;
  Range data_bits{2.0 * kBitsPerGigabyte, 7.0 * kBitsPerGigabyte};
  Range deadline_s{0.02, 12.0};
  Range workload_cpb{452.5, 737.5};
  Range user_compute_hz{0.5e9, 1.0e9};
  Range energy_budget_j{0.1, 1.0};
  Range tx_power_w = Range::point(dbm_to_watts(27.0));
  Range noise_power_w = Range::point(1e-13);
  Range distance_m{10.0, 200.0};
  double cache_only_fraction = 0.0;

  void validate() const
  {
    data_bits.validate("data size");
    deadline_s.validate("deadline");
    workload_cpb.validate("workload");
    user_compute_hz.validate("user compute");
    energy_budget_j.validate("energy budget");
    tx_power_w.validate("tx power");
    noise_power_w.validate("noise power");
    distance_m.validate("user distance");
    if (n_contents == 0) {throw ParameterError("n_contents must be >= 1");}
    if (!(data_bits.lo > 0.0)) {throw ParameterError("data size must be > 0");}
    if (!(cache_only_fraction >= 0.0 && cache_only_fraction <= 1.0)) {
      throw ParameterError("cache_only_fraction must be in [0, 1]");
    }
  }
};

struct Workload
{
  std::vector<UserDevice> users;
  std::vector<Task> tasks;          // tasks[k].user == k
  std::vector<double> content_bits; // size of each content in the catalog
};

// Users are attached to each station in order; every user issues one task
// whose content is drawn uniformly from the catalog.
inline Workload generate_tasks(
  const WorkloadConfig & cfg, std::span<const BaseStation> stations, std::uint64_t seed)
{
  cfg.validate();
  Workload w;
  Rng content_rng(mix_seed(seed, 0));
  w.content_bits.resize(cfg.n_contents);
  for (auto & s : w.content_bits) {s = cfg.data_bits.draw(content_rng);}

  Rng rng(mix_seed(seed, 1));
  std::uniform_int_distribution<std::size_t> pick_content(0, cfg.n_contents - 1);
  std::bernoulli_distribution cache_only(cfg.cache_only_fraction);
  for (const auto & bs : stations) {
    for (std::size_t j = 0; j < cfg.users_per_bs; ++j) {
      UserDevice u;
      u.id = w.users.size();
      u.home_bs = bs.id;
      u.compute_hz = cfg.user_compute_hz.draw(rng);
      u.energy_budget_j = cfg.energy_budget_j.draw(rng);
      u.tx_power_w = cfg.tx_power_w.draw(rng);
      u.noise_power_w = cfg.noise_power_w.draw(rng);
      u.distance_m = cfg.distance_m.draw(rng);

      Task t;
      t.user = u.id;
      t.content_id = pick_content(rng);
      t.data_bits = w.content_bits[t.content_id];
      t.deadline_s = cfg.deadline_s.draw(rng);
      t.workload_cpb = cfg.workload_cpb.draw(rng);
      if (cfg.cache_only_fraction > 0.0 && cache_only(rng)) {
        t.deadline_s = 0.0;
        t.workload_cpb = 0.0;
      }
      w.users.push_back(u);
      w.tasks.push_back(t);
    }
  }
  return w;
}


// Constants of the delay and energy model that the source data leaves open.
struct ModelConstants
{
  double nu = 1e-26;                 // CPU energy coefficient
  double waiting_factor = 10.0;      // local waiting time = factor * deadline
  double dc_compute_hz = 0.0;        // 0: ten times the largest station capacity
  double path_loss_exponent = 4.0;
  double reference_distance_m = 1.0;
  bool enforce_deadlines = true;     // restrict routes to those meeting the deadline

  void validate() const
  {
    if (!(nu >= 0.0)) {throw ParameterError("nu must be >= 0");}
    if (!(waiting_factor >= 0.0)) {throw ParameterError("waiting factor must be >= 0");}
    if (!(dc_compute_hz >= 0.0)) {throw ParameterError("DC compute must be >= 0");}
    if (!(path_loss_exponent > 0.0)) {throw ParameterError("path loss exponent must be > 0");}
    if (!(reference_distance_m > 0.0)) {throw ParameterError("reference distance must be > 0");}
  }
};

// Everything the cost model, solver and simulator need about one network:
// stations and their spaces, users with one task each, the content catalog,
// and per-epoch demand.
struct Scenario
{
  std::vector<BaseStation> stations;
  std::vector<CollaborationSpace> spaces;
  std::vector<UserDevice> users;
  std::vector<Task> tasks;
  std::vector<double> content_bits;
  DemandMatrix demand;
  ModelConstants model;
  double eta = 0.0;  // weight of the bandwidth-saving term

  // Derived by finalize().
  std::vector<std::size_t> task_home;                  // station index per task
  std::vector<std::vector<std::size_t>> neighbors;     // X2 neighbors per station, by id
  std::vector<std::vector<std::size_t>> home_tasks;    // tasks homed at each station

  std::size_t station_index(StationId id) const
  {
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (stations[i].id == id) {return i;}
    }
    throw ParameterError("unknown station id " + std::to_string(id));
  }

  double dc_compute_hz() const
  {
    if (model.dc_compute_hz > 0.0) {return model.dc_compute_hz;}
    double best = 0.0;
    for (const auto & bs : stations) {best = std::max(best, bs.compute_hz);}
    return 10.0 * best;
  }

  double x2_capacity(std::size_t m, std::size_t n) const
  {
    const auto & links = stations[m].x2_capacity_bps;
    auto it = links.find(stations[n].id);
    return it == links.end() ? 0.0 : it->second;
  }

  const UserDevice & user_of(std::size_t k) const {return users.at(tasks.at(k).user);}

  // Validates invariants and builds the derived index tables.
  void finalize()
  {
    model.validate();
    validate_stations(stations);
    if (!(eta >= 0.0)) {throw ParameterError("eta must be >= 0");}
    for (const auto & u : users) {validate_user(u);}
    for (const auto & t : tasks) {
      validate_task(t);
      if (t.user >= users.size()) {throw ParameterError("task refers to unknown user");}
      if (t.content_id >= content_bits.size()) {
        throw ParameterError("task refers to unknown content " + std::to_string(t.content_id));
      }
    }
    if (demand.n_stations != stations.size() || demand.n_contents != content_bits.size()) {
      throw ParameterError("demand matrix shape does not match stations x contents");
    }
    for (double r : demand.rates) {
      if (!(r >= 0.0)) {throw ParameterError("demand rates must be >= 0");}
    }
    neighbors.assign(stations.size(), {});
    for (std::size_t m = 0; m < stations.size(); ++m) {
      for (const auto & [nid, cap] : stations[m].x2_capacity_bps) {
        neighbors[m].push_back(station_index(nid));
      }
      std::sort(
        neighbors[m].begin(), neighbors[m].end(),
        [&](std::size_t a, std::size_t b) {return stations[a].id < stations[b].id;});
    }
    task_home.resize(tasks.size());
    home_tasks.assign(stations.size(), {});
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      task_home[k] = station_index(user_of(k).home_bs);
      home_tasks[task_home[k]].push_back(k);
    }
  }
};

}  // namespace mec4c

#endif  // MEC4C_SCENARIO_HPP_
