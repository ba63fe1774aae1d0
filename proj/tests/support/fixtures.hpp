// Hand-rolled scenario generators shared by the unit and acceptance suites.
#ifndef MEC4C_TESTS_FIXTURES_HPP_
#define MEC4C_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mec4c/mec4c.hpp"

namespace fixtures
{

using mec4c::Rng;

struct RandomSpec
{
  std::size_t max_stations = 12;
  std::size_t max_tasks = 120;
  std::size_t max_contents = 20;
  double link_probability = 0.5;
  double cache_only_probability = 0.1;
  bool allow_zero_eta = true;
};

inline RandomSpec tiny_spec()
{
  RandomSpec s;
  s.max_stations = 3;
  s.max_tasks = 5;
  s.max_contents = 4;
  s.link_probability = 0.7;
  return s;
}

inline double uniform(Rng & rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng & rng, std::size_t lo, std::size_t hi)
{
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Kilobyte-scale tasks on paper-like radio and compute ranges. Cache sizes hold
// one to three items so capacity constraints bind now and then.
inline mec4c::Scenario random_scenario(std::uint64_t seed, const RandomSpec & spec = {})
{
  Rng rng(seed);
  mec4c::Scenario sc;
  const std::size_t n_st = pick(rng, 1, spec.max_stations);
  const std::size_t n_c = pick(rng, 1, spec.max_contents);
  sc.content_bits.resize(n_c);
  for (auto & b : sc.content_bits) {b = std::round(uniform(rng, 2e3, 7e3)) * 8.0;}
  const double mean_bits = 4.5e3 * 8.0;

  for (std::size_t i = 0; i < n_st; ++i) {
    mec4c::BaseStation bs;
    bs.id = static_cast<mec4c::StationId>(10 + 3 * i);
    bs.position = {uniform(rng, 0.0, 1000.0), uniform(rng, 0.0, 1000.0)};
    bs.bandwidth_hz = uniform(rng, 25e6, 32e6);
    bs.compute_hz = uniform(rng, 2e9, 2.5e9);
    bs.cache_bits = uniform(rng, 0.5, 3.0) * mean_bits;
    bs.dc_capacity_bps = uniform(rng, 50e6, 120e6);
    sc.stations.push_back(bs);
  }
  std::bernoulli_distribution link(spec.link_probability);
  for (std::size_t i = 0; i < n_st; ++i) {
    for (std::size_t j = i + 1; j < n_st; ++j) {
      if (!link(rng)) {continue;}
      const double cap = uniform(rng, 20e6, 25e6);
      sc.stations[i].x2_capacity_bps[sc.stations[j].id] = cap;
      sc.stations[j].x2_capacity_bps[sc.stations[i].id] = cap;
    }
  }
  // One space per station: itself and its X2 neighbors.
  for (const auto & bs : sc.stations) {
    mec4c::CollaborationSpace sp;
    sp.member_ids.push_back(bs.id);
    for (const auto & [n, cap] : bs.x2_capacity_bps) {sp.member_ids.push_back(n);}
    std::sort(sp.member_ids.begin(), sp.member_ids.end());
    sp.centroid = bs.position;
    sc.spaces.push_back(sp);
  }

  const std::size_t n_tasks = pick(rng, 1, spec.max_tasks);
  std::bernoulli_distribution cache_only(spec.cache_only_probability);
  for (std::size_t k = 0; k < n_tasks; ++k) {
    mec4c::UserDevice u;
    u.id = k;
    u.home_bs = sc.stations[pick(rng, 0, n_st - 1)].id;
    u.compute_hz = uniform(rng, 0.5e9, 1e9);
    u.energy_budget_j = uniform(rng, 0.1, 1.0);
    u.tx_power_w = mec4c::dbm_to_watts(27.0);
    u.noise_power_w = 1e-13;
    u.distance_m = uniform(rng, 10.0, 200.0);
    mec4c::Task t;
    t.user = k;
    t.content_id = pick(rng, 0, n_c - 1);
    t.data_bits = sc.content_bits[t.content_id];
    t.deadline_s = uniform(rng, 0.02, 0.3);
    t.workload_cpb = uniform(rng, 452.5, 737.5);
    if (cache_only(rng)) {
      t.deadline_s = 0.0;
      t.workload_cpb = 0.0;
    }
    sc.users.push_back(u);
    sc.tasks.push_back(t);
  }
  sc.demand = mec4c::DemandMatrix(n_st, n_c, 1.0);
  for (auto & r : sc.demand.rates) {r = static_cast<double>(pick(rng, 0, 20));}

  // eta on the scale where saving and delay compete, sometimes zero.
  const double base = 1.0 / (mean_bits * 10.0);
  const double roll = uniform(rng, 0.0, 1.0);
  sc.eta = spec.allow_zero_eta && roll < 0.25 ? 0.0 : base * uniform(rng, 0.05, 3.0);
  sc.finalize();
  return sc;
}

// Random relaxed point inside the box, with y on the simplex over all routes.
inline mec4c::DecisionVector random_point(const mec4c::Scenario & sc, Rng & rng)
{
  auto dv = mec4c::make_decision(sc, mec4c::DecisionMode::relaxed);
  for (auto & td : dv.tasks) {
    td.x = uniform(rng, 0.0, 1.0);
    double s = 0.0;
    for (auto & v : td.y) {
      v = -std::log(uniform(rng, 1e-12, 1.0));
      s += v;
    }
    for (auto & v : td.y) {v /= s;}
    for (auto & v : td.w) {v = uniform(rng, 0.0, 1.0);}
    mec4c::sync_w_dc(td);
  }
  return dv;
}

// Random point restricted to what the problem allows (zero y on disallowed
// routes, x within its bounds).
inline mec4c::DecisionVector random_feasible_point(const mec4c::Problem & pb, Rng & rng)
{
  auto dv = random_point(*pb.scenario, rng);
  for (std::size_t k = 0; k < pb.size(); ++k) {
    const auto & tt = pb.terms[k];
    auto & td = dv.tasks[k];
    td.x = tt.x_lo + (tt.x_hi - tt.x_lo) * td.x;
    double s = 0.0;
    for (std::size_t r = 0; r < td.y.size(); ++r) {
      if (!tt.route_allowed[r]) {td.y[r] = 0.0;}
      s += td.y[r];
    }
    for (auto & v : td.y) {v = s > 0.0 ? v / s : 0.0;}
    for (std::size_t r = 0; r < td.w.size(); ++r) {
      if (!tt.route_allowed[r]) {td.w[r] = 0.0;}
    }
    mec4c::sync_w_dc(td);
  }
  return dv;
}

// One station, one user, one task; every parameter explicit.
struct SingleTask
{
  double bandwidth_hz = 25e6;
  double compute_hz = 2e9;
  double cache_bits = 1e6;
  double dc_capacity_bps = 100e6;
  double user_compute_hz = 1e9;
  double energy_budget_j = 1.0;
  double distance_m = 100.0;
  double data_bits = 4e4;
  double deadline_s = 1.0;
  double workload_cpb = 500.0;
  double lambda = 3.0;
  double eta = 0.0;
  bool enforce_deadlines = true;
};

inline mec4c::Scenario single_task(const SingleTask & p)
{
  mec4c::Scenario sc;
  mec4c::BaseStation bs;
  bs.id = 1;
  bs.bandwidth_hz = p.bandwidth_hz;
  bs.compute_hz = p.compute_hz;
  bs.cache_bits = p.cache_bits;
  bs.dc_capacity_bps = p.dc_capacity_bps;
  sc.stations.push_back(bs);
  sc.spaces.push_back({{1}, {0.0, 0.0}});
  mec4c::UserDevice u;
  u.home_bs = 1;
  u.compute_hz = p.user_compute_hz;
  u.energy_budget_j = p.energy_budget_j;
  u.tx_power_w = mec4c::dbm_to_watts(27.0);
  u.noise_power_w = 1e-13;
  u.distance_m = p.distance_m;
  sc.users.push_back(u);
  mec4c::Task t;
  t.data_bits = p.data_bits;
  t.deadline_s = p.deadline_s;
  t.workload_cpb = p.workload_cpb;
  sc.tasks.push_back(t);
  sc.content_bits = {p.data_bits};
  sc.demand = mec4c::DemandMatrix(1, 1, 1.0);
  sc.demand.rate(0, 0) = p.lambda;
  sc.eta = p.eta;
  sc.model.enforce_deadlines = p.enforce_deadlines;
  sc.finalize();
  return sc;
}

// Two linked stations; `tasks_at_first` tasks homed at station 1 and
// `tasks_at_second` at station 2, all identical.
inline mec4c::Scenario two_stations(std::size_t tasks_at_first, std::size_t tasks_at_second, double compute_hz = 2e9)
{
  mec4c::Scenario sc;
  for (mec4c::StationId id : {1, 2}) {
    mec4c::BaseStation bs;
    bs.id = id;
    bs.position = {id == 1 ? 0.0 : 300.0, 0.0};
    bs.bandwidth_hz = 25e6;
    bs.compute_hz = compute_hz;
    bs.cache_bits = 1e6;
    bs.dc_capacity_bps = 100e6;
    bs.x2_capacity_bps[id == 1 ? 2 : 1] = 20e6;
    sc.stations.push_back(bs);
  }
  sc.spaces.push_back({{1, 2}, {150.0, 0.0}});
  const std::size_t n = tasks_at_first + tasks_at_second;
  for (std::size_t k = 0; k < n; ++k) {
    mec4c::UserDevice u;
    u.id = k;
    u.home_bs = k < tasks_at_first ? 1 : 2;
    u.compute_hz = 1e9;
    u.energy_budget_j = 1.0;
    u.tx_power_w = mec4c::dbm_to_watts(27.0);
    u.noise_power_w = 1e-13;
    u.distance_m = 100.0;
    sc.users.push_back(u);
    mec4c::Task t;
    t.user = k;
    t.data_bits = 4e4;
    t.deadline_s = 1.0;
    t.workload_cpb = 500.0;
    t.content_id = 0;
    sc.tasks.push_back(t);
  }
  sc.content_bits = {4e4};
  sc.demand = mec4c::DemandMatrix(2, 1, 1.0);
  sc.finalize();
  return sc;
}

}  // namespace fixtures

#endif  // MEC4C_TESTS_FIXTURES_HPP_
