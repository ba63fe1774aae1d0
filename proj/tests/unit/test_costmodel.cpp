#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "reference.hpp"

using namespace mec4c;

namespace
{

UserDevice user_at(double d, double tx = dbm_to_watts(27.0), double noise = 1e-13)
{
  UserDevice u;
  u.compute_hz = 1e9;
  u.energy_budget_j = 1.0;
  u.tx_power_w = tx;
  u.noise_power_w = noise;
  u.distance_m = d;
  return u;
}

Task task_of(double s, double tau, double z)
{
  Task t;
  t.data_bits = s;
  t.deadline_s = tau;
  t.workload_cpb = z;
  return t;
}

DecisionVector offload_to(const Scenario & sc, std::size_t route, DecisionMode mode = DecisionMode::binary)
{
  auto dv = make_decision(sc, mode);
  for (auto & td : dv.tasks) {
    td.x = 1.0;
    td.y[route] = 1.0;
  }
  return dv;
}

}  // namespace

TEST(Radio, UnitSnrGivesOneBit)
{
  const ModelConstants m;
  EXPECT_DOUBLE_EQ(spectrum_efficiency(user_at(1.0, 1e-13, 1e-13), m), 1.0);
}

TEST(Radio, ZeroSnrGivesZero)
{
  const ModelConstants m;
  EXPECT_DOUBLE_EQ(spectrum_efficiency(user_at(1.0, 0.0, 1e-13), m), 0.0);
}

// log2(1 + 0.501187 * 100^-4 / 1e-13) evaluated independently.
TEST(Radio, PaperPowerAtHundredMetres)
{
  const ModelConstants m;
  EXPECT_NEAR(spectrum_efficiency(user_at(100.0), m), 15.613090831233905, 1e-12);
  EXPECT_NEAR(channel_gain(100.0, m), 1e-8, 1e-22);
}

TEST(Radio, MonotoneInPowerAndDistance)
{
  const ModelConstants m;
  double prev = 0.0;
  for (double tx : {0.01, 0.1, 0.5, 1.0, 2.0}) {
    const double g = spectrum_efficiency(user_at(50.0, tx), m);
    EXPECT_GT(g, prev);
    prev = g;
  }
  prev = 1e9;
  for (double d : {10.0, 20.0, 50.0, 100.0, 200.0}) {
    const double g = spectrum_efficiency(user_at(d), m);
    EXPECT_LT(g, prev);
    prev = g;
  }
}

TEST(Radio, RateIsLinearInSpectrumShare)
{
  EXPECT_DOUBLE_EQ(data_rate(0.0, 0.7, 25e6, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(data_rate(1.0, 1.0, 25e6, 1.0), 25e6);
  EXPECT_DOUBLE_EQ(data_rate(1.0, 0.3, 25e6, 2.0) + data_rate(1.0, 0.2, 25e6, 2.0),
    data_rate(1.0, 0.5, 25e6, 2.0));
}

TEST(Radio, TransmissionDelay)
{
  EXPECT_DOUBLE_EQ(tx_delay(0.0, 25e6, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(tx_delay(1.0, 25e6, 25e6), 1.0);
  EXPECT_THROW(tx_delay(1.0, 10.0, 0.0), InfeasibleRateError);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 1e8);
  for (int i = 0; i < 100; ++i) {
    const double s = u(rng), r = u(rng);
    EXPECT_DOUBLE_EQ(tx_delay(1.0, s, r), s / r);
  }
}

TEST(Links, NoForwardingGivesZero)
{
  const auto sc = fixtures::two_stations(2, 1);
  const auto dv = make_decision(sc, DecisionMode::binary);
  EXPECT_EQ(x2_delay(sc, dv, 0, 1), 0.0);
  EXPECT_EQ(dc_delay(sc, dv, 0), 0.0);
}

TEST(Links, OneTaskAtLinkRateTakesOneSecond)
{
  auto sc = fixtures::two_stations(1, 0);
  sc.tasks[0].data_bits = 20e6;
  sc.content_bits[0] = 20e6;
  sc.finalize();
  const auto dv = offload_to(sc, 1);
  EXPECT_DOUBLE_EQ(x2_delay(sc, dv, 0, 1), 1.0);
}

// Sum of forwarded bits over capacity, recomputed by hand.
TEST(Links, MultiTaskAggregate)
{
  auto sc = fixtures::two_stations(3, 1);
  sc.tasks[0].data_bits = 1e6;
  sc.tasks[1].data_bits = 3e6;
  sc.tasks[2].data_bits = 5e6;
  sc.stations[0].dc_capacity_bps = 4e6;
  sc.finalize();
  auto dv = make_decision(sc, DecisionMode::relaxed);
  dv.tasks[0] = {1.0, {0.0, 1.0, 0.0}, {0.0, 0.0}, 1.0};
  dv.tasks[1] = {0.5, {0.0, 0.4, 0.6}, {0.0, 0.0}, 1.0};
  dv.tasks[2] = {1.0, {0.0, 0.0, 1.0}, {0.0, 0.0}, 1.0};
  EXPECT_NEAR(x2_delay(sc, dv, 0, 1), (1e6 + 0.5 * 0.4 * 3e6) / 20e6, 1e-15);
  EXPECT_NEAR(dc_delay(sc, dv, 0), (0.5 * 0.6 * 3e6 + 5e6) / 4e6, 1e-15);
}

// 1.6e10 * 1e-26 * 500 * (1e9)^2 = 8e4 J.
TEST(Local, EnergyLaw)
{
  const Task t = task_of(1.6e10, 1.0, 500.0);
  UserDevice u = user_at(10.0);
  EXPECT_DOUBLE_EQ(local_energy(task_of(0.0, 0.0, 0.0), u, 1e-26), 0.0);
  EXPECT_NEAR(local_energy(t, u, 1e-26), 8e4, 1e-6);
  const double e1 = local_energy(t, u, 1e-26);
  u.compute_hz *= 2.0;
  EXPECT_NEAR(local_energy(t, u, 1e-26), 4.0 * e1, 1e-6);
}

TEST(Local, LatencyLaw)
{
  UserDevice u = user_at(10.0);
  EXPECT_DOUBLE_EQ(local_latency(task_of(1e9, 1.0, 0.0), u), 0.0);
  EXPECT_DOUBLE_EQ(local_latency(task_of(1e9, 1.0, 500.0), u), 500.0);
  u.compute_hz /= 2.0;
  EXPECT_DOUBLE_EQ(local_latency(task_of(1e9, 1.0, 500.0), u), 1000.0);
}

TEST(Local, DeviceStatus)
{
  const UserDevice u = user_at(10.0);
  EXPECT_EQ(device_status(task_of(10.0, 1.0, 1.0), u, 1e-26, 1e9), 1);
  EXPECT_EQ(device_status(task_of(1e4, 1.0, 500.0), u, 1e-26, 1e-9), 0);
  // l = 1e4 * 500 / 1e9 = 5 ms exactly at the deadline: the check is strict.
  const Task edge = task_of(1e4, 0.005, 500.0);
  ASSERT_EQ(local_latency(edge, u), 0.005);
  EXPECT_EQ(device_status(edge, u, 1e-26, 1.0), 1);
  EXPECT_EQ(device_status(task_of(1e4, 0.0049, 500.0), u, 1e-26, 1.0), 0);
}

TEST(Local, CaseTable)
{
  ModelConstants m;
  m.waiting_factor = 10.0;
  const UserDevice u = user_at(10.0);
  const Task ok = task_of(1e4, 1.0, 500.0);     // alpha = 1
  const Task late = task_of(1e6, 0.1, 500.0);   // l = 0.5 s > 0.1 s, alpha = 0
  ASSERT_EQ(device_status(ok, u, m.nu), 1);
  ASSERT_EQ(device_status(late, u, m.nu), 0);
  EXPECT_DOUBLE_EQ(local_time(ok, u, 0.0, m), local_latency(ok, u));
  EXPECT_DOUBLE_EQ(local_time(late, u, 1.0, m), 0.0);
  EXPECT_DOUBLE_EQ(local_time(late, u, 0.0, m), 0.5 + 10.0 * 0.1);
}

TEST(ComputeShare, Cohorts)
{
  EXPECT_DOUBLE_EQ(compute_share(2e9, 500.0, std::vector<double>{500.0}), 2e9);
  EXPECT_DOUBLE_EQ(compute_share(2e9, 500.0, std::vector<double>{500.0, 500.0}), 1e9);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(400.0, 800.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> z(1 + trial % 9);
    for (auto & v : z) {v = u(rng);}
    double sum = 0.0;
    for (double v : z) {sum += compute_share(2.3e9, v, z);}
    EXPECT_NEAR(sum, 2.3e9, 2.3e9 * 1e-9);
  }
}

TEST(DefaultAllocation, SharesSumWithinCohort)
{
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const auto sc = fixtures::random_scenario(s);
    const auto av = default_allocation(sc);
    std::vector<double> a(sc.stations.size(), 0.0), p(sc.stations.size(), 0.0);
    for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
      a[sc.task_home[k]] += av.a[k];
      p[sc.task_home[k]] += av.p[k][0];
    }
    for (std::size_t m = 0; m < sc.stations.size(); ++m) {
      if (sc.home_tasks[m].empty()) {continue;}
      EXPECT_NEAR(a[m], 1.0, 1e-12);
      bool any_work = false;
      for (std::size_t k : sc.home_tasks[m]) {any_work = any_work || sc.tasks[k].workload_cpb > 0.0;}
      if (any_work) {EXPECT_NEAR(p[m], sc.stations[m].compute_hz, sc.stations[m].compute_hz * 1e-9);}
    }
  }
}

// Bandwidth and server speed chosen so the uplink takes 1 s and execution 2 s.
TEST(Chain, LocalRouteSumsUplinkAndExecution)
{
  fixtures::SingleTask p;
  p.data_bits = 4e4;
  p.workload_cpb = 500.0;
  p.compute_hz = 4e4 * 500.0 / 2.0;
  const double gamma = ref::gamma_of(user_at(p.distance_m), ModelConstants{});
  p.bandwidth_hz = 4e4 / gamma;
  p.deadline_s = 10.0;
  const auto sc = fixtures::single_task(p);
  const auto av = default_allocation(sc);
  const auto d = route_delays(sc, av, 0);
  EXPECT_NEAR(d[0], 3.0, 1e-12);
  EXPECT_NEAR(exec_time_chain(sc, offload_to(sc, 0), av, 0), 3.0, 1e-12);
}

TEST(Chain, DataCenterRouteStructure)
{
  fixtures::SingleTask p;
  p.dc_capacity_bps = 8e6;
  const auto sc = fixtures::single_task(p);
  const auto av = default_allocation(sc);
  const double up = uplink_delay(sc, av, 0);
  const double hop = p.data_bits / p.dc_capacity_bps;
  const double exec = p.data_bits * p.workload_cpb / sc.dc_compute_hz();
  EXPECT_DOUBLE_EQ(sc.dc_compute_hz(), 10.0 * p.compute_hz);
  EXPECT_NEAR(exec_time_chain(sc, offload_to(sc, 1), av, 0), up + hop + exec, 1e-15);
}

TEST(Chain, RelaxedSplitIsConvexCombination)
{
  const auto sc = fixtures::single_task({});
  const auto av = default_allocation(sc);
  auto dv = make_decision(sc);
  dv.tasks[0].x = 1.0;
  dv.tasks[0].y = {0.5, 0.5};
  const auto d = ref::route_delays(sc, 0);
  EXPECT_NEAR(exec_time_chain(sc, dv, av, 0), 0.5 * d[0] + 0.5 * d[1], 1e-15);
}

TEST(Chain, MissingLinkThrowsWhenUsed)
{
  auto sc = fixtures::single_task({});
  sc.stations[0].dc_capacity_bps = 0.0;
  sc.finalize();
  const auto av = default_allocation(sc);
  EXPECT_FALSE(std::isfinite(route_delays(sc, av, 0)[1]));
  EXPECT_THROW(exec_time_chain(sc, offload_to(sc, 1), av, 0), InfeasibleRateError);
}

TEST(TotalDelay, AllLocalAndAllOffloaded)
{
  const auto sc = fixtures::two_stations(2, 2);
  const auto av = default_allocation(sc);
  const auto none = make_decision(sc, DecisionMode::binary);
  double local = 0.0;
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {
    ASSERT_EQ(device_status(sc.tasks[k], sc.user_of(k), sc.model.nu), 1);
    local += local_latency(sc.tasks[k], sc.user_of(k));
  }
  EXPECT_NEAR(total_delay(sc, none, av), local, 1e-15);
  const auto all = offload_to(sc, 0);
  double off = 0.0;
  for (std::size_t k = 0; k < sc.tasks.size(); ++k) {off += route_delays(sc, av, k)[0];}
  EXPECT_NEAR(total_delay(sc, all, av), off, 1e-15);
}

TEST(Saving, ZeroWithoutCaching)
{
  const auto sc = fixtures::random_scenario(4);
  std::mt19937_64 rng(1);
  auto dv = fixtures::random_point(sc, rng);
  for (auto & td : dv.tasks) {std::fill(td.w.begin(), td.w.end(), 0.0);}
  EXPECT_EQ(bandwidth_saving(sc, dv), 0.0);
}

// 2 GB * 3 requests = 6 GB = 4.8e10 bits.
TEST(Saving, OneCachedTask)
{
  fixtures::SingleTask p;
  p.data_bits = 1.6e10;
  p.lambda = 3.0;
  p.cache_bits = 2e10;
  const auto sc = fixtures::single_task(p);
  auto dv = offload_to(sc, 0);
  dv.tasks[0].w[0] = 1.0;
  EXPECT_DOUBLE_EQ(bandwidth_saving(sc, dv), 4.8e10);
}

TEST(Saving, MonotoneInEachCacheEntry)
{
  const auto sc = fixtures::random_scenario(6);
  std::mt19937_64 rng(2);
  auto dv = fixtures::random_point(sc, rng);
  for (std::size_t k = 0; k < dv.tasks.size(); ++k) {
    for (std::size_t r = 0; r < dv.tasks[k].w.size(); ++r) {
      const double before = bandwidth_saving(sc, dv);
      dv.tasks[k].w[r] = std::min(1.0, dv.tasks[k].w[r] + 0.3);
      EXPECT_GE(bandwidth_saving(sc, dv), before);
    }
  }
}

TEST(Objective, EtaZeroOrNoSavingGivesDelay)
{
  const auto sc = fixtures::random_scenario(8);
  const auto pb = build_problem(sc);
  std::mt19937_64 rng(3);
  auto dv = fixtures::random_feasible_point(pb, rng);
  EXPECT_DOUBLE_EQ(objective(sc, dv, pb.alloc, 0.0), total_delay(sc, dv, pb.alloc));
  for (auto & td : dv.tasks) {std::fill(td.w.begin(), td.w.end(), 0.0);}
  EXPECT_DOUBLE_EQ(objective(sc, dv, pb.alloc, 5.0), total_delay(sc, dv, pb.alloc));
}

TEST(Objective, MatchesReferenceEvaluator)
{
  for (std::uint64_t s = 1; s <= 60; ++s) {
    const auto sc = fixtures::random_scenario(s);
    const auto pb = build_problem(sc);
    std::mt19937_64 rng(s);
    for (int i = 0; i < 3; ++i) {
      const auto dv = fixtures::random_feasible_point(pb, rng);
      const double expect = ref::objective(sc, dv, sc.eta);
      const double got = objective(sc, dv, pb.alloc);
      EXPECT_NEAR(got, expect, 1e-9 * std::max(1.0, std::abs(expect))) << "seed " << s;
      EXPECT_NEAR(evaluate(pb, dv), got, 1e-9 * std::max(1.0, std::abs(got)));
    }
  }
}

TEST(Objective, TermsAreNonNegative)
{
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const auto sc = fixtures::random_scenario(s);
    const auto pb = build_problem(sc);
    std::mt19937_64 rng(s + 100);
    const auto dv = fixtures::random_feasible_point(pb, rng);
    for (std::size_t k = 0; k < sc.tasks.size(); ++k) {EXPECT_GE(task_delay(sc, dv, pb.alloc, k), 0.0);}
    for (std::size_t m = 0; m < sc.stations.size(); ++m) {
      EXPECT_GE(dc_delay(sc, dv, m), 0.0);
      for (std::size_t n : sc.neighbors[m]) {EXPECT_GE(x2_delay(sc, dv, m, n), 0.0);}
    }
    EXPECT_GE(bandwidth_saving(sc, dv), 0.0);
  }
}

// Fixing every entry but one, the objective is affine in that entry.
TEST(Objective, MultilinearInEveryEntry)
{
  for (std::uint64_t s = 1; s <= 15; ++s) {
    const auto sc = fixtures::random_scenario(s, fixtures::RandomSpec{4, 12, 5});
    const auto pb = build_problem(sc);
    std::mt19937_64 rng(s);
    const auto base = fixtures::random_feasible_point(pb, rng);
    auto value_at = [&](std::size_t k, int which, std::size_t r, double v) {
        auto dv = base;
        auto & td = dv.tasks[k];
        (which == 0 ? td.x : which == 1 ? td.y[r] : td.w[r]) = v;
        return evaluate(pb, dv);
      };
    for (std::size_t k = 0; k < pb.size(); ++k) {
      for (int which = 0; which < 3; ++which) {
        const std::size_t n = which == 0 ? 1 : which == 1 ? base.tasks[k].y.size() : base.tasks[k].w.size();
        for (std::size_t r = 0; r < n; ++r) {
          if (which > 0 && !pb.terms[k].route_allowed[r]) {continue;}
          const double f0 = value_at(k, which, r, 0.0);
          const double f1 = value_at(k, which, r, 1.0);
          const double fh = value_at(k, which, r, 0.37);
          EXPECT_NEAR(fh, f0 + 0.37 * (f1 - f0), 1e-9 * std::max(1.0, std::abs(fh)));
        }
      }
    }
  }
}

TEST(Objective, RelaxedAtCornerEqualsBinary)
{
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto sc = fixtures::random_scenario(s);
    const auto pb = build_problem(sc);
    auto bin = make_decision(sc, DecisionMode::binary);
    for (std::size_t k = 0; k < pb.size(); ++k) {
      const auto & tt = pb.terms[k];
      if (!tt.any_route()) {continue;}
      bin.tasks[k].x = tt.x_hi;
      for (std::size_t r = 0; r < tt.routes(); ++r) {
        if (tt.route_allowed[r]) {
          bin.tasks[k].y[r] = 1.0;
          if (r < bin.tasks[k].w.size()) {bin.tasks[k].w[r] = 1.0;}
          break;
        }
      }
    }
    auto rel = bin;
    rel.mode = DecisionMode::relaxed;
    EXPECT_DOUBLE_EQ(objective(sc, rel, pb.alloc), objective(sc, bin, pb.alloc));
    EXPECT_DOUBLE_EQ(evaluate(pb, rel), evaluate(pb, bin));
  }
}

TEST(Residuals, ZeroDecisionIsFeasible)
{
  const auto sc = fixtures::random_scenario(9);
  const auto av = default_allocation(sc);
  const auto res = constraint_residuals(sc, make_decision(sc, DecisionMode::binary), av);
  for (double v : res.spectrum) {EXPECT_LE(v, 0.0);}
  for (double v : res.compute) {EXPECT_LE(v, 0.0);}
  for (double v : res.cache) {EXPECT_LE(v, 0.0);}
  for (double v : res.routing) {EXPECT_EQ(v, 0.0);}
  EXPECT_TRUE(res.satisfied());
}

// Two tasks each granted the whole server: load 2 P against capacity P.
TEST(Residuals, OverloadedStationExcess)
{
  const auto sc = fixtures::two_stations(2, 0, 2e9);
  auto av = default_allocation(sc);
  av.p[0][0] = 2e9;
  av.p[1][0] = 2e9;
  const auto res = constraint_residuals(sc, offload_to(sc, 0), av);
  EXPECT_DOUBLE_EQ(res.compute[0], 2e9);
  EXPECT_DOUBLE_EQ(res.compute[1], -2e9);
  EXPECT_FALSE(res.satisfied());
}

TEST(Residuals, BinaryOneRouteHasZeroRouting)
{
  const auto sc = fixtures::two_stations(2, 1);
  const auto av = default_allocation(sc);
  const auto res = constraint_residuals(sc, offload_to(sc, 1), av);
  for (double v : res.routing) {EXPECT_EQ(v, 0.0);}
  for (double v : res.dominance) {EXPECT_LE(v, 0.0);}
  auto two = offload_to(sc, 1);
  two.tasks[0].y[0] = 1.0;
  EXPECT_DOUBLE_EQ(constraint_residuals(sc, two, av).routing[0], 1.0);
}

TEST(Problem, DeadlineMaskAndBounds)
{
  fixtures::SingleTask p;
  p.deadline_s = 1e-6;           // nothing meets it
  p.enforce_deadlines = true;
  const auto pb = build_problem(fixtures::single_task(p));
  const auto & tt = pb.terms[0];
  EXPECT_EQ(tt.alpha, 0);
  EXPECT_FALSE(tt.admitted);
  EXPECT_TRUE(tt.any_route());   // unadmitted tasks may use any live route
  EXPECT_EQ(tt.x_lo, 1.0);

  fixtures::SingleTask q;
  q.deadline_s = 1.0;
  const auto pb2 = build_problem(fixtures::single_task(q));
  EXPECT_TRUE(pb2.terms[0].admitted);
  EXPECT_EQ(pb2.terms[0].x_lo, 0.0);
  EXPECT_EQ(pb2.terms[0].x_hi, 1.0);
}

TEST(Problem, OwnsItsScenarioCopy)
{
  Problem pb;
  {
    const auto sc = fixtures::random_scenario(2);
    pb = build_problem(sc);
  }
  EXPECT_EQ(pb.scenario->tasks.size(), pb.size());
  EXPECT_NO_THROW(evaluate(pb, make_decision(*pb.scenario)));
}
