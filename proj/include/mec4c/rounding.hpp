#ifndef MEC4C_ROUNDING_HPP_
#define MEC4C_ROUNDING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "mec4c/costmodel.hpp"
#include "mec4c/decision.hpp"
#include "mec4c/errors.hpp"
#include "mec4c/solver.hpp"

namespace mec4c
{

inline constexpr double kDefaultTheta = 0.7;
inline constexpr double kDefaultXi = 0.14285;

struct ViolationReport
{
  double delta_a = 0.0;  // spectrum (fraction)
  double delta_p = 0.0;  // compute (cycles/s)
  double delta_m = 0.0;  // cache (bits)
  double xi = kDefaultXi;

  double delta_total() const {return delta_a + delta_p + delta_m;}
  double penalty() const {return xi * delta_total();}
};

namespace detail
{

// Preference between two routes of one task: larger relaxed value, then lower
// modeled delay, then lower station id with the DC last.
inline bool route_before(const Scenario & sc, const TaskTerms & tt, const TaskDecision & rel, std::size_t a, std::size_t b)
{
  if (rel.y[a] != rel.y[b]) {return rel.y[a] > rel.y[b];}
  if (tt.route_delay[a] != tt.route_delay[b]) {return tt.route_delay[a] < tt.route_delay[b];}
  auto id = [&](std::size_t r) {
      return tt.route_bs[r] == kDataCenter ? std::numeric_limits<StationId>::max()
                                           : sc.stations[tt.route_bs[r]].id;
    };
  return id(a) < id(b);
}

}  // namespace detail

// Rounds every entry at theta and repairs each task so it runs in exactly one
// place and caches only where it runs.
inline DecisionVector threshold_round(const DecisionVector & relaxed, double theta, const Problem & pb)
{
  if (!(theta > 0.0 && theta < 1.0)) {throw ParameterError("rounding threshold must lie in (0,1)");}
  const Scenario & sc = *pb.scenario;
  check_shape(sc, relaxed);
  DecisionVector out = make_decision(sc, DecisionMode::binary);
  for (std::size_t k = 0; k < pb.size(); ++k) {
    const TaskTerms & tt = pb.terms[k];
    const TaskDecision & rel = relaxed.tasks[k];
    TaskDecision & td = out.tasks[k];
    td.x = rel.x >= theta ? 1.0 : 0.0;
    td.x = std::clamp(td.x, tt.x_lo, tt.x_hi);
    if (td.x == 0.0) {
      sync_w_dc(td);
      continue;
    }
    std::optional<std::size_t> above, any;
    for (std::size_t r = 0; r < tt.routes(); ++r) {
      if (!tt.route_allowed[r]) {continue;}
      if (!any || detail::route_before(sc, tt, rel, r, *any)) {any = r;}
      if (rel.y[r] >= theta && (!above || detail::route_before(sc, tt, rel, r, *above))) {above = r;}
    }
    if (!any) {
      // x_hi > 0 implies an allowed route; guard anyway.
      td.x = 0.0;
      sync_w_dc(td);
      continue;
    }
    const std::size_t chosen = above ? *above : *any;
    td.y[chosen] = 1.0;
    if (chosen < td.w.size() && rel.w[chosen] >= theta) {td.w[chosen] = 1.0;}
    sync_w_dc(td);
  }
  return out;
}

inline ViolationReport violations(
  const DecisionVector & dv, const AllocationView & av, const Scenario & sc, double xi = kDefaultXi)
{
  check_shape(sc, dv);
  const auto loads = station_loads(sc, dv, av);
  ViolationReport vr;
  vr.xi = xi;
  for (std::size_t m = 0; m < sc.stations.size(); ++m) {
    vr.delta_a += capacity_excess(loads.spectrum[m], 1.0);
    vr.delta_p += capacity_excess(loads.compute[m], sc.stations[m].compute_hz);
    vr.delta_m += capacity_excess(loads.cache[m], sc.stations[m].cache_bits);
  }
  return vr;
}

// One binary choice for a task: local (route = none) or a route with or
// without caching at the serving station.
struct TaskOption
{
  bool offload = false;
  std::size_t route = 0;
  bool cache = false;
};

inline std::vector<TaskOption> task_options(const TaskTerms & tt)
{
  std::vector<TaskOption> opts;
  if (tt.x_lo == 0.0) {opts.push_back({false, 0, false});}
  if (tt.x_hi == 0.0) {return opts;}
  for (std::size_t r = 0; r < tt.routes(); ++r) {
    if (!tt.route_allowed[r]) {continue;}
    opts.push_back({true, r, false});
    if (tt.route_bs[r] != kDataCenter) {opts.push_back({true, r, true});}
  }
  return opts;
}

inline TaskOption option_of(const TaskDecision & td)
{
  TaskOption o;
  if (td.x == 0.0) {return o;}
  o.offload = true;
  for (std::size_t r = 0; r < td.y.size(); ++r) {
    if (td.y[r] == 1.0) {o.route = r;}
  }
  o.cache = o.route < td.w.size() && td.w[o.route] == 1.0;
  return o;
}

inline void apply_option(const TaskOption & o, TaskDecision & td)
{
  td.x = o.offload ? 1.0 : 0.0;
  std::fill(td.y.begin(), td.y.end(), 0.0);
  std::fill(td.w.begin(), td.w.end(), 0.0);
  if (o.offload) {
    td.y[o.route] = 1.0;
    if (o.cache) {td.w[o.route] = 1.0;}
  }
  sync_w_dc(td);
}

inline double option_value(const TaskTerms & tt, double eta, const TaskOption & o)
{
  if (!o.offload) {return tt.local_cost;}
  return tt.route_delay[o.route] - (o.cache ? eta * tt.reward : 0.0);
}

namespace detail
{

// Per-station loads of a binary decision with incremental updates.
struct LoadBook
{
  const Problem * pb;
  std::vector<double> spectrum, compute, cache;

  explicit LoadBook(const Problem & p)
  : pb(&p), spectrum(p.scenario->stations.size(), 0.0), compute(spectrum), cache(spectrum) {}

  void add(std::size_t k, const TaskOption & o, double sign)
  {
    if (!o.offload) {return;}
    const TaskTerms & tt = pb->terms[k];
    spectrum[tt.home] += sign * pb->alloc.a[k];
    if (o.route == 0) {compute[tt.home] += sign * pb->alloc.p[k][0];}
    if (o.cache) {cache[tt.route_bs[o.route]] += sign * pb->alloc.c[k];}
  }

  double station_excess(std::size_t m) const
  {
    const auto & st = pb->scenario->stations[m];
    return capacity_excess(spectrum[m], 1.0) + capacity_excess(compute[m], st.compute_hz) +
           capacity_excess(cache[m], st.cache_bits);
  }
};

}  // namespace detail

// Steepest-descent local search on B + xi * Delta. Single-task option
// changes first; when none helps, the first improving joint change of two
// tasks that share a station (a swap of cache slots, say). Tasks with no station in
// common add their gains, so other pairs cannot help either. Returns the
// input untouched when nothing is violated.
inline DecisionVector penalized_resolve(const DecisionVector & binary, const Problem & pb, double xi = kDefaultXi)
{
  const Scenario & sc = *pb.scenario;
  if (violations(binary, pb.alloc, sc, xi).delta_total() == 0.0) {return binary;}

  DecisionVector dv = binary;
  std::vector<TaskOption> current(pb.size());
  std::vector<std::vector<TaskOption>> options(pb.size());
  detail::LoadBook book(pb);
  for (std::size_t k = 0; k < pb.size(); ++k) {
    current[k] = option_of(dv.tasks[k]);
    options[k] = task_options(pb.terms[k]);
    book.add(k, current[k], 1.0);
  }

  // Stations whose load a task can change under any of its options.
  std::vector<std::vector<std::size_t>> reach(pb.size());
  for (std::size_t k = 0; k < pb.size(); ++k) {
    reach[k].push_back(pb.terms[k].home);
    for (const auto & o : options[k]) {
      if (o.offload && o.cache) {reach[k].push_back(pb.terms[k].route_bs[o.route]);}
    }
    std::sort(reach[k].begin(), reach[k].end());
    reach[k].erase(std::unique(reach[k].begin(), reach[k].end()), reach[k].end());
  }
  // Pairs are only tried around stations overloaded by the rounding.
  std::vector<char> hot(sc.stations.size(), 0);
  for (std::size_t m = 0; m < sc.stations.size(); ++m) {hot[m] = book.station_excess(m) > 0.0;}
  auto share = [&](std::size_t a, std::size_t b) {
      const auto & ra = reach[a];
      const auto & rb = reach[b];
      std::size_t i = 0, j = 0;
      while (i < ra.size() && j < rb.size()) {
        if (ra[i] == rb[j] && hot[ra[i]]) {return true;}
        ra[i] < rb[j] ? ++i : (ra[i] > rb[j] ? ++j : (++i, ++j));
      }
      return false;
    };

  struct Move { std::size_t k; TaskOption o; };
  // Gain of applying the moves together; loads are restored afterwards.
  std::vector<std::size_t> st;
  auto gain_of = [&](const Move * moves, std::size_t n) {
      st.clear();
      double value = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = moves[i].k;
        st.insert(st.end(), reach[k].begin(), reach[k].end());
        value += option_value(pb.terms[k], pb.eta, current[k]) - option_value(pb.terms[k], pb.eta, moves[i].o);
      }
      std::sort(st.begin(), st.end());
      st.erase(std::unique(st.begin(), st.end()), st.end());
      double before = 0.0, after = 0.0;
      for (std::size_t m : st) {before += book.station_excess(m);}
      for (std::size_t i = 0; i < n; ++i) {
        book.add(moves[i].k, current[moves[i].k], -1.0);
        book.add(moves[i].k, moves[i].o, 1.0);
      }
      for (std::size_t m : st) {after += book.station_excess(m);}
      for (std::size_t i = n; i-- > 0;) {
        book.add(moves[i].k, moves[i].o, -1.0);
        book.add(moves[i].k, current[moves[i].k], 1.0);
      }
      const double g = value + xi * (before - after);
      const double tol = 1e-12 * std::max(1.0, std::abs(value) + xi * before);
      return std::pair{g, tol};
    };
  auto commit = [&](const Move & mv) {
      book.add(mv.k, current[mv.k], -1.0);
      book.add(mv.k, mv.o, 1.0);
      current[mv.k] = mv.o;
      apply_option(mv.o, dv.tasks[mv.k]);
    };

  for (;;) {
    double best_gain = 0.0;
    Move best{0, {}};
    for (std::size_t k = 0; k < pb.size(); ++k) {
      for (const auto & o : options[k]) {
        const Move mv{k, o};
        const auto [g, tol] = gain_of(&mv, 1);
        if (g > best_gain + tol) {
          best_gain = g;
          best = mv;
        }
      }
    }
    if (best_gain > 0.0) {
      commit(best);
      continue;
    }
    // First improving pair wins; single moves resume right after. Options
    // equal to the current one are skipped: those pairs are single moves.
    auto same = [](const TaskOption & x, const TaskOption & y) {
        return x.offload == y.offload && (!x.offload || (x.route == y.route && x.cache == y.cache));
      };
    Move pair[2]{};
    bool found = false;
    for (std::size_t a = 0; a < pb.size() && !found; ++a) {
      for (std::size_t b = a + 1; b < pb.size() && !found; ++b) {
        if (!share(a, b)) {continue;}
        st.assign(reach[a].begin(), reach[a].end());
        st.insert(st.end(), reach[b].begin(), reach[b].end());
        std::sort(st.begin(), st.end());
        st.erase(std::unique(st.begin(), st.end()), st.end());
        double before = 0.0;
        for (std::size_t m : st) {before += book.station_excess(m);}
        const double cur_a = option_value(pb.terms[a], pb.eta, current[a]);
        const double cur_b = option_value(pb.terms[b], pb.eta, current[b]);
        for (const auto & oa : options[a]) {
          if (found) {break;}
          if (same(oa, current[a])) {continue;}
          const double va = cur_a - option_value(pb.terms[a], pb.eta, oa);
          book.add(a, current[a], -1.0);
          book.add(a, oa, 1.0);
          for (const auto & ob : options[b]) {
            if (same(ob, current[b])) {continue;}
            const double value = va + cur_b - option_value(pb.terms[b], pb.eta, ob);
            book.add(b, current[b], -1.0);
            book.add(b, ob, 1.0);
            double after = 0.0;
            for (std::size_t m : st) {after += book.station_excess(m);}
            book.add(b, ob, -1.0);
            book.add(b, current[b], 1.0);
            const double g = value + xi * (before - after);
            if (g > 1e-12 * std::max(1.0, std::abs(value) + xi * before)) {
              pair[0] = {a, oa};
              pair[1] = {b, ob};
              found = true;
              break;
            }
          }
          book.add(a, oa, -1.0);
          book.add(a, current[a], 1.0);
        }
      }
    }
    if (!found) {break;}
    commit(pair[0]);
    commit(pair[1]);
  }
  return dv;
}

struct GapReport
{
  double relaxed = 0.0;           // relaxed objective
  double rounded = 0.0;           // rounded objective without penalty
  double penalty = 0.0;           // xi * Delta
  std::optional<double> beta;     // empty when the ratio is undefined
};

// Ratio of the relaxed objective to the penalized rounded one.
inline GapReport integrality_gap(double relaxed_obj, double rounded_obj, double penalty = 0.0)
{
  GapReport g{relaxed_obj, rounded_obj, penalty, std::nullopt};
  const double denom = rounded_obj + penalty;
  if (penalty == 0.0 &&
    std::abs(relaxed_obj - rounded_obj) <= 1e-9 * std::max(1.0, std::abs(relaxed_obj)))
  {
    g.beta = 1.0;
    return g;
  }
  if (!(denom > 0.0)) {return g;}
  g.beta = relaxed_obj / denom;
  return g;
}

}  // namespace mec4c

#endif  // MEC4C_ROUNDING_HPP_
